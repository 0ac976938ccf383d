#include "lgallee/plane.hpp"

#include <algorithm>

#include "lgallee/errors.hpp"

namespace lgallee {

Mat2 Mat2::inverse() const {
  const double d = det();
  if (d == 0.0 || !std::isfinite(d)) {
    throw DomainError("singular 2x2 matrix");
  }
  return {a22 / d, -a12 / d, -a21 / d, a11 / d};
}

double Mat2::max_abs() const {
  return std::max({std::abs(a11), std::abs(a12), std::abs(a21), std::abs(a22)});
}

EigenPair eigenvalues(const Mat2& m) {
  // Half-trace form; the discriminant is computed from the entries directly so
  // that diagonal matrices give exact results.
  const double half_tr = 0.5 * m.trace();
  const double half_diff = 0.5 * (m.a11 - m.a22);
  const double disc = half_diff * half_diff + m.a12 * m.a21;
  EigenPair ev;
  if (disc >= 0.0) {
    const double r = std::sqrt(disc);
    // Avoid cancellation in the smaller-magnitude root.
    const double big = half_tr >= 0.0 ? half_tr + r : half_tr - r;
    const double small = big != 0.0 ? m.det() / big : half_tr - r;
    ev = {std::complex<double>(std::min(big, small), 0.0), std::complex<double>(std::max(big, small), 0.0)};
  } else {
    const double im = std::sqrt(-disc);
    ev = {std::complex<double>(half_tr, -im), std::complex<double>(half_tr, im)};
  }
  return ev;
}

State eigenvector(const Mat2& m, double lambda) {
  // Rows of (m - lambda I); pick the better-conditioned one.
  const State r1{m.a11 - lambda, m.a12};
  const State r2{m.a21, m.a22 - lambda};
  const State row = norm(r1) >= norm(r2) ? r1 : r2;
  State v = norm(row) == 0.0 ? State{1.0, 0.0} : State{-row.v, row.u};
  return (1.0 / norm(v)) * v;
}

} // namespace lgallee
