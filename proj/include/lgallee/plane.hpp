#pragma once

#include <array>
#include <cmath>
#include <complex>

namespace lgallee {

/// Point or tangent vector in the scaled (u, v) plane.
struct State {
  double u = 0.0;
  double v = 0.0;

  friend constexpr State operator+(State a, State b) { return {a.u + b.u, a.v + b.v}; }
  friend constexpr State operator-(State a, State b) { return {a.u - b.u, a.v - b.v}; }
  friend constexpr State operator*(double s, State a) { return {s * a.u, s * a.v}; }
  friend constexpr State operator*(State a, double s) { return {s * a.u, s * a.v}; }
  friend constexpr bool operator==(State, State) = default;
};

inline double norm(State a) { return std::hypot(a.u, a.v); }
inline double distance(State a, State b) { return norm(a - b); }
inline bool is_finite(State a) { return std::isfinite(a.u) && std::isfinite(a.v); }

/// Row-major 2x2 matrix.
struct Mat2 {
  double a11 = 0.0, a12 = 0.0;
  double a21 = 0.0, a22 = 0.0;

  constexpr double det() const { return a11 * a22 - a12 * a21; }
  constexpr double trace() const { return a11 + a22; }
  constexpr State operator*(State x) const { return {a11 * x.u + a12 * x.v, a21 * x.u + a22 * x.v}; }
  constexpr Mat2 operator*(const Mat2& b) const {
    return {a11 * b.a11 + a12 * b.a21, a11 * b.a12 + a12 * b.a22,
            a21 * b.a11 + a22 * b.a21, a21 * b.a12 + a22 * b.a22};
  }
  Mat2 inverse() const;
  double max_abs() const;
};

using EigenPair = std::array<std::complex<double>, 2>;

/// Eigenvalues ordered by ascending real part, then imaginary part.
EigenPair eigenvalues(const Mat2& m);

/// Unit eigenvector of m for the real eigenvalue lambda.
State eigenvector(const Mat2& m, double lambda);

} // namespace lgallee
