#include "lgallee/model.hpp"

#include <cmath>
#include <sstream>

#include "lgallee/errors.hpp"

namespace lgallee {

namespace {

void require_finite(double value, const char* name) {
  if (!std::isfinite(value)) {
    throw ValidationError(std::string(name) + " must be finite");
  }
}

void require_positive(double value, const char* name) {
  require_finite(value, name);
  if (!(value > 0.0)) {
    throw ValidationError(std::string(name) + " must be > 0");
  }
}

} // namespace

void validate_shape(double A, double M) {
  require_finite(A, "A");
  require_finite(M, "M");
  if (!(A > 0.0 && A < 1.0)) {
    throw ValidationError("A must lie in (0,1)");
  }
}

ModelParams ModelParams::make(double A, double M, double Q, double S) {
  validate_shape(A, M);
  require_positive(Q, "Q");
  require_positive(S, "S");
  return ModelParams(A, M, Q, S);
}

std::optional<std::string> ModelParams::scope_warning() const {
  if (!outside_weak_allee_scope()) {
    return std::nullopt;
  }
  std::ostringstream os;
  os << "M = " << M_ << " >= 0 is outside the weak-Allee scope; results are exploratory";
  return os.str();
}

void DimensionalParams::validate() const {
  require_positive(r, "r");
  require_positive(K, "K");
  require_positive(q, "q");
  require_positive(a, "a");
  require_positive(s, "s");
  require_positive(h, "h");
  require_finite(m, "m");
  const double A = a / K;
  if (!(A > 0.0 && A < 1.0)) {
    throw ValidationError("A = a/K must lie in (0,1)");
  }
}

double prey_growth(double u, double A, double M) { return (u + A) * (1.0 - u) * (u - M); }

double prey_growth_du(double u, double A, double M) {
  // d/du of -(u^3) + (1 - A + M) u^2 + (A - M + AM) u - AM
  const double T = 1.0 - A + M;
  return -3.0 * u * u + 2.0 * T * u + (A - M + A * M);
}

double prey_growth_du2(double u, double A, double M) { return 2.0 * (1.0 - A + M) - 6.0 * u; }

State vector_field_unchecked(State x, const ModelParams& p) noexcept {
  const double u = x.u;
  const double v = x.v;
  return {u * u * (prey_growth(u, p.A(), p.M()) - p.Q() * v), p.S() * (u + p.A()) * (u - v) * v};
}

State vector_field(State x, const ModelParams& p) {
  if (!is_finite(x)) {
    throw DomainError("vector_field: non-finite state");
  }
  return vector_field_unchecked(x, p);
}

Mat2 jacobian(State x, const ModelParams& p) {
  if (!is_finite(x)) {
    throw DomainError("jacobian: non-finite state");
  }
  const double u = x.u;
  const double v = x.v;
  const double A = p.A();
  const double M = p.M();
  const double Q = p.Q();
  const double S = p.S();
  const double j11 = 4.0 * A * u * u - 4.0 * M * u * u + 2.0 * A * M - 3.0 * A * u + 3.0 * M * u + 2.0 * Q * v -
                     4.0 * u * u + 5.0 * u * u * u - 3.0 * A * M * u;
  return {-u * j11, -Q * u * u, S * v * (A + 2.0 * u - v), S * (u - 2.0 * v) * (A + u)};
}

std::pair<double, double> dimensional_vector_field(DimensionalState st, const DimensionalParams& dp) {
  if (!std::isfinite(st.N) || !std::isfinite(st.P)) {
    throw DomainError("dimensional_vector_field: non-finite state");
  }
  if (!(st.N > 0.0)) {
    throw SingularityError("dimensional system is singular for N <= 0 (P/(hN) undefined)");
  }
  const double N = st.N;
  const double P = st.P;
  const double W = dp.r * (1.0 - N / dp.K) * (N - dp.m) - dp.q * P / (N + dp.a);
  const double R = dp.s * (1.0 - P / (dp.h * N));
  return {N * W, P * R};
}

ModelParams nondimensionalize(const DimensionalParams& dp) {
  dp.validate();
  const double rK = dp.r * dp.K;
  return ModelParams::make(dp.a / dp.K, dp.m / dp.K, dp.h * dp.q / rK, dp.s / rK);
}

std::pair<ModelParams, State> nondimensionalize(const DimensionalParams& dp, DimensionalState st) {
  const ModelParams p = nondimensionalize(dp);
  return {p, State{st.N / dp.K, st.P / (dp.h * dp.K)}};
}

std::pair<DimensionalParams, DimensionalState> dimensionalize(const ModelParams& p, State x, Scales sc) {
  require_positive(sc.r, "r");
  require_positive(sc.K, "K");
  require_positive(sc.h, "h");
  const double rK = sc.r * sc.K;
  DimensionalParams dp;
  dp.r = sc.r;
  dp.K = sc.K;
  dp.h = sc.h;
  dp.a = p.A() * sc.K;
  dp.m = p.M() * sc.K;
  dp.q = p.Q() * rK / sc.h;
  dp.s = p.S() * rK;
  return {dp, DimensionalState{x.u * sc.K, x.v * sc.h * sc.K}};
}

double time_rescaling_rate(State x, const ModelParams& p, double r, double K) {
  if (!(x.u > 0.0)) {
    throw SingularityError("time rescaling is singular for u <= 0");
  }
  return r * K / (x.u * (x.u + p.A()));
}

std::pair<double, double> blowup_vector_field(BlowupState b, const ModelParams& p) {
  const double x = b.x;
  const double y = b.y;
  const double A = p.A();
  const double M = p.M();
  const double Q = p.Q();
  const double S = p.S();
  const double xy = x * y;
  const double dx = x * (S * (1.0 - x) * (A + xy) + x * (M - xy) * (xy - 1.0) * (A + xy) - Q * xy);
  const double dy = S * y * (x - 1.0) * (xy + A);
  return {dx, dy};
}

Mat2 blowup_jacobian(BlowupState b, const ModelParams& p) {
  const double x = b.x;
  const double y = b.y;
  const double A = p.A();
  const double M = p.M();
  const double Q = p.Q();
  const double S = p.S();
  const double x2 = x * x;
  const double x3 = x2 * x;
  const double x4 = x3 * x;
  const double y2 = y * y;
  const double a11 = 3 * A * M * x2 * y - 2 * A * M * x - 2 * A * S * x + A * S - 4 * A * x3 * y2 + 3 * A * x2 * y +
                     4 * M * x3 * y2 - 3 * M * x2 * y - 2 * Q * x * y - 3 * S * x2 * y + 2 * S * x * y -
                     5 * x4 * y2 * y + 4 * x3 * y2;
  const double a12 = A * M * x3 - 2 * A * x4 * y + A * x3 + 2 * M * x4 * y - M * x3 - Q * x2 - S * x3 + S * x2 -
                     3 * x4 * x * y2 + 2 * x4 * y;
  const double a21 = A * S * y + 2 * S * x * y2 - S * y2;
  const double a22 = A * S * x - A * S + 2 * S * x2 * y - 2 * S * x * y;
  return {a11, a12, a21, a22};
}

State blowdown(BlowupState b) { return {b.x * b.y, b.y}; }

BlowupState blowup(State x) {
  if (x.v == 0.0) {
    throw DomainError("blow-up chart undefined at v = 0");
  }
  return {x.u / x.v, x.v};
}

OriginCharacter origin_character(const ModelParams& p) {
  OriginCharacter oc;
  oc.origin_eigenvalues = eigenvalues(blowup_jacobian({0.0, 0.0}, p));
  oc.verdict = "non-hyperbolic saddle";
  const double S = p.S();
  const double M = p.M();
  if (S > std::abs(M)) {
    oc.ix_exists = true;
    oc.ix_position = S / (S + M);
    oc.ix_eigenvalues = eigenvalues(blowup_jacobian({oc.ix_position, 0.0}, p));
  }
  return oc;
}

} // namespace lgallee
