#pragma once

#include <optional>
#include <string>
#include <utility>

#include "lgallee/plane.hpp"

namespace lgallee {

/// Dimensional Leslie-Gower parameters with the Allee factor (N - m).
struct DimensionalParams {
  double r = 0.0; ///< prey intrinsic growth rate
  double K = 0.0; ///< prey carrying capacity
  double q = 0.0; ///< maximum predation rate per capita
  double a = 0.0; ///< half-saturation constant
  double s = 0.0; ///< predator intrinsic growth rate
  double h = 0.0; ///< prey quality as food for the predator
  double m = 0.0; ///< Allee threshold; m < 0 is the weak Allee regime

  /// Throws ValidationError unless r, K, q, a, s, h > 0 and a/K lies in (0, 1).
  void validate() const;
  bool outside_weak_allee_scope() const { return m >= 0.0; }
};

struct DimensionalState {
  double N = 0.0; ///< prey biomass
  double P = 0.0; ///< predator biomass
};

/// Scaled parameters (A, M, Q, S).
///
/// Construct through make(), which enforces A in (0,1), Q > 0, S > 0 and
/// finiteness. M >= 0 is accepted but flagged by outside_weak_allee_scope().
class ModelParams {
public:
  ModelParams() = default;
  static ModelParams make(double A, double M, double Q, double S);

  double A() const { return A_; }
  double M() const { return M_; }
  double Q() const { return Q_; }
  double S() const { return S_; }

  ModelParams with_Q(double Q) const { return make(A_, M_, Q, S_); }
  ModelParams with_S(double S) const { return make(A_, M_, Q_, S); }

  /// T(A, M) = 1 - A + M.
  double T() const { return 1.0 - A_ + M_; }
  /// L(A, M, Q) = A(M + 1) - Q - M.
  double L() const { return A_ * (M_ + 1.0) - Q_ - M_; }

  bool outside_weak_allee_scope() const { return M_ >= 0.0; }
  /// Human-readable warning when M >= 0, empty otherwise.
  std::optional<std::string> scope_warning() const;

  friend bool operator==(const ModelParams&, const ModelParams&) = default;

private:
  ModelParams(double A, double M, double Q, double S) : A_(A), M_(M), Q_(Q), S_(S) {}
  double A_ = 0.5, M_ = -0.05, Q_ = 0.51, S_ = 0.1;
};

/// Throws ValidationError naming the violated constraint.
void validate_shape(double A, double M);

/// Prey growth factor (u + A)(1 - u)(u - M).
double prey_growth(double u, double A, double M);
/// First and second u-derivatives of prey_growth.
double prey_growth_du(double u, double A, double M);
double prey_growth_du2(double u, double A, double M);

/// Right-hand side of the scaled system:
///   u' = u^2((u + A)(1 - u)(u - M) - Q v),  v' = S(u + A)(u - v) v.
/// Throws DomainError on non-finite input.
State vector_field(State x, const ModelParams& p);

/// Same as vector_field but without the finiteness check; used in inner loops.
State vector_field_unchecked(State x, const ModelParams& p) noexcept;

/// Analytic Jacobian of vector_field. The (1,1) entry is written as -u*J11
/// with J11 = 4Au^2 - 4Mu^2 + 2AM - 3Au + 3Mu + 2Qv - 4u^2 + 5u^3 - 3AMu.
Mat2 jacobian(State x, const ModelParams& p);

/// (dN/dt, dP/dt) of the dimensional model. Throws SingularityError for N <= 0.
std::pair<double, double> dimensional_vector_field(DimensionalState st, const DimensionalParams& dp);

/// Reference scales needed to undo the scaling.
struct Scales {
  double r = 1.0;
  double K = 1.0;
  double h = 1.0;
};

/// u = N/K, v = P/(hK), A = a/K, M = m/K, Q = hq/(rK), S = s/(rK).
std::pair<ModelParams, State> nondimensionalize(const DimensionalParams& dp, DimensionalState st);
ModelParams nondimensionalize(const DimensionalParams& dp);

/// Inverse of nondimensionalize for the given scales.
std::pair<DimensionalParams, DimensionalState> dimensionalize(const ModelParams& p, State x, Scales sc);

/// dtau/dt = rK / (u(u + A)); positive for u > 0. Throws SingularityError for u <= 0.
double time_rescaling_rate(State x, const ModelParams& p, double r, double K);

// ---------------------------------------------------------------------------
// Vertical blow-up chart at the origin: (u, v) = (x y, y), tau = t / y.

struct BlowupState {
  double x = 0.0;
  double y = 0.0;
};

std::pair<double, double> blowup_vector_field(BlowupState b, const ModelParams& p);
Mat2 blowup_jacobian(BlowupState b, const ModelParams& p);
State blowdown(BlowupState b);
/// Chart inverse; requires v != 0.
BlowupState blowup(State x);

struct OriginCharacter {
  EigenPair origin_eigenvalues;      ///< at O_xy, (AS, -AS)
  bool ix_exists = false;            ///< I_x = (S/(S+M), 0) lies on x > 0 iff S > |M|
  double ix_position = 0.0;
  EigenPair ix_eigenvalues{};        ///< (-AS, -AMS/(M+S)) when present
  std::string verdict;               ///< always "non-hyperbolic saddle"
};

OriginCharacter origin_character(const ModelParams& p);

} // namespace lgallee
