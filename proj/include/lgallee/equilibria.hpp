#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "lgallee/model.hpp"
#include "lgallee/plane.hpp"

namespace lgallee {

/// Dead-bands used when turning floating-point quantities into discrete
/// verdicts.
struct ClassificationTolerances {
  double merge = 1e-7;        ///< roots closer than this are one double root
  double delta_zero = 1e-12;  ///< |Delta| below this counts as Delta = 0
  double marginal = 1e-9;     ///< |S - f(u)| below this is a near-Hopf marginal case
  double fold = 1e-12;        ///< |u^2(2u - T) - AM| below this is flagged near-fold
};

// ---------------------------------------------------------------------------
// Cubic g(u) = u^3 - T u^2 - L u + AM

struct RealRoot {
  double value = 0.0;
  int multiplicity = 1;
};

/// Real roots of the monic cubic x^3 + b x^2 + c x + d, ascending, with
/// near-coincident roots (closer than merge_tol, or a complex pair with
/// |Im| < merge_tol / 2) merged into one root of multiplicity 2 (or 3).
std::vector<RealRoot> monic_cubic_real_roots(double b, double c, double d, double merge_tol = 1e-7);

double g_cubic(double u, const ModelParams& p);
double g_cubic_du(double u, const ModelParams& p);

/// Discriminant of the deflated quadratic obtained by dividing g by (u - u_star):
///   (u* - T)^2 - 4(u*(u* - T) - L).
double deflated_discriminant(double u_star, double T, double L);

/// Discriminant of the full cubic g (zero exactly at a repeated root).
double cubic_discriminant(const ModelParams& p);

enum class LemmaCase { I, IIi, IIii };
std::string_view to_string(LemmaCase c);

struct CubicAnalysis {
  double T = 0.0;
  double L = 0.0;
  std::array<double, 4> coefficients{}; ///< (1, -T, -L, AM), highest degree first
  std::vector<RealRoot> roots;          ///< roots in (0, 1), ascending
  double delta = 0.0;                   ///< deflated discriminant, see cubic_analysis()
  double delta_root = 0.0;              ///< the root u* that was deflated out
  LemmaCase lemma_case = LemmaCase::I;

  int count_with_multiplicity() const;
  int distinct_count() const { return static_cast<int>(roots.size()); }
  bool has_double_root() const;
};

/// Roots of g in (0,1) and the root-count case.
///
/// Delta is evaluated with u* = the simple root when a double root is present
/// (so Delta vanishes at every collapse), otherwise with u* = the smallest
/// root in (0,1).
CubicAnalysis cubic_analysis(const ModelParams& p, const ClassificationTolerances& tol = {});

struct SaddleNodeThresholds {
  double q_minus = 0.0;  ///< P1 = P2 collapse
  double q_plus = 0.0;   ///< P2 = P3 collapse
  double u_minus = 0.0;  ///< double-root abscissa at q_minus
  double u_plus = 0.0;   ///< double-root abscissa at q_plus
};

/// Q-values at which g acquires a double root in (0, 1).
///
/// A double root u_d satisfies g(u_d) = g'(u_d) = 0, i.e. L = 3u_d^2 - 2T u_d
/// and 2u_d^3 - T u_d^2 - AM = 0; then Q = A(M + 1) - M - L.
std::optional<SaddleNodeThresholds> saddle_node_thresholds(double A, double M);

// ---------------------------------------------------------------------------
// Classification

enum class EquilibriumKind {
  nonhyperbolic_saddle,
  saddle,
  attractor,
  repeller,
  stable_saddle_node,
  unstable_saddle_node,
  cusp,
  marginal,
};
std::string_view to_string(EquilibriumKind k);
std::optional<EquilibriumKind> parse_equilibrium_kind(std::string_view s);

/// True for kinds that attract a full neighbourhood.
inline bool is_attracting(EquilibriumKind k) { return k == EquilibriumKind::attractor; }

struct Equilibrium {
  std::string label;  ///< "O", "E", "P1", "P2", "P3", or "P1=P2" / "P2=P3" at a collapse
  State position;
  EquilibriumKind kind = EquilibriumKind::saddle;
  EigenPair eigenvalues{};
  double det = 0.0;
  double trace = 0.0;
  int multiplicity = 1;
  bool near_fold = false; ///< |u^2(2u - T) - AM| inside the fold dead-band
  bool marginal = false;  ///< |S - f(u)| inside the Hopf dead-band
};

/// u^2(2u - T) - AM; the sign of the on-diagonal determinant.
double fold_indicator(double u, double A, double M);

/// Determinant and trace of the Jacobian at an on-diagonal equilibrium (u, u):
///   det = S u^2 (A + u)(u^2(2u - T) - AM)
///   tr  = u(((1 - u)(u - M) + (u + A)(1 - 2u + M)) u - S(A + u))
double diagonal_det(double u, const ModelParams& p);
double diagonal_trace(double u, const ModelParams& p);

/// f(u) = u((1 - u)(u - M) + (u + A)(1 - 2u + M)) / (A + u); the S-threshold
/// separating repellers (S < f) from attractors (S > f).
double hopf_function(double u, double A, double M);
double hopf_function_du(double u, double A, double M);

struct HopfMaximum {
  double u = 0.0;
  double value = 0.0;
};
/// Maximizer of f over (0, 1), located as a root of f' to ~1e-14.
HopfMaximum hopf_function_maximum(double A, double M);

/// The abscissa beyond which f < 0: T + sqrt(T^2 + 3(A - M + AM)).
double hopf_negative_bound(double A, double M);

std::vector<Equilibrium> positive_equilibria(const ModelParams& p, const ClassificationTolerances& tol = {});
std::array<Equilibrium, 2> boundary_equilibria(const ModelParams& p);
/// Boundary equilibria followed by positive ones.
std::vector<Equilibrium> all_equilibria(const ModelParams& p, const ClassificationTolerances& tol = {});

enum class CollapseType { p1_p2, p2_p3 };
std::string_view to_string(CollapseType c);

struct CollapsedClassification {
  CollapseType type = CollapseType::p2_p3;
  double double_root = 0.0;
  double simple_root = 0.0;
  double threshold_s = 0.0; ///< stable iff S > threshold_s
  EquilibriumKind kind = EquilibriumKind::cusp;
};

/// Classifies the double equilibrium. P1 = P2 uses S vs Q u*/(A + u*) with u*
/// the double root; P2 = P3 uses S vs Q(T - u*)/(1 + A + M - u*) with u* the
/// simple root. Throws PreconditionError when g has no double root in (0,1).
CollapsedClassification collapsed_classification(const ModelParams& p, const ClassificationTolerances& tol = {});

} // namespace lgallee
