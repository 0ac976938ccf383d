#pragma once

#include <optional>
#include <string>
#include <vector>

#include "lgallee/equilibria.hpp"
#include "lgallee/model.hpp"

namespace lgallee {

/// Rectangle in the (Q, S) parameter plane.
struct Window {
  double q_min = 0.30;
  double q_max = 0.42;
  double s_min = 0.0;
  double s_max = 0.45;

  /// Throws ValidationError for non-finite bounds or zero/negative extent.
  void validate() const;
  bool contains(double Q, double S) const { return Q >= q_min && Q <= q_max && S >= s_min && S <= s_max; }
};

struct HopfPoint {
  double Q = 0.0;
  double S = 0.0;
  double u = 0.0;   ///< abscissa of the on-diagonal equilibrium that has zero trace
  int branch = 0;   ///< connected component of the u-parametrisation
};

/// Trace-zero locus with positive determinant, parametrised by the
/// equilibrium abscissa u: Q(u) = (u + A)(1 - u)(u - M)/u, S(u) = f(u).
struct HopfCurve {
  std::vector<HopfPoint> points;   ///< sorted by Q
  double max_s_on_curve = 0.0;     ///< max S over the retained (det > 0) points
  HopfMaximum trace_zero_maximum;  ///< max of f over (0,1), neutral-saddle part included
  int branch_count = 0;

  /// Points of one branch, sorted by u (drawing order).
  std::vector<HopfPoint> branch(int id) const;
};

HopfCurve hopf_curve(double A, double M, int n_points);

struct BTPoint {
  double Q = 0.0;
  double S = 0.0;
  double u_double = 0.0;
  double simple_root = 0.0;
  CollapseType type = CollapseType::p2_p3;
};

/// One candidate per saddle-node line with S = Q(T - u*)/(1 + A + M - u*),
/// u* the simple root; only S > 0 is returned.
std::vector<BTPoint> bt_points(double A, double M);

/// Field with the factors u^2 and S(u + A)v removed:
///   f(u, v; Q) = ((u + A)(1 - u)(u - M) - Q v, u - v).
State reduced_field(State x, const ModelParams& p);

struct SotomayorReport {
  CollapseType type = CollapseType::p2_p3;
  double u_double = 0.0;
  double simple_root = 0.0;
  State left_null{};   ///< U, with U.v = 1
  State right_null{};  ///< V, with V.u = 1
  double transversality = 0.0;  ///< U . f_Q
  double nondegeneracy = 0.0;   ///< U . D^2 f(V, V)
  double transversality_closed_form = 0.0; ///< S(1 + A + M - u*)/(2Q)
  /// S(1 + A + M - u*)(3u* - T)/(Q(u* - T)); D^2 f(V,V) = (2T - 6u_d, 0).
  double nondegeneracy_closed_form = 0.0;
  /// -2S(2 + A - M)(1 + A + M - u*)/(Q(u* - T)), i.e. with D^2 f(V,V)
  /// evaluated at u = 1 instead of u_d. Kept for comparison only.
  double nondegeneracy_printed = 0.0;
  double zero_eigenvalue_gap = 0.0; ///< |trace|: the other eigenvalue
  bool simple_zero_eigenvalue = false;
  bool genuine = false;
};

/// Sotomayor scalars at the double equilibrium. Throws PreconditionError
/// when g has no double root in (0,1) at p.
SotomayorReport sotomayor_check(const ModelParams& p, const ClassificationTolerances& tol = {});

struct CuspReport {
  double u_double = 0.0;
  double simple_root = 0.0;
  double det = 0.0;
  double trace = 0.0;
  Mat2 jacobian{};
  Mat2 transform{1.0, -1.0, 1.0, 0.0}; ///< columns (1,1) and (-1,0)
  Mat2 jordan{};                        ///< transform^-1 J transform
  double nilpotent_entry = 0.0;         ///< jordan.a12
  /// (1/4) S(1 + A + M - u*)(u* - T), the value direct multiplication gives.
  double expected_entry = 0.0;
  /// -(1/4) S(1 + A + M - u*)(u* - T); same magnitude, opposite sign.
  double printed_entry = 0.0;
  bool nilpotent_block_nonzero = false;
  bool passes = false;
};

/// Checks det = tr = 0 (within det_tol) and the nilpotent Jordan block at the
/// double equilibrium. Throws PreconditionError without a double root.
CuspReport cusp_check(const ModelParams& p, double det_tol = 1e-9, const ClassificationTolerances& tol = {});

struct RegionLabel {
  int equilibrium_count = 0;
  std::vector<EquilibriumKind> kinds; ///< positive equilibria in ascending u
  std::optional<std::string> cycle_hint;

  /// e.g. "3:attractor/saddle/repeller"
  std::string key() const;
  /// Best-effort name of the region in the (0.1, -0.1) diagram, "" if unknown.
  std::string roman_label() const;
  friend bool operator==(const RegionLabel& a, const RegionLabel& b) {
    return a.equilibrium_count == b.equilibrium_count && a.kinds == b.kinds;
  }
};

RegionLabel region_classify(const ModelParams& p);

struct SaddleNodeLine {
  double Q = 0.0;
  double u_double = 0.0;
  CollapseType type = CollapseType::p2_p3;
};

struct BifurcationDiagram {
  double A = 0.0;
  double M = 0.0;
  Window window;
  std::vector<SaddleNodeLine> sn_lines;
  HopfCurve hopf;
  std::vector<BTPoint> bt;
  int resolution = 0;
  std::vector<RegionLabel> regions; ///< row-major, index = j * resolution + i

  double cell_q(int i) const;
  double cell_s(int j) const;
  const RegionLabel& region(int i, int j) const { return regions[static_cast<std::size_t>(j * resolution + i)]; }
};

/// Assembles SN lines, Hopf curve, BT points and a resolution x resolution
/// grid of region labels (cell centres). Cells are evaluated in parallel;
/// the result does not depend on the worker count.
BifurcationDiagram diagram(double A, double M, const Window& window, int resolution, int hopf_points = 600);

} // namespace lgallee
