#include "lgallee/bifurcation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lgallee/errors.hpp"
#include "lgallee/parallel.hpp"

namespace lgallee {

void Window::validate() const {
  for (double x : {q_min, q_max, s_min, s_max}) {
    if (!std::isfinite(x)) {
      throw ValidationError("window bounds must be finite");
    }
  }
  if (!(q_max > q_min) || !(s_max > s_min)) {
    throw ValidationError("window must have positive extent in Q and S");
  }
}

// ---------------------------------------------------------------------------
// Hopf curve

namespace {

double q_of_u(double u, double A, double M) { return prey_growth(u, A, M) / u; }

bool hopf_admissible(double u, double A, double M) {
  return fold_indicator(u, A, M) > 0.0 && hopf_function(u, A, M) > 0.0 && q_of_u(u, A, M) > 0.0;
}

} // namespace

std::vector<HopfPoint> HopfCurve::branch(int id) const {
  std::vector<HopfPoint> out;
  for (const auto& p : points) {
    if (p.branch == id) {
      out.push_back(p);
    }
  }
  std::sort(out.begin(), out.end(), [](const HopfPoint& a, const HopfPoint& b) { return a.u < b.u; });
  return out;
}

HopfCurve hopf_curve(double A, double M, int n_points) {
  validate_shape(A, M);
  if (n_points < 2) {
    throw ValidationError("hopf_curve needs at least 2 points");
  }
  const double T = 1.0 - A + M;

  // Breakpoints where an admissibility condition can change sign.
  std::vector<double> cuts{0.0, 1.0};
  for (const auto& r : monic_cubic_real_roots(-0.5 * T, 0.0, -0.5 * A * M, 0.0)) {
    cuts.push_back(r.value);
  }
  // numerator of f: -3u^2 + 2T u + (A - M + AM)
  {
    const double c = A - M + A * M;
    const double disc = T * T + 3.0 * c;
    if (disc >= 0.0) {
      cuts.push_back((T + std::sqrt(disc)) / 3.0);
      cuts.push_back((T - std::sqrt(disc)) / 3.0);
    }
  }
  std::erase_if(cuts, [](double x) { return !(x >= 0.0 && x <= 1.0); });
  std::sort(cuts.begin(), cuts.end());

  std::vector<std::pair<double, double>> spans;
  double total = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    const double a = cuts[i];
    const double b = cuts[i + 1];
    if (b - a > 1e-12 && hopf_admissible(0.5 * (a + b), A, M)) {
      spans.emplace_back(a, b);
      total += b - a;
    }
  }

  HopfCurve curve;
  curve.trace_zero_maximum = hopf_function_maximum(A, M);
  curve.branch_count = static_cast<int>(spans.size());
  for (std::size_t k = 0; k < spans.size(); ++k) {
    const auto [a, b] = spans[k];
    const int m = std::max(2, static_cast<int>(std::lround(n_points * (b - a) / total)));
    // Chebyshev nodes of the first kind: dense near the det = 0 / S = 0 ends.
    for (int i = 0; i < m; ++i) {
      const double t = 0.5 * (1.0 - std::cos(std::numbers::pi * (i + 0.5) / m));
      const double u = a + (b - a) * t;
      if (!hopf_admissible(u, A, M)) {
        continue;
      }
      curve.points.push_back({q_of_u(u, A, M), hopf_function(u, A, M), u, static_cast<int>(k)});
    }
  }
  std::sort(curve.points.begin(), curve.points.end(),
            [](const HopfPoint& x, const HopfPoint& y) { return x.Q < y.Q || (x.Q == y.Q && x.u < y.u); });

  // Supremum over the retained set: sampled values, the span ends, and any
  // interior critical point of f.
  double best = 0.0;
  for (const auto& p : curve.points) {
    best = std::max(best, p.S);
  }
  for (const auto& [a, b] : spans) {
    for (double u : {a, b}) {
      if (u > 0.0 && u < 1.0) {
        best = std::max(best, hopf_function(u, A, M));
      }
    }
    const double um = curve.trace_zero_maximum.u;
    if (um > a && um < b) {
      best = std::max(best, curve.trace_zero_maximum.value);
    }
  }
  curve.max_s_on_curve = best;
  return curve;
}

// ---------------------------------------------------------------------------
// BT points

std::vector<BTPoint> bt_points(double A, double M) {
  const auto sn = saddle_node_thresholds(A, M);
  std::vector<BTPoint> out;
  if (!sn) {
    return out;
  }
  const double T = 1.0 - A + M;
  for (auto [Q, ud] : {std::pair{sn->q_minus, sn->u_minus}, std::pair{sn->q_plus, sn->u_plus}}) {
    BTPoint bt;
    bt.Q = Q;
    bt.u_double = ud;
    bt.simple_root = T - 2.0 * ud;
    bt.type = ud < bt.simple_root ? CollapseType::p1_p2 : CollapseType::p2_p3;
    bt.S = Q * (T - bt.simple_root) / (1.0 + A + M - bt.simple_root);
    if (bt.S > 0.0) {
      out.push_back(bt);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Sotomayor and cusp checks

State reduced_field(State x, const ModelParams& p) {
  return {prey_growth(x.u, p.A(), p.M()) - p.Q() * x.v, x.u - x.v};
}

namespace {

struct DoubleRoot {
  double u_double;
  double simple_root;
  CollapseType type;
};

DoubleRoot find_double_root(const ModelParams& p, const ClassificationTolerances& tol) {
  const CubicAnalysis ca = cubic_analysis(p, tol);
  const RealRoot* dbl = nullptr;
  const RealRoot* simple = nullptr;
  for (const auto& r : ca.roots) {
    (r.multiplicity >= 2 ? dbl : simple) = &r;
  }
  if (dbl == nullptr) {
    throw PreconditionError("no double equilibrium at these parameters (Delta is not 0)");
  }
  DoubleRoot d;
  d.u_double = dbl->value;
  d.simple_root = simple != nullptr ? simple->value : p.T() - 2.0 * dbl->value;
  d.type = d.u_double < d.simple_root ? CollapseType::p1_p2 : CollapseType::p2_p3;
  return d;
}

} // namespace

SotomayorReport sotomayor_check(const ModelParams& p, const ClassificationTolerances& tol) {
  const DoubleRoot d = find_double_root(p, tol);
  const double A = p.A();
  const double M = p.M();
  const double Q = p.Q();
  const double S = p.S();
  const double T = p.T();
  const double ud = d.u_double;
  const double us = d.simple_root;

  SotomayorReport r;
  r.type = d.type;
  r.u_double = ud;
  r.simple_root = us;

  const Mat2 J = jacobian({ud, ud}, p);
  // Left null vector from the first column, right null vector from the first row.
  r.left_null = {-J.a21 / J.a11, 1.0};
  r.right_null = {1.0, -J.a11 / J.a12};

  // f_Q = (-v, 0); D^2 f(V, V) = (h''(u) V_u^2, 0) since f is affine in v.
  r.transversality = -r.left_null.u * ud;
  r.nondegeneracy = r.left_null.u * prey_growth_du2(ud, A, M) * r.right_null.u * r.right_null.u;

  const double w = 1.0 + A + M - us;
  r.transversality_closed_form = S * w / (2.0 * Q);
  r.nondegeneracy_closed_form = S * w * (3.0 * us - T) / (Q * (us - T));
  r.nondegeneracy_printed = -2.0 * S * (2.0 + A - M) * w / (Q * (us - T));

  r.zero_eigenvalue_gap = std::abs(J.trace());
  r.simple_zero_eigenvalue = r.zero_eigenvalue_gap > tol.marginal;
  r.genuine = r.simple_zero_eigenvalue && r.transversality != 0.0 && r.nondegeneracy != 0.0;
  return r;
}

CuspReport cusp_check(const ModelParams& p, double det_tol, const ClassificationTolerances& tol) {
  const DoubleRoot d = find_double_root(p, tol);
  CuspReport c;
  c.u_double = d.u_double;
  c.simple_root = d.simple_root;
  c.jacobian = jacobian({d.u_double, d.u_double}, p);
  c.det = c.jacobian.det();
  c.trace = c.jacobian.trace();
  c.jordan = c.transform.inverse() * c.jacobian * c.transform;
  c.nilpotent_entry = c.jordan.a12;
  const double w = 1.0 + p.A() + p.M() - d.simple_root;
  c.expected_entry = 0.25 * p.S() * w * (d.simple_root - p.T());
  c.printed_entry = -c.expected_entry;

  const double scale = std::max(1.0, c.jacobian.max_abs());
  const double rest = std::max({std::abs(c.jordan.a11), std::abs(c.jordan.a21), std::abs(c.jordan.a22)});
  c.nilpotent_block_nonzero = std::abs(c.nilpotent_entry) > 1e-8 * scale && rest < det_tol * scale;
  c.passes = std::abs(c.det) < det_tol && std::abs(c.trace) < det_tol && c.nilpotent_block_nonzero;
  return c;
}

// ---------------------------------------------------------------------------
// Regions

std::string RegionLabel::key() const {
  std::string s = std::to_string(equilibrium_count) + ":";
  for (std::size_t i = 0; i < kinds.size(); ++i) {
    if (i > 0) {
      s += '/';
    }
    s += to_string(kinds[i]);
  }
  if (cycle_hint) {
    s += "+" + *cycle_hint;
  }
  return s;
}

std::string RegionLabel::roman_label() const {
  using K = EquilibriumKind;
  if (kinds.size() == 1) {
    if (kinds[0] == K::attractor) {
      return "I|VII";
    }
    if (kinds[0] == K::repeller) {
      return "II|VIII";
    }
    return "";
  }
  if (kinds.size() == 3 && kinds[1] == K::saddle) {
    const K a = kinds[0];
    const K b = kinds[2];
    if (a == K::attractor && b == K::attractor) {
      return cycle_hint && cycle_hint->find("unstable") != std::string::npos ? "IV" : "III|IV";
    }
    if (a == K::attractor && b == K::repeller) {
      return "V";
    }
    if (a == K::repeller && b == K::repeller) {
      return "VI";
    }
  }
  return "";
}

RegionLabel region_classify(const ModelParams& p) {
  RegionLabel r;
  for (const auto& e : positive_equilibria(p)) {
    r.equilibrium_count += e.multiplicity;
    r.kinds.push_back(e.kind);
  }
  return r;
}

double BifurcationDiagram::cell_q(int i) const {
  return window.q_min + (i + 0.5) * (window.q_max - window.q_min) / resolution;
}

double BifurcationDiagram::cell_s(int j) const {
  return window.s_min + (j + 0.5) * (window.s_max - window.s_min) / resolution;
}

BifurcationDiagram diagram(double A, double M, const Window& window, int resolution, int hopf_points) {
  validate_shape(A, M);
  window.validate();
  if (resolution < 1) {
    throw ValidationError("resolution must be >= 1");
  }
  BifurcationDiagram d;
  d.A = A;
  d.M = M;
  d.window = window;
  d.resolution = resolution;
  if (const auto sn = saddle_node_thresholds(A, M)) {
    d.sn_lines.push_back({sn->q_minus, sn->u_minus, CollapseType::p1_p2});
    d.sn_lines.push_back({sn->q_plus, sn->u_plus, CollapseType::p2_p3});
    for (auto& l : d.sn_lines) {
      l.type = l.u_double < (1.0 - A + M) - 2.0 * l.u_double ? CollapseType::p1_p2 : CollapseType::p2_p3;
    }
  }
  d.hopf = hopf_curve(A, M, hopf_points);
  d.bt = bt_points(A, M);

  const auto n = static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution);
  d.regions.resize(n);
  parallel_for(n, [&](std::size_t k) {
    const int i = static_cast<int>(k % static_cast<std::size_t>(resolution));
    const int j = static_cast<int>(k / static_cast<std::size_t>(resolution));
    const double S = d.cell_s(j);
    // S = 0 is not a valid parameter; the bottom row is sampled at its centre, which is > 0.
    d.regions[k] = region_classify(ModelParams::make(A, M, d.cell_q(i), S));
  });
  return d;
}

} // namespace lgallee
