#include "lgallee/equilibria.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include <boost/math/tools/roots.hpp>

#include "lgallee/errors.hpp"

namespace lgallee {

namespace {

struct Monic {
  double b, c, d;
  double value(double x) const { return ((x + b) * x + c) * x + d; }
  double slope(double x) const { return (3.0 * x + 2.0 * b) * x + c; }
  double curvature(double x) const { return 6.0 * x + 2.0 * b; }
};

// Newton on the cubic; keeps the iterate only while |value| decreases.
double polish_simple(const Monic& g, double x) {
  double best = x;
  double best_abs = std::abs(g.value(x));
  for (int it = 0; it < 8 && best_abs > 0.0; ++it) {
    const double s = g.slope(best);
    if (s == 0.0) {
      break;
    }
    const double next = best - g.value(best) / s;
    const double next_abs = std::abs(g.value(next));
    if (!(next_abs < best_abs)) {
      break;
    }
    best = next;
    best_abs = next_abs;
  }
  return best;
}

// A double root is a simple root of g'.
double polish_double(const Monic& g, double x) {
  for (int it = 0; it < 8; ++it) {
    const double c = g.curvature(x);
    if (c == 0.0) {
      break;
    }
    const double step = g.slope(x) / c;
    x -= step;
    if (std::abs(step) < 1e-16 * std::max(1.0, std::abs(x))) {
      break;
    }
  }
  return x;
}

} // namespace

std::vector<RealRoot> monic_cubic_real_roots(double b, double c, double d, double merge_tol) {
  const Monic g{b, c, d};
  const double shift = b / 3.0;
  const double p = c - b * b / 3.0;
  const double q = 2.0 * b * b * b / 27.0 - b * c / 3.0 + d;
  const double disc = 0.25 * q * q + p * p * p / 27.0;

  std::vector<double> raw;
  std::optional<double> near_double;
  if (disc < 0.0) {
    // Three real roots (trigonometric form).
    const double r = 2.0 * std::sqrt(-p / 3.0);
    const double arg = std::clamp(3.0 * q / (p * r), -1.0, 1.0);
    const double phi = std::acos(arg);
    for (int k = 0; k < 3; ++k) {
      raw.push_back(r * std::cos(phi / 3.0 - 2.0 * std::numbers::pi * k / 3.0) - shift);
    }
  } else {
    // One real root plus a complex pair.
    const double sq = std::sqrt(disc);
    const double w = q > 0.0 ? -0.5 * q - sq : -0.5 * q + sq;
    const double C = std::cbrt(w);
    const double t = C == 0.0 ? 0.0 : C - p / (3.0 * C);
    raw.push_back(t - shift);
    const double im = C == 0.0 ? 0.0 : 0.5 * std::sqrt(3.0) * std::abs(C + p / (3.0 * C));
    if (2.0 * im < merge_tol) {
      near_double = -0.5 * t - shift;
    }
  }

  for (double& x : raw) {
    x = polish_simple(g, x);
  }
  std::sort(raw.begin(), raw.end());

  std::vector<RealRoot> roots;
  for (double x : raw) {
    if (!roots.empty() && std::abs(x - roots.back().value) < merge_tol) {
      roots.back().multiplicity += 1;
    } else {
      roots.push_back({x, 1});
    }
  }
  if (near_double) {
    const double x = *near_double;
    auto it = std::find_if(roots.begin(), roots.end(), [&](const RealRoot& r) { return std::abs(r.value - x) < merge_tol; });
    if (it != roots.end()) {
      it->multiplicity += 2; // triple root
    } else {
      roots.push_back({x, 2});
    }
  }
  for (RealRoot& r : roots) {
    if (r.multiplicity == 2) {
      r.value = polish_double(g, r.value);
    }
  }
  std::sort(roots.begin(), roots.end(), [](const RealRoot& a, const RealRoot& b) { return a.value < b.value; });
  return roots;
}

double g_cubic(double u, const ModelParams& p) {
  return ((u - p.T()) * u - p.L()) * u + p.A() * p.M();
}

double g_cubic_du(double u, const ModelParams& p) { return (3.0 * u - 2.0 * p.T()) * u - p.L(); }

double deflated_discriminant(double u_star, double T, double L) {
  const double e = u_star - T;
  return e * e - 4.0 * (u_star * e - L);
}

double cubic_discriminant(const ModelParams& p) {
  const double b = -p.T();
  const double c = -p.L();
  const double d = p.A() * p.M();
  return 18.0 * b * c * d - 4.0 * b * b * b * d + b * b * c * c - 4.0 * c * c * c - 27.0 * d * d;
}

std::string_view to_string(LemmaCase c) {
  switch (c) {
  case LemmaCase::I: return "I";
  case LemmaCase::IIi: return "II.i";
  case LemmaCase::IIii: return "II.ii";
  }
  return "?";
}

int CubicAnalysis::count_with_multiplicity() const {
  int n = 0;
  for (const auto& r : roots) {
    n += r.multiplicity;
  }
  return n;
}

bool CubicAnalysis::has_double_root() const {
  return std::any_of(roots.begin(), roots.end(), [](const RealRoot& r) { return r.multiplicity >= 2; });
}

CubicAnalysis cubic_analysis(const ModelParams& p, const ClassificationTolerances& tol) {
  CubicAnalysis ca;
  ca.T = p.T();
  ca.L = p.L();
  ca.coefficients = {1.0, -ca.T, -ca.L, p.A() * p.M()};
  const auto all = monic_cubic_real_roots(-ca.T, -ca.L, p.A() * p.M(), tol.merge);
  for (const auto& r : all) {
    if (r.value > 0.0 && r.value < 1.0) {
      ca.roots.push_back(r);
    }
  }

  if (ca.roots.empty()) {
    // Only possible outside the weak-Allee scope (g(0) = AM >= 0).
    ca.delta = 0.0;
    ca.lemma_case = LemmaCase::I;
    return ca;
  }
  ca.delta_root = ca.roots.front().value;
  if (ca.has_double_root()) {
    for (const auto& r : ca.roots) {
      if (r.multiplicity == 1) {
        ca.delta_root = r.value;
      }
    }
  }
  ca.delta = deflated_discriminant(ca.delta_root, ca.T, ca.L);
  if (std::abs(ca.delta) < tol.delta_zero) {
    ca.delta = 0.0;
  }

  if (ca.T <= 0.0 || ca.L >= 0.0) {
    ca.lemma_case = LemmaCase::I;
  } else if (ca.delta < 0.0) {
    ca.lemma_case = LemmaCase::IIi;
  } else {
    ca.lemma_case = LemmaCase::IIii;
  }
  return ca;
}

std::optional<SaddleNodeThresholds> saddle_node_thresholds(double A, double M) {
  validate_shape(A, M);
  const double T = 1.0 - A + M;
  if (T <= 0.0) {
    return std::nullopt;
  }
  // 2u^3 - T u^2 - AM = 0  <=>  u^3 - (T/2) u^2 - AM/2 = 0
  const auto cands = monic_cubic_real_roots(-0.5 * T, 0.0, -0.5 * A * M, 0.0);
  std::vector<std::pair<double, double>> found; // (Q, u_d)
  for (const auto& r : cands) {
    const double u = r.value;
    if (!(u > 0.0 && u < 1.0)) {
      continue;
    }
    const double L = (3.0 * u - 2.0 * T) * u;
    const double Q = A * (M + 1.0) - M - L;
    if (Q > 0.0) {
      found.emplace_back(Q, u);
    }
  }
  if (found.empty()) {
    return std::nullopt;
  }
  std::sort(found.begin(), found.end());
  SaddleNodeThresholds t;
  t.q_minus = found.front().first;
  t.u_minus = found.front().second;
  t.q_plus = found.back().first;
  t.u_plus = found.back().second;
  return t;
}

// ---------------------------------------------------------------------------

std::string_view to_string(EquilibriumKind k) {
  switch (k) {
  case EquilibriumKind::nonhyperbolic_saddle: return "nonhyperbolic-saddle";
  case EquilibriumKind::saddle: return "saddle";
  case EquilibriumKind::attractor: return "attractor";
  case EquilibriumKind::repeller: return "repeller";
  case EquilibriumKind::stable_saddle_node: return "stable-saddle-node";
  case EquilibriumKind::unstable_saddle_node: return "unstable-saddle-node";
  case EquilibriumKind::cusp: return "cusp";
  case EquilibriumKind::marginal: return "marginal";
  }
  return "?";
}

std::optional<EquilibriumKind> parse_equilibrium_kind(std::string_view s) {
  for (auto k : {EquilibriumKind::nonhyperbolic_saddle, EquilibriumKind::saddle, EquilibriumKind::attractor,
                 EquilibriumKind::repeller, EquilibriumKind::stable_saddle_node,
                 EquilibriumKind::unstable_saddle_node, EquilibriumKind::cusp, EquilibriumKind::marginal}) {
    if (to_string(k) == s) {
      return k;
    }
  }
  return std::nullopt;
}

std::string_view to_string(CollapseType c) { return c == CollapseType::p1_p2 ? "P1=P2" : "P2=P3"; }

double fold_indicator(double u, double A, double M) {
  const double T = 1.0 - A + M;
  return u * u * (2.0 * u - T) - A * M;
}

double diagonal_det(double u, const ModelParams& p) {
  return p.S() * u * u * (p.A() + u) * fold_indicator(u, p.A(), p.M());
}

double diagonal_trace(double u, const ModelParams& p) {
  const double A = p.A();
  const double M = p.M();
  return u * (((1.0 - u) * (u - M) + (u + A) * (1.0 - 2.0 * u + M)) * u - p.S() * (A + u));
}

double hopf_function(double u, double A, double M) {
  return u * ((1.0 - u) * (u - M) + (u + A) * (1.0 - 2.0 * u + M)) / (A + u);
}

double hopf_function_du(double u, double A, double M) {
  const double k = (1.0 - u) * (u - M) + (u + A) * (1.0 - 2.0 * u + M);
  const double dk = 2.0 + 2.0 * M - 2.0 * A - 6.0 * u;
  const double num = u * k;
  const double dnum = k + u * dk;
  const double den = A + u;
  return (dnum * den - num) / (den * den);
}

double hopf_negative_bound(double A, double M) {
  const double T = 1.0 - A + M;
  return T + std::sqrt(T * T + 3.0 * (A - M + A * M));
}

HopfMaximum hopf_function_maximum(double A, double M) {
  validate_shape(A, M);
  constexpr int n = 2000;
  int best = 1;
  for (int i = 1; i < n; ++i) {
    if (hopf_function(double(i) / n, A, M) > hopf_function(double(best) / n, A, M)) {
      best = i;
    }
  }
  double lo = double(best - 1) / n;
  double hi = double(best + 1) / n;
  lo = std::max(lo, 1e-12);
  hi = std::min(hi, 1.0 - 1e-12);
  HopfMaximum out;
  const double flo = hopf_function_du(lo, A, M);
  const double fhi = hopf_function_du(hi, A, M);
  if (flo > 0.0 && fhi < 0.0) {
    std::uintmax_t iters = 100;
    auto tol = [](double a, double b) { return std::abs(b - a) < 1e-15; };
    auto [a, b] = boost::math::tools::toms748_solve([&](double u) { return hopf_function_du(u, A, M); }, lo, hi, flo,
                                                    fhi, tol, iters);
    out.u = 0.5 * (a + b);
  } else {
    // Maximum on the boundary of the sampled interval.
    out.u = double(best) / n;
  }
  out.value = hopf_function(out.u, A, M);
  return out;
}

// ---------------------------------------------------------------------------

namespace {

Equilibrium make_diagonal(double u, const ModelParams& p) {
  Equilibrium e;
  e.position = {u, u};
  e.eigenvalues = eigenvalues(jacobian(e.position, p));
  e.det = diagonal_det(u, p);
  e.trace = diagonal_trace(u, p);
  return e;
}

CollapsedClassification classify_collapse(const CubicAnalysis& ca, const ModelParams& p,
                                          const ClassificationTolerances& tol) {
  const RealRoot* dbl = nullptr;
  const RealRoot* simple = nullptr;
  for (const auto& r : ca.roots) {
    (r.multiplicity >= 2 ? dbl : simple) = &r;
  }
  if (dbl == nullptr || std::abs(ca.delta) >= tol.delta_zero) {
    throw PreconditionError("collapsed_classification requires a double root (Delta = 0)");
  }
  CollapsedClassification cc;
  cc.double_root = dbl->value;
  const double A = p.A();
  const double M = p.M();
  const double Q = p.Q();
  const double T = p.T();
  // Without a distinct simple root in (0,1) fall back to the sum of roots.
  cc.simple_root = simple != nullptr ? simple->value : T - 2.0 * dbl->value;
  if (simple == nullptr || dbl->value < simple->value) {
    cc.type = CollapseType::p1_p2;
    cc.threshold_s = Q * cc.double_root / (A + cc.double_root);
  } else {
    cc.type = CollapseType::p2_p3;
    cc.threshold_s = Q * (T - cc.simple_root) / (1.0 + A + M - cc.simple_root);
  }
  const double S = p.S();
  if (std::abs(S - cc.threshold_s) < tol.marginal) {
    cc.kind = EquilibriumKind::cusp;
  } else if (S < cc.threshold_s) {
    cc.kind = EquilibriumKind::unstable_saddle_node;
  } else {
    cc.kind = EquilibriumKind::stable_saddle_node;
  }
  return cc;
}

} // namespace

CollapsedClassification collapsed_classification(const ModelParams& p, const ClassificationTolerances& tol) {
  return classify_collapse(cubic_analysis(p, tol), p, tol);
}

std::vector<Equilibrium> positive_equilibria(const ModelParams& p, const ClassificationTolerances& tol) {
  const CubicAnalysis ca = cubic_analysis(p, tol);
  std::vector<Equilibrium> out;
  int index = 1;
  for (const auto& r : ca.roots) {
    Equilibrium e = make_diagonal(r.value, p);
    e.multiplicity = r.multiplicity;
    if (r.multiplicity >= 2) {
      const auto cc = classify_collapse(ca, p, tol);
      e.kind = cc.kind;
      e.near_fold = true;
      e.label = "P" + std::to_string(index) + "=P" + std::to_string(index + 1);
    } else {
      const double fi = fold_indicator(r.value, p.A(), p.M());
      e.near_fold = std::abs(fi) < tol.fold;
      const double f = hopf_function(r.value, p.A(), p.M());
      e.marginal = std::abs(p.S() - f) < tol.marginal;
      if (fi < 0.0) {
        e.kind = EquilibriumKind::saddle;
      } else if (e.marginal) {
        e.kind = EquilibriumKind::marginal;
      } else if (p.S() < f) {
        e.kind = EquilibriumKind::repeller;
      } else {
        e.kind = EquilibriumKind::attractor;
      }
      e.label = "P" + std::to_string(index);
    }
    index += r.multiplicity;
    out.push_back(std::move(e));
  }
  return out;
}

std::array<Equilibrium, 2> boundary_equilibria(const ModelParams& p) {
  Equilibrium origin;
  origin.label = "O";
  origin.position = {0.0, 0.0};
  const Mat2 j0 = jacobian(origin.position, p);
  origin.eigenvalues = eigenvalues(j0);
  origin.det = j0.det();
  origin.trace = j0.trace();
  origin.kind = EquilibriumKind::nonhyperbolic_saddle;

  Equilibrium e1;
  e1.label = "E";
  e1.position = {1.0, 0.0};
  const Mat2 j1 = jacobian(e1.position, p);
  e1.eigenvalues = eigenvalues(j1);
  e1.det = j1.det();
  e1.trace = j1.trace();
  e1.kind = EquilibriumKind::saddle;
  return {origin, e1};
}

std::vector<Equilibrium> all_equilibria(const ModelParams& p, const ClassificationTolerances& tol) {
  const auto b = boundary_equilibria(p);
  std::vector<Equilibrium> out(b.begin(), b.end());
  for (auto& e : positive_equilibria(p, tol)) {
    out.push_back(std::move(e));
  }
  return out;
}

} // namespace lgallee
