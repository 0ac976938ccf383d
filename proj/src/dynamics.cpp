#include "lgallee/dynamics.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/roots.hpp>

#include "lgallee/errors.hpp"
#include "lgallee/parallel.hpp"

namespace lgallee {

namespace {

Field make_field(const ModelParams& p, Direction dir) {
  if (dir == Direction::forward) {
    return [p](State x) { return vector_field_unchecked(x, p); };
  }
  return [p](State x) { return -1.0 * vector_field_unchecked(x, p); };
}

std::vector<State> equilibrium_positions(const ModelParams& p) {
  std::vector<State> out;
  for (const auto& e : all_equilibria(p)) {
    out.push_back(e.position);
  }
  return out;
}

bool outside(State y, double lo, double hi) { return !(y.u >= lo && y.v >= lo && y.u <= hi && y.v <= hi); }

double point_segment_distance(State p, State a, State b) {
  const State ab = b - a;
  const double len2 = ab.u * ab.u + ab.v * ab.v;
  double t = len2 > 0.0 ? ((p.u - a.u) * ab.u + (p.v - a.v) * ab.v) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return distance(p, a + t * ab);
}

double polyline_distance(State p, const std::vector<State>& line) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    best = std::min(best, point_segment_distance(p, line[i], line[i + 1]));
  }
  if (line.size() == 1) {
    best = distance(p, line[0]);
  }
  return best;
}

} // namespace

// ---------------------------------------------------------------------------

Trajectory integrate(State start, const ModelParams& p, double tau_max, Direction dir, const IntegrateOptions& opt) {
  if (!is_finite(start)) {
    throw DomainError("integrate: non-finite start");
  }
  if (!(tau_max > 0.0) || !std::isfinite(tau_max)) {
    throw ValidationError("tau_max must be finite and > 0");
  }
  const std::vector<State> known = opt.known_equilibria ? *opt.known_equilibria : equilibrium_positions(p);
  const Field f = make_field(p, dir);

  Trajectory tr;
  tr.direction = dir;
  auto push = [&](double t, State y, State dy) {
    if (!opt.record && tr.y.size() >= 2) {
      tr.t.back() = t;
      tr.y.back() = y;
      tr.dy.back() = dy;
      return;
    }
    tr.t.push_back(t);
    tr.y.push_back(y);
    tr.dy.push_back(dy);
  };
  auto converged = [&](State y, State fy) {
    if (norm(fy) >= opt.eq_field_tol) {
      return -1;
    }
    for (std::size_t k = 0; k < known.size(); ++k) {
      if (distance(y, known[k]) < opt.eq_dist_tol) {
        return static_cast<int>(k);
      }
    }
    return -1;
  };

  const State f0 = f(start);
  push(0.0, start, f0);
  if (const int k = converged(start, f0); k >= 0) {
    tr.termination = Termination::converged_to_equilibrium;
    tr.equilibrium_index = k;
    return tr;
  }
  if (outside(start, opt.domain_min, opt.domain_max)) {
    tr.termination = Termination::left_domain;
    return tr;
  }

  Dopri5 st(f, start, 0.0, opt.tol);
  for (;;) {
    try {
      const DenseSegment& seg = st.advance(tau_max);
      tr.arc_length += distance(seg.y0, seg.y1);
      push(seg.t1, seg.y1, seg.f1);
      tr.stats = st.stats();
      if (outside(seg.y1, opt.domain_min, opt.domain_max)) {
        tr.termination = Termination::left_domain;
        break;
      }
      if (const int k = converged(seg.y1, seg.f1); k >= 0) {
        tr.termination = Termination::converged_to_equilibrium;
        tr.equilibrium_index = k;
        break;
      }
      if (tr.arc_length > opt.arc_length_cap) {
        tr.termination = Termination::arc_length_cap;
        break;
      }
      if (st.time() >= tau_max) {
        tr.termination = Termination::time_limit;
        break;
      }
    } catch (const StiffnessError& e) {
      tr.stats = st.stats();
      throw StiffnessError(e.what(), tr);
    }
  }
  return tr;
}

// ---------------------------------------------------------------------------
// Limit cycles

std::string_view to_string(CycleStability s) { return s == CycleStability::stable ? "stable" : "unstable"; }

int winding_number(const std::vector<State>& poly, State pt) {
  // Sum of signed angle increments.
  double total = 0.0;
  const std::size_t n = poly.size();
  if (n < 3) {
    return 0;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const State a = poly[i] - pt;
    const State b = poly[(i + 1) % n] - pt;
    total += std::atan2(a.u * b.v - a.v * b.u, a.u * b.u + a.v * b.v);
  }
  return static_cast<int>(std::lround(total / (2.0 * 3.14159265358979323846)));
}

std::optional<ReturnResult> return_map(const ModelParams& p, const Section& sec, double s, Direction dir,
                                       const CycleSearchOptions& opt, std::vector<State>* orbit) {
  const State start{sec.anchor.u + s, sec.anchor.v};
  const Field f = make_field(p, dir);
  const std::vector<State> known = equilibrium_positions(p);
  const bool upward = dir == Direction::forward;
  auto g = [&](State y) { return y.v - sec.anchor.v; };

  Dopri5 st(f, start, 0.0, opt.tol);
  if (orbit != nullptr) {
    orbit->assign(1, start);
  }
  for (;;) {
    const DenseSegment& seg = st.advance(opt.tau_per_return);
    const double g0 = g(seg.y0);
    const double g1 = g(seg.y1);
    const bool crossed = upward ? (g0 < 0.0 && g1 >= 0.0) : (g0 > 0.0 && g1 <= 0.0);
    if (crossed) {
      const auto [t, y] = locate_event(st, seg, g);
      if (y.u > sec.anchor.u) {
        if (orbit != nullptr) {
          orbit->push_back(y);
        }
        return ReturnResult{y.u - sec.anchor.u, t, y};
      }
    }
    if (orbit != nullptr) {
      orbit->push_back(seg.y1);
    }
    if (outside(seg.y1, -1e-12, 10.0) || st.time() >= opt.tau_per_return) {
      return std::nullopt;
    }
    if (norm(seg.f1) < 1e-12) {
      for (const auto& e : known) {
        if (distance(seg.y1, e) < 1e-9) {
          return std::nullopt;
        }
      }
    }
  }
}

namespace {

std::vector<double> default_fan(double s_max, int n) {
  std::vector<double> s;
  const double s_min = 1e-4;
  const int half = std::max(2, n / 2);
  for (int k = 0; k < half; ++k) {
    s.push_back(s_min * std::pow(s_max / s_min, double(k) / (half - 1)));
  }
  for (int k = 1; k <= n - half; ++k) {
    s.push_back(s_max * k / (n - half + 1));
  }
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end(), [](double a, double b) { return std::abs(a - b) < 1e-12; }), s.end());
  return s;
}

// Displacement d(s) = P(s) - s of the forward or backward return map.
struct Displacement {
  bool valid = false;
  double d = 0.0;
};

Displacement displacement(const ModelParams& p, const Section& sec, double s, Direction dir,
                          const CycleSearchOptions& opt, State around) {
  const auto r = return_map(p, sec, s, dir, opt);
  if (r) {
    return {true, r->s - s};
  }
  // Falling into the anchor equilibrium before one turn shrinks the orbit to
  // nothing; record it as P(s) = 0.
  const Trajectory tr = integrate({sec.anchor.u + s, sec.anchor.v}, p, opt.tau_per_return, dir,
                                  IntegrateOptions{opt.tol, 1e-12, 1e-9, 10.0, -1e-12,
                                                   std::numeric_limits<double>::infinity(), false, std::nullopt});
  if (tr.termination == Termination::converged_to_equilibrium && distance(tr.back(), around) < 1e-9) {
    return {true, -s};
  }
  return {};
}

} // namespace

std::vector<LimitCycle> find_limit_cycles(const ModelParams& p, const Equilibrium& around,
                                          const CycleSearchOptions& opt) {
  using K = EquilibriumKind;
  if (!(around.kind == K::attractor || around.kind == K::repeller || around.kind == K::marginal)) {
    throw PreconditionError("find_limit_cycles needs an attractor, repeller or marginal equilibrium, got " +
                            std::string(to_string(around.kind)));
  }
  const Section sec{around.position, {0.0, 1.0}};
  const double s_max = 0.95 * (1.0 - around.position.u);
  const std::vector<double> seeds = opt.seeds.empty() ? default_fan(s_max, opt.fan_size) : opt.seeds;

  std::vector<Displacement> d(seeds.size());
  parallel_for(seeds.size(), [&](std::size_t k) {
    d[k] = displacement(p, sec, seeds[k], Direction::forward, opt, around.position);
  });

  std::vector<LimitCycle> out;
  const auto positives = positive_equilibria(p);

  // Cycles are closed in the direction in which they attract, so the orbit,
  // displacement and slope come from a contracting map.
  auto finalize = [&](double s_star, Direction dir) {
    std::vector<State> orbit;
    const auto r = return_map(p, sec, s_star, dir, opt, &orbit);
    if (!r) {
      return;
    }
    LimitCycle c;
    c.section = sec;
    c.displacement = std::abs(r->s - s_star);
    if (c.displacement >= opt.fixed_point_tol) {
      return; // discontinuity of the map, e.g. a saddle's stable manifold
    }
    if (dir == Direction::backward) {
      std::reverse(orbit.begin(), orbit.end());
    }
    c.fixed_point = {sec.anchor.u + s_star, sec.anchor.v};
    c.period = r->tau;
    c.orbit = std::move(orbit);
    c.closure_residual = distance(c.orbit.front(), c.orbit.back());

    const double h = 1e-5 * std::max(s_star, 1e-2);
    const auto rp = return_map(p, sec, s_star + h, dir, opt);
    const auto rm = return_map(p, sec, s_star - h, dir, opt);
    double slope = rp && rm ? (rp->s - rm->s) / (2.0 * h) : 0.0;
    if (dir == Direction::backward) {
      slope = slope != 0.0 ? 1.0 / slope : std::numeric_limits<double>::infinity();
    }
    c.slope = slope;
    c.stability = std::abs(c.slope) < 1.0 ? CycleStability::stable : CycleStability::unstable;
    for (const auto& e : positives) {
      if (winding_number(c.orbit, e.position) != 0) {
        c.enclosed.push_back(e.label);
      }
    }
    const bool duplicate = std::any_of(out.begin(), out.end(), [&](const LimitCycle& o) {
      return std::abs(o.fixed_point.u - c.fixed_point.u) < opt.dedupe_tol;
    });
    if (!duplicate) {
      out.push_back(std::move(c));
    }
  };

  for (std::size_t k = 0; k + 1 < seeds.size(); ++k) {
    if (!d[k].valid || !d[k + 1].valid || (d[k].d < 0.0) == (d[k + 1].d < 0.0)) {
      continue;
    }
    // + to - in the forward map is an attracting fixed point.
    const bool stable_guess = d[k].d > 0.0;
    const Direction dir = stable_guess ? Direction::forward : Direction::backward;
    auto fn = [&](double s) {
      const auto r = return_map(p, sec, s, dir, opt);
      if (!r) {
        throw NumericError("return map undefined inside a bracket");
      }
      return r->s - s;
    };
    double a = seeds[k];
    double b = seeds[k + 1];
    double fa, fb;
    try {
      fa = fn(a);
      fb = fn(b);
    } catch (const NumericError&) {
      continue;
    }
    if ((fa < 0.0) == (fb < 0.0)) {
      continue;
    }
    double s_star = 0.0;
    try {
      std::uintmax_t iters = 100;
      auto tol = [](double x, double y) { return std::abs(y - x) < 1e-13; };
      const auto [lo, hi] = boost::math::tools::toms748_solve(fn, a, b, fa, fb, tol, iters);
      const double flo = fn(lo);
      const double fhi = fn(hi);
      s_star = std::abs(flo) <= std::abs(fhi) ? lo : hi;
    } catch (const NumericError&) {
      continue;
    }
    finalize(s_star, dir);
  }

  // Where orbits outside a cycle leave for another attractor the forward map
  // is undefined past it and no sign change is seen. Iterate the map in the
  // direction in which the cycle attracts, starting from the last seed that
  // stays around the anchor.
  for (std::size_t k = 0; k + 1 < seeds.size(); ++k) {
    if (!d[k].valid || d[k + 1].valid || d[k].d == 0.0) {
      continue;
    }
    const Direction dir = d[k].d < 0.0 ? Direction::backward : Direction::forward;
    double s = seeds[k];
    bool converged = false;
    for (int it = 0; it < 400; ++it) {
      const auto r = return_map(p, sec, s, dir, opt);
      if (!r || r->s <= 0.0) {
        break;
      }
      const double step = r->s - s;
      s = r->s;
      if (std::abs(step) < 1e-13 * std::max(1.0, s)) {
        converged = true;
        break;
      }
    }
    if (converged) {
      finalize(s, dir);
    }
  }
  std::sort(out.begin(), out.end(),
            [](const LimitCycle& x, const LimitCycle& y) { return x.fixed_point.u < y.fixed_point.u; });
  return out;
}

std::vector<LimitCycle> cycle_inventory(const ModelParams& p, const CycleSearchOptions& opt) {
  std::vector<LimitCycle> out;
  for (const auto& e : positive_equilibria(p)) {
    using K = EquilibriumKind;
    if (!(e.kind == K::attractor || e.kind == K::repeller || e.kind == K::marginal)) {
      continue;
    }
    for (auto& c : find_limit_cycles(p, e, opt)) {
      const bool duplicate = std::any_of(out.begin(), out.end(), [&](const LimitCycle& o) {
        return polyline_distance(c.fixed_point, o.orbit) < 10.0 * opt.dedupe_tol;
      });
      if (!duplicate) {
        out.push_back(std::move(c));
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Manifolds

std::string_view to_string(ManifoldType t) { return t == ManifoldType::stable ? "stable" : "unstable"; }

std::string_view to_string(EndpointKind k) {
  switch (k) {
  case EndpointKind::equilibrium: return "equilibrium";
  case EndpointKind::cycle: return "cycle";
  case EndpointKind::domain: return "domain";
  case EndpointKind::undetermined: return "undetermined";
  }
  return "?";
}

std::string compass_tag(State d) {
  const double au = std::abs(d.u);
  const double av = std::abs(d.v);
  if (av <= 1e-6 * au) {
    return d.u > 0.0 ? "E" : "W";
  }
  if (au <= 1e-6 * av) {
    return d.v > 0.0 ? "N" : "S";
  }
  return std::string(d.v > 0.0 ? "N" : "S") + (d.u > 0.0 ? "E" : "W");
}

ManifoldBranch trace_branch(const Equilibrium& saddle, const ModelParams& p, ManifoldType type, State seed_direction,
                            const ManifoldOptions& opt) {
  ManifoldBranch b;
  b.saddle_label = saddle.label;
  b.saddle = saddle.position;
  b.type = type;
  b.seed_direction = (1.0 / norm(seed_direction)) * seed_direction;
  // The tag follows the flow: away from the saddle on unstable branches,
  // towards it on stable ones.
  b.direction = compass_tag(type == ManifoldType::unstable ? b.seed_direction : -1.0 * b.seed_direction);

  const auto eqs = all_equilibria(p);
  IntegrateOptions io;
  io.tol = opt.tol;
  io.arc_length_cap = opt.arc_length_cap;
  io.known_equilibria = equilibrium_positions(p);
  const State start = saddle.position + opt.seed_offset * b.seed_direction;
  const Direction dir = type == ManifoldType::unstable ? Direction::forward : Direction::backward;
  Trajectory tr;
  try {
    tr = integrate(start, p, opt.tau_cap, dir, io);
  } catch (const StiffnessError& e) {
    tr = e.partial();
  }
  b.polyline = {saddle.position};
  b.polyline.insert(b.polyline.end(), tr.y.begin(), tr.y.end());
  b.termination = tr.termination;

  const State end = tr.back();
  if (tr.termination == Termination::converged_to_equilibrium) {
    b.endpoint = EndpointKind::equilibrium;
    b.endpoint_id = eqs[static_cast<std::size_t>(tr.equilibrium_index)].label;
    return b;
  }
  if (tr.termination == Termination::left_domain) {
    b.endpoint = EndpointKind::domain;
    return b;
  }
  for (const auto& e : eqs) {
    if (distance(end, e.position) < opt.capture_radius && distance(e.position, saddle.position) > 0.0) {
      b.endpoint = EndpointKind::equilibrium;
      b.endpoint_id = e.label;
      return b;
    }
  }
  for (std::size_t k = 0; k < opt.cycles.size(); ++k) {
    if (polyline_distance(end, opt.cycles[k].orbit) < opt.cycle_radius) {
      b.endpoint = EndpointKind::cycle;
      b.endpoint_id = "C" + std::to_string(k);
      return b;
    }
  }
  b.endpoint = EndpointKind::undetermined;
  return b;
}

std::array<ManifoldBranch, 4> trace_manifolds(const Equilibrium& saddle, const ModelParams& p,
                                              const ManifoldOptions& opt) {
  if (saddle.kind != EquilibriumKind::saddle) {
    throw PreconditionError("trace_manifolds needs a saddle, got " + std::string(to_string(saddle.kind)));
  }
  const Mat2 J = jacobian(saddle.position, p);
  const auto ev = eigenvalues(J);
  const double ls = std::min(ev[0].real(), ev[1].real());
  const double lu = std::max(ev[0].real(), ev[1].real());
  const State es = eigenvector(J, ls);
  const State eu = eigenvector(J, lu);
  return {trace_branch(saddle, p, ManifoldType::unstable, eu, opt),
          trace_branch(saddle, p, ManifoldType::unstable, -1.0 * eu, opt),
          trace_branch(saddle, p, ManifoldType::stable, es, opt),
          trace_branch(saddle, p, ManifoldType::stable, -1.0 * es, opt)};
}

// ---------------------------------------------------------------------------
// Basins

void PhaseWindow::validate() const {
  for (double x : {u_min, u_max, v_min, v_max}) {
    if (!std::isfinite(x)) {
      throw ValidationError("phase window bounds must be finite");
    }
  }
  if (!(u_max > u_min) || !(v_max > v_min)) {
    throw ValidationError("phase window must have positive extent");
  }
}

State BasinGrid::cell_center(int i, int j) const {
  return {window.u_min + (i + 0.5) * (window.u_max - window.u_min) / resolution,
          window.v_min + (j + 0.5) * (window.v_max - window.v_min) / resolution};
}

std::size_t BasinGrid::undecided_count() const {
  return static_cast<std::size_t>(std::count(cells.begin(), cells.end(), undecided));
}

BasinGrid basins(const ModelParams& p, const PhaseWindow& window, int resolution, const BasinOptions& opt) {
  window.validate();
  if (resolution < 1) {
    throw ValidationError("resolution must be >= 1");
  }
  BasinGrid grid;
  grid.window = window;
  grid.resolution = resolution;

  std::vector<State> eq_attractors;
  for (const auto& e : positive_equilibria(p)) {
    if (is_attracting(e.kind)) {
      grid.attractors.push_back(e.label);
      grid.attractor_positions.push_back(e.position);
      eq_attractors.push_back(e.position);
    }
  }
  std::vector<LimitCycle> cycles;
  {
    const auto all = opt.cycles ? *opt.cycles : cycle_inventory(p);
    for (const auto& c : all) {
      if (c.stability == CycleStability::stable) {
        cycles.push_back(c);
      }
    }
  }
  const int n_eq = static_cast<int>(eq_attractors.size());
  for (std::size_t k = 0; k < cycles.size(); ++k) {
    grid.attractors.push_back("C" + std::to_string(k));
    grid.attractor_positions.push_back(cycles[k].fixed_point);
  }
  if (grid.attractors.empty()) {
    throw PreconditionError("basins: no attracting equilibrium or stable cycle");
  }

  const Field f = make_field(p, Direction::forward);
  auto classify = [&](State start) -> int {
    for (int k = 0; k < n_eq; ++k) {
      if (distance(start, eq_attractors[static_cast<std::size_t>(k)]) < opt.capture_radius) {
        return k;
      }
    }
    Dopri5 st(f, start, 0.0, opt.tol);
    try {
      while (st.time() < opt.tau_budget) {
        const DenseSegment& seg = st.advance(opt.tau_budget);
        if (outside(seg.y1, -1e-12, 10.0)) {
          return BasinGrid::undecided;
        }
        for (int k = 0; k < n_eq; ++k) {
          if (distance(seg.y1, eq_attractors[static_cast<std::size_t>(k)]) < opt.capture_radius) {
            return k;
          }
        }
        for (std::size_t c = 0; c < cycles.size(); ++c) {
          const Section& sec = cycles[c].section;
          const double g0 = seg.y0.v - sec.anchor.v;
          const double g1 = seg.y1.v - sec.anchor.v;
          if (g0 < 0.0 && g1 >= 0.0) {
            const double w = g0 / (g0 - g1);
            const double u = seg.y0.u + w * (seg.y1.u - seg.y0.u);
            if (u > sec.anchor.u && std::abs(u - cycles[c].fixed_point.u) < opt.cycle_capture) {
              return n_eq + static_cast<int>(c);
            }
          }
        }
      }
    } catch (const StiffnessError&) {
      return BasinGrid::undecided;
    }
    return BasinGrid::undecided;
  };

  const auto n = static_cast<std::size_t>(resolution) * static_cast<std::size_t>(resolution);
  grid.cells.assign(n, BasinGrid::undecided);
  parallel_for(
      n,
      [&](std::size_t k) {
        const int i = static_cast<int>(k % static_cast<std::size_t>(resolution));
        const int j = static_cast<int>(k / static_cast<std::size_t>(resolution));
        grid.cells[k] = classify(grid.cell_center(i, j));
      },
      opt.workers == 0 ? default_workers() : opt.workers);
  return grid;
}

// ---------------------------------------------------------------------------
// Connections

std::string_view to_string(ConnectionKind k) { return k == ConnectionKind::heteroclinic ? "heteroclinic" : "homoclinic"; }

namespace {

struct SectionHit {
  bool hit = false;
  double v = 0.0;
  bool captured = false; ///< converged to the capture target first
};

// First crossing of u = u_sec at which the forward-time velocity has du < 0.
SectionHit first_leftward_crossing(const ModelParams& p, State start, Direction dir, double u_sec,
                                   const ConnectionOptions& opt, std::optional<State> capture) {
  const Field f = make_field(p, dir);
  Dopri5 st(f, start, 0.0, opt.tol);
  auto g = [&](State y) { return y.u - u_sec; };
  const bool forward = dir == Direction::forward;
  while (st.time() < opt.tau_cap) {
    const DenseSegment& seg = st.advance(opt.tau_cap);
    const double g0 = g(seg.y0);
    const double g1 = g(seg.y1);
    const bool crossed = forward ? (g0 > 0.0 && g1 <= 0.0) : (g0 < 0.0 && g1 >= 0.0);
    if (crossed) {
      const auto [t, y] = locate_event(st, seg, g);
      return {true, y.v, false};
    }
    if (outside(seg.y1, -1e-12, 10.0)) {
      return {};
    }
    if (capture && distance(seg.y1, *capture) < 1e-7) {
      return {false, 0.0, true};
    }
  }
  return {};
}

} // namespace

ConnectionSample connection_functional(const ModelParams& p, ConnectionKind kind, const ConnectionOptions& opt) {
  const auto eq = positive_equilibria(p);
  if (eq.size() != 3) {
    throw PreconditionError("connection search needs three distinct positive equilibria");
  }
  const State p2 = eq[1].position;
  const State p3 = eq[2].position;
  const double u_sec = 0.5 * (p2.u + p3.u);

  const Mat2 J2 = jacobian(p2, p);
  const auto ev2 = eigenvalues(J2);
  State es = eigenvector(J2, std::min(ev2[0].real(), ev2[1].real()));
  State eu2 = eigenvector(J2, std::max(ev2[0].real(), ev2[1].real()));
  if (es.u < 0.0) {
    es = -1.0 * es;
  }
  if (eu2.u < 0.0) {
    eu2 = -1.0 * eu2;
  }

  std::string unstable_name;
  State unstable_start;
  if (kind == ConnectionKind::heteroclinic) {
    const State e{1.0, 0.0};
    const Mat2 J1 = jacobian(e, p);
    const auto ev1 = eigenvalues(J1);
    State eu = eigenvector(J1, std::max(ev1[0].real(), ev1[1].real()));
    if (eu.v < 0.0) {
      eu = -1.0 * eu;
    }
    unstable_name = "W^u_NW(1,0)";
    unstable_start = e + opt.seed_offset * eu;
  } else {
    unstable_name = "W^u_" + compass_tag(eu2) + "(P2)";
    unstable_start = p2 + opt.seed_offset * eu2;
  }
  const std::string stable_name = "W^s_" + compass_tag(-1.0 * es) + "(P2)";

  ConnectionSample out;
  out.S = p.S();
  const SectionHit su = first_leftward_crossing(p, unstable_start, Direction::forward, u_sec, opt, p3);
  if (!su.hit && su.captured) {
    out.functional = -1.0;
    out.note = unstable_name + " converged to P3 before the section";
    return out;
  }
  if (!su.hit) {
    throw ConnectionError(unstable_name, "did not reach the section u = " + std::to_string(u_sec));
  }
  const SectionHit ss = first_leftward_crossing(p, p2 + opt.seed_offset * es, Direction::backward, u_sec, opt, {});
  if (!ss.hit) {
    throw ConnectionError(stable_name, "did not reach the section u = " + std::to_string(u_sec));
  }
  out.functional = su.v - ss.v;
  return out;
}

ConnectionResult connection_search(double A, double M, double Q, double s_lo, double s_hi, ConnectionKind kind,
                                   const ConnectionOptions& opt) {
  if (!(s_lo < s_hi)) {
    throw ValidationError("bracket must satisfy S_lo < S_hi");
  }
  ConnectionResult r;
  r.lo = s_lo;
  r.hi = s_hi;
  auto eval = [&](double S) {
    auto c = connection_functional(ModelParams::make(A, M, Q, S), kind, opt);
    r.log.push_back(c);
    return c.functional;
  };
  double f_lo = eval(s_lo);
  const double f_hi = eval(s_hi);
  if (f_lo == 0.0) {
    r.s_c = s_lo;
    return r;
  }
  if (f_hi == 0.0) {
    r.s_c = s_hi;
    return r;
  }
  if ((f_lo < 0.0) == (f_hi < 0.0)) {
    return r;
  }
  while (r.hi - r.lo > opt.bracket_tol) {
    const double mid = 0.5 * (r.lo + r.hi);
    const double fm = eval(mid);
    if (fm == 0.0) {
      r.lo = r.hi = mid;
      break;
    }
    if ((fm < 0.0) == (f_lo < 0.0)) {
      r.lo = mid;
      f_lo = fm;
    } else {
      r.hi = mid;
    }
  }
  r.s_c = 0.5 * (r.lo + r.hi);
  return r;
}

} // namespace lgallee
