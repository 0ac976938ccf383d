#include "lgallee/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <ostream>
#include <set>
#include <sstream>

#include <CLI11.hpp>

#include "lgallee/errors.hpp"
#include "lgallee/presets.hpp"
#include "lgallee/report.hpp"
#include "lgallee/svg.hpp"

namespace lgallee {

namespace {

const Preset* preset_of(const RunConfig& cfg) { return cfg.figure ? &find_preset(*cfg.figure) : nullptr; }

double need(const std::optional<double>& given, const Preset* pre, double Preset::*field, const char* flag) {
  if (given) {
    return *given;
  }
  if (pre != nullptr) {
    return pre->*field;
  }
  throw ValidationError(std::string("missing parameter ") + flag);
}

void check_exclusive(const RunConfig& cfg) {
  const bool any_nondim = cfg.A || cfg.M || cfg.Q || cfg.S;
  const bool any_dim = cfg.r || cfg.K || cfg.q || cfg.a || cfg.s || cfg.h || cfg.m;
  if (cfg.dimensional && any_nondim) {
    throw ValidationError("give either -A -M -Q -S or --dimensional, not both");
  }
  if (!cfg.dimensional && any_dim) {
    throw ValidationError("-r -K -q -a -s -h -m require --dimensional");
  }
}

ModelParams from_dimensional(const RunConfig& cfg) {
  auto req = [](const std::optional<double>& v, const char* flag) {
    if (!v) {
      throw ValidationError(std::string("--dimensional needs ") + flag);
    }
    return *v;
  };
  DimensionalParams dp;
  dp.r = req(cfg.r, "-r");
  dp.K = req(cfg.K, "-K");
  dp.q = req(cfg.q, "-q");
  dp.a = req(cfg.a, "-a");
  dp.s = req(cfg.s, "-s");
  dp.h = req(cfg.h, "-h");
  dp.m = req(cfg.m, "-m");
  dp.validate();
  return nondimensionalize(dp);
}

std::pair<double, double> resolve_shape(const RunConfig& cfg) {
  check_exclusive(cfg);
  if (cfg.dimensional) {
    const ModelParams p = from_dimensional(cfg);
    return {p.A(), p.M()};
  }
  const Preset* pre = preset_of(cfg);
  const double A = need(cfg.A, pre, &Preset::A, "-A");
  const double M = need(cfg.M, pre, &Preset::M, "-M");
  validate_shape(A, M);
  return {A, M};
}

IntegratorOptions integrator(const RunConfig& cfg, IntegratorOptions base) {
  if (cfg.rtol) {
    base.rtol = *cfg.rtol;
  }
  if (cfg.atol) {
    base.atol = *cfg.atol;
  }
  if (!(base.rtol > 0.0) || !(base.atol > 0.0)) {
    throw ValidationError("integration tolerances must be > 0");
  }
  return base;
}

ClassificationTolerances classification(const RunConfig& cfg) {
  if (!(cfg.merge_tol > 0.0)) {
    throw ValidationError("--tol-merge must be > 0");
  }
  ClassificationTolerances t;
  t.merge = cfg.merge_tol;
  return t;
}

std::string prefix(const RunConfig& cfg) { return cfg.figure ? *cfg.figure + "_" : std::string(); }

bool want_csv(const RunConfig& cfg) { return cfg.format != OutputFormat::svg; }
bool want_svg(const RunConfig& cfg) { return cfg.format != OutputFormat::csv; }

std::string fixed(double x, int digits = 10) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

std::string cell_text(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

void put_params(Report& r, const ModelParams& p) {
  r.set("A", fmt(p.A()));
  r.set("M", fmt(p.M()));
  r.set("Q", fmt(p.Q()));
  r.set("S", fmt(p.S()));
  if (auto w = p.scope_warning()) {
    r.set("warning", *w);
  }
}

void put_tolerances(Report& r, const IntegratorOptions& t) {
  r.set("tol.rtol", fmt(t.rtol));
  r.set("tol.atol", fmt(t.atol));
}

std::vector<State> decimate(const std::vector<State>& pts, double spacing = 2e-3) {
  std::vector<State> out;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (out.empty() || i + 1 == pts.size() || distance(out.back(), pts[i]) >= spacing) {
      out.push_back(pts[i]);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// equilibria

Report equilibria_report(const ModelParams& p, const ClassificationTolerances& tol) {
  const auto ca = cubic_analysis(p, tol);
  const auto sn = saddle_node_thresholds(p.A(), p.M());
  const auto oc = origin_character(p);
  Report r;
  r.kind = "equilibria";
  put_params(r, p);
  r.set("T", fmt(ca.T));
  r.set("L", fmt(ca.L));
  r.set("lemma_case", std::string(to_string(ca.lemma_case)));
  r.set("delta", fmt(ca.delta));
  r.set("q_minus", sn ? fmt(sn->q_minus) : "none");
  r.set("q_plus", sn ? fmt(sn->q_plus) : "none");
  r.set("origin", oc.verdict);
  r.set("origin.ix", oc.ix_exists ? fmt(oc.ix_position) : "absent");
  r.set("tol.merge", fmt(tol.merge));
  r.columns = {"label", "u", "v", "kind", "lambda1_re", "lambda1_im", "lambda2_re", "lambda2_im", "det", "trace",
               "multiplicity"};
  for (const auto& e : all_equilibria(p, tol)) {
    r.add_row({e.label, fmt(e.position.u), fmt(e.position.v), std::string(to_string(e.kind)),
               fmt(e.eigenvalues[0].real()), fmt(e.eigenvalues[0].imag()), fmt(e.eigenvalues[1].real()),
               fmt(e.eigenvalues[1].imag()), fmt(e.det), fmt(e.trace), fmt(e.multiplicity)});
  }
  return r;
}

std::string equilibria_text(const Report& r) {
  std::ostringstream os;
  os << "A = " << r.get("A") << "  M = " << r.get("M") << "  Q = " << r.get("Q") << "  S = " << r.get("S") << '\n';
  os << "T = " << r.get("T") << "  L = " << r.get("L") << "  case " << r.get("lemma_case")
     << "  delta = " << r.get("delta") << '\n';
  os << "Q- = " << r.get("q_minus") << "  Q+ = " << r.get("q_plus") << '\n';
  os << "origin: " << r.get("origin") << " (I_x " << r.get("origin.ix") << ")\n";
  for (const auto& [k, v] : r.header) {
    if (k == "warning") {
      os << "warning: " << v << '\n';
    }
  }
  int positive = 0;
  for (const auto& row : r.rows) {
    if (row[0].front() == 'P') {
      ++positive;
    }
  }
  os << positive << " positive equilibria\n";
  char line[256];
  for (const auto& row : r.rows) {
    auto complex_text = [](const std::string& re, const std::string& im) {
      const double i = parse_double(im);
      return fixed(parse_double(re), 6) + (i < 0.0 ? "-" : "+") + fixed(std::abs(i), 6) + "i";
    };
    std::snprintf(line, sizeof line, "  %-6s (%.10f, %.10f)  %-22s  eig %s, %s\n", row[0].c_str(),
                  parse_double(row[1]), parse_double(row[2]), row[3].c_str(), complex_text(row[4], row[5]).c_str(),
                  complex_text(row[6], row[7]).c_str());
    os << line;
  }
  return os.str();
}

// ---------------------------------------------------------------------------
// portrait

struct PlotObject {
  std::string id;
  std::string kind;
  std::vector<State> pts;
};

std::vector<State> trajectory_seeds(int n) {
  std::vector<State> out;
  const int top = (n + 1) / 2;
  const int right = n - top;
  for (int k = 0; k < top; ++k) {
    out.push_back({0.05 + 1.0 * (k + 0.5) / top, 1.05});
  }
  for (int k = 0; k < right; ++k) {
    out.push_back({1.05, 1.0 * (k + 0.5) / right});
  }
  return out;
}

int trajectory_count(const RunConfig& cfg) {
  if (cfg.trajectories) {
    const std::string& t = *cfg.trajectories;
    if (t == "none") {
      return 0;
    }
    int n = 0;
    const auto res = std::from_chars(t.data(), t.data() + t.size(), n);
    if (res.ec != std::errc() || res.ptr != t.data() + t.size() || n < 0 || n > 1000) {
      throw ValidationError("--trajectories takes a count in [0, 1000] or 'none'");
    }
    return n;
  }
  const Preset* pre = preset_of(cfg);
  return pre != nullptr ? pre->trajectories : 8;
}

std::string manifold_id(const ManifoldBranch& b) {
  return std::string(b.type == ManifoldType::unstable ? "Wu_" : "Ws_") + b.direction + "(" + b.saddle_label + ")";
}

CommandResult portrait_impl(const RunConfig& cfg, const ModelParams& p) {
  const auto tol = classification(cfg);
  const IntegratorOptions itol = integrator(cfg, {1e-10, 1e-12});
  const int n_traj = trajectory_count(cfg);
  const auto eqs = all_equilibria(p, tol);

  CycleSearchOptions co;
  co.tol = itol;
  const auto cycles = cycle_inventory(p, co);

  std::vector<PlotObject> objects;
  {
    PlotObject prey{"prey_nullcline", "nullcline-prey", {}};
    for (int k = 0; k <= 440; ++k) {
      const double u = 1.1 * k / 440.0;
      prey.pts.push_back({u, prey_growth(u, p.A(), p.M()) / p.Q()});
    }
    objects.push_back(prey);
    objects.push_back({"prey_nullcline_axis", "nullcline-prey", {{0.0, 0.0}, {0.0, 1.1}}});
    objects.push_back({"predator_nullcline", "nullcline-predator", {{0.0, 0.0}, {1.1, 1.1}}});
    objects.push_back({"predator_nullcline_axis", "nullcline-predator", {{0.0, 0.0}, {1.1, 0.0}}});
  }
  for (std::size_t k = 0; k < cycles.size(); ++k) {
    auto pts = decimate(cycles[k].orbit);
    if (!pts.empty()) {
      pts.back() = pts.front();
    }
    objects.push_back({"C" + std::to_string(k), "cycle-" + std::string(to_string(cycles[k].stability)), pts});
  }

  Report rep;
  rep.kind = "portrait";
  put_params(rep, p);
  put_tolerances(rep, itol);
  rep.set("trajectories", fmt(n_traj));
  for (std::size_t k = 0; k < cycles.size(); ++k) {
    const auto& c = cycles[k];
    std::string enc;
    for (const auto& e : c.enclosed) {
      enc += (enc.empty() ? "" : " ") + e;
    }
    rep.set("cycle.C" + std::to_string(k), std::string(to_string(c.stability)) + " period " + fixed(c.period) +
                                               " encloses " + (enc.empty() ? "none" : enc) + " closure " +
                                               fixed(c.closure_residual, 3));
  }

  ManifoldOptions mo;
  mo.tol = itol;
  mo.cycles = cycles;
  std::vector<std::pair<std::string, ManifoldBranch>> manifolds;
  for (const auto& e : eqs) {
    if (e.kind != EquilibriumKind::saddle) {
      continue;
    }
    for (const auto& b : trace_manifolds(e, p, mo)) {
      const State seed = b.saddle + mo.seed_offset * b.seed_direction;
      if (seed.u < 0.0 || seed.v < 0.0) {
        continue; // leaves the first quadrant at once
      }
      manifolds.emplace_back(manifold_id(b), b);
    }
  }
  for (const auto& [id, b] : manifolds) {
    objects.push_back({id, "manifold-" + std::string(to_string(b.type)), decimate(b.polyline)});
    std::string end(to_string(b.endpoint));
    if (!b.endpoint_id.empty()) {
      end += " " + b.endpoint_id;
    }
    rep.set("manifold." + id, end);
  }

  IntegrateOptions io;
  io.tol = itol;
  io.arc_length_cap = 20.0;
  const auto seeds = trajectory_seeds(n_traj);
  for (std::size_t k = 0; k < seeds.size(); ++k) {
    Trajectory tr;
    try {
      tr = integrate(seeds[k], p, 2e4, Direction::forward, io);
    } catch (const StiffnessError& e) {
      tr = e.partial();
    }
    objects.push_back({"T" + std::to_string(k), "trajectory", decimate(tr.y)});
  }
  for (const auto& e : eqs) {
    objects.push_back({e.label, "equilibrium-" + std::string(to_string(e.kind)), {e.position}});
  }

  rep.columns = {"object_id", "object_kind", "u", "v"};
  for (const auto& o : objects) {
    for (const State& s : o.pts) {
      rep.add_row({o.id, o.kind, fmt(s.u), fmt(s.v)});
    }
  }

  CommandResult res;
  std::ostringstream os;
  os << equilibria_text(equilibria_report(p, tol));
  os << cycles.size() << " limit cycle(s)\n";
  for (const auto& [k, v] : rep.header) {
    if (k.rfind("cycle.", 0) == 0 || k.rfind("manifold.", 0) == 0) {
      os << "  " << k << ": " << v << '\n';
    }
  }
  res.text = os.str();
  const std::string pre = prefix(cfg);
  if (want_csv(cfg)) {
    res.files.push_back({pre + "portrait.csv", rep.serialize()});
  }
  if (want_svg(cfg)) {
    SvgCanvas c(0.0, 1.1, 0.0, 1.1);
    c.axes("u (prey)", "v (predator)");
    c.title("A=" + fixed(p.A()) + "  M=" + fixed(p.M()) + "  Q=" + fixed(p.Q()) + "  S=" + fixed(p.S()));
    for (const auto& o : objects) {
      if (o.kind == "trajectory") {
        c.polyline(o.pts, "#b0b0b0", 1.0);
      }
    }
    for (const auto& o : objects) {
      if (o.kind == "nullcline-prey") {
        c.polyline(o.pts, "#c0392b", 2.0);
      } else if (o.kind == "nullcline-predator") {
        c.polyline(o.pts, "#8b5a2b", 2.0);
      } else if (o.kind == "manifold-unstable") {
        c.polyline(o.pts, "#2a6fb5", 1.5);
      } else if (o.kind == "manifold-stable") {
        c.polyline(o.pts, "#4f9a3a", 1.5);
      } else if (o.kind.rfind("cycle-", 0) == 0) {
        c.polyline(o.pts, "#000000", 2.5, o.kind == "cycle-unstable", true);
      }
    }
    for (const auto& e : eqs) {
      c.glyph(e.position, glyph_for(e.kind));
    }
    c.legend_line("prey nullcline", "#c0392b", false);
    c.legend_line("predator nullcline", "#8b5a2b", false);
    c.legend_line("unstable manifold", "#2a6fb5", false);
    c.legend_line("stable manifold", "#4f9a3a", false);
    c.legend_line("stable cycle", "#000000", false);
    c.legend_line("unstable cycle", "#000000", true);
    c.legend_glyph("attractor", Glyph::attractor);
    c.legend_glyph("repeller", Glyph::repeller);
    c.legend_glyph("saddle", Glyph::saddle);
    c.legend_glyph("saddle-node", Glyph::saddle_node);
    res.files.push_back({pre + "portrait.svg", c.str()});
  }
  return res;
}

// ---------------------------------------------------------------------------
// basins

CommandResult basins_impl(const RunConfig& cfg, const ModelParams& p, int default_resolution) {
  const PhaseWindow win = cfg.phase_window.value_or(PhaseWindow{});
  win.validate();
  const int res_n = cfg.resolution.value_or(default_resolution);
  if (res_n < 1 || res_n > 2000) {
    throw ValidationError("--resolution must lie in [1, 2000]");
  }
  BasinOptions bo;
  bo.tol = integrator(cfg, bo.tol);
  bo.workers = cfg.workers;
  const BasinGrid g = basins(p, win, res_n, bo);

  Report rep;
  rep.kind = "basins";
  put_params(rep, p);
  put_tolerances(rep, bo.tol);
  rep.set("window", fmt(win.u_min) + " " + fmt(win.u_max) + " " + fmt(win.v_min) + " " + fmt(win.v_max));
  rep.set("resolution", fmt(res_n));
  for (std::size_t k = 0; k < g.attractors.size(); ++k) {
    rep.set("attractor." + g.attractors[k], fmt(g.attractor_positions[k].u) + " " + fmt(g.attractor_positions[k].v));
  }
  rep.set("undecided", fmt(g.undecided_count()));
  rep.columns = {"cell_u", "cell_v", "attractor_id"};
  std::vector<std::size_t> counts(g.attractors.size(), 0);
  for (int j = 0; j < res_n; ++j) {
    for (int i = 0; i < res_n; ++i) {
      const State c = g.cell_center(i, j);
      const int a = g.cell(i, j);
      if (a >= 0) {
        ++counts[static_cast<std::size_t>(a)];
      }
      rep.add_row({fmt(c.u), fmt(c.v), a >= 0 ? g.attractors[static_cast<std::size_t>(a)] : "undecided"});
    }
  }

  CommandResult res;
  std::ostringstream os;
  os << res_n << "x" << res_n << " basin grid\n";
  for (std::size_t k = 0; k < g.attractors.size(); ++k) {
    os << "  " << g.attractors[k] << ": " << counts[k] << " cells\n";
  }
  os << "  undecided: " << g.undecided_count() << " cells\n";
  res.text = os.str();
  const std::string pre = prefix(cfg);
  if (want_csv(cfg)) {
    res.files.push_back({pre + "basins.csv", rep.serialize()});
  }
  if (want_svg(cfg)) {
    SvgCanvas c(win.u_min, win.u_max, win.v_min, win.v_max);
    const double du = (win.u_max - win.u_min) / res_n;
    const double dv = (win.v_max - win.v_min) / res_n;
    for (int j = 0; j < res_n; ++j) {
      for (int i = 0; i < res_n; ++i) {
        const int a = g.cell(i, j);
        const State ctr = g.cell_center(i, j);
        c.rect(ctr.u - du / 2, ctr.v - dv / 2, ctr.u + du / 2, ctr.v + dv / 2,
               a >= 0 ? palette(static_cast<std::size_t>(a)) : std::string_view("#dddddd"));
      }
    }
    c.axes("u (prey)", "v (predator)");
    c.title("basins  A=" + fixed(p.A()) + "  M=" + fixed(p.M()) + "  Q=" + fixed(p.Q()) + "  S=" + fixed(p.S()));
    for (const auto& e : all_equilibria(p)) {
      c.glyph(e.position, glyph_for(e.kind));
    }
    for (std::size_t k = 0; k < g.attractors.size(); ++k) {
      c.legend_line(g.attractors[k], palette(k), false);
    }
    c.legend_line("undecided", "#dddddd", false);
    res.files.push_back({pre + "basins.svg", c.str()});
  }
  return res;
}

// ---------------------------------------------------------------------------
// bifurcation

CommandResult bifurcation_impl(const RunConfig& cfg, double A, double M) {
  const Window win = cfg.window.value_or(Window{});
  win.validate();
  const int res_n = cfg.resolution.value_or(80);
  if (res_n < 1 || res_n > 2000) {
    throw ValidationError("--resolution must lie in [1, 2000]");
  }
  const BifurcationDiagram d = diagram(A, M, win, res_n);

  Report curves;
  curves.kind = "bifurcation";
  curves.set("A", fmt(A));
  curves.set("M", fmt(M));
  curves.set("window", fmt(win.q_min) + " " + fmt(win.q_max) + " " + fmt(win.s_min) + " " + fmt(win.s_max));
  curves.set("resolution", fmt(res_n));
  curves.set("hopf.max_s_on_curve", fmt(d.hopf.max_s_on_curve));
  curves.set("hopf.trace_zero_max", fmt(d.hopf.trace_zero_maximum.value));
  curves.set("hopf.trace_zero_argmax", fmt(d.hopf.trace_zero_maximum.u));
  curves.columns = {"curve", "id", "Q", "S", "u", "info"};
  for (std::size_t k = 0; k < d.sn_lines.size(); ++k) {
    const auto& l = d.sn_lines[k];
    const std::string id = "SN" + std::to_string(k + 1);
    for (double s : {win.s_min, win.s_max}) {
      curves.add_row({"sn", id, fmt(l.Q), fmt(s), fmt(l.u_double), std::string(to_string(l.type))});
    }
  }
  for (const auto& h : d.hopf.points) {
    curves.add_row({"hopf", "H" + std::to_string(h.branch), fmt(h.Q), fmt(h.S), fmt(h.u), ""});
  }
  for (std::size_t k = 0; k < d.bt.size(); ++k) {
    const auto& b = d.bt[k];
    curves.add_row({"bt", "BT" + std::to_string(k + 1), fmt(b.Q), fmt(b.S), fmt(b.u_double),
                    std::string(to_string(b.type))});
  }

  Report regions;
  regions.kind = "regions";
  regions.set("A", fmt(A));
  regions.set("M", fmt(M));
  regions.set("window", curves.get("window"));
  regions.set("resolution", fmt(res_n));
  regions.columns = {"i", "j", "Q", "S", "count", "key", "roman"};
  std::map<std::string, std::size_t> census;
  for (int j = 0; j < res_n; ++j) {
    for (int i = 0; i < res_n; ++i) {
      const auto& r = d.region(i, j);
      ++census[r.key()];
      regions.add_row({fmt(i), fmt(j), fmt(d.cell_q(i)), fmt(d.cell_s(j)), fmt(r.equilibrium_count), r.key(),
                       r.roman_label()});
    }
  }

  CommandResult res;
  std::ostringstream os;
  os << "A = " << fmt(A) << "  M = " << fmt(M) << '\n';
  for (std::size_t k = 0; k < d.sn_lines.size(); ++k) {
    os << "SN" << k + 1 << ": Q = " << fixed(d.sn_lines[k].Q, 12) << " (" << to_string(d.sn_lines[k].type) << ")\n";
  }
  os << "Hopf: " << d.hopf.points.size() << " points on " << d.hopf.branch_count << " branch(es), max S "
     << fixed(d.hopf.max_s_on_curve, 12) << "; trace-zero max " << fixed(d.hopf.trace_zero_maximum.value, 12)
     << '\n';
  for (std::size_t k = 0; k < d.bt.size(); ++k) {
    os << "BT" << k + 1 << ": Q = " << fixed(d.bt[k].Q, 12) << "  S = " << fixed(d.bt[k].S, 12) << '\n';
  }
  os << "regions:\n";
  for (const auto& [key, n] : census) {
    os << "  " << key << ": " << n << " cells\n";
  }
  res.text = os.str();

  const std::string pre = cfg.figure ? prefix(cfg) : std::string();
  if (want_csv(cfg)) {
    res.files.push_back({pre + "bifurcation.csv", curves.serialize()});
    res.files.push_back({pre + "regions.csv", regions.serialize()});
  }
  if (want_svg(cfg)) {
    SvgCanvas c(win.q_min, win.q_max, win.s_min, win.s_max);
    std::vector<std::string> keys;
    for (const auto& [key, n] : census) {
      keys.push_back(key);
    }
    const double dq = (win.q_max - win.q_min) / res_n;
    const double ds = (win.s_max - win.s_min) / res_n;
    for (int j = 0; j < res_n; ++j) {
      for (int i = 0; i < res_n; ++i) {
        const auto idx = static_cast<std::size_t>(
            std::find(keys.begin(), keys.end(), d.region(i, j).key()) - keys.begin());
        c.rect(d.cell_q(i) - dq / 2, d.cell_s(j) - ds / 2, d.cell_q(i) + dq / 2, d.cell_s(j) + ds / 2,
               palette(idx));
      }
    }
    c.axes("Q", "S");
    c.title("bifurcation diagram  A=" + fixed(A) + "  M=" + fixed(M));
    for (const auto& l : d.sn_lines) {
      c.polyline({{l.Q, win.s_min}, {l.Q, win.s_max}}, "#000000", 2.0, true);
    }
    for (int b = 0; b < d.hopf.branch_count; ++b) {
      std::vector<State> pts;
      for (const auto& h : d.hopf.branch(b)) {
        pts.push_back({h.Q, h.S});
      }
      c.polyline(pts, "#c0392b", 2.5);
    }
    for (const auto& b : d.bt) {
      c.glyph({b.Q, b.S}, Glyph::attractor, "#000000", 6.0);
    }
    c.legend_line("saddle-node", "#000000", true);
    c.legend_line("Hopf", "#c0392b", false);
    for (std::size_t k = 0; k < keys.size(); ++k) {
      c.legend_line(keys[k], palette(k), false);
    }
    res.files.push_back({pre + "bifurcation.svg", c.str()});
  }
  return res;
}

// ---------------------------------------------------------------------------
// roots sweep

CommandResult roots_impl(const RunConfig& cfg, const Preset& pre) {
  const auto tol = classification(cfg);
  Report rep;
  rep.kind = "roots";
  rep.set("A", fmt(pre.A));
  rep.set("M", fmt(pre.M));
  const auto sn = saddle_node_thresholds(pre.A, pre.M);
  rep.set("q_minus", sn ? fmt(sn->q_minus) : "none");
  rep.set("q_plus", sn ? fmt(sn->q_plus) : "none");
  rep.columns = {"Q", "count_with_multiplicity", "distinct", "double_root", "lemma_case", "delta", "roots"};
  std::ostringstream os;
  SvgCanvas c(0.0, 1.0, -0.02, 0.02);
  for (std::size_t k = 0; k < pre.q_sweep.size(); ++k) {
    const double Q = pre.q_sweep[k];
    const ModelParams p = ModelParams::make(pre.A, pre.M, Q, pre.S);
    const auto ca = cubic_analysis(p, tol);
    std::string roots;
    for (const auto& r : ca.roots) {
      roots += (roots.empty() ? "" : ";") + fmt(r.value) + (r.multiplicity > 1 ? "x" + fmt(r.multiplicity) : "");
    }
    rep.add_row({fmt(Q), fmt(ca.count_with_multiplicity()), fmt(ca.distinct_count()),
                 ca.has_double_root() ? "yes" : "no", std::string(to_string(ca.lemma_case)), fmt(ca.delta), roots});
    os << "Q = " << fixed(Q, 12) << ": " << ca.count_with_multiplicity() << " roots (" << ca.distinct_count()
       << " distinct)" << (ca.has_double_root() ? ", double root" : "") << '\n';
    std::vector<State> curve;
    for (int i = 0; i <= 500; ++i) {
      const double u = i / 500.0;
      curve.push_back({u, g_cubic(u, p)});
    }
    c.polyline(curve, palette(k), 2.0);
    c.legend_line("Q = " + fixed(Q, 6), palette(k), false);
  }
  c.polyline({{0.0, 0.0}, {1.0, 0.0}}, "#000000", 1.0, true);
  c.axes("u", "g(u)");
  c.title("g(u) for A=" + fixed(pre.A) + "  M=" + fixed(pre.M));

  CommandResult res;
  res.text = os.str();
  if (want_csv(cfg)) {
    res.files.push_back({pre.id + "_roots.csv", rep.serialize()});
  }
  if (want_svg(cfg)) {
    res.files.push_back({pre.id + "_cubic.svg", c.str()});
  }
  return res;
}

// ---------------------------------------------------------------------------
// verify

struct Check {
  std::string name;
  double measured = 0.0;
  double tolerance = 0.0;
  std::string relation; ///< "<", ">" or "info"
  std::string note;
  bool pass = true;
};

Mat2 fd_jacobian(State x, const ModelParams& p) {
  const double h = 1e-6;
  const State fu = vector_field({x.u + h, x.v}, p) - vector_field({x.u - h, x.v}, p);
  const State fv = vector_field({x.u, x.v + h}, p) - vector_field({x.u, x.v - h}, p);
  return {fu.u / (2 * h), fv.u / (2 * h), fu.v / (2 * h), fv.v / (2 * h)};
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

int sign_changes_away_from(const ModelParams& p, const std::vector<RealRoot>& roots, double guard) {
  const int n = 100000;
  int count = 0;
  double prev = g_cubic(0.0, p);
  for (int i = 1; i <= n; ++i) {
    const double u = static_cast<double>(i) / n;
    const double g = g_cubic(u, p);
    if ((prev < 0.0) != (g < 0.0)) {
      bool near_double = false;
      for (const auto& r : roots) {
        near_double = near_double || (r.multiplicity == 2 && std::abs(u - r.value) < guard);
      }
      if (!near_double) {
        ++count;
      }
    }
    prev = g;
  }
  return count;
}

ModelParams verify_params(const RunConfig& cfg) {
  if (cfg.at_sn && cfg.at_bt) {
    throw ValidationError("--at-sn and --at-bt are exclusive");
  }
  if (!cfg.at_sn && !cfg.at_bt) {
    return resolve_params(cfg);
  }
  const std::string& which = cfg.at_sn ? *cfg.at_sn : *cfg.at_bt;
  if (which != "minus" && which != "plus") {
    throw ValidationError("--at-sn/--at-bt take 'minus' or 'plus'");
  }
  if (cfg.Q) {
    throw ValidationError("-Q conflicts with --at-sn/--at-bt");
  }
  const auto [A, M] = resolve_shape(cfg);
  const auto sn = saddle_node_thresholds(A, M);
  if (!sn) {
    throw ValidationError("no saddle-node thresholds for these (A, M)");
  }
  const double Q = which == "minus" ? sn->q_minus : sn->q_plus;
  if (cfg.at_sn) {
    if (!cfg.S) {
      throw ValidationError("missing parameter -S");
    }
    return ModelParams::make(A, M, Q, *cfg.S);
  }
  if (cfg.S) {
    throw ValidationError("-S conflicts with --at-bt");
  }
  const auto type = which == "minus" ? CollapseType::p1_p2 : CollapseType::p2_p3;
  for (const auto& b : bt_points(A, M)) {
    if (b.type == type) {
      return ModelParams::make(A, M, b.Q, b.S);
    }
  }
  throw ValidationError("no Bogdanov-Takens point with S > 0 on that saddle-node line");
}

} // namespace

ModelParams resolve_params(const RunConfig& cfg) {
  check_exclusive(cfg);
  if (cfg.dimensional) {
    return from_dimensional(cfg);
  }
  const Preset* pre = preset_of(cfg);
  if (pre != nullptr && (pre->kind == PresetKind::roots || pre->kind == PresetKind::diagram) && !(cfg.Q && cfg.S)) {
    throw ValidationError("figure " + pre->id + " has no single (Q, S) point; use 'figure " + pre->id + "'");
  }
  return ModelParams::make(need(cfg.A, pre, &Preset::A, "-A"), need(cfg.M, pre, &Preset::M, "-M"),
                           need(cfg.Q, pre, &Preset::Q, "-Q"), need(cfg.S, pre, &Preset::S, "-S"));
}

CommandResult cmd_equilibria(const RunConfig& cfg) {
  const ModelParams p = resolve_params(cfg);
  const Report rep = equilibria_report(p, classification(cfg));
  CommandResult res;
  res.text = equilibria_text(rep);
  if (cfg.out_given || cfg.figure) {
    res.files.push_back({prefix(cfg) + "equilibria.csv", rep.serialize()});
  }
  return res;
}

CommandResult cmd_portrait(const RunConfig& cfg) { return portrait_impl(cfg, resolve_params(cfg)); }

CommandResult cmd_basins(const RunConfig& cfg) {
  const Preset* pre = preset_of(cfg);
  return basins_impl(cfg, resolve_params(cfg), pre != nullptr ? pre->basin_resolution : 100);
}

CommandResult cmd_bifurcation(const RunConfig& cfg) {
  const auto [A, M] = resolve_shape(cfg);
  return bifurcation_impl(cfg, A, M);
}

CommandResult cmd_verify(const RunConfig& cfg) {
  const ModelParams p = verify_params(cfg);
  const auto ctol = classification(cfg);
  std::vector<Check> checks;
  auto add = [&](std::string name, double measured, double tol, std::string rel, std::string note = {}) {
    Check c{std::move(name), measured, cfg.check_tol.value_or(tol), std::move(rel), std::move(note), true};
    if (c.relation == "<") {
      c.pass = c.measured < c.tolerance;
    } else if (c.relation == ">") {
      c.pass = c.measured > c.tolerance;
    }
    checks.push_back(std::move(c));
  };

  const auto ca = cubic_analysis(p, ctol);
  double residual = 0.0;
  int outside = 0;
  int simple = 0;
  for (const auto& r : ca.roots) {
    residual = std::max(residual, std::abs(g_cubic(r.value, p)));
    outside += (r.value <= 0.0 || r.value >= 1.0) ? 1 : 0;
    simple += r.multiplicity % 2;
  }
  add("cubic_root_residual", residual, 1e-10, "<");
  add("roots_in_unit_interval", outside, 0.5, "<", "roots outside (0,1)");
  add("sign_scan_root_count", std::abs(sign_changes_away_from(p, ca.roots, 1e-4) - simple), 0.5, "<",
      "sign changes of g on 1e5 points vs simple roots");

  const auto eqs = all_equilibria(p, ctol);
  double jac_err = 0.0;
  double det_err = 0.0;
  double tr_err = 0.0;
  int class_mismatch = 0;
  std::vector<EquilibriumKind> positive_kinds;
  for (const auto& e : eqs) {
    const Mat2 J = jacobian(e.position, p);
    const Mat2 F = fd_jacobian(e.position, p);
    const double scale = std::max(1.0, J.max_abs());
    jac_err = std::max({jac_err, std::abs(J.a11 - F.a11) / scale, std::abs(J.a12 - F.a12) / scale,
                        std::abs(J.a21 - F.a21) / scale, std::abs(J.a22 - F.a22) / scale});
    if (e.label.front() != 'P') {
      continue;
    }
    positive_kinds.push_back(e.kind);
    det_err = std::max(det_err, std::abs(J.det() - diagonal_det(e.position.u, p)));
    tr_err = std::max(tr_err, std::abs(J.trace() - diagonal_trace(e.position.u, p)));
    if (e.near_fold || e.marginal) {
      continue;
    }
    const auto ev = eigenvalues(F);
    const double r0 = ev[0].real();
    const double r1 = ev[1].real();
    EquilibriumKind fd_kind = EquilibriumKind::marginal;
    if (r0 < 0.0 && r1 > 0.0 && ev[0].imag() == 0.0) {
      fd_kind = EquilibriumKind::saddle;
    } else if (r0 < 0.0 && r1 < 0.0) {
      fd_kind = EquilibriumKind::attractor;
    } else if (r0 > 0.0 && r1 > 0.0) {
      fd_kind = EquilibriumKind::repeller;
    }
    class_mismatch += fd_kind == e.kind ? 0 : 1;
  }
  add("jacobian_vs_finite_differences", jac_err, 1e-6, "<");
  add("classification_vs_fd_eigenvalues", class_mismatch, 0.5, "<", "mismatching equilibria");
  add("determinant_identity", det_err, 1e-10, "<");
  add("trace_identity", tr_err, 1e-10, "<");
  if (positive_kinds.size() == 3) {
    add("middle_equilibrium_is_saddle", positive_kinds[1] == EquilibriumKind::saddle ? 0.0 : 1.0, 0.5, "<");
  }
  const Mat2 JE = jacobian({1.0, 0.0}, p);
  add("boundary_E_is_saddle", JE.det(), 0.0, "<", "det J(1,0)");

  const auto oc = origin_character(p);
  const double AS = p.A() * p.S();
  add("origin_blowup_eigenvalues",
      std::max(std::abs(oc.origin_eigenvalues[1].real() - AS), std::abs(oc.origin_eigenvalues[0].real() + AS)),
      1e-14, "<");
  add("origin_verdict", oc.verdict == "non-hyperbolic saddle" ? 0.0 : 1.0, 0.5, "<", oc.verdict);
  if (oc.ix_exists) {
    const double expected = -p.A() * p.M() * p.S() / (p.M() + p.S());
    double got = oc.ix_eigenvalues[0].real();
    if (std::abs(oc.ix_eigenvalues[1].real() - expected) < std::abs(got - expected)) {
      got = oc.ix_eigenvalues[1].real();
    }
    add("origin_ix_eigenvalue", std::abs(got - expected), 1e-14, "<", "lambda2(I_x) = -AMS/(M+S)");
  }

  if (ca.has_double_root()) {
    const auto so = sotomayor_check(p, ctol);
    const bool bt = !so.simple_zero_eigenvalue;
    add("sotomayor_transversality", std::abs(so.transversality), 1e-12, ">", fixed(so.transversality, 12));
    add("sotomayor_nondegeneracy", std::abs(so.nondegeneracy), 1e-12, ">", fixed(so.nondegeneracy, 12));
    add("transversality_closed_form", rel_diff(so.transversality, so.transversality_closed_form), 1e-8, "<");
    add("nondegeneracy_closed_form", rel_diff(so.nondegeneracy, so.nondegeneracy_closed_form), 1e-8, "<");
    add("nondegeneracy_printed_form", rel_diff(so.nondegeneracy, so.nondegeneracy_printed), 0.0, "info",
        "printed expression gives " + fixed(so.nondegeneracy_printed, 12));
    if (bt) {
      add("simple_zero_eigenvalue", so.zero_eigenvalue_gap, 1e-9, "info",
          "double zero eigenvalue: Bogdanov-Takens point, saddle-node degenerate");
      const auto cu = cusp_check(p);
      add("cusp_det", std::abs(cu.det), 1e-9, "<");
      add("cusp_trace", std::abs(cu.trace), 1e-9, "<");
      add("cusp_nilpotent_block", std::abs(cu.nilpotent_entry), 1e-9, ">", fixed(cu.nilpotent_entry, 12));
      add("cusp_entry_closed_form", rel_diff(cu.nilpotent_entry, cu.expected_entry), 1e-8, "<");
      add("cusp_entry_printed_sign", rel_diff(cu.nilpotent_entry, cu.printed_entry), 0.0, "info",
          "printed expression gives " + fixed(cu.printed_entry, 12));
    } else {
      add("simple_zero_eigenvalue", so.zero_eigenvalue_gap, 1e-9, ">");
    }
  }

  Report rep;
  rep.kind = "verify";
  put_params(rep, p);
  rep.set("tol.merge", fmt(ctol.merge));
  if (cfg.check_tol) {
    rep.set("tol.override", fmt(*cfg.check_tol));
  }
  rep.columns = {"check", "measured", "tolerance", "relation", "status", "note"};
  std::vector<std::string> failed;
  std::ostringstream os;
  os << "A = " << fmt(p.A()) << "  M = " << fmt(p.M()) << "  Q = " << fmt(p.Q()) << "  S = " << fmt(p.S()) << '\n';
  char line[512];
  for (const auto& c : checks) {
    const std::string status = c.relation == "info" ? "INFO" : (c.pass ? "PASS" : "FAIL");
    if (!c.pass) {
      failed.push_back(c.name);
    }
    rep.add_row({c.name, fmt(c.measured), fmt(c.tolerance), c.relation, status, cell_text(c.note)});
    std::snprintf(line, sizeof line, "%-4s %-34s %-14s %s %-8s %s\n", status.c_str(), c.name.c_str(),
                  fixed(c.measured, 6).c_str(), c.relation == "info" ? " " : c.relation.c_str(),
                  c.relation == "info" ? "" : fixed(c.tolerance, 3).c_str(), c.note.c_str());
    os << line;
  }
  CommandResult res;
  if (!failed.empty()) {
    res.exit_code = exit_code::verify_failed;
    os << "FAILED:";
    for (const auto& f : failed) {
      os << ' ' << f;
    }
    os << '\n';
  } else {
    os << "all checks passed\n";
  }
  res.text = os.str();
  if (cfg.out_given) {
    res.files.push_back({"verify.csv", rep.serialize()});
  }
  return res;
}

CommandResult cmd_connection(const RunConfig& cfg) {
  check_exclusive(cfg);
  double A = 0.1;
  double M = -0.1;
  double Q = 0.363;
  std::pair<double, double> br{0.235, 0.3};
  ConnectionKind kind = ConnectionKind::heteroclinic;
  if (cfg.preset) {
    if (*cfg.preset == "heteroclinic") {
      kind = ConnectionKind::heteroclinic;
      br = {0.235, 0.3};
    } else if (*cfg.preset == "homoclinic") {
      kind = ConnectionKind::homoclinic;
      br = {0.225, 0.235};
    } else {
      throw ValidationError("--preset takes 'heteroclinic' or 'homoclinic'");
    }
    A = cfg.A.value_or(A);
    M = cfg.M.value_or(M);
    Q = cfg.Q.value_or(Q);
  } else {
    if (!cfg.A || !cfg.M || !cfg.Q) {
      throw ValidationError("connection needs -A -M -Q (or --preset)");
    }
    if (!cfg.bracket) {
      throw ValidationError("connection needs --bracket lo hi (or --preset)");
    }
    A = *cfg.A;
    M = *cfg.M;
    Q = *cfg.Q;
  }
  if (cfg.kind) {
    if (*cfg.kind == "heteroclinic") {
      kind = ConnectionKind::heteroclinic;
    } else if (*cfg.kind == "homoclinic") {
      kind = ConnectionKind::homoclinic;
    } else {
      throw ValidationError("--kind takes 'heteroclinic' or 'homoclinic'");
    }
  }
  if (cfg.bracket) {
    br = *cfg.bracket;
  }
  if (!(br.first < br.second) || !(br.first > 0.0)) {
    throw ValidationError("--bracket needs 0 < lo < hi");
  }
  validate_shape(A, M);
  (void)ModelParams::make(A, M, Q, br.first);
  ConnectionOptions co;
  co.tol = integrator(cfg, co.tol);
  if (!(cfg.bracket_tol > 0.0)) {
    throw ValidationError("--tol-bracket must be > 0");
  }
  co.bracket_tol = cfg.bracket_tol;
  const ConnectionResult r = connection_search(A, M, Q, br.first, br.second, kind, co);

  Report rep;
  rep.kind = "connection";
  rep.set("A", fmt(A));
  rep.set("M", fmt(M));
  rep.set("Q", fmt(Q));
  rep.set("connection", std::string(to_string(kind)));
  rep.set("bracket", fmt(br.first) + " " + fmt(br.second));
  put_tolerances(rep, co.tol);
  rep.set("tol.bracket", fmt(co.bracket_tol));
  rep.set("s_c", r.s_c ? fmt(*r.s_c) : "none");
  rep.set("final_bracket", fmt(r.lo) + " " + fmt(r.hi));
  rep.columns = {"iteration", "S", "functional", "note"};
  std::ostringstream os;
  os << to_string(kind) << " search at A = " << fmt(A) << "  M = " << fmt(M) << "  Q = " << fmt(Q) << " on ["
     << fmt(br.first) << ", " << fmt(br.second) << "]\n";
  for (std::size_t k = 0; k < r.log.size(); ++k) {
    const auto& s = r.log[k];
    rep.add_row({fmt(k), fmt(s.S), fmt(s.functional), cell_text(s.note)});
    os << "  " << k << "  S = " << fixed(s.S, 12) << "  F = " << fixed(s.functional, 6)
       << (s.note.empty() ? "" : "  (" + s.note + ")") << '\n';
  }
  if (r.s_c) {
    os << "S_c = " << fixed(*r.s_c, 10) << '\n';
  } else {
    os << "no sign change\n";
  }
  CommandResult res;
  res.text = os.str();
  if (cfg.out_given) {
    res.files.push_back({"connection.csv", rep.serialize()});
  }
  return res;
}

CommandResult cmd_figure(const RunConfig& cfg) {
  if (!cfg.figure) {
    throw ValidationError("figure needs an id");
  }
  const Preset& pre = find_preset(*cfg.figure);
  if (cfg.A || cfg.M || cfg.Q || cfg.S || cfg.dimensional) {
    throw ValidationError("figure presets pin their parameters; drop -A -M -Q -S");
  }
  RunConfig c = cfg;
  switch (pre.kind) {
  case PresetKind::roots: return roots_impl(c, pre);
  case PresetKind::diagram: return bifurcation_impl(c, pre.A, pre.M);
  case PresetKind::portrait:
  case PresetKind::portrait_basins: {
    const ModelParams p = resolve_params(c);
    CommandResult res;
    const Report eq = equilibria_report(p, classification(c));
    res.files.push_back({pre.id + "_equilibria.csv", eq.serialize()});
    CommandResult por = portrait_impl(c, p);
    res.text = pre.id + ": " + pre.description + '\n' + por.text;
    for (auto& f : por.files) {
      res.files.push_back(std::move(f));
    }
    if (pre.kind == PresetKind::portrait_basins) {
      CommandResult bas = basins_impl(c, p, pre.basin_resolution);
      res.text += bas.text;
      for (auto& f : bas.files) {
        res.files.push_back(std::move(f));
      }
    }
    return res;
  }
  }
  return {};
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Leslie-Gower model with weak Allee effect: equilibria, bifurcations and phase portraits", "lgallee"};
  app.set_help_flag("--help", "Print this help message and exit");
  app.require_subcommand(1);

  RunConfig cfg;
  std::vector<double> window;
  std::vector<double> phase_window;
  std::vector<double> bracket;
  std::string format = "both";
  std::string figure_id;

  auto common = [&](CLI::App* sub) {
    sub->add_option("-A", cfg.A, "scaled Allee-shifted half saturation, in (0,1)");
    sub->add_option("-M", cfg.M, "scaled Allee threshold (M < 0: weak)");
    sub->add_option("-Q", cfg.Q, "scaled predation rate");
    sub->add_option("-S", cfg.S, "scaled predator growth rate");
    sub->add_flag("--dimensional", cfg.dimensional, "use the dimensional parameters below");
    sub->add_option("-r", cfg.r, "prey growth rate");
    sub->add_option("-K", cfg.K, "carrying capacity");
    sub->add_option("-q", cfg.q, "predation rate");
    sub->add_option("-a", cfg.a, "half saturation");
    sub->add_option("-s", cfg.s, "predator growth rate");
    sub->add_option("-h", cfg.h, "prey quality");
    sub->add_option("-m", cfg.m, "Allee threshold");
    sub->add_option("--figure", cfg.figure, "take unset parameters from a figure preset");
    sub->add_option("--out", cfg.out_dir, "output directory")->each([&](const std::string&) { cfg.out_given = true; });
    sub->add_option("--format", format, "csv, svg or both")->check(CLI::IsMember({"csv", "svg", "both"}));
    sub->add_option("--resolution", cfg.resolution, "grid resolution N (N x N cells)");
    sub->add_option("--window", window, "qmin qmax smin smax")->expected(4);
    sub->add_option("--phase-window", phase_window, "umin umax vmin vmax")->expected(4);
    sub->add_option("--trajectories", cfg.trajectories, "number of sample trajectories, or 'none'");
    sub->add_option("--tol-rtol", cfg.rtol, "integrator relative tolerance");
    sub->add_option("--tol-atol", cfg.atol, "integrator absolute tolerance");
    sub->add_option("--tol-merge", cfg.merge_tol, "root merge distance");
    sub->add_option("--tol-bracket", cfg.bracket_tol, "bisection width in S");
    sub->add_option("--tol", cfg.check_tol, "verify: replace every check tolerance");
    sub->add_option("--workers", cfg.workers, "worker threads (0 = all cores)");
  };

  auto* eq = app.add_subcommand("equilibria", "list and classify equilibria");
  auto* por = app.add_subcommand("portrait", "phase portrait (SVG + CSV)");
  auto* bif = app.add_subcommand("bifurcation", "two-parameter diagram in (Q, S)");
  auto* bas = app.add_subcommand("basins", "basin-of-attraction grid");
  auto* ver = app.add_subcommand("verify", "run the invariant checks");
  auto* con = app.add_subcommand("connection", "locate a heteroclinic or homoclinic value of S");
  auto* fig = app.add_subcommand("figure", "write every output of a figure preset");
  for (auto* s : {eq, por, bif, bas, ver, con, fig}) {
    common(s);
  }
  ver->add_option("--at-sn", cfg.at_sn, "minus|plus: Q on the saddle-node line");
  ver->add_option("--at-bt", cfg.at_bt, "minus|plus: the Bogdanov-Takens point");
  con->add_option("--preset", cfg.preset, "heteroclinic|homoclinic");
  con->add_option("--bracket", bracket, "lo hi")->expected(2);
  con->add_option("--kind", cfg.kind, "heteroclinic|homoclinic");
  fig->add_option("id", figure_id, "preset id")->required();
  app.add_subcommand("presets", "list the figure presets");

  std::vector<std::string> argv_s{"lgallee"};
  argv_s.insert(argv_s.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_s) {
    argv.push_back(s.data());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return exit_code::ok;
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      out << app.help();
      return exit_code::ok;
    }
    err << "error: " << e.what() << '\n';
    return exit_code::validation;
  }

  try {
    if (!window.empty()) {
      cfg.window = Window{window[0], window[1], window[2], window[3]};
    }
    if (!phase_window.empty()) {
      cfg.phase_window = PhaseWindow{phase_window[0], phase_window[1], phase_window[2], phase_window[3]};
    }
    if (!bracket.empty()) {
      cfg.bracket = std::pair{bracket[0], bracket[1]};
    }
    cfg.format = format == "csv" ? OutputFormat::csv : (format == "svg" ? OutputFormat::svg : OutputFormat::both);

    CommandResult res;
    const auto* sub = app.get_subcommands().front();
    cfg.subcommand = sub->get_name();
    if (cfg.subcommand == "presets") {
      std::ostringstream os;
      for (const auto& p : presets()) {
        os << p.id << "  " << p.description;
        for (const auto& f : preset_files(p)) {
          os << "  " << f;
        }
        os << '\n';
      }
      res.text = os.str();
    } else if (cfg.subcommand == "equilibria") {
      res = cmd_equilibria(cfg);
    } else if (cfg.subcommand == "portrait") {
      res = cmd_portrait(cfg);
    } else if (cfg.subcommand == "bifurcation") {
      res = cmd_bifurcation(cfg);
    } else if (cfg.subcommand == "basins") {
      res = cmd_basins(cfg);
    } else if (cfg.subcommand == "verify") {
      res = cmd_verify(cfg);
    } else if (cfg.subcommand == "connection") {
      res = cmd_connection(cfg);
    } else if (cfg.subcommand == "figure") {
      cfg.figure = figure_id;
      res = cmd_figure(cfg);
    }
    for (const auto& f : res.files) {
      write_atomic(std::filesystem::path(cfg.out_dir) / f.name, f.content);
    }
    out << res.text;
    for (const auto& f : res.files) {
      out << "wrote " << (std::filesystem::path(cfg.out_dir) / f.name).string() << '\n';
    }
    if (res.exit_code == exit_code::verify_failed) {
      err << "verification failed\n";
    }
    return res.exit_code;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return exit_code::validation;
  } catch (const IoError& e) {
    err << "I/O error: " << e.what() << '\n';
    return exit_code::io;
  } catch (const ConnectionError& e) {
    err << "numeric error in branch " << e.branch() << ": " << e.what() << '\n';
    return exit_code::numeric;
  } catch (const NumericError& e) {
    err << "numeric error: " << e.what() << '\n';
    return exit_code::numeric;
  } catch (const PreconditionError& e) {
    err << "numeric error: " << e.what() << '\n';
    return exit_code::numeric;
  } catch (const DomainError& e) {
    err << "numeric error: " << e.what() << '\n';
    return exit_code::numeric;
  }
}

} // namespace lgallee
