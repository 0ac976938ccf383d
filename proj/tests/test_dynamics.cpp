#include <doctest.h>

#include <algorithm>
#include <random>
#include <thread>

#include "lgallee/dynamics.hpp"
#include "lgallee/errors.hpp"

using namespace lgallee;

namespace {

const Equilibrium& find(const std::vector<Equilibrium>& eqs, const std::string& label) {
  for (const auto& e : eqs) {
    if (e.label == label) {
      return e;
    }
  }
  FAIL("no equilibrium " << label);
  return eqs.front();
}

const ManifoldBranch& branch(const std::array<ManifoldBranch, 4>& bs, ManifoldType t, const std::string& tag) {
  for (const auto& b : bs) {
    if (b.type == t && b.direction == tag) {
      return b;
    }
  }
  FAIL("no branch " << tag);
  return bs.front();
}

void check_cycles(const std::vector<LimitCycle>& cs, const ModelParams& p) {
  const auto eqs = positive_equilibria(p);
  for (const auto& c : cs) {
    CHECK(c.closure_residual < 1e-7);
    CHECK(c.displacement < 1e-9);
    CHECK((std::abs(c.slope) < 1.0) == (c.stability == CycleStability::stable));
    for (const auto& label : c.enclosed) {
      CHECK(std::abs(winding_number(c.orbit, find(eqs, label).position)) == 1);
    }
  }
}

} // namespace

TEST_CASE("integrate: equilibrium start, attractor, sample order") {
  const auto p = ModelParams::make(0.5, -0.05, 0.51, 0.1);
  const auto eqs = positive_equilibria(p);
  REQUIRE(eqs.size() == 1);
  const Trajectory at = integrate(eqs[0].position, p, 100.0);
  CHECK(at.termination == Termination::converged_to_equilibrium);
  CHECK(at.arc_length == 0.0);

  const Trajectory tr = integrate({0.5, 0.2}, p, 1e5);
  CHECK(tr.termination == Termination::converged_to_equilibrium);
  CHECK(distance(tr.back(), eqs[0].position) < 1e-9);
  CHECK(std::adjacent_find(tr.t.begin(), tr.t.end(), std::greater_equal<>()) == tr.t.end());

  CHECK_THROWS_AS(integrate({0.5, 0.2}, p, -1.0), ValidationError);
  CHECK_THROWS_AS(integrate({NAN, 0.2}, p, 1.0), DomainError);
}

TEST_CASE("integrate: forward then backward returns to the start") {
  const auto p = ModelParams::make(0.1, -0.1, 0.363, 0.2);
  IntegrateOptions opt;
  opt.tol = {1e-12, 1e-14};
  for (State s : {State{0.4, 0.3}, State{0.7, 0.5}, State{0.2, 0.6}}) {
    const Trajectory f = integrate(s, p, 50.0, Direction::forward, opt);
    REQUIRE(f.termination == Termination::time_limit);
    const Trajectory b = integrate(f.back(), p, 50.0, Direction::backward, opt);
    CHECK(distance(b.back(), s) < 1e-6);
  }
}

TEST_CASE("integrate: trapping region is entered and kept") {
  std::mt19937_64 rng(20240601);
  std::uniform_real_distribution<double> ic(1e-3, 2.0);
  const std::array<ModelParams, 4> ps = {ModelParams::make(0.1, -0.1, 0.363, 0.2),
                                         ModelParams::make(0.5, -0.05, 0.51, 0.1),
                                         ModelParams::make(0.1, -0.1, 0.363, 0.13),
                                         ModelParams::make(0.3, -0.2, 0.4, 0.3)};
  IntegrateOptions opt;
  int entered = 0;
  for (int k = 0; k < 200; ++k) {
    const auto& p = ps[static_cast<std::size_t>(k) % ps.size()];
    const State s{ic(rng), ic(rng)};
    const Trajectory tr = integrate(s, p, 3000.0, Direction::forward, opt);
    auto inside = [](State y) { return y.u >= -1e-12 && y.v >= -1e-12 && y.u <= 1.0 + 1e-6 && y.v <= 1.0 + 1e-6; };
    const auto first = std::find_if(tr.y.begin(), tr.y.end(), inside);
    if (first != tr.y.end() && std::all_of(first, tr.y.end(), inside)) {
      ++entered;
    }
  }
  CHECK(entered == 200);
}

TEST_CASE("integrate: the v-axis is invariant and v decreases") {
  const auto p = ModelParams::make(0.1, -0.1, 0.363, 0.2);
  const Trajectory tr = integrate({0.0, 0.8}, p, 200.0);
  for (std::size_t i = 0; i < tr.y.size(); ++i) {
    CHECK(tr.y[i].u == 0.0);
    if (i > 0) {
      CHECK(tr.y[i].v < tr.y[i - 1].v);
    }
  }
}

TEST_CASE("integrate: results do not depend on concurrency") {
  const auto p = ModelParams::make(0.1, -0.1, 0.363, 0.3);
  const Trajectory a = integrate({0.3, 0.9}, p, 500.0);
  std::vector<Trajectory> runs(8);
  std::vector<std::jthread> ts;
  for (auto& r : runs) {
    ts.emplace_back([&r, &p] { r = integrate({0.3, 0.9}, p, 500.0); });
  }
  ts.clear();
  for (const auto& r : runs) {
    REQUIRE(r.y.size() == a.y.size());
    CHECK(std::equal(r.y.begin(), r.y.end(), a.y.begin()));
    CHECK(r.t == a.t);
  }
}

TEST_CASE("cycles: one stable cycle around a single repeller") {
  const auto p = ModelParams::make(0.5, -0.05, 0.51, 0.045);
  const auto cs = cycle_inventory(p);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].stability == CycleStability::stable);
  CHECK(cs[0].enclosed == std::vector<std::string>{"P1"});
  check_cycles(cs, p);
}

TEST_CASE("cycles: stable cycle around all three equilibria") {
  const auto p = ModelParams::make(0.1, -0.1, 0.363, 0.13);
  const auto cs = cycle_inventory(p);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].stability == CycleStability::stable);
  CHECK(cs[0].enclosed == std::vector<std::string>{"P1", "P2", "P3"});
  check_cycles(cs, p);
}

TEST_CASE("cycles: inner unstable and outer stable around an attractor") {
  const auto p = ModelParams::make(0.1, -0.1, 0.345, 0.135);
  const auto eqs = positive_equilibria(p);
  REQUIRE(eqs.size() == 1);
  CHECK(eqs[0].kind == EquilibriumKind::attractor);
  const auto cs = find_limit_cycles(p, eqs[0]);
  REQUIRE(cs.size() == 2);
  CHECK(cs[0].stability == CycleStability::unstable);
  CHECK(cs[1].stability == CycleStability::stable);
  CHECK(cs[0].fixed_point.u < cs[1].fixed_point.u);
  check_cycles(cs, p);

  // Forward orbits just inside the unstable cycle fall to the attractor,
  // just outside they reach the stable one.
  const double s_in = cs[0].fixed_point.u - eqs[0].position.u - 1e-3;
  const double s_out = cs[0].fixed_point.u - eqs[0].position.u + 1e-3;
  CycleSearchOptions o;
  const auto r_in = return_map(p, cs[0].section, s_in, Direction::forward, o);
  const auto r_out = return_map(p, cs[0].section, s_out, Direction::forward, o);
  REQUIRE(r_in);
  REQUIRE(r_out);
  CHECK(r_in->s < s_in);
  CHECK(r_out->s > s_out);
}

TEST_CASE("cycles: unstable cycle around P3 when nearby orbits leave for P1") {
  const auto p = ModelParams::make(0.1, -0.1, 0.363, 0.225);
  const auto cs = cycle_inventory(p);
  REQUIRE(cs.size() == 1);
  CHECK(cs[0].stability == CycleStability::unstable);
  CHECK(cs[0].enclosed == std::vector<std::string>{"P3"});
  check_cycles(cs, p);
}

TEST_CASE("cycles: a saddle has none") {
  const auto p = ModelParams::make(0.1, -0.1, 0.363, 0.2);
  const auto eqs = positive_equilibria(p);
  CHECK_THROWS_AS(find_limit_cycles(p, eqs[1]), PreconditionError);
}

TEST_CASE("winding number") {
  const std::vector<State> sq{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  CHECK(winding_number(sq, {0.5, 0.5}) == 1);
  CHECK(winding_number(sq, {1.5, 0.5}) == 0);
  std::vector<State> cw(sq.rbegin(), sq.rend());
  CHECK(winding_number(cw, {0.5, 0.5}) == -1);
}

TEST_CASE("manifolds: compass tags") {
  CHECK(compass_tag({1, 1}) == "NE");
  CHECK(compass_tag({-1, 1}) == "NW");
  CHECK(compass_tag({-1, -1}) == "SW");
  CHECK(compass_tag({1, -1}) == "SE");
  CHECK(compass_tag({1, 1e-9}) == "E");
  CHECK(compass_tag({0, -1}) == "S");
}

TEST_CASE("manifolds: endpoints across the F09 sequence") {
  {
    const auto p = ModelParams::make(0.1, -0.1, 0.363, 0.3);
    const auto eqs = all_equilibria(p);
    const auto e = trace_manifolds(find(eqs, "E"), p);
    CHECK(branch(e, ManifoldType::unstable, "NW").endpoint_id == "P3");
    const auto p2 = trace_manifolds(find(eqs, "P2"), p);
    const auto& ws_sw = branch(p2, ManifoldType::stable, "SW");
    CHECK(ws_sw.endpoint == EndpointKind::domain);
    CHECK(distance(ws_sw.polyline[1], ws_sw.saddle) == doctest::Approx(1e-6).epsilon(1e-6));
  }
  {
    const auto p = ModelParams::make(0.1, -0.1, 0.363, 0.235);
    const auto eqs = all_equilibria(p);
    CHECK(branch(trace_manifolds(find(eqs, "E"), p), ManifoldType::unstable, "NW").endpoint_id == "P1");
    CHECK(branch(trace_manifolds(find(eqs, "P2"), p), ManifoldType::stable, "NE").endpoint_id == "O");
  }
  {
    const auto p = ModelParams::make(0.1, -0.1, 0.363, 0.18);
    const auto eqs = all_equilibria(p);
    CHECK(branch(trace_manifolds(find(eqs, "E"), p), ManifoldType::unstable, "NW").endpoint_id == "P1");
  }
  {
    const auto p = ModelParams::make(0.1, -0.1, 0.363, 0.13);
    const auto eqs = all_equilibria(p);
    ManifoldOptions o;
    o.cycles = cycle_inventory(p);
    CHECK(branch(trace_manifolds(find(eqs, "E"), p, o), ManifoldType::unstable, "NW").endpoint ==
          EndpointKind::cycle);
  }
  const auto p = ModelParams::make(0.1, -0.1, 0.363, 0.3);
  CHECK_THROWS_AS(trace_manifolds(find(all_equilibria(p), "P1"), p), PreconditionError);
}

TEST_CASE("basins: separatrix, global attractor, determinism, tiny grids") {
  const auto p = ModelParams::make(0.1, -0.1, 0.363, 0.3);
  BasinOptions one;
  one.workers = 1;
  BasinOptions many;
  many.workers = 7;
  const BasinGrid a = basins(p, {}, 16, one);
  const BasinGrid b = basins(p, {}, 16, many);
  CHECK(a.cells == b.cells);
  CHECK(a.attractors == std::vector<std::string>{"P1", "P3"});
  CHECK(std::count(a.cells.begin(), a.cells.end(), 0) > 0);
  CHECK(std::count(a.cells.begin(), a.cells.end(), 1) > 0);

  // Points just either side of W^s(P2) go to different attractors.
  const auto eqs = all_equilibria(p);
  const auto ws = trace_manifolds(find(eqs, "P2"), p);
  const auto& sep = branch(ws, ManifoldType::stable, "SW").polyline;
  const State q = sep[sep.size() / 4];
  const State next = sep[sep.size() / 4 + 1];
  const State t = (1.0 / distance(next, q)) * (next - q);
  const State n{-t.v, t.u};
  const Trajectory left = integrate(q + 1e-4 * n, p, 1e6);
  const Trajectory right = integrate(q - 1e-4 * n, p, 1e6);
  REQUIRE(left.termination == Termination::converged_to_equilibrium);
  REQUIRE(right.termination == Termination::converged_to_equilibrium);
  CHECK(left.equilibrium_index != right.equilibrium_index);

  const auto g = ModelParams::make(0.1, -0.1, 0.363, 0.18);
  const BasinGrid ga = basins(g, {}, 12);
  CHECK(ga.attractors == std::vector<std::string>{"P1"});
  CHECK(std::all_of(ga.cells.begin(), ga.cells.end(), [](int c) { return c == 0; }));

  const BasinGrid single = basins(g, {}, 1);
  CHECK(single.cells.size() == 1);

  // A cell centred on the attractor maps to it.
  const State p1 = ga.attractor_positions[0];
  const BasinGrid centred = basins(g, {p1.u - 0.01, p1.u + 0.01, p1.v - 0.01, p1.v + 0.01}, 1);
  CHECK(centred.cells[0] == 0);

  CHECK_THROWS_AS(basins(g, {0.5, 0.5, 0.0, 1.0}, 4), ValidationError);
  CHECK_THROWS_AS(basins(g, {}, 0), ValidationError);
}

TEST_CASE("connections: argument checks and same-sign brackets") {
  CHECK_THROWS_AS(connection_search(0.1, -0.1, 0.363, 0.3, 0.235, ConnectionKind::heteroclinic), ValidationError);
  const auto r = connection_search(0.1, -0.1, 0.363, 0.26, 0.3, ConnectionKind::heteroclinic);
  CHECK_FALSE(r.s_c.has_value());
  CHECK(r.log.size() == 2);
}
