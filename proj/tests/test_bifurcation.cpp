#include <doctest.h>

#include <cmath>
#include <random>

#include "lgallee/bifurcation.hpp"
#include "lgallee/errors.hpp"

using namespace lgallee;

namespace {

const double kQm = (73.0 - std::sqrt(5.0)) / 200.0;
const double kQp = (73.0 + std::sqrt(5.0)) / 200.0;

Mat2 fd_jacobian(State x, const ModelParams& p) {
  const double h = 1e-7;
  const State fu = vector_field({x.u + h, x.v}, p) - vector_field({x.u - h, x.v}, p);
  const State fv = vector_field({x.u, x.v + h}, p) - vector_field({x.u, x.v - h}, p);
  return {fu.u / (2 * h), fv.u / (2 * h), fu.v / (2 * h), fv.v / (2 * h)};
}

// Newton on (det, tr) = (0, 0) in the unknowns (u, S), with Q(u) chosen so
// that (u, u) is an equilibrium; derivatives by central differences.
struct BTSolution {
  double u, Q, S;
};
BTSolution newton_bt(double A, double M, double u, double S) {
  auto residual = [&](double uu, double SS) {
    const double Q = prey_growth(uu, A, M) / uu;
    const Mat2 J = jacobian({uu, uu}, ModelParams::make(A, M, Q, SS));
    return State{J.det(), J.trace()};
  };
  for (int it = 0; it < 60; ++it) {
    const State r = residual(u, S);
    const double h = 1e-7;
    const State du = (residual(u + h, S) - residual(u - h, S)) * (0.5 / h);
    const State dS = (residual(u, S + h) - residual(u, S - h)) * (0.5 / h);
    const Mat2 J{du.u, dS.u, du.v, dS.v};
    const State step = J.inverse() * r;
    u -= step.u;
    S -= step.v;
    if (norm(step) < 1e-15) {
      break;
    }
  }
  return {u, prey_growth(u, A, M) / u, S};
}

double cross(State a, State b) { return a.u * b.v - a.v * b.u; }

bool segments_intersect(State p1, State p2, State q1, State q2) {
  const double d1 = cross(q2 - q1, p1 - q1);
  const double d2 = cross(q2 - q1, p2 - q1);
  const double d3 = cross(p2 - p1, q1 - p1);
  const double d4 = cross(p2 - p1, q2 - p1);
  return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

} // namespace

TEST_CASE("window validation") {
  CHECK_NOTHROW(Window{}.validate());
  CHECK_THROWS_AS((Window{0.3, 0.3, 0.0, 0.45}.validate()), ValidationError);
  CHECK_THROWS_AS((Window{0.3, 0.42, 0.2, 0.1}.validate()), ValidationError);
  CHECK_THROWS_AS(diagram(0.1, -0.1, Window{0.3, 0.42, 0.1, 0.1}, 10), ValidationError);
}

TEST_CASE("hopf curve: trace zero, det positive, sorted, maximum") {
  const auto c = hopf_curve(0.1, -0.1, 800);
  REQUIRE(c.points.size() > 700);
  CHECK(c.branch_count == 2);
  for (std::size_t i = 0; i < c.points.size(); ++i) {
    const auto& h = c.points[i];
    const auto p = ModelParams::make(0.1, -0.1, h.Q, h.S);
    CHECK(std::abs(diagonal_trace(h.u, p)) < 1e-10);
    CHECK(diagonal_det(h.u, p) > 0.0);
    CHECK(std::abs(g_cubic(h.u, p)) < 1e-12);
    if (i > 0) {
      CHECK(c.points[i - 1].Q <= h.Q);
    }
  }
  CHECK(std::abs(c.trace_zero_maximum.value - 361.0 / 1200.0) < 1e-8);
  // On the det > 0 part the supremum is the upper BT point.
  const auto bts = bt_points(0.1, -0.1);
  REQUIRE(bts.size() == 2);
  CHECK(c.max_s_on_curve == doctest::Approx(std::max(bts[0].S, bts[1].S)).epsilon(1e-12));
  CHECK(c.max_s_on_curve < c.trace_zero_maximum.value);
}

TEST_CASE("hopf curve at Q = 0.363: both outer equilibria repel at S = 0.13") {
  const auto c = hopf_curve(0.1, -0.1, 4000);
  const auto eq = positive_equilibria(ModelParams::make(0.1, -0.1, 0.363, 0.13));
  REQUIRE(eq.size() == 3);
  for (int k : {0, 2}) {
    // The Hopf point with this abscissa lies above S = 0.13.
    double best = 1.0, s_at = 0.0;
    for (const auto& h : c.points) {
      if (std::abs(h.u - eq[k].position.u) < best) {
        best = std::abs(h.u - eq[k].position.u);
        s_at = h.S;
      }
    }
    CHECK(best < 1e-3);
    CHECK(s_at > 0.13);
    CHECK(eq[k].kind == EquilibriumKind::repeller);
  }
}

TEST_CASE("BT points agree with the Newton oracle and lie on the curves") {
  const auto bts = bt_points(0.1, -0.1);
  REQUIRE(bts.size() == 2);
  CHECK(std::abs(bts[0].Q - kQm) < 1e-10);
  CHECK(std::abs(bts[1].Q - kQp) < 1e-10);
  CHECK(bts[0].type == CollapseType::p1_p2);
  CHECK(bts[1].type == CollapseType::p2_p3);
  for (const auto& bt : bts) {
    const auto p = ModelParams::make(0.1, -0.1, bt.Q, bt.S);
    const Mat2 J = jacobian({bt.u_double, bt.u_double}, p);
    CHECK(std::abs(J.det()) < 1e-9);
    CHECK(std::abs(J.trace()) < 1e-9);

    const auto n = newton_bt(0.1, -0.1, bt.u_double + 0.01, bt.S + 0.02);
    CHECK(std::abs(n.S - bt.S) < 1e-8);
    CHECK(std::abs(n.Q - bt.Q) < 1e-8);
    CHECK(std::abs(n.u - bt.u_double) < 1e-7);

    // P1 = P2 threshold form gives the same value.
    CHECK(bt.Q * bt.u_double / (0.1 + bt.u_double) == doctest::Approx(bt.S).epsilon(1e-12));
  }

  // Closure of the Hopf curve meets the SN lines at the BT points.
  const auto c = hopf_curve(0.1, -0.1, 20000);
  for (const auto& bt : bts) {
    double best = 1.0;
    for (const auto& h : c.points) {
      best = std::min(best, std::hypot(h.Q - bt.Q, h.S - bt.S));
    }
    CHECK(best < 1e-6);
  }
}

TEST_CASE("Sotomayor scalars at S = 0.25 on both SN lines") {
  for (double Q : {kQm, kQp}) {
    const auto p = ModelParams::make(0.1, -0.1, Q, 0.25);
    const auto r = sotomayor_check(p);
    CHECK(r.genuine);
    CHECK(r.transversality != 0.0);
    CHECK(r.nondegeneracy != 0.0);
    CHECK(r.transversality == doctest::Approx(r.transversality_closed_form).epsilon(1e-8));
    CHECK(r.nondegeneracy == doctest::Approx(r.nondegeneracy_closed_form).epsilon(1e-8));

    // U and V are left and right null vectors.
    const Mat2 J = jacobian({r.u_double, r.u_double}, p);
    CHECK(std::abs(r.left_null.u * J.a11 + r.left_null.v * J.a21) < 1e-12);
    CHECK(std::abs(J.a11 * r.right_null.u + J.a12 * r.right_null.v) < 1e-12);

    // Directional second derivative of the reduced field along V.
    const double h = 1e-4;
    const State x{r.u_double, r.u_double};
    const State d2 = (reduced_field(x + r.right_null * h, p) + reduced_field(x - r.right_null * h, p) -
                      reduced_field(x, p) * 2.0) *
                     (1.0 / (h * h));
    const double fd = r.left_null.u * d2.u + r.left_null.v * d2.v;
    CHECK(fd == doctest::Approx(r.nondegeneracy_closed_form).epsilon(1e-6));

    // Derivative in Q.
    const double hq = 1e-6;
    const State fq = (reduced_field(x, p.with_Q(Q + hq)) - reduced_field(x, p.with_Q(Q - hq))) * (0.5 / hq);
    CHECK(r.left_null.u * fq.u + r.left_null.v * fq.v == doctest::Approx(r.transversality).epsilon(1e-8));
  }
  CHECK_THROWS_AS(sotomayor_check(ModelParams::make(0.1, -0.1, 0.363, 0.25)), PreconditionError);
}

TEST_CASE("Sotomayor scalars are nonzero along the SN lines except at BT") {
  const auto bts = bt_points(0.1, -0.1);
  for (const auto& bt : bts) {
    for (int k = 0; k < 50; ++k) {
      const double S = 0.01 + 0.44 * k / 49.0;
      const auto r = sotomayor_check(ModelParams::make(0.1, -0.1, bt.Q, S));
      CHECK(r.transversality != 0.0);
      CHECK(r.nondegeneracy != 0.0);
      CHECK(r.simple_zero_eigenvalue == (std::abs(S - bt.S) > 1e-9));
    }
    const auto at = sotomayor_check(ModelParams::make(0.1, -0.1, bt.Q, bt.S));
    CHECK_FALSE(at.simple_zero_eigenvalue);
    CHECK_FALSE(at.genuine);
  }
}

TEST_CASE("cusp check at both BT points") {
  for (const auto& bt : bt_points(0.1, -0.1)) {
    const auto c = cusp_check(ModelParams::make(0.1, -0.1, bt.Q, bt.S));
    CHECK(c.passes);
    CHECK(c.nilpotent_block_nonzero);
    CHECK(std::abs(c.det) < 1e-9);
    CHECK(std::abs(c.trace) < 1e-9);
    CHECK(std::abs(c.nilpotent_entry - c.expected_entry) < 1e-10);
    CHECK(std::abs(std::abs(c.nilpotent_entry) - std::abs(c.printed_entry)) < 1e-10);
    CHECK(c.transform.a11 == 1.0);
    CHECK(c.transform.a21 == 1.0);
    CHECK(c.transform.a12 == -1.0);
    CHECK(c.transform.a22 == 0.0);
    // J (1,1) = 0.
    CHECK(std::abs(c.jacobian.a11 + c.jacobian.a12) < 1e-12);
    CHECK(std::abs(c.jacobian.a21 + c.jacobian.a22) < 1e-12);
  }
  const auto off = cusp_check(ModelParams::make(0.1, -0.1, kQp, 0.1));
  CHECK_FALSE(off.passes);
}

TEST_CASE("region labels") {
  using K = EquilibriumKind;
  const auto r3 = region_classify(ModelParams::make(0.1, -0.1, 0.363, 0.3));
  CHECK(r3.equilibrium_count == 3);
  CHECK(r3.kinds == std::vector{K::attractor, K::saddle, K::attractor});
  CHECK(r3.roman_label() == "III|IV");
  const auto r6 = region_classify(ModelParams::make(0.1, -0.1, 0.363, 0.13));
  CHECK(r6.kinds == std::vector{K::repeller, K::saddle, K::repeller});
  CHECK(r6.roman_label() == "VI");
  const auto r1 = region_classify(ModelParams::make(0.5, -0.05, 0.51, 0.1));
  CHECK(r1.equilibrium_count == 1);
  CHECK(r1.kinds == std::vector{K::attractor});
  CHECK(r1.key() == "1:attractor");
}

TEST_CASE("diagram assembly, pointwise agreement, determinism") {
  const Window w;
  const auto d = diagram(0.1, -0.1, w, 24);
  REQUIRE(d.sn_lines.size() == 2);
  CHECK(std::abs(d.sn_lines[0].Q - kQm) < 1e-10);
  CHECK(std::abs(d.sn_lines[1].Q - kQp) < 1e-10);
  CHECK(d.bt.size() == 2);
  CHECK(d.hopf.branch_count == 2);
  for (int j = 0; j < d.resolution; ++j) {
    for (int i = 0; i < d.resolution; ++i) {
      CHECK(d.region(i, j) == region_classify(ModelParams::make(0.1, -0.1, d.cell_q(i), d.cell_s(j))));
    }
  }
  const auto again = diagram(0.1, -0.1, w, 24);
  for (std::size_t k = 0; k < d.regions.size(); ++k) {
    CHECK(again.regions[k].key() == d.regions[k].key());
  }
}

TEST_CASE("region labels change only across SN lines or the Hopf curve") {
  const Window w;
  const auto c = hopf_curve(0.1, -0.1, 20000);
  const auto sn = saddle_node_thresholds(0.1, -0.1);
  REQUIRE(sn);
  auto crosses_curve = [&](State a, State b) {
    for (double q : {sn->q_minus, sn->q_plus}) {
      if ((a.u - q) * (b.u - q) <= 0.0) {
        return true;
      }
    }
    for (int id = 0; id < c.branch_count; ++id) {
      const auto br = c.branch(id);
      for (std::size_t k = 0; k + 1 < br.size(); ++k) {
        if (segments_intersect(a, b, {br[k].Q, br[k].S}, {br[k + 1].Q, br[k + 1].S})) {
          return true;
        }
      }
    }
    return false;
  };
  const int n = 200; // 10x a 20-cell diagram grid
  int changes = 0;
  for (int line = 1; line < 10; ++line) {
    const double S = w.s_min + (w.s_max - w.s_min) * line / 10.0;
    const double Q = w.q_min + (w.q_max - w.q_min) * line / 10.0;
    for (int k = 0; k + 1 < n; ++k) {
      const double q0 = w.q_min + (w.q_max - w.q_min) * (k + 0.5) / n;
      const double q1 = w.q_min + (w.q_max - w.q_min) * (k + 1.5) / n;
      if (!(region_classify(ModelParams::make(0.1, -0.1, q0, S)) ==
            region_classify(ModelParams::make(0.1, -0.1, q1, S)))) {
        ++changes;
        CHECK(crosses_curve({q0, S}, {q1, S}));
      }
      const double s0 = w.s_min + (w.s_max - w.s_min) * (k + 0.5) / n;
      const double s1 = w.s_min + (w.s_max - w.s_min) * (k + 1.5) / n;
      if (!(region_classify(ModelParams::make(0.1, -0.1, Q, s0)) ==
            region_classify(ModelParams::make(0.1, -0.1, Q, s1)))) {
        ++changes;
        CHECK(crosses_curve({Q, s0}, {Q, s1}));
      }
    }
  }
  CHECK(changes > 10);
}
