#include "lgallee/ode.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/tools/roots.hpp>

namespace lgallee {

namespace {

constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200, e6 = 22.0 / 525,
                 e7 = -1.0 / 40;

// PI controller constants (Hairer & Wanner, DOPRI5 defaults).
constexpr double beta = 0.04;
constexpr double alpha = 0.2 - 0.75 * beta;
constexpr double safety = 0.9;
constexpr double fac_min = 0.2;
constexpr double fac_max = 10.0;

struct RkResult {
  State y;
  State err;
  State f_end;
};

template <class Eval>
RkResult rk_step(const Eval& f, State y, State k1, double h) {
  const State k2 = f(y + h * (a21 * k1));
  const State k3 = f(y + h * (a31 * k1 + a32 * k2));
  const State k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
  const State k5 = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
  const State k6 = f(y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
  const State y1 = y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
  const State k7 = f(y1);
  const State err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
  return {y1, err, k7};
}

double scaled_norm(State e, State y0, State y1, const IntegratorOptions& o) {
  const double su = o.atol + o.rtol * std::max(std::abs(y0.u), std::abs(y1.u));
  const double sv = o.atol + o.rtol * std::max(std::abs(y0.v), std::abs(y1.v));
  const double a = e.u / su;
  const double b = e.v / sv;
  return std::sqrt(0.5 * (a * a + b * b));
}

} // namespace

State DenseSegment::eval(double t) const {
  const double h = t1 - t0;
  if (h == 0.0) {
    return y0;
  }
  const double s = (t - t0) / h;
  const double s2 = s * s;
  const double s3 = s2 * s;
  const double h00 = 2 * s3 - 3 * s2 + 1;
  const double h10 = s3 - 2 * s2 + s;
  const double h01 = -2 * s3 + 3 * s2;
  const double h11 = s3 - s2;
  return h00 * y0 + (h10 * h) * f0 + h01 * y1 + (h11 * h) * f1;
}

std::string_view to_string(Termination t) {
  switch (t) {
  case Termination::time_limit: return "time-limit";
  case Termination::converged_to_equilibrium: return "converged-to-equilibrium";
  case Termination::converged_to_cycle: return "converged-to-cycle";
  case Termination::left_domain: return "left-domain";
  case Termination::arc_length_cap: return "arc-length-cap";
  case Termination::event: return "event";
  }
  return "?";
}

State Trajectory::at(double time) const {
  if (t.empty()) {
    throw PreconditionError("Trajectory::at on an empty trajectory");
  }
  if (time <= t.front()) {
    return y.front();
  }
  if (time >= t.back()) {
    return y.back();
  }
  const auto it = std::upper_bound(t.begin(), t.end(), time);
  const auto i = static_cast<std::size_t>(it - t.begin()) - 1;
  const DenseSegment seg{t[i], t[i + 1], y[i], y[i + 1], dy[i], dy[i + 1]};
  return seg.eval(time);
}

Dopri5::Dopri5(Field field, State y0, double t0, IntegratorOptions opt)
    : field_(std::move(field)), opt_(opt), y_(y0), t_(t0) {
  f_ = eval(y_);
  h_ = opt_.h_init > 0.0 ? opt_.h_init : initial_step();
  if (opt_.h_max > 0.0) {
    h_ = std::min(h_, opt_.h_max);
  }
  seg_ = {t_, t_, y_, y_, f_, f_};
}

State Dopri5::eval(State y) const {
  ++stats_.evaluations;
  return field_(y);
}

double Dopri5::initial_step() const {
  const double su = opt_.atol + opt_.rtol * std::abs(y_.u);
  const double sv = opt_.atol + opt_.rtol * std::abs(y_.v);
  const double d0 = std::hypot(y_.u / su, y_.v / sv) / std::sqrt(2.0);
  const double d1 = std::hypot(f_.u / su, f_.v / sv) / std::sqrt(2.0);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  const State y1 = y_ + h0 * f_;
  const State f1 = eval(y1);
  const State df = f1 - f_;
  const double d2 = std::hypot(df.u / su, df.v / sv) / std::sqrt(2.0) / h0;
  const double m = std::max(d1, d2);
  const double h1 = m <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / m, 0.2);
  return std::min(100.0 * h0, h1);
}

State Dopri5::step_exact(State y, double h) const {
  if (h == 0.0) {
    return y;
  }
  auto f = [this](State x) { return eval(x); };
  return rk_step(f, y, eval(y), h).y;
}

void Dopri5::reset(State y, double t) {
  y_ = y;
  t_ = t;
  f_ = eval(y_);
  seg_ = {t_, t_, y_, y_, f_, f_};
}

const DenseSegment& Dopri5::advance(double t_limit) {
  auto f = [this](State x) { return eval(x); };
  for (;;) {
    const double remaining = t_limit - t_;
    if (!(remaining > 0.0)) {
      seg_ = {t_, t_, y_, y_, f_, f_};
      return seg_;
    }
    const bool truncated = h_ >= remaining;
    const double h = truncated ? remaining : h_;
    if (h < opt_.h_min_rel * std::max(1.0, std::abs(t_)) && !truncated) {
      throw StiffnessError("step size underflow at t = " + std::to_string(t_), Trajectory{});
    }
    const RkResult r = rk_step(f, y_, f_, h);
    const double err = is_finite(r.y) && is_finite(r.f_end) ? scaled_norm(r.err, y_, r.y, opt_)
                                                            : std::numeric_limits<double>::infinity();
    if (err <= 1.0) {
      double fac = safety * std::pow(std::max(err, 1e-16), -alpha) * std::pow(err_prev_, beta);
      fac = std::clamp(fac, fac_min, fac_max);
      err_prev_ = std::max(err, 1e-4);
      const double proposal = h * fac;
      h_ = truncated ? std::max(h_, proposal) : proposal;
      if (opt_.h_max > 0.0) {
        h_ = std::min(h_, opt_.h_max);
      }
      seg_ = {t_, truncated ? t_limit : t_ + h, y_, r.y, f_, r.f_end};
      t_ = seg_.t1;
      y_ = r.y;
      f_ = r.f_end;
      ++stats_.accepted;
      return seg_;
    }
    ++stats_.rejected;
    const double fac = std::isfinite(err) ? std::max(fac_min, safety * std::pow(err, -alpha)) : fac_min;
    h_ = h * fac;
    if (h_ < opt_.h_min_rel * std::max(1.0, std::abs(t_))) {
      throw StiffnessError("step size underflow at t = " + std::to_string(t_), Trajectory{});
    }
  }
}

std::pair<double, State> locate_event(const Dopri5& stepper, const DenseSegment& seg,
                                      const std::function<double(State)>& g, double t_tol) {
  auto state_at = [&](double t) { return t <= seg.t0 ? seg.y0 : (t >= seg.t1 ? seg.y1 : stepper.step_exact(seg.y0, t - seg.t0)); };
  auto phi = [&](double t) { return g(state_at(t)); };
  const double g0 = g(seg.y0);
  const double g1 = g(seg.y1);
  if (g0 == 0.0) {
    return {seg.t0, seg.y0};
  }
  if (g1 == 0.0) {
    return {seg.t1, seg.y1};
  }
  if ((g0 < 0.0) == (g1 < 0.0)) {
    throw PreconditionError("locate_event: no sign change over the segment");
  }
  std::uintmax_t iters = 200;
  auto tol = [&](double a, double b) { return std::abs(b - a) <= t_tol; };
  const auto [a, b] = boost::math::tools::toms748_solve(phi, seg.t0, seg.t1, g0, g1, tol, iters);
  const State ya = state_at(a);
  const State yb = state_at(b);
  return std::abs(g(ya)) <= std::abs(g(yb)) ? std::pair{a, ya} : std::pair{b, yb};
}

} // namespace lgallee
