#pragma once

#include <functional>
#include <string_view>
#include <vector>

#include "lgallee/errors.hpp"
#include "lgallee/plane.hpp"

namespace lgallee {

using Field = std::function<State(State)>;

struct IntegratorOptions {
  double rtol = 1e-8;
  double atol = 1e-10;
  double h_init = 0.0;   ///< 0 selects the initial step automatically
  double h_max = 0.0;    ///< 0 means unbounded
  double h_min_rel = 1e-14; ///< underflow when h < h_min_rel * max(1, |t|)
};

struct StepStats {
  long accepted = 0;
  long rejected = 0;
  long evaluations = 0;
};

/// Cubic Hermite interpolant over one accepted step.
struct DenseSegment {
  double t0 = 0.0;
  double t1 = 0.0;
  State y0{}, y1{};
  State f0{}, f1{};

  State eval(double t) const;
};

enum class Termination {
  time_limit,
  converged_to_equilibrium,
  converged_to_cycle,
  left_domain,
  arc_length_cap,
  event,
};
std::string_view to_string(Termination t);

enum class Direction { forward, backward };

/// Samples of one integration. `t` is the integration variable, which runs
/// forward even for backward integrations (then t = -tau).
struct Trajectory {
  Direction direction = Direction::forward;
  std::vector<double> t;
  std::vector<State> y;
  std::vector<State> dy; ///< derivative in t at each sample
  Termination termination = Termination::time_limit;
  StepStats stats;
  double arc_length = 0.0;
  int equilibrium_index = -1; ///< set with converged_to_equilibrium
  int cycle_index = -1;       ///< set with converged_to_cycle

  bool empty() const { return y.empty(); }
  State back() const { return y.back(); }
  double duration() const { return t.empty() ? 0.0 : t.back() - t.front(); }
  /// Dense evaluation by Hermite interpolation; t is clamped to the range.
  State at(double time) const;
};

class StiffnessError : public NumericError {
public:
  StiffnessError(const std::string& what, Trajectory partial) : NumericError(what), partial_(std::move(partial)) {}
  const Trajectory& partial() const { return partial_; }

private:
  Trajectory partial_;
};

/// Dormand-Prince 5(4) with a PI step-size controller.
class Dopri5 {
public:
  Dopri5(Field field, State y0, double t0, IntegratorOptions opt = {});

  /// Takes one accepted step, not going past t_limit. Throws StiffnessError
  /// (with an empty trajectory) when the step size underflows or the
  /// solution becomes non-finite.
  const DenseSegment& advance(double t_limit);

  /// A single RK step of size h from y without error control. With h equal
  /// to the last accepted step it reproduces that step bit for bit.
  State step_exact(State y, double h) const;

  /// Restarts from (y, t), keeping the current step size.
  void reset(State y, double t);

  State state() const { return y_; }
  double time() const { return t_; }
  State derivative() const { return f_; }
  double step_size() const { return h_; }
  const StepStats& stats() const { return stats_; }
  const Field& field() const { return field_; }

private:
  State eval(State y) const;
  double initial_step() const;

  Field field_;
  IntegratorOptions opt_;
  State y_;
  State f_;
  double t_;
  double h_ = 0.0;
  double err_prev_ = 1e-4;
  DenseSegment seg_;
  mutable StepStats stats_;
};

/// Locates t in [seg.t0, seg.t1] with g(y(t)) = 0, given a sign change of g
/// between seg.y0 and seg.y1. The state at t comes from a real RK step from
/// seg.y0, not from the interpolant. Returns (t, y(t)).
std::pair<double, State> locate_event(const Dopri5& stepper, const DenseSegment& seg,
                                      const std::function<double(State)>& g, double t_tol = 1e-12);

} // namespace lgallee
