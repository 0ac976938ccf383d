#pragma once

#include <array>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "lgallee/equilibria.hpp"
#include "lgallee/model.hpp"
#include "lgallee/ode.hpp"

namespace lgallee {

// ---------------------------------------------------------------------------
// Integration

struct IntegrateOptions {
  IntegratorOptions tol{.rtol = 1e-8, .atol = 1e-10, .h_max = 2.0}; ///< capped so foci are not stepped at the stability edge
  double eq_field_tol = 1e-12;  ///< |field| below this ...
  double eq_dist_tol = 1e-9;    ///< ... and this close to a known equilibrium
  double domain_max = 10.0;     ///< leave when u > domain_max or v > domain_max
  double domain_min = -1e-12;   ///< leave when u < domain_min or v < domain_min
  double arc_length_cap = std::numeric_limits<double>::infinity();
  bool record = true;           ///< keep every accepted step (else only endpoints)
  /// Equilibria used for the convergence test; all_equilibria(p) when unset.
  std::optional<std::vector<State>> known_equilibria;
};

/// Adaptive DOPRI5 integration of the scaled field for tau in [0, tau_max]
/// (backward: the field is negated and t = -tau).
Trajectory integrate(State start, const ModelParams& p, double tau_max, Direction dir = Direction::forward,
                     const IntegrateOptions& opt = {});

// ---------------------------------------------------------------------------
// Limit cycles

enum class CycleStability { stable, unstable };
std::string_view to_string(CycleStability s);

/// Horizontal half-line {v = anchor.v, u > anchor.u}; forward orbits cross
/// it upwards (v' = S(u + A)(u - v)v > 0 there).
struct Section {
  State anchor{};
  State normal{0.0, 1.0};
};

struct LimitCycle {
  Section section;
  State fixed_point{};
  double period = 0.0;
  CycleStability stability = CycleStability::stable;
  double slope = 0.0;             ///< derivative of the forward return map at the fixed point
  double displacement = 0.0;      ///< |P(s*) - s*|
  double closure_residual = 0.0;  ///< |orbit.front() - orbit.back()|
  std::vector<State> orbit;       ///< one period, forward time
  std::vector<std::string> enclosed; ///< labels of enclosed equilibria
};

struct CycleSearchOptions {
  IntegratorOptions tol{1e-10, 1e-12};
  /// Seed offsets along the section; empty = default fan from 1e-4 to 0.95(1 - u_e).
  std::vector<double> seeds;
  int fan_size = 48;
  double tau_per_return = 2e5;  ///< integration budget for one return
  double fixed_point_tol = 1e-9;
  double dedupe_tol = 1e-6;
};

/// Return map on the section through `around`: integrates from
/// (anchor.u + s, anchor.v) to the next crossing. Empty when the orbit
/// converges, leaves the domain or exhausts the budget first.
struct ReturnResult {
  double s = 0.0;
  double tau = 0.0;
  State hit{};
};
std::optional<ReturnResult> return_map(const ModelParams& p, const Section& sec, double s, Direction dir,
                                       const CycleSearchOptions& opt = {}, std::vector<State>* orbit = nullptr);

/// Cycles crossing the section through `around`. Requires a non-saddle
/// equilibrium (PreconditionError otherwise).
std::vector<LimitCycle> find_limit_cycles(const ModelParams& p, const Equilibrium& around,
                                          const CycleSearchOptions& opt = {});

/// Cycles around every positive non-saddle equilibrium, deduplicated.
std::vector<LimitCycle> cycle_inventory(const ModelParams& p, const CycleSearchOptions& opt = {});

/// Winding number of a closed polyline about a point.
int winding_number(const std::vector<State>& polygon, State point);

// ---------------------------------------------------------------------------
// Invariant manifolds

enum class ManifoldType { stable, unstable };
std::string_view to_string(ManifoldType t);

enum class EndpointKind { equilibrium, cycle, domain, undetermined };
std::string_view to_string(EndpointKind k);

struct ManifoldBranch {
  std::string saddle_label;
  State saddle{};
  ManifoldType type = ManifoldType::stable;
  /// Flow direction along the branch near the saddle: NE, SW, NW, SE, or
  /// E, W, N, S along an axis. A stable branch seeded to the NE is "SW".
  std::string direction;
  State seed_direction{}; ///< unit vector the seed is offset along
  std::vector<State> polyline;
  EndpointKind endpoint = EndpointKind::undetermined;
  std::string endpoint_id;
  Termination termination = Termination::time_limit;
};

struct ManifoldOptions {
  IntegratorOptions tol{1e-10, 1e-12};
  double seed_offset = 1e-6;
  double arc_length_cap = 50.0;
  double tau_cap = 1e6;
  double capture_radius = 1e-3; ///< endpoint within this of an equilibrium counts as converging to it
  double cycle_radius = 1e-4;
  std::vector<LimitCycle> cycles; ///< candidates for endpoint verdicts
};

/// Compass tag of a direction vector; axis tags when one component is
/// below 1e-6 of the other.
std::string compass_tag(State d);

/// The four branches: the two unstable ones (forward) then the two stable
/// ones (backward). Throws PreconditionError for a non-saddle.
std::array<ManifoldBranch, 4> trace_manifolds(const Equilibrium& saddle, const ModelParams& p,
                                              const ManifoldOptions& opt = {});
ManifoldBranch trace_branch(const Equilibrium& saddle, const ModelParams& p, ManifoldType type, State seed_direction,
                            const ManifoldOptions& opt = {});

// ---------------------------------------------------------------------------
// Basins

struct PhaseWindow {
  double u_min = 0.0;
  double u_max = 1.1;
  double v_min = 0.0;
  double v_max = 1.1;
  void validate() const;
};

struct BasinOptions {
  IntegratorOptions tol{};
  double tau_budget = 2e5;
  double capture_radius = 1e-3;
  double cycle_capture = 1e-4;
  std::optional<std::vector<LimitCycle>> cycles; ///< stable cycles; searched when unset
  unsigned workers = 0; ///< 0 = hardware concurrency
};

struct BasinGrid {
  PhaseWindow window;
  int resolution = 0;
  std::vector<std::string> attractors; ///< ids, e.g. "P1", "C0"
  std::vector<State> attractor_positions; ///< equilibrium position or cycle fixed point
  std::vector<int> cells; ///< row-major j * resolution + i; -1 = undecided

  static constexpr int undecided = -1;
  State cell_center(int i, int j) const;
  int cell(int i, int j) const { return cells[static_cast<std::size_t>(j * resolution + i)]; }
  std::size_t undecided_count() const;
};

BasinGrid basins(const ModelParams& p, const PhaseWindow& window, int resolution, const BasinOptions& opt = {});

// ---------------------------------------------------------------------------
// Connections

enum class ConnectionKind { heteroclinic, homoclinic };
std::string_view to_string(ConnectionKind k);

class ConnectionError : public NumericError {
public:
  ConnectionError(const std::string& branch, const std::string& what)
      : NumericError(branch + ": " + what), branch_(branch) {}
  const std::string& branch() const { return branch_; }

private:
  std::string branch_;
};

struct ConnectionOptions {
  IntegratorOptions tol{1e-11, 1e-13};
  double seed_offset = 1e-6;
  double tau_cap = 1e5;
  double bracket_tol = 1e-8;
};

struct ConnectionSample {
  double S = 0.0;
  double functional = 0.0;
  std::string note;
};

struct ConnectionResult {
  std::optional<double> s_c;
  double lo = 0.0;
  double hi = 0.0;
  std::vector<ConnectionSample> log;
};

/// Signed separation at S: v(unstable branch) - v(stable branch) at their
/// first leftward crossings of u = (u(P2) + u(P3))/2.
ConnectionSample connection_functional(const ModelParams& p, ConnectionKind kind, const ConnectionOptions& opt = {});

/// Bisection in S on [s_lo, s_hi]; empty s_c when the endpoint signs agree.
ConnectionResult connection_search(double A, double M, double Q, double s_lo, double s_hi, ConnectionKind kind,
                                   const ConnectionOptions& opt = {});

} // namespace lgallee
