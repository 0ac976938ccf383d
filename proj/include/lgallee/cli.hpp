#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "lgallee/bifurcation.hpp"
#include "lgallee/dynamics.hpp"
#include "lgallee/model.hpp"

namespace lgallee {

namespace exit_code {
inline constexpr int ok = 0;
inline constexpr int verify_failed = 1;
inline constexpr int validation = 2;
inline constexpr int io = 3;
inline constexpr int numeric = 4;
} // namespace exit_code

enum class OutputFormat { csv, svg, both };

struct RunConfig {
  std::string subcommand;

  std::optional<double> A, M, Q, S;
  bool dimensional = false;
  std::optional<double> r, K, q, a, s, h, m;

  std::optional<std::string> figure;
  std::optional<Window> window;          ///< (Q, S) window for bifurcation
  std::optional<PhaseWindow> phase_window;
  std::optional<int> resolution;
  std::optional<std::string> trajectories; ///< count or "none"
  std::string out_dir = ".";
  bool out_given = false;
  OutputFormat format = OutputFormat::both;

  std::optional<double> rtol, atol; ///< integrator overrides
  double merge_tol = 1e-7;
  std::optional<double> check_tol; ///< verify: replaces every check tolerance

  std::optional<std::string> at_sn; ///< verify: "minus" or "plus" selects Q = Q-/Q+
  std::optional<std::string> at_bt; ///< verify: "minus" or "plus" selects the BT point

  std::optional<std::string> preset; ///< connection: "heteroclinic" or "homoclinic"
  std::optional<std::pair<double, double>> bracket;
  std::optional<std::string> kind;
  double bracket_tol = 1e-8;

  unsigned workers = 0;
};

struct OutputFile {
  std::string name;
  std::string content;
};

struct CommandResult {
  int exit_code = exit_code::ok;
  std::string text;               ///< printed to stdout
  std::vector<OutputFile> files;  ///< written under out_dir when the command succeeds
};

/// Scaled parameters from either the nondimensional or the dimensional flags
/// (figure presets fill in anything not given). Throws ValidationError.
ModelParams resolve_params(const RunConfig& cfg);

CommandResult cmd_equilibria(const RunConfig& cfg);
CommandResult cmd_portrait(const RunConfig& cfg);
CommandResult cmd_bifurcation(const RunConfig& cfg);
CommandResult cmd_basins(const RunConfig& cfg);
CommandResult cmd_verify(const RunConfig& cfg);
CommandResult cmd_connection(const RunConfig& cfg);
/// Every output of one figure preset.
CommandResult cmd_figure(const RunConfig& cfg);

/// Parses argv (without the program name), runs the subcommand, writes the
/// files and returns the exit code. Nothing is written unless the command
/// completes.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace lgallee
