#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace lgallee {

enum class PresetKind {
  roots,       ///< root-count sweep in Q
  portrait,    ///< equilibria + phase portrait
  portrait_basins,
  diagram,     ///< two-parameter bifurcation diagram
};

/// Parameters for one figure preset. Tolerances are the library
/// defaults; presets never override them, so outputs are reproducible.
struct Preset {
  std::string id;
  std::string description;
  PresetKind kind = PresetKind::portrait;
  double A = 0.1;
  double M = -0.1;
  double Q = 0.363;
  double S = 0.2;
  int trajectories = 8;
  int basin_resolution = 100;
  std::vector<double> q_sweep; ///< roots only
};

const std::vector<Preset>& presets();
/// Throws ValidationError for an unknown id.
const Preset& find_preset(std::string_view id);

/// Files `lgallee figure <id>` writes, in order.
std::vector<std::string> preset_files(const Preset& p);

} // namespace lgallee
