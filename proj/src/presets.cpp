#include "lgallee/presets.hpp"

#include "lgallee/equilibria.hpp"
#include "lgallee/errors.hpp"

namespace lgallee {

namespace {

std::vector<Preset> build() {
  const auto sn = saddle_node_thresholds(0.1, -0.1);
  const double q_minus = sn->q_minus;
  const double q_plus = sn->q_plus;

  auto portrait = [](std::string id, std::string desc, double A, double M, double Q, double S) {
    Preset p;
    p.id = std::move(id);
    p.description = std::move(desc);
    p.kind = PresetKind::portrait;
    p.A = A;
    p.M = M;
    p.Q = Q;
    p.S = S;
    return p;
  };
  auto with_basins = [&](std::string id, std::string desc, double S) {
    Preset p = portrait(std::move(id), std::move(desc), 0.1, -0.1, 0.363, S);
    p.kind = PresetKind::portrait_basins;
    return p;
  };

  std::vector<Preset> out;
  {
    Preset p;
    p.id = "F02";
    p.description = "root count of g across the saddle-node thresholds";
    p.kind = PresetKind::roots;
    p.q_sweep = {0.33, q_minus, 0.363, q_plus, 0.40};
    out.push_back(p);
  }
  out.push_back(portrait("F04a", "single attractor", 0.5, -0.05, 0.51, 0.1));
  out.push_back(portrait("F04b", "repeller inside a stable cycle", 0.5, -0.05, 0.51, 0.045));
  out.push_back(portrait("F05a", "P1 and P3 attractors", 0.1, -0.1, 0.363, 0.3));
  out.push_back(portrait("F05b", "P1 attractor, P3 repeller", 0.1, -0.1, 0.363, 0.2));
  out.push_back(portrait("F05c", "P1 and P3 repellers inside a stable cycle", 0.1, -0.1, 0.363, 0.13));
  out.push_back(portrait("F06a", "P1=P2 saddle-node at Q-", 0.1, -0.1, q_minus, 0.25));
  out.push_back(portrait("F06b", "P2=P3 saddle-node at Q+", 0.1, -0.1, q_plus, 0.25));
  {
    Preset p;
    p.id = "F08";
    p.description = "bifurcation diagram in (Q, S)";
    p.kind = PresetKind::diagram;
    out.push_back(p);
  }
  out.push_back(with_basins("F09a", "separatrix between the basins of P1 and P3", 0.3));
  out.push_back(with_basins("F09b", "heteroclinic connection", 0.24962827));
  out.push_back(with_basins("F09c", "stable manifold of P2 from the origin", 0.235));
  out.push_back(with_basins("F09d", "after the homoclinic", 0.225));
  out.push_back(with_basins("F09e", "P1 global attractor", 0.18));
  out.push_back(with_basins("F09f", "stable cycle around three equilibria", 0.13));
  out.push_back(portrait("F10a", "two cycles around P1", 0.1, -0.1, 0.345, 0.134332));
  out.push_back(portrait("F10b", "unstable cycle around P1 inside a stable one", 0.1, -0.1, 0.363, 0.1298));
  return out;
}

} // namespace

const std::vector<Preset>& presets() {
  static const std::vector<Preset> all = build();
  return all;
}

const Preset& find_preset(std::string_view id) {
  for (const auto& p : presets()) {
    if (p.id == id) {
      return p;
    }
  }
  throw ValidationError("unknown figure preset '" + std::string(id) + "'");
}

std::vector<std::string> preset_files(const Preset& p) {
  const std::string& id = p.id;
  switch (p.kind) {
  case PresetKind::roots: return {id + "_roots.csv", id + "_cubic.svg"};
  case PresetKind::portrait: return {id + "_equilibria.csv", id + "_portrait.csv", id + "_portrait.svg"};
  case PresetKind::portrait_basins:
    return {id + "_equilibria.csv", id + "_portrait.csv", id + "_portrait.svg", id + "_basins.csv",
            id + "_basins.svg"};
  case PresetKind::diagram: return {id + "_bifurcation.csv", id + "_regions.csv", id + "_bifurcation.svg"};
  }
  return {};
}

} // namespace lgallee
