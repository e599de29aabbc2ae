#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "tacsim/dynamics.hpp"
#include "tacsim/representations.hpp"
#include "tacsim/scenarios.hpp"
#include "tacsim/train.hpp"

namespace tacsim {

struct SweepSettings {
  std::vector<RepKind> representations{RepKind::PinPositions, RepKind::Threshold,
                                       RepKind::WeightedAverage};
  std::vector<double> factors{0.0, 0.2, 0.4, 0.6};
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  /// Training set size: samples for Tasks I-III, episodes for sim-to-sim.
  long train_count = 5000;
  /// Sim-to-sim test episodes per test factor.
  long test_count = 100;
  std::vector<double> test_factors{0.0, 0.2, 0.5};
};

/// Everything a run needs. Parsed from an INI-style file with sections
/// [dynamics] [randomization] [task] [noise] [pseudo_real] [train] [sweep];
/// unknown sections or keys are rejected.
struct ScenarioConfig {
  DynamicsParams dynamics;
  RandomizationSpec randomization;
  TaskSpec task;
  int rings = kDefaultRings;
  double tip_radius = kDefaultTipRadius;
  RepKind rep_kind = RepKind::PinPositions;
  double train_noise = kDefaultPinNoise;
  PseudoRealConfig pseudo_real;
  TrainConfig train;
  std::vector<int> hidden = kDefaultHidden;
  SweepSettings sweep;

  void validate() const;
  GenerationContext generation_context() const;
};

/// Throws Error{Config} with the line or key at fault.
ScenarioConfig parse_config(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);

/// Canonical text form; parse_config(config_to_text(c)) == c.
std::string config_to_text(const ScenarioConfig& config);

}  // namespace tacsim
