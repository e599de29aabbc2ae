#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "tacsim/config.hpp"
#include "tacsim/mlp.hpp"
#include "tacsim/scenarios.hpp"
#include "tacsim/train.hpp"

namespace tacsim {

struct MseReport {
  /// (group, mse) in a fixed order: position, rotation, identity for
  /// sim-to-sim; a single "target" group otherwise.
  std::vector<std::pair<std::string, double>> groups;
  double pooled = 0.0;
  std::size_t samples = 0;

  double group(const std::string& name) const;
};

/// Throws Error{Schema} on an empty dataset or a label width mismatch.
MseReport eval_mse(const MlpModel& model, std::span<const Sample> dataset);
MseReport eval_mse_predictions(TaskKind task, const Eigen::MatrixXd& predictions,
                               const Eigen::MatrixXd& targets);

Predictor model_predictor(const MlpModel& model);

/// Runs the pseudo-real protocol (12 taps per round for Task I, otherwise
/// `taps_per_round`) with `model`'s representation.
RoundsResult eval_rounds_mae(const MlpModel& model, const PseudoRealEnv& env, int rounds,
                             int taps_per_round);

struct CellResult {
  TaskKind task = TaskKind::TaskII;
  RepKind rep = RepKind::PinPositions;
  double factor = 0.0;
  std::uint64_t seed = 0;
  std::vector<std::pair<std::string, double>> metrics;
  std::size_t train_samples = 0;
  std::string error;  // empty when the cell completed
};

struct EvalReport {
  std::vector<CellResult> cells;
  /// Not written to any output file, which must stay byte-reproducible.
  double wall_clock_seconds = 0.0;
};

/// Trains one model on data generated at `factor` and evaluates it: against
/// the pseudo-real environment for Tasks I-III, or on sim-to-sim test sets at
/// each configured test factor. Training failures are recorded in `error`.
CellResult run_cell(const ScenarioConfig& config, RepKind rep, double factor,
                    std::uint64_t seed);

/// Every (representation, factor, seed) cell of the configured sweep, in
/// sorted cell order.
EvalReport sweep_randomization(const ScenarioConfig& config, int jobs = 1);

/// Long format `task,representation,factor,seed,metric,value`: one row per
/// cell metric, then mean and std across seeds (seed column "mean"/"std").
std::string report_csv(const EvalReport& report);
std::string report_json(const EvalReport& report);

std::string format_double(double value);

}  // namespace tacsim
