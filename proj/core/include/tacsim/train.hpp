#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "tacsim/mlp.hpp"
#include "tacsim/scenarios.hpp"

namespace tacsim {

enum class Optimizer { Sgd, Momentum, Adam };

std::string_view to_string(Optimizer opt);
Optimizer parse_optimizer(std::string_view text);

struct TrainConfig {
  int batch_size = 64;
  double learning_rate = 1e-3;
  int epochs = 200;
  std::uint64_t seed = 0;
  /// Zero disables early stopping.
  int patience = 0;
  double validation_fraction = 0.1;
  Optimizer optimizer = Optimizer::Sgd;
  double momentum = 0.9;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double adam_epsilon = 1e-8;
  /// Fit the model's input standardisation to the training set when the
  /// model has none yet.
  bool standardize_inputs = true;

  void validate() const;
};

/// Column-major design matrices plus a stable key per column. Training sorts
/// by key before shuffling, so the on-disk order of samples is irrelevant.
struct DataSet {
  Eigen::MatrixXd inputs;   // features x n
  Eigen::MatrixXd targets;  // outputs x n
  std::vector<std::uint64_t> keys;

  std::size_t size() const { return static_cast<std::size_t>(inputs.cols()); }
  bool empty() const { return size() == 0; }

  static DataSet from_samples(std::span<const Sample> samples);
  DataSet subset(std::span<const std::size_t> columns) const;
};

std::uint64_t sample_key(const Sample& sample);

/// Seeded split; the validation part takes round(fraction * n) columns.
std::pair<DataSet, DataSet> split_validation(const DataSet& data, double fraction,
                                             std::uint64_t seed);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;  // NaN without a validation set
};

struct TrainResult {
  MlpModel model;
  std::vector<EpochRecord> history;
  int best_epoch = 0;
  bool stopped_early = false;
};

inline constexpr double kDivergenceLoss = 1e6;

/// Mini-batch descent with a per-epoch seeded shuffle. With patience > 0 and
/// a validation set, stops after `patience` epochs without improvement and
/// returns the best-validation snapshot. Throws Error{Numerical} with the
/// epoch index once the training loss exceeds 1e6.
TrainResult train(MlpModel model, const DataSet& train_set, const DataSet& val_set,
                  const TrainConfig& config);

double dataset_loss(const MlpModel& model, const DataSet& data);

std::string history_csv(std::span<const EpochRecord> history);

}  // namespace tacsim
