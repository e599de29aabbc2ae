#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "tacsim/representations.hpp"
#include "tacsim/scenarios.hpp"

namespace tacsim {

enum class Activation { Identity, Sigmoid, Tanh, Softmax };

std::string_view to_string(Activation act);
Activation parse_activation(std::string_view text);

/// A contiguous block of output units sharing one activation.
struct HeadSegment {
  Activation activation = Activation::Identity;
  int width = 1;

  bool operator==(const HeadSegment&) const = default;
};

struct Architecture {
  int input_width = 0;
  std::vector<int> hidden;
  std::vector<HeadSegment> head;

  int output_width() const;
  /// Layer widths from input to output.
  std::vector<int> widths() const;
  bool operator==(const Architecture&) const = default;
};

inline const std::vector<int> kDefaultHidden{500, 500, 500, 500};

/// Sim-to-sim: 5 linear regression units + 3-way Softmax identity.
/// Task I: one Sigmoid unit. Task II: one Tanh. Task III: two Tanh.
std::vector<HeadSegment> task_head(TaskKind task);
Architecture task_architecture(TaskKind task, int input_width,
                               const std::vector<int>& hidden = kDefaultHidden);

struct DenseLayer {
  Eigen::MatrixXd weights;  // out x in
  Eigen::VectorXd bias;
};

/// Fully connected ReLU network followed by an affine head. Inputs and
/// outputs are column-major batches (features x batch).
struct MlpModel {
  Architecture arch;
  std::vector<DenseLayer> layers;
  std::optional<TaskKind> task;
  std::optional<RepKind> rep_kind;
  /// Per-feature standardisation (x - mean) * scale applied before the first
  /// layer. Empty vectors mean raw inputs.
  Eigen::VectorXd input_mean;
  Eigen::VectorXd input_scale;

  std::size_t parameter_count() const;
  /// Flat parameter view: layer by layer, row-major weights then bias.
  double& parameter(std::size_t flat_index);
  double parameter(std::size_t flat_index) const;
};

/// Glorot-uniform weights, zero biases.
MlpModel init_model(const Architecture& arch, std::uint64_t seed);
/// Task-shaped 4x500 network. Throws Error{Domain} unless the input width is
/// 182, 91 or 3.
MlpModel init_model(int input_width, TaskKind task, std::uint64_t seed);

inline constexpr double kMinFeatureSpread = 1e-9;

/// Fits input_mean/input_scale to the columns of `inputs`; features with no
/// spread keep scale 1.
void fit_input_standardization(MlpModel& model, const Eigen::MatrixXd& inputs);

/// Throws Error{Schema} on width mismatch and Error{Numerical} on non-finite
/// input.
Eigen::MatrixXd forward(const MlpModel& model, const Eigen::MatrixXd& inputs);

void apply_head(const std::vector<HeadSegment>& head, Eigen::MatrixXd& z);

/// Mean of squared errors over every output component of every column.
double mse_loss(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& targets);

struct Gradients {
  std::vector<DenseLayer> layers;

  std::size_t parameter_count() const;
  double value(std::size_t flat_index) const;
  double& value(std::size_t flat_index);
};

/// Exact gradient of `loss_scale * mse_loss(forward(inputs), targets)`.
/// ReLU'(0) is taken as 0. Throws Error{Numerical} naming the layer when an
/// intermediate is non-finite.
Gradients backward(const MlpModel& model, const Eigen::MatrixXd& inputs,
                   const Eigen::MatrixXd& targets, double* loss_out = nullptr,
                   double loss_scale = 1.0);

struct GradCheckResult {
  double max_relative_error = 0.0;
  std::size_t worst_index = 0;
  std::size_t checked = 0;
};

/// Floor on the relative-error denominator. Gradients smaller than this are
/// compared in absolute terms, where central differences are dominated by
/// rounding.
inline constexpr double kGradCheckFloor = 1e-4;

/// Parameter indices a gradient check visits: all of them when `max_params`
/// is zero or covers the network, otherwise a seeded sorted random subset.
std::vector<std::size_t> gradcheck_indices(std::size_t total, std::size_t max_params,
                                           std::uint64_t seed);

/// Compares `analytic` (or backward() when null) against central differences
/// with step `epsilon` on the parameters chosen by gradcheck_indices.
GradCheckResult gradient_check(const MlpModel& model, const Eigen::MatrixXd& inputs,
                               const Eigen::MatrixXd& targets, double epsilon,
                               std::size_t max_params = 0, std::uint64_t seed = 0,
                               const Gradients* analytic = nullptr);

}  // namespace tacsim
