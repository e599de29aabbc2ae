#include "tacsim/mlp.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tacsim/error.hpp"
#include "tacsim/random.hpp"

namespace tacsim {
namespace {

std::size_t layer_params(const DenseLayer& layer) {
  return static_cast<std::size_t>(layer.weights.size() + layer.bias.size());
}

// Resolves a flat index to (layer, is_bias, row, col).
struct ParamRef {
  std::size_t layer;
  bool bias;
  Eigen::Index row;
  Eigen::Index col;
};

ParamRef locate(const std::vector<DenseLayer>& layers, std::size_t flat) {
  for (std::size_t l = 0; l < layers.size(); ++l) {
    const auto w = static_cast<std::size_t>(layers[l].weights.size());
    const auto cols = static_cast<std::size_t>(layers[l].weights.cols());
    if (flat < w)
      return {l, false, static_cast<Eigen::Index>(flat / cols), static_cast<Eigen::Index>(flat % cols)};
    flat -= w;
    const auto b = static_cast<std::size_t>(layers[l].bias.size());
    if (flat < b) return {l, true, static_cast<Eigen::Index>(flat), 0};
    flat -= b;
  }
  fail(ErrorKind::Domain, "parameter index out of range");
}

double& ref(std::vector<DenseLayer>& layers, std::size_t flat) {
  const ParamRef r = locate(layers, flat);
  return r.bias ? layers[r.layer].bias(r.row) : layers[r.layer].weights(r.row, r.col);
}

double value_of(const std::vector<DenseLayer>& layers, std::size_t flat) {
  const ParamRef r = locate(layers, flat);
  return r.bias ? layers[r.layer].bias(r.row) : layers[r.layer].weights(r.row, r.col);
}

void check_finite(const Eigen::MatrixXd& m, std::size_t layer, const char* what) {
  if (!m.allFinite())
    fail(ErrorKind::Numerical, std::string("non-finite ") + what + " at layer " + std::to_string(layer));
}

Eigen::MatrixXd prepared(const MlpModel& model, const Eigen::MatrixXd& inputs) {
  if (model.input_mean.size() == 0) return inputs;
  return ((inputs.colwise() - model.input_mean).array().colwise() * model.input_scale.array())
      .matrix();
}

void check_input(const MlpModel& model, const Eigen::MatrixXd& inputs) {
  if (inputs.rows() != model.arch.input_width)
    fail(ErrorKind::Schema, "forward: input width " + std::to_string(inputs.rows()) +
                                " != model input width " + std::to_string(model.arch.input_width));
  if (!inputs.allFinite()) fail(ErrorKind::Numerical, "forward: non-finite input");
}

}  // namespace

std::string_view to_string(Activation act) {
  switch (act) {
    case Activation::Identity: return "identity";
    case Activation::Sigmoid: return "sigmoid";
    case Activation::Tanh: return "tanh";
    case Activation::Softmax: return "softmax";
  }
  return "identity";
}

Activation parse_activation(std::string_view text) {
  if (text == "identity") return Activation::Identity;
  if (text == "sigmoid") return Activation::Sigmoid;
  if (text == "tanh") return Activation::Tanh;
  if (text == "softmax") return Activation::Softmax;
  fail(ErrorKind::Schema, "unknown activation '" + std::string(text) + "'");
}

int Architecture::output_width() const {
  int n = 0;
  for (const HeadSegment& s : head) n += s.width;
  return n;
}

std::vector<int> Architecture::widths() const {
  std::vector<int> w{input_width};
  w.insert(w.end(), hidden.begin(), hidden.end());
  w.push_back(output_width());
  return w;
}

std::vector<HeadSegment> task_head(TaskKind task) {
  switch (task) {
    case TaskKind::SimToSim:
      return {{Activation::Identity, 5}, {Activation::Softmax, kSimObjectCount}};
    case TaskKind::TaskI: return {{Activation::Sigmoid, 1}};
    case TaskKind::TaskII: return {{Activation::Tanh, 1}};
    case TaskKind::TaskIII: return {{Activation::Tanh, 2}};
  }
  return {};
}

Architecture task_architecture(TaskKind task, int input_width, const std::vector<int>& hidden) {
  return Architecture{input_width, hidden, task_head(task)};
}

std::size_t MlpModel::parameter_count() const {
  std::size_t n = 0;
  for (const DenseLayer& l : layers) n += layer_params(l);
  return n;
}

double& MlpModel::parameter(std::size_t flat_index) { return ref(layers, flat_index); }
double MlpModel::parameter(std::size_t flat_index) const { return value_of(layers, flat_index); }

std::size_t Gradients::parameter_count() const {
  std::size_t n = 0;
  for (const DenseLayer& l : layers) n += layer_params(l);
  return n;
}

double Gradients::value(std::size_t flat_index) const { return value_of(layers, flat_index); }
double& Gradients::value(std::size_t flat_index) { return ref(layers, flat_index); }

MlpModel init_model(const Architecture& arch, std::uint64_t seed) {
  if (arch.input_width < 1 || arch.head.empty())
    fail(ErrorKind::Domain, "init_model: need a positive input width and a head");
  for (int h : arch.hidden)
    if (h < 1) fail(ErrorKind::Domain, "init_model: hidden widths must be positive");
  for (const HeadSegment& s : arch.head)
    if (s.width < 1) fail(ErrorKind::Domain, "init_model: head segments must be non-empty");

  MlpModel model;
  model.arch = arch;
  Rng rng(seed);
  const std::vector<int> widths = arch.widths();
  for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
    const int fan_in = widths[l];
    const int fan_out = widths[l + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    DenseLayer layer{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)};
    for (int r = 0; r < fan_out; ++r)
      for (int c = 0; c < fan_in; ++c) layer.weights(r, c) = uniform(rng, -limit, limit);
    model.layers.push_back(std::move(layer));
  }
  return model;
}

MlpModel init_model(int input_width, TaskKind task, std::uint64_t seed) {
  if (input_width != 182 && input_width != 91 && input_width != 3)
    fail(ErrorKind::Domain, "init_model: unsupported input width " + std::to_string(input_width) +
                                " (expected 182, 91 or 3)");
  MlpModel model = init_model(task_architecture(task, input_width), seed);
  model.task = task;
  return model;
}

void apply_head(const std::vector<HeadSegment>& head, Eigen::MatrixXd& z) {
  Eigen::Index row = 0;
  for (const HeadSegment& seg : head) {
    auto block = z.middleRows(row, seg.width);
    switch (seg.activation) {
      case Activation::Identity: break;
      case Activation::Sigmoid: block = (1.0 + (-block.array()).exp()).inverse().matrix(); break;
      case Activation::Tanh: block = block.array().tanh().matrix(); break;
      case Activation::Softmax:
        for (Eigen::Index c = 0; c < block.cols(); ++c) {
          auto col = block.col(c);
          const double m = col.maxCoeff();
          col = (col.array() - m).exp().matrix();
          col /= col.sum();
        }
        break;
    }
    row += seg.width;
  }
}

void fit_input_standardization(MlpModel& model, const Eigen::MatrixXd& inputs) {
  if (inputs.cols() == 0) fail(ErrorKind::Schema, "standardization: no samples");
  if (inputs.rows() != model.arch.input_width)
    fail(ErrorKind::Schema, "standardization: input width does not match the model");
  model.input_mean = inputs.rowwise().mean();
  const Eigen::VectorXd var =
      (inputs.colwise() - model.input_mean).array().square().rowwise().mean();
  model.input_scale.resize(var.size());
  for (Eigen::Index i = 0; i < var.size(); ++i) {
    const double sd = std::sqrt(var(i));
    model.input_scale(i) = sd > kMinFeatureSpread ? 1.0 / sd : 1.0;
  }
}

Eigen::MatrixXd forward(const MlpModel& model, const Eigen::MatrixXd& inputs) {
  check_input(model, inputs);
  Eigen::MatrixXd a = prepared(model, inputs);
  const std::size_t last = model.layers.size() - 1;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    const DenseLayer& layer = model.layers[l];
    Eigen::MatrixXd z = layer.weights * a;
    z.colwise() += layer.bias;
    if (l < last) {
      a = z.cwiseMax(0.0);
    } else {
      apply_head(model.arch.head, z);
      a = std::move(z);
    }
  }
  return a;
}

double mse_loss(const Eigen::MatrixXd& outputs, const Eigen::MatrixXd& targets) {
  if (outputs.rows() != targets.rows() || outputs.cols() != targets.cols())
    fail(ErrorKind::Schema, "mse_loss: output/target shape mismatch");
  if (outputs.size() == 0) fail(ErrorKind::Schema, "mse_loss: empty batch");
  return (outputs - targets).squaredNorm() / static_cast<double>(outputs.size());
}

Gradients backward(const MlpModel& model, const Eigen::MatrixXd& inputs,
                   const Eigen::MatrixXd& targets, double* loss_out, double loss_scale) {
  check_input(model, inputs);
  if (targets.rows() != model.arch.output_width() || targets.cols() != inputs.cols())
    fail(ErrorKind::Schema, "backward: target shape mismatch");

  // activations[l] is the input to layer l; pre[l] its pre-activation.
  std::vector<Eigen::MatrixXd> activations;
  std::vector<Eigen::MatrixXd> pre;
  activations.reserve(model.layers.size());
  pre.reserve(model.layers.size());
  activations.push_back(prepared(model, inputs));
  const std::size_t last = model.layers.size() - 1;
  Eigen::MatrixXd output;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    Eigen::MatrixXd z = model.layers[l].weights * activations.back();
    z.colwise() += model.layers[l].bias;
    check_finite(z, l, "pre-activation");
    if (l < last) {
      activations.push_back(z.cwiseMax(0.0));
      pre.push_back(std::move(z));
    } else {
      output = z;
      apply_head(model.arch.head, output);
      pre.push_back(std::move(z));
    }
  }

  const double loss = mse_loss(output, targets);
  if (loss_out) *loss_out = loss_scale * loss;
  Eigen::MatrixXd delta =
      (2.0 * loss_scale / static_cast<double>(output.size())) * (output - targets);

  // Head Jacobian.
  Eigen::Index row = 0;
  for (const HeadSegment& seg : model.arch.head) {
    auto d = delta.middleRows(row, seg.width);
    const auto y = output.middleRows(row, seg.width);
    switch (seg.activation) {
      case Activation::Identity: break;
      case Activation::Sigmoid: d = (d.array() * y.array() * (1.0 - y.array())).matrix(); break;
      case Activation::Tanh: d = (d.array() * (1.0 - y.array().square())).matrix(); break;
      case Activation::Softmax:
        for (Eigen::Index c = 0; c < d.cols(); ++c) {
          const double dot = d.col(c).dot(y.col(c));
          d.col(c) = (y.col(c).array() * (d.col(c).array() - dot)).matrix();
        }
        break;
    }
    row += seg.width;
  }

  Gradients grads;
  grads.layers.resize(model.layers.size());
  for (std::size_t l = model.layers.size(); l-- > 0;) {
    check_finite(delta, l, "gradient");
    grads.layers[l].weights = delta * activations[l].transpose();
    grads.layers[l].bias = delta.rowwise().sum();
    if (l > 0) {
      Eigen::MatrixXd upstream = model.layers[l].weights.transpose() * delta;
      delta = (pre[l - 1].array() > 0.0).select(upstream, 0.0);
    }
  }
  return grads;
}

std::vector<std::size_t> gradcheck_indices(std::size_t total, std::size_t max_params,
                                           std::uint64_t seed) {
  std::vector<std::size_t> indices(total);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  if (max_params != 0 && max_params < total) {
    Rng rng(seed);
    for (std::size_t i = 0; i < max_params; ++i) {
      const auto j = static_cast<std::size_t>(
          uniform_int(rng, static_cast<std::int64_t>(i), static_cast<std::int64_t>(total - 1)));
      std::swap(indices[i], indices[j]);
    }
    indices.resize(max_params);
    std::sort(indices.begin(), indices.end());
  }
  return indices;
}

GradCheckResult gradient_check(const MlpModel& model, const Eigen::MatrixXd& inputs,
                               const Eigen::MatrixXd& targets, double epsilon,
                               std::size_t max_params, std::uint64_t seed,
                               const Gradients* analytic) {
  if (!(epsilon > 0.0)) fail(ErrorKind::Domain, "gradient_check: epsilon must be > 0");
  const Gradients own = analytic ? Gradients{} : backward(model, inputs, targets);
  const Gradients& grads = analytic ? *analytic : own;

  const std::vector<std::size_t> indices =
      gradcheck_indices(model.parameter_count(), max_params, seed);

  MlpModel probe = model;
  GradCheckResult result;
  for (std::size_t idx : indices) {
    double& theta = probe.parameter(idx);
    const double saved = theta;
    theta = saved + epsilon;
    const double up = mse_loss(forward(probe, inputs), targets);
    theta = saved - epsilon;
    const double down = mse_loss(forward(probe, inputs), targets);
    theta = saved;
    const double numeric = (up - down) / (2.0 * epsilon);
    const double exact = grads.value(idx);
    const double denom = std::max({std::abs(exact), std::abs(numeric), kGradCheckFloor});
    const double rel = std::abs(exact - numeric) / denom;
    if (result.checked == 0 || rel > result.max_relative_error) {
      result.max_relative_error = rel;
      result.worst_index = idx;
    }
    ++result.checked;
  }
  return result;
}

}  // namespace tacsim
