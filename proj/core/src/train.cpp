#include "tacsim/train.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "tacsim/error.hpp"
#include "tacsim/random.hpp"

namespace tacsim {
namespace {

void shuffle(std::vector<std::size_t>& v, Rng& rng) {
  for (std::size_t i = v.size(); i > 1; --i) {
    const auto j = static_cast<std::size_t>(uniform_int(rng, 0, static_cast<std::int64_t>(i - 1)));
    std::swap(v[i - 1], v[j]);
  }
}

std::vector<std::size_t> canonical_order(const DataSet& data) {
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  if (data.keys.size() == data.size()) {
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return data.keys[a] < data.keys[b]; });
  }
  return order;
}

// Per-parameter optimiser state, shaped like the model.
struct OptimizerState {
  std::vector<DenseLayer> first;
  std::vector<DenseLayer> second;
  long steps = 0;

  explicit OptimizerState(const MlpModel& model) {
    for (const DenseLayer& l : model.layers) {
      first.push_back({Eigen::MatrixXd::Zero(l.weights.rows(), l.weights.cols()),
                       Eigen::VectorXd::Zero(l.bias.size())});
    }
    second = first;
  }
};

void apply_update(MlpModel& model, const Gradients& g, OptimizerState& state,
                  const TrainConfig& cfg) {
  ++state.steps;
  const double lr = cfg.learning_rate;
  for (std::size_t l = 0; l < model.layers.size(); ++l) {
    DenseLayer& p = model.layers[l];
    const DenseLayer& d = g.layers[l];
    switch (cfg.optimizer) {
      case Optimizer::Sgd:
        p.weights -= lr * d.weights;
        p.bias -= lr * d.bias;
        break;
      case Optimizer::Momentum: {
        DenseLayer& v = state.first[l];
        v.weights = cfg.momentum * v.weights + d.weights;
        v.bias = cfg.momentum * v.bias + d.bias;
        p.weights -= lr * v.weights;
        p.bias -= lr * v.bias;
        break;
      }
      case Optimizer::Adam: {
        DenseLayer& m = state.first[l];
        DenseLayer& v = state.second[l];
        const double b1 = cfg.beta1;
        const double b2 = cfg.beta2;
        const double c1 = 1.0 - std::pow(b1, static_cast<double>(state.steps));
        const double c2 = 1.0 - std::pow(b2, static_cast<double>(state.steps));
        const double step = lr * std::sqrt(c2) / c1;
        m.weights = b1 * m.weights + (1.0 - b1) * d.weights;
        m.bias = b1 * m.bias + (1.0 - b1) * d.bias;
        v.weights = b2 * v.weights + (1.0 - b2) * d.weights.cwiseAbs2();
        v.bias = b2 * v.bias + (1.0 - b2) * d.bias.cwiseAbs2();
        p.weights.array() -=
            step * m.weights.array() / (v.weights.array().sqrt() + cfg.adam_epsilon);
        p.bias.array() -= step * m.bias.array() / (v.bias.array().sqrt() + cfg.adam_epsilon);
        break;
      }
    }
  }
}

}  // namespace

std::string_view to_string(Optimizer opt) {
  switch (opt) {
    case Optimizer::Sgd: return "sgd";
    case Optimizer::Momentum: return "momentum";
    case Optimizer::Adam: return "adam";
  }
  return "sgd";
}

Optimizer parse_optimizer(std::string_view text) {
  if (text == "sgd") return Optimizer::Sgd;
  if (text == "momentum") return Optimizer::Momentum;
  if (text == "adam") return Optimizer::Adam;
  fail(ErrorKind::Config, "unknown optimizer '" + std::string(text) + "' (expected sgd | momentum | adam)");
}

void TrainConfig::validate() const {
  if (batch_size < 1) fail(ErrorKind::Domain, "train: batch_size must be >= 1");
  if (!(learning_rate > 0.0)) fail(ErrorKind::Domain, "train: learning_rate must be > 0");
  if (epochs < 1) fail(ErrorKind::Domain, "train: epochs must be >= 1");
  if (patience < 0) fail(ErrorKind::Domain, "train: patience must be >= 0");
  if (!(validation_fraction >= 0.0 && validation_fraction <= 0.5))
    fail(ErrorKind::Domain, "train: validation_fraction must lie in [0, 0.5]");
}

std::uint64_t sample_key(const Sample& s) {
  return (static_cast<std::uint64_t>(s.episode) << 8) ^ static_cast<std::uint64_t>(s.step);
}

DataSet DataSet::from_samples(std::span<const Sample> samples) {
  DataSet data;
  if (samples.empty()) return data;
  const auto in = static_cast<Eigen::Index>(samples.front().rep.size());
  const auto out = static_cast<Eigen::Index>(samples.front().label.size());
  const auto n = static_cast<Eigen::Index>(samples.size());
  data.inputs.resize(in, n);
  data.targets.resize(out, n);
  data.keys.reserve(samples.size());
  for (Eigen::Index c = 0; c < n; ++c) {
    const Sample& s = samples[static_cast<std::size_t>(c)];
    if (static_cast<Eigen::Index>(s.rep.size()) != in ||
        static_cast<Eigen::Index>(s.label.size()) != out)
      fail(ErrorKind::Schema, "DataSet: inconsistent sample widths at index " + std::to_string(c));
    data.inputs.col(c) = Eigen::Map<const Eigen::VectorXd>(s.rep.data(), in);
    data.targets.col(c) = Eigen::Map<const Eigen::VectorXd>(s.label.data(), out);
    data.keys.push_back(sample_key(s));
  }
  return data;
}

DataSet DataSet::subset(std::span<const std::size_t> columns) const {
  DataSet out;
  out.inputs.resize(inputs.rows(), static_cast<Eigen::Index>(columns.size()));
  out.targets.resize(targets.rows(), static_cast<Eigen::Index>(columns.size()));
  for (std::size_t k = 0; k < columns.size(); ++k) {
    const auto src = static_cast<Eigen::Index>(columns[k]);
    out.inputs.col(static_cast<Eigen::Index>(k)) = inputs.col(src);
    out.targets.col(static_cast<Eigen::Index>(k)) = targets.col(src);
    if (keys.size() == size()) out.keys.push_back(keys[columns[k]]);
  }
  return out;
}

std::pair<DataSet, DataSet> split_validation(const DataSet& data, double fraction,
                                             std::uint64_t seed) {
  std::vector<std::size_t> order = canonical_order(data);
  Rng rng(seed);
  shuffle(order, rng);
  const auto n_val = static_cast<std::size_t>(std::llround(fraction * static_cast<double>(order.size())));
  std::vector<std::size_t> val(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_val));
  std::vector<std::size_t> trn(order.begin() + static_cast<std::ptrdiff_t>(n_val), order.end());
  std::sort(val.begin(), val.end());
  std::sort(trn.begin(), trn.end());
  return {data.subset(trn), data.subset(val)};
}

double dataset_loss(const MlpModel& model, const DataSet& data) {
  if (data.empty()) return std::numeric_limits<double>::quiet_NaN();
  return mse_loss(forward(model, data.inputs), data.targets);
}

TrainResult train(MlpModel model, const DataSet& train_set, const DataSet& val_set,
                  const TrainConfig& config) {
  config.validate();
  if (train_set.empty()) fail(ErrorKind::Schema, "train: empty training set");
  if (train_set.inputs.rows() != model.arch.input_width ||
      train_set.targets.rows() != model.arch.output_width())
    fail(ErrorKind::Schema, "train: dataset widths do not match the model");

  const std::vector<std::size_t> base = canonical_order(train_set);
  // Fitted in key order so the statistics do not depend on storage order.
  if (config.standardize_inputs && model.input_mean.size() == 0)
    fit_input_standardization(model, train_set.subset(base).inputs);

  Rng rng(config.seed);
  OptimizerState state(model);
  TrainResult result;
  const bool early = config.patience > 0 && !val_set.empty();
  double best_val = std::numeric_limits<double>::infinity();
  int since_best = 0;
  MlpModel best = model;

  const auto batch = static_cast<std::size_t>(config.batch_size);
  Eigen::MatrixXd xb;
  Eigen::MatrixXd yb;
  for (int epoch = 1; epoch <= config.epochs; ++epoch) {
    std::vector<std::size_t> order = base;
    shuffle(order, rng);
    double weighted = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch) {
      const std::size_t len = std::min(batch, order.size() - start);
      xb.resize(train_set.inputs.rows(), static_cast<Eigen::Index>(len));
      yb.resize(train_set.targets.rows(), static_cast<Eigen::Index>(len));
      for (std::size_t k = 0; k < len; ++k) {
        const auto src = static_cast<Eigen::Index>(order[start + k]);
        xb.col(static_cast<Eigen::Index>(k)) = train_set.inputs.col(src);
        yb.col(static_cast<Eigen::Index>(k)) = train_set.targets.col(src);
      }
      double loss = 0.0;
      Gradients g;
      try {
        g = backward(model, xb, yb, &loss);
      } catch (const Error& e) {
        fail(e.kind(), "train epoch " + std::to_string(epoch) + ": " + e.what());
      }
      weighted += loss * static_cast<double>(len);
      apply_update(model, g, state, config);
    }
    const double train_loss = weighted / static_cast<double>(order.size());
    if (!std::isfinite(train_loss) || train_loss > kDivergenceLoss)
      fail(ErrorKind::Numerical, "train: diverged at epoch " + std::to_string(epoch) +
                                     " (loss " + std::to_string(train_loss) + ")");
    const double val_loss = dataset_loss(model, val_set);
    result.history.push_back({epoch, train_loss, val_loss});

    if (early) {
      if (val_loss < best_val) {
        best_val = val_loss;
        best = model;
        result.best_epoch = epoch;
        since_best = 0;
      } else if (++since_best >= config.patience) {
        result.stopped_early = true;
        break;
      }
    }
  }
  if (early) {
    result.model = std::move(best);
  } else {
    result.model = std::move(model);
    result.best_epoch = static_cast<int>(result.history.size());
  }
  return result;
}

std::string history_csv(std::span<const EpochRecord> history) {
  std::ostringstream out;
  out.precision(17);
  out << "epoch,train_loss,val_loss\n";
  for (const EpochRecord& r : history) out << r.epoch << ',' << r.train_loss << ',' << r.val_loss << '\n';
  return out.str();
}

}  // namespace tacsim
