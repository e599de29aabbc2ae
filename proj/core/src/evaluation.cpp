#include "tacsim/evaluation.hpp"

#include <charconv>
#include <chrono>
#include <cmath>
#include <map>
#include <numeric>
#include <tuple>

#include <json.hpp>

#include "tacsim/error.hpp"
#include "tacsim/parallel.hpp"
#include "tacsim/random.hpp"

namespace tacsim {
namespace {

struct Group {
  const char* name;
  int begin;
  int end;
};

std::vector<Group> target_groups(TaskKind task, int width) {
  if (task == TaskKind::SimToSim) return {{"position", 0, 2}, {"rotation", 2, 5}, {"identity", 5, 8}};
  return {{"target", 0, width}};
}

double mean(std::span<const double> xs) {
  return xs.empty() ? 0.0 : std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_std(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double m = mean(xs);
  double ss = 0.0;
  for (double x : xs) ss += (x - m) * (x - m);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

// Stream tags for the per-cell seed tree.
enum : std::uint64_t { kDataStream = 1, kInitStream = 2, kTrainStream = 3, kTestStream = 100 };

std::string metric_suffix(double factor) { return "_r" + format_double(factor); }

}  // namespace

double MseReport::group(const std::string& name) const {
  for (const auto& [g, v] : groups)
    if (g == name) return v;
  fail(ErrorKind::Schema, "MseReport: no group '" + name + "'");
}

MseReport eval_mse_predictions(TaskKind task, const Eigen::MatrixXd& predictions,
                               const Eigen::MatrixXd& targets) {
  if (targets.cols() == 0) fail(ErrorKind::Schema, "eval_mse: empty dataset");
  if (predictions.rows() != targets.rows() || predictions.cols() != targets.cols())
    fail(ErrorKind::Schema, "eval_mse: prediction and target shapes differ");
  if (targets.rows() != static_cast<Eigen::Index>(label_width(task)))
    fail(ErrorKind::Schema, "eval_mse: label width does not match the task");
  const Eigen::ArrayXXd sq = (predictions - targets).array().square();
  const double n = static_cast<double>(targets.cols());
  MseReport report;
  report.samples = static_cast<std::size_t>(targets.cols());
  for (const Group& g : target_groups(task, static_cast<int>(targets.rows()))) {
    const double s = sq.middleRows(g.begin, g.end - g.begin).sum();
    report.groups.emplace_back(g.name, s / (n * (g.end - g.begin)));
  }
  report.pooled = sq.sum() / (n * static_cast<double>(targets.rows()));
  return report;
}

MseReport eval_mse(const MlpModel& model, std::span<const Sample> dataset) {
  if (dataset.empty()) fail(ErrorKind::Schema, "eval_mse: empty dataset");
  const TaskKind task = dataset.front().task;
  for (const Sample& s : dataset)
    if (s.task != task) fail(ErrorKind::Schema, "eval_mse: dataset mixes tasks");
  if (model.task && *model.task != task)
    fail(ErrorKind::Schema, "eval_mse: model was trained for " + std::string(to_string(*model.task)));
  const DataSet data = DataSet::from_samples(dataset);
  if (data.inputs.rows() != model.arch.input_width ||
      data.targets.rows() != model.arch.output_width())
    fail(ErrorKind::Schema, "eval_mse: dataset widths do not match the model");
  return eval_mse_predictions(task, forward(model, data.inputs), data.targets);
}

Predictor model_predictor(const MlpModel& model) {
  auto shared = std::make_shared<const MlpModel>(model);
  return [shared](const TapObservation& obs) {
    const auto& v = obs.rep.values;
    if (static_cast<int>(v.size()) != shared->arch.input_width)
      fail(ErrorKind::Schema, "predictor: representation width does not match the model");
    const Eigen::MatrixXd x = Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
    const Eigen::MatrixXd y = forward(*shared, x);
    return std::vector<double>(y.data(), y.data() + y.size());
  };
}

RoundsResult eval_rounds_mae(const MlpModel& model, const PseudoRealEnv& env, int rounds,
                             int taps_per_round) {
  if (!model.rep_kind) fail(ErrorKind::Schema, "eval_rounds_mae: model has no representation tag");
  if (model.task && *model.task != env.task().kind)
    fail(ErrorKind::Schema, "eval_rounds_mae: model task does not match the environment");
  return pseudo_real_rounds(env, model_predictor(model), *model.rep_kind, rounds, taps_per_round);
}

CellResult run_cell(const ScenarioConfig& config, RepKind rep, double factor, std::uint64_t seed) {
  CellResult cell;
  cell.task = config.task.kind;
  cell.rep = rep;
  cell.factor = factor;
  cell.seed = seed;
  try {
    ScenarioConfig c = config;
    c.rep_kind = rep;
    c.randomization.factor = factor;
    const GenerationContext ctx = c.generation_context();
    const std::vector<Sample> samples =
        generate_samples(ctx, c.sweep.train_count, derive_seed(seed, kDataStream));
    cell.train_samples = samples.size();

    const DataSet all = DataSet::from_samples(samples);
    auto [train_set, val_set] =
        split_validation(all, c.train.validation_fraction, derive_seed(seed, kTrainStream));
    const Architecture arch =
        task_architecture(c.task.kind, static_cast<int>(all.inputs.rows()), c.hidden);
    MlpModel model = init_model(arch, derive_seed(seed, kInitStream));
    model.task = c.task.kind;
    model.rep_kind = rep;
    TrainConfig tc = c.train;
    tc.seed = derive_seed(seed, kTrainStream);
    TrainResult trained = train(std::move(model), train_set, val_set, tc);
    const EpochRecord& last = trained.history.back();
    cell.metrics.emplace_back("train_loss", last.train_loss);

    if (c.task.kind == TaskKind::SimToSim) {
      for (std::size_t k = 0; k < c.sweep.test_factors.size(); ++k) {
        const double tf = c.sweep.test_factors[k];
        ScenarioConfig tcfg = c;
        tcfg.randomization.factor = tf;
        const GenerationContext tctx = tcfg.generation_context();
        // Test episodes depend on the cell seed and test factor only, so every
        // representation and training factor is scored on the same taps.
        const std::vector<Sample> test = generate_samples(
            tctx, c.sweep.test_count, derive_seed(seed, kTestStream + k));
        const MseReport mse = eval_mse(trained.model, test);
        const std::string suffix = metric_suffix(tf);
        cell.metrics.emplace_back("mse" + suffix, mse.pooled);
        for (const auto& [g, v] : mse.groups) cell.metrics.emplace_back("mse_" + g + suffix, v);
      }
    } else {
      const PseudoRealEnv env(ctx.mesh, c.task, c.dynamics, c.pseudo_real);
      const RoundsResult rr =
          eval_rounds_mae(trained.model, env, c.pseudo_real.rounds, c.pseudo_real.taps_per_round);
      cell.metrics.emplace_back("mae", rr.mae);
      cell.metrics.emplace_back("round_std", rr.stddev);
    }
  } catch (const Error& e) {
    cell.metrics.clear();
    cell.error = std::string(to_string(e.kind())) + ": " + e.what();
  }
  return cell;
}

EvalReport sweep_randomization(const ScenarioConfig& config, int jobs) {
  config.validate();
  const auto start = std::chrono::steady_clock::now();
  std::vector<std::tuple<RepKind, double, std::uint64_t>> keys;
  for (RepKind rep : config.sweep.representations)
    for (double f : config.sweep.factors)
      for (std::uint64_t s : config.sweep.seeds) keys.emplace_back(rep, f, s);
  std::sort(keys.begin(), keys.end());
  keys.erase(std::unique(keys.begin(), keys.end()), keys.end());

  EvalReport report;
  report.cells.resize(keys.size());
  parallel_for(keys.size(), jobs, [&](std::size_t i) {
    const auto& [rep, f, s] = keys[i];
    report.cells[i] = run_cell(config, rep, f, s);
  });
  report.wall_clock_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return report;
}

std::string format_double(double value) {
  if (std::isnan(value)) return "nan";
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

namespace {

struct Summary {
  TaskKind task;
  RepKind rep;
  double factor;
  std::string metric;
  double mean;
  double std;
  std::size_t n;
};

std::vector<Summary> summarize(const EvalReport& report) {
  using Key = std::tuple<RepKind, double, TaskKind>;
  std::map<Key, std::vector<std::string>> metric_order;
  std::map<std::tuple<RepKind, double, TaskKind, std::string>, std::vector<double>> values;
  for (const CellResult& c : report.cells) {
    if (!c.error.empty()) continue;
    auto& order = metric_order[{c.rep, c.factor, c.task}];
    for (const auto& [m, v] : c.metrics) {
      auto& bucket = values[{c.rep, c.factor, c.task, m}];
      if (bucket.empty()) order.push_back(m);
      bucket.push_back(v);
    }
  }
  std::vector<Summary> out;
  for (const auto& [key, order] : metric_order) {
    const auto& [rep, factor, task] = key;
    for (const std::string& m : order) {
      const auto& xs = values.at({rep, factor, task, m});
      out.push_back({task, rep, factor, m, mean(xs), sample_std(xs), xs.size()});
    }
  }
  return out;
}

}  // namespace

std::string report_csv(const EvalReport& report) {
  std::string out = "task,representation,factor,seed,metric,value\n";
  auto row = [&out](TaskKind t, RepKind r, double f, const std::string& seed, const std::string& m,
                    const std::string& v) {
    out += std::string(to_string(t)) + ',' + std::string(to_string(r)) + ',' + format_double(f) +
           ',' + seed + ',' + m + ',' + v + '\n';
  };
  for (const CellResult& c : report.cells) {
    if (!c.error.empty()) {
      row(c.task, c.rep, c.factor, std::to_string(c.seed), "failed", "1");
      continue;
    }
    for (const auto& [m, v] : c.metrics)
      row(c.task, c.rep, c.factor, std::to_string(c.seed), m, format_double(v));
  }
  for (const Summary& s : summarize(report)) {
    row(s.task, s.rep, s.factor, "mean", s.metric, format_double(s.mean));
    row(s.task, s.rep, s.factor, "std", s.metric, format_double(s.std));
  }
  return out;
}

std::string report_json(const EvalReport& report) {
  using ojson = nlohmann::ordered_json;
  ojson doc;
  ojson cells = ojson::array();
  for (const CellResult& c : report.cells) {
    ojson cell;
    cell["task"] = std::string(to_string(c.task));
    cell["representation"] = std::string(to_string(c.rep));
    cell["factor"] = c.factor;
    cell["seed"] = c.seed;
    cell["train_samples"] = c.train_samples;
    ojson metrics = ojson::object();
    for (const auto& [m, v] : c.metrics) metrics[m] = v;
    cell["metrics"] = std::move(metrics);
    cell["error"] = c.error.empty() ? ojson(nullptr) : ojson(c.error);
    cells.push_back(std::move(cell));
  }
  doc["cells"] = std::move(cells);
  ojson summary = ojson::array();
  for (const Summary& s : summarize(report))
    summary.push_back({{"task", std::string(to_string(s.task))},
                       {"representation", std::string(to_string(s.rep))},
                       {"factor", s.factor},
                       {"metric", s.metric},
                       {"mean", s.mean},
                       {"std", s.std},
                       {"seeds", s.n}});
  doc["summary"] = std::move(summary);
  return doc.dump(2) + '\n';
}

}  // namespace tacsim
