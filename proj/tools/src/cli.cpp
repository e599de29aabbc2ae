#include "tacsim_cli/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tacsim/checkpoint.hpp"
#include "tacsim/config.hpp"
#include "tacsim/dataset.hpp"
#include "tacsim/error.hpp"
#include "tacsim/evaluation.hpp"
#include "tacsim/mlp.hpp"
#include "tacsim/random.hpp"
#include "tacsim/train.hpp"
#include "tacsim/version.hpp"
#include "tacsim_cli/manifest.hpp"

namespace tacsim::cli {
namespace {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// Seed streams shared by `train` and the sweep so a CLI-trained model matches
// the corresponding sweep cell.
enum : std::uint64_t { kInitStream = 2, kTrainStream = 3 };

int exit_code(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Numerical:
    case ErrorKind::DegenerateContact:
    case ErrorKind::DegenerateFrame:
      return kExitNumerical;
    default:
      return kExitUsage;
  }
}

struct Globals {
  std::string config_path;
  int jobs = 1;
};

ScenarioConfig load_scenario(const Globals& g) {
  std::string path = g.config_path;
  if (path.empty())
    if (const char* env = std::getenv(kConfigEnv); env && *env) path = env;
  return path.empty() ? ScenarioConfig{} : load_config(path);
}

fs::path sidecar(const fs::path& out, const std::string& suffix) {
  return fs::path(out.string() + suffix);
}

// --- gen -------------------------------------------------------------------

struct GenArgs {
  std::string task;
  long n = 0;
  std::optional<double> factor;
  std::string rep;
  std::uint64_t seed = 0;
  std::optional<double> noise;
  std::string out;
};

int cmd_gen(const Globals& g, const GenArgs& a, std::ostream& out) {
  ScenarioConfig config = load_scenario(g);
  if (!a.task.empty()) config.task.kind = parse_task(a.task);
  if (!a.rep.empty()) config.rep_kind = parse_rep_kind(a.rep);
  if (a.factor) config.randomization.factor = *a.factor;
  if (a.noise) config.train_noise = *a.noise;
  config.validate();

  const GenerationContext ctx = config.generation_context();
  const std::vector<Sample> samples = generate_samples(ctx, a.n, a.seed, g.jobs);
  write_dataset(a.out, samples);

  RunManifest m;
  m.command = "gen";
  m.arguments = {{"task", std::string(to_string(config.task.kind))},
                 {"n", std::to_string(a.n)},
                 {"factor", format_double(config.randomization.factor)},
                 {"rep", std::string(to_string(config.rep_kind))},
                 {"seed", std::to_string(a.seed)},
                 {"out", a.out}};
  m.root_seed = a.seed;
  m.config_text = config_to_text(config);
  m.add_artifact(a.out);
  write_text(sidecar(a.out, ".manifest.json"), m.to_json());
  out << "wrote " << samples.size() << " samples to " << a.out << '\n';
  return kExitOk;
}

// --- train -----------------------------------------------------------------

struct TrainArgs {
  std::string dataset;
  std::string task;
  std::string rep;
  std::optional<int> epochs;
  std::uint64_t seed = 0;
  std::string out;
  std::string history;
  std::string optimizer;
  std::optional<double> lr;
  std::optional<int> batch;
  std::optional<int> patience;
};

int cmd_train(const Globals& g, const TrainArgs& a, std::ostream& out) {
  ScenarioConfig config = load_scenario(g);
  TrainConfig tc = config.train;
  if (a.epochs) tc.epochs = *a.epochs;
  if (a.lr) tc.learning_rate = *a.lr;
  if (a.batch) tc.batch_size = *a.batch;
  if (a.patience) tc.patience = *a.patience;
  if (!a.optimizer.empty()) tc.optimizer = parse_optimizer(a.optimizer);
  tc.seed = derive_seed(a.seed, kTrainStream);
  tc.validate();

  const std::vector<Sample> samples = read_dataset(a.dataset);
  if (samples.empty()) fail(ErrorKind::Schema, "dataset '" + a.dataset + "' is empty");
  const TaskKind task = a.task.empty() ? samples.front().task : parse_task(a.task);
  const RepKind rep = a.rep.empty() ? samples.front().rep_kind : parse_rep_kind(a.rep);
  for (const Sample& s : samples) {
    if (s.task != task || s.rep_kind != rep)
      fail(ErrorKind::Schema, "dataset sample " + std::to_string(s.episode) + " is " +
                                  std::string(to_string(s.task)) + "/" +
                                  std::string(to_string(s.rep_kind)) + ", expected " +
                                  std::string(to_string(task)) + "/" + std::string(to_string(rep)));
  }

  const DataSet all = DataSet::from_samples(samples);
  auto [train_set, val_set] = split_validation(all, tc.validation_fraction, tc.seed);
  const Architecture arch = task_architecture(task, static_cast<int>(all.inputs.rows()), config.hidden);
  MlpModel model = init_model(arch, derive_seed(a.seed, kInitStream));
  model.task = task;
  model.rep_kind = rep;
  const TrainResult result = train(std::move(model), train_set, val_set, tc);

  save_checkpoint(result.model, a.out);
  const std::string history = a.history.empty() ? sidecar(a.out, ".history.csv").string() : a.history;
  write_text(history, history_csv(result.history));

  RunManifest m;
  m.command = "train";
  m.arguments = {{"dataset", a.dataset},
                 {"task", std::string(to_string(task))},
                 {"rep", std::string(to_string(rep))},
                 {"epochs", std::to_string(tc.epochs)},
                 {"seed", std::to_string(a.seed)},
                 {"optimizer", std::string(to_string(tc.optimizer))},
                 {"lr", format_double(tc.learning_rate)},
                 {"batch", std::to_string(tc.batch_size)},
                 {"patience", std::to_string(tc.patience)},
                 {"out", a.out}};
  m.root_seed = a.seed;
  ScenarioConfig snapshot = config;
  snapshot.train = tc;
  m.config_text = config_to_text(snapshot);
  m.add_input(a.dataset);
  m.add_artifact(a.out);
  m.add_artifact(history);
  write_text(sidecar(a.out, ".manifest.json"), m.to_json());

  const EpochRecord& last = result.history.back();
  out << "epochs " << result.history.size() << " best " << result.best_epoch << " train_loss "
      << format_double(last.train_loss) << " val_loss " << format_double(last.val_loss) << '\n';
  return kExitOk;
}

// --- eval ------------------------------------------------------------------

struct EvalArgs {
  std::string model;
  std::string env = "pseudo-real";
  std::string dataset;
  std::optional<int> rounds;
  std::optional<int> taps;
  std::string out;
  std::string csv;
};

int cmd_eval(const Globals& g, const EvalArgs& a, std::ostream& out) {
  ScenarioConfig config = load_scenario(g);
  const MlpModel model = load_checkpoint(a.model);
  if (!model.task || !model.rep_kind)
    fail(ErrorKind::Schema, "checkpoint '" + a.model + "' lacks task/representation tags");

  ojson doc;
  doc["model"] = a.model;
  doc["task"] = std::string(to_string(*model.task));
  doc["representation"] = std::string(to_string(*model.rep_kind));
  doc["env"] = a.env;
  std::vector<std::pair<std::string, double>> rows;

  if (a.env == "pseudo-real") {
    config.task.kind = *model.task;
    const int rounds = a.rounds.value_or(config.pseudo_real.rounds);
    const int taps = a.taps.value_or(config.pseudo_real.taps_per_round);
    config.validate();
    auto mesh = std::make_shared<const TipMesh>(generate_tip_mesh(config.rings, config.tip_radius));
    const PseudoRealEnv env(mesh, config.task, config.dynamics, config.pseudo_real);
    const RoundsResult r = eval_rounds_mae(model, env, rounds, taps);
    doc["rounds"] = rounds;
    doc["taps_per_round"] = env.taps_per_round(taps);
    doc["unit"] = *model.task == TaskKind::TaskI ? "rad" : "mm";
    doc["mae"] = r.mae;
    doc["std"] = r.stddev;
    doc["round_mae"] = r.round_mae;
    rows = {{"mae", r.mae}, {"std", r.stddev}};
    for (std::size_t i = 0; i < r.round_mae.size(); ++i)
      rows.emplace_back("round_mae_" + std::to_string(i), r.round_mae[i]);
    out << "mae " << format_double(r.mae) << " std " << format_double(r.stddev) << " over "
        << rounds << " rounds\n";
  } else if (a.env == "dataset") {
    if (a.dataset.empty()) fail(ErrorKind::Usage, "--env dataset needs --dataset");
    const std::vector<Sample> samples = read_dataset(a.dataset);
    const MseReport r = eval_mse(model, samples);
    doc["dataset"] = a.dataset;
    doc["samples"] = r.samples;
    doc["mse"] = r.pooled;
    ojson groups = ojson::object();
    for (const auto& [name, v] : r.groups) {
      groups[name] = v;
      rows.emplace_back("mse_" + name, v);
    }
    doc["groups"] = std::move(groups);
    rows.insert(rows.begin(), {"mse", r.pooled});
    out << "mse " << format_double(r.pooled) << " over " << r.samples << " samples\n";
  } else {
    fail(ErrorKind::Usage, "--env must be pseudo-real or dataset");
  }

  write_text(a.out, doc.dump(2) + '\n');
  if (!a.csv.empty()) {
    std::string text = "metric,value\n";
    for (const auto& [k, v] : rows) text += k + ',' + format_double(v) + '\n';
    write_text(a.csv, text);
  }
  return kExitOk;
}

// --- sweep -----------------------------------------------------------------

struct SweepArgs {
  std::string task;
  std::string out;
  std::string json;
};

int cmd_sweep(const Globals& g, const SweepArgs& a, std::ostream& out) {
  ScenarioConfig config = load_scenario(g);
  if (!a.task.empty()) config.task.kind = parse_task(a.task);
  const EvalReport report = sweep_randomization(config, g.jobs);
  write_text(a.out, report_csv(report));
  if (!a.json.empty()) write_text(a.json, report_json(report));
  std::size_t failed = 0;
  for (const CellResult& c : report.cells)
    if (!c.error.empty()) {
      ++failed;
      out << "cell " << to_string(c.rep) << " r=" << format_double(c.factor) << " seed " << c.seed
          << " failed: " << c.error << '\n';
    }
  out << report.cells.size() << " cells (" << failed << " failed) in "
      << format_double(std::round(report.wall_clock_seconds * 10.0) / 10.0) << " s\n";
  return kExitOk;
}

// --- gradcheck -------------------------------------------------------------

struct GradArgs {
  std::uint64_t seed = 0;
  int seeds = 1;
  std::string task = "simtosim";
  double epsilon = 1e-6;
  std::size_t params = 1000;
  int batch = 4;
  double tolerance = 1e-5;
  bool inject_fault = false;
};

int cmd_gradcheck(const Globals& g, const GradArgs& a, std::ostream& out) {
  const ScenarioConfig config = load_scenario(g);
  const TaskKind task = parse_task(a.task);
  const int width = static_cast<int>(2 * generate_tip_mesh(config.rings, config.tip_radius).pin_indices.size());
  bool ok = true;
  for (int k = 0; k < a.seeds; ++k) {
    const std::uint64_t seed = a.seed + static_cast<std::uint64_t>(k);
    MlpModel model = init_model(task_architecture(task, width, config.hidden), seed);
    Rng rng(derive_seed(seed, 1));
    Eigen::MatrixXd x(width, a.batch);
    for (Eigen::Index i = 0; i < x.size(); ++i) x.data()[i] = normal(rng, 0.0, 1.0);
    Eigen::MatrixXd t = forward(model, x);
    for (Eigen::Index i = 0; i < t.size(); ++i) t.data()[i] += normal(rng, 0.0, 0.5);

    Gradients grads = backward(model, x, t);
    const std::uint64_t pick = derive_seed(seed, 2);
    if (a.inject_fault) {
      const auto idx = gradcheck_indices(model.parameter_count(), a.params, pick);
      const std::size_t victim = idx[idx.size() / 2];
      grads.value(victim) += 0.1;
    }
    const GradCheckResult r = gradient_check(model, x, t, a.epsilon, a.params, pick, &grads);
    const bool pass = r.max_relative_error < a.tolerance;
    ok = ok && pass;
    out << "seed " << seed << ": max relative error " << format_double(r.max_relative_error)
        << " over " << r.checked << " parameters";
    if (!pass) out << ", offending parameter index " << r.worst_index;
    out << (pass ? " PASS\n" : " FAIL\n");
  }
  return ok ? kExitOk : kExitCheckFailed;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Soft-membrane tactile sensor simulator and learning toolkit", "tacsim"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  app.add_option("--config", g.config_path,
                 std::string("Scenario config file (default: $") + kConfigEnv + ")");
  app.add_option("--jobs", g.jobs, "Worker threads")->check(CLI::PositiveNumber);

  GenArgs gen;
  auto* gen_cmd = app.add_subcommand("gen", "Generate a JSONL dataset");
  gen_cmd->add_option("--task", gen.task, "simtosim | task1 | task2 | task3");
  gen_cmd->add_option("--n", gen.n, "Samples (episodes for simtosim)")
      ->required()
      ->check(CLI::PositiveNumber);
  gen_cmd->add_option("--factor", gen.factor, "Randomisation factor")->check(CLI::Range(0.0, 1.0));
  gen_cmd->add_option("--rep", gen.rep, "pin_positions | threshold | weighted_average");
  gen_cmd->add_option("--seed", gen.seed, "Root seed");
  gen_cmd->add_option("--noise", gen.noise, "Pin noise sigma")->check(CLI::NonNegativeNumber);
  gen_cmd->add_option("--out", gen.out, "Output JSONL path")->required();

  TrainArgs tr;
  auto* train_cmd = app.add_subcommand("train", "Train a predictor on a dataset");
  train_cmd->add_option("dataset", tr.dataset, "JSONL dataset")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--task", tr.task, "Expected task (default: from dataset)");
  train_cmd->add_option("--rep", tr.rep, "Expected representation (default: from dataset)");
  train_cmd->add_option("--epochs", tr.epochs, "Epochs")->check(CLI::PositiveNumber);
  train_cmd->add_option("--seed", tr.seed, "Root seed");
  train_cmd->add_option("--out", tr.out, "Checkpoint path")->required();
  train_cmd->add_option("--history", tr.history, "History CSV (default: <out>.history.csv)");
  train_cmd->add_option("--optimizer", tr.optimizer, "sgd | momentum | adam");
  train_cmd->add_option("--lr", tr.lr, "Step size")->check(CLI::PositiveNumber);
  train_cmd->add_option("--batch", tr.batch, "Mini-batch size")->check(CLI::PositiveNumber);
  train_cmd->add_option("--patience", tr.patience, "Early-stopping patience (0 = off)")
      ->check(CLI::NonNegativeNumber);

  EvalArgs ev;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate a checkpoint");
  eval_cmd->add_option("model", ev.model, "Checkpoint")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--env", ev.env, "pseudo-real | dataset")
      ->check(CLI::IsMember({"pseudo-real", "dataset"}));
  eval_cmd->add_option("--dataset", ev.dataset, "Dataset for --env dataset")->check(CLI::ExistingFile);
  eval_cmd->add_option("--rounds", ev.rounds, "Pseudo-real rounds")->check(CLI::PositiveNumber);
  eval_cmd->add_option("--taps", ev.taps, "Taps per round (Task I always uses 12)")
      ->check(CLI::PositiveNumber);
  eval_cmd->add_option("--out", ev.out, "Metrics JSON")->required();
  eval_cmd->add_option("--csv", ev.csv, "Also write metrics as CSV");

  SweepArgs sw;
  auto* sweep_cmd = app.add_subcommand("sweep", "Randomisation-factor sweep");
  sweep_cmd->add_option("--task", sw.task, "Override the config task");
  sweep_cmd->add_option("--out", sw.out, "Long-format CSV")->required();
  sweep_cmd->add_option("--json", sw.json, "Summary JSON");

  GradArgs gc;
  auto* grad_cmd = app.add_subcommand("gradcheck", "Finite-difference gradient check");
  grad_cmd->add_option("--seed", gc.seed, "First model seed");
  grad_cmd->add_option("--seeds", gc.seeds, "Number of consecutive seeds")->check(CLI::PositiveNumber);
  grad_cmd->add_option("--task", gc.task, "Head layout");
  grad_cmd->add_option("--epsilon", gc.epsilon, "Central-difference step")->check(CLI::PositiveNumber);
  grad_cmd->add_option("--params", gc.params, "Parameters sampled per seed (0 = all)");
  grad_cmd->add_option("--batch", gc.batch, "Batch columns")->check(CLI::PositiveNumber);
  grad_cmd->add_option("--tolerance", gc.tolerance, "Maximum relative error")
      ->check(CLI::PositiveNumber);
  grad_cmd->add_flag("--inject-fault", gc.inject_fault,
                     "Corrupt one analytic gradient entry (negative control)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*gen_cmd) return cmd_gen(g, gen, out);
    if (*train_cmd) return cmd_train(g, tr, out);
    if (*eval_cmd) return cmd_eval(g, ev, out);
    if (*sweep_cmd) return cmd_sweep(g, sw, out);
    if (*grad_cmd) return cmd_gradcheck(g, gc, out);
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace tacsim::cli
