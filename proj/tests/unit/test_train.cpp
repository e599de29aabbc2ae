#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "tacsim/error.hpp"
#include "tacsim/train.hpp"

using namespace tacsim;

namespace {

// y = 0.3 x0 - 0.2 x1 + 0.1 x2 + 0.05 on x ~ U[-1, 1]^3.
DataSet linear_fixture(int n, std::uint64_t seed) {
  Rng rng(seed);
  DataSet d;
  d.inputs.resize(3, n);
  d.targets.resize(1, n);
  for (int c = 0; c < n; ++c) {
    for (int r = 0; r < 3; ++r) d.inputs(r, c) = uniform(rng, -1, 1);
    d.targets(0, c) = 0.3 * d.inputs(0, c) - 0.2 * d.inputs(1, c) + 0.1 * d.inputs(2, c) + 0.05;
    d.keys.push_back(static_cast<std::uint64_t>(c));
  }
  return d;
}

MlpModel small_net(std::uint64_t seed) {
  return init_model(task_architecture(TaskKind::TaskII, 3, {32, 32}), seed);
}

bool same_weights(const MlpModel& a, const MlpModel& b) {
  for (std::size_t l = 0; l < a.layers.size(); ++l)
    if (a.layers[l].weights != b.layers[l].weights || a.layers[l].bias != b.layers[l].bias) return false;
  return true;
}

}  // namespace

TEST_CASE("linear map fixture fits on the full network") {
  const DataSet d = linear_fixture(200, 1);
  TrainConfig cfg;
  cfg.learning_rate = 1e-2;
  cfg.epochs = 500;
  const TrainResult r = train(init_model(3, TaskKind::TaskII, 2), d, DataSet{}, cfg);
  CHECK(r.history.size() == 500);
  CHECK(dataset_loss(r.model, d) < 1e-3);
}

TEST_CASE("loss decreases over the first epochs for stable step sizes") {
  const DataSet d = linear_fixture(200, 1);
  for (double lr : {1e-3, 3e-3, 1e-2}) {
    TrainConfig cfg;
    cfg.learning_rate = lr;
    cfg.epochs = 10;
    const TrainResult r = train(init_model(3, TaskKind::TaskII, 2), d, DataSet{}, cfg);
    for (std::size_t e = 1; e < r.history.size(); ++e)
      CHECK_MESSAGE(r.history[e].train_loss < r.history[e - 1].train_loss, "lr " << lr << " epoch " << e + 1);
  }
}

TEST_CASE("patience zero runs every epoch") {
  const auto [trn, val] = split_validation(linear_fixture(100, 2), 0.2, 3);
  TrainConfig cfg;
  cfg.epochs = 7;
  const TrainResult r = train(small_net(1), trn, val, cfg);
  CHECK(r.history.size() == 7);
  CHECK_FALSE(r.stopped_early);
  CHECK(r.best_epoch == 7);
  for (const EpochRecord& e : r.history) CHECK(std::isfinite(e.val_loss));
  const TrainResult nv = train(small_net(1), trn, DataSet{}, cfg);
  CHECK(std::isnan(nv.history.back().val_loss));
}

TEST_CASE("early stopping returns the best snapshot") {
  const DataSet d = linear_fixture(120, 4);
  auto [trn, val] = split_validation(d, 0.25, 5);
  // Validation targets unrelated to the inputs, so improvement stalls.
  Rng rng(6);
  for (Eigen::Index c = 0; c < val.targets.cols(); ++c) val.targets(0, c) = uniform(rng, -0.9, 0.9);
  TrainConfig cfg;
  cfg.epochs = 300;
  cfg.patience = 3;
  cfg.learning_rate = 1e-2;
  const TrainResult r = train(small_net(2), trn, val, cfg);
  REQUIRE(r.stopped_early);
  CHECK(r.history.size() == static_cast<std::size_t>(r.best_epoch + cfg.patience));
  double best = 1e300;
  for (const EpochRecord& e : r.history) best = std::min(best, e.val_loss);
  CHECK(r.history[static_cast<std::size_t>(r.best_epoch - 1)].val_loss == best);
  CHECK(dataset_loss(r.model, val) == best);
}

TEST_CASE("training is deterministic and order independent") {
  const DataSet d = linear_fixture(150, 7);
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 16;
  cfg.seed = 9;
  const TrainResult a = train(small_net(3), d, DataSet{}, cfg);
  const TrainResult b = train(small_net(3), d, DataSet{}, cfg);
  CHECK(same_weights(a.model, b.model));

  std::vector<std::size_t> perm(d.size());
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  std::reverse(perm.begin(), perm.end());
  std::rotate(perm.begin(), perm.begin() + 37, perm.end());
  const DataSet shuffled = d.subset(perm);
  const TrainResult c = train(small_net(3), shuffled, DataSet{}, cfg);
  CHECK(same_weights(a.model, c.model));

  cfg.seed = 10;
  const TrainResult e = train(small_net(3), d, DataSet{}, cfg);
  CHECK_FALSE(same_weights(a.model, e.model));
}

TEST_CASE("optimisers") {
  const DataSet d = linear_fixture(100, 8);
  for (Optimizer opt : {Optimizer::Sgd, Optimizer::Momentum, Optimizer::Adam}) {
    TrainConfig cfg;
    cfg.optimizer = opt;
    cfg.epochs = 20;
    const TrainResult r = train(small_net(4), d, DataSet{}, cfg);
    CHECK_MESSAGE(r.history.back().train_loss < r.history.front().train_loss, to_string(opt));
    CHECK(parse_optimizer(to_string(opt)) == opt);
  }
  CHECK_THROWS_AS(parse_optimizer("rmsprop"), Error);
}

TEST_CASE("divergence is reported with the epoch") {
  DataSet d = linear_fixture(64, 9);
  d.targets *= 1e3;
  MlpModel m = init_model(Architecture{3, {32, 32}, {{Activation::Identity, 1}}}, 5);
  TrainConfig cfg;
  cfg.learning_rate = 10.0;
  cfg.epochs = 50;
  cfg.standardize_inputs = false;
  try {
    train(m, d, DataSet{}, cfg);
    FAIL("expected divergence");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Numerical);
    CHECK(std::string(e.what()).find("epoch") != std::string::npos);
  }
}

TEST_CASE("input checks") {
  const DataSet d = linear_fixture(10, 1);
  TrainConfig cfg;
  cfg.epochs = 1;
  CHECK_THROWS_AS(train(small_net(1), DataSet{}, DataSet{}, cfg), Error);
  CHECK_THROWS_AS(train(init_model(task_architecture(TaskKind::TaskIII, 3, {4}), 1), d, DataSet{}, cfg), Error);
  TrainConfig bad = cfg;
  bad.batch_size = 0;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = cfg;
  bad.validation_fraction = 0.6;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = cfg;
  bad.learning_rate = 0.0;
  CHECK_THROWS_AS(bad.validate(), Error);
}

TEST_CASE("validation split") {
  const DataSet d = linear_fixture(101, 3);
  const auto [trn, val] = split_validation(d, 0.1, 4);
  CHECK(val.size() == 10);
  CHECK(trn.size() == 91);
  std::set<std::uint64_t> keys(trn.keys.begin(), trn.keys.end());
  for (std::uint64_t k : val.keys) CHECK(keys.insert(k).second);
  CHECK(keys.size() == 101);
  const auto again = split_validation(d, 0.1, 4);
  CHECK(again.second.keys == val.keys);
  CHECK(split_validation(d, 0.0, 4).second.empty());
}

TEST_CASE("samples to design matrices") {
  Sample a;
  a.rep = {1, 2, 3};
  a.label = {0.5};
  a.episode = 4;
  a.step = 2;
  Sample b = a;
  b.rep = {4, 5, 6};
  b.episode = 5;
  const std::vector<Sample> both{a, b};
  const DataSet d = DataSet::from_samples(both);
  CHECK(d.inputs(1, 1) == 5.0);
  CHECK(d.keys[0] == sample_key(a));
  CHECK(sample_key(a) != sample_key(b));
  b.rep.pop_back();
  const std::vector<Sample> ragged{a, b};
  CHECK_THROWS_AS(DataSet::from_samples(ragged), Error);
}

TEST_CASE("history csv") {
  const std::vector<EpochRecord> h{{1, 0.5, 0.25}, {2, 0.125, 0.0625}};
  CHECK(history_csv(h) == "epoch,train_loss,val_loss\n1,0.5,0.25\n2,0.125,0.0625\n");
}
