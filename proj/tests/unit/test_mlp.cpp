#include <doctest.h>

#include <cmath>

#include "tacsim/checkpoint.hpp"
#include "tacsim/error.hpp"
#include "tacsim/mlp.hpp"

using namespace tacsim;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed, double scale = 1.0) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = uniform(rng, -scale, scale);
  return m;
}

MlpModel small_model(TaskKind task, int in, std::uint64_t seed, std::vector<int> hidden = {8, 8}) {
  return init_model(task_architecture(task, in, hidden), seed);
}

double max_abs(const Gradients& g) {
  double m = 0.0;
  for (const DenseLayer& l : g.layers) {
    m = std::max(m, l.weights.cwiseAbs().maxCoeff());
    m = std::max(m, l.bias.cwiseAbs().maxCoeff());
  }
  return m;
}

}  // namespace

TEST_CASE("initialisation") {
  const MlpModel a = init_model(182, TaskKind::TaskII, 4);
  const MlpModel b = init_model(182, TaskKind::TaskII, 4);
  REQUIRE(a.layers.size() == 5);
  CHECK(a.arch.widths() == std::vector<int>{182, 500, 500, 500, 500, 1});
  for (std::size_t l = 0; l < a.layers.size(); ++l) {
    CHECK(a.layers[l].weights == b.layers[l].weights);
    CHECK(a.layers[l].bias.isZero(0.0));
  }
  // Mean of U[-a, a] weights: std error a / sqrt(3 n).
  const Eigen::MatrixXd& w = a.layers[1].weights;
  const double limit = std::sqrt(6.0 / 1000.0);
  const double stderr_mean = limit / std::sqrt(3.0 * static_cast<double>(w.size()));
  CHECK(std::abs(w.mean()) < 3.0 * stderr_mean);
  CHECK(w.cwiseAbs().maxCoeff() <= limit);
  CHECK(init_model(91, TaskKind::SimToSim, 1).arch.output_width() == 8);
  CHECK_THROWS_AS(init_model(90, TaskKind::TaskII, 1), Error);
  CHECK(a.parameter_count() == 182 * 500 + 500 + 3 * (500 * 500 + 500) + 500 + 1);
}

TEST_CASE("forward on a hand-computed toy network") {
  MlpModel m = init_model(Architecture{2, {2}, {{Activation::Identity, 1}}}, 0);
  m.layers[0].weights << 1.0, -2.0, 0.5, 0.25;
  m.layers[0].bias << 0.1, -0.2;
  m.layers[1].weights << 3.0, -1.0;
  m.layers[1].bias << 0.05;
  Eigen::MatrixXd x(2, 2);
  x << 1.0, 0.5,
       2.0, -1.0;
  // col 0: h = relu(1 - 4 + 0.1, 0.5 + 0.5 - 0.2) = (0, 0.8); y = -0.8 + 0.05
  // col 1: h = relu(0.5 + 2 + 0.1, 0.25 - 0.25 - 0.2) = (2.6, 0); y = 7.8 + 0.05
  const Eigen::MatrixXd y = forward(m, x);
  CHECK(std::abs(y(0, 0) - (-0.75)) < 1e-12);
  CHECK(std::abs(y(0, 1) - 7.85) < 1e-12);

  m.arch.head = {{Activation::Tanh, 1}};
  CHECK(std::abs(forward(m, x)(0, 1) - std::tanh(7.85)) < 1e-12);
  m.arch.head = {{Activation::Sigmoid, 1}};
  CHECK(std::abs(forward(m, x)(0, 0) - 1.0 / (1.0 + std::exp(0.75))) < 1e-12);
}

TEST_CASE("zero network with a tanh head outputs zero") {
  MlpModel m = init_model(182, TaskKind::TaskIII, 1);
  for (DenseLayer& l : m.layers) l.weights.setZero();
  const Eigen::MatrixXd y = forward(m, random_matrix(182, 4, 2));
  CHECK(y.isZero(0.0));
}

TEST_CASE("head ranges") {
  const Eigen::MatrixXd x = random_matrix(91, 200, 3, 50.0);
  const Eigen::MatrixXd ss = forward(small_model(TaskKind::SimToSim, 91, 5), x);
  for (Eigen::Index c = 0; c < ss.cols(); ++c) {
    CHECK(std::abs(ss.col(c).tail(3).sum() - 1.0) < 1e-12);
    CHECK(ss.col(c).tail(3).minCoeff() >= 0.0);
  }
  const Eigen::MatrixXd s1 = forward(small_model(TaskKind::TaskI, 91, 5), x);
  CHECK(s1.minCoeff() > 0.0);
  CHECK(s1.maxCoeff() < 1.0);
  const Eigen::MatrixXd s3 = forward(small_model(TaskKind::TaskIII, 91, 5), x);
  CHECK(s3.cwiseAbs().maxCoeff() <= 1.0);
}

TEST_CASE("forward input checks") {
  const MlpModel m = small_model(TaskKind::TaskII, 3, 1);
  CHECK_THROWS_AS(forward(m, Eigen::MatrixXd::Zero(4, 1)), Error);
  Eigen::MatrixXd bad = Eigen::MatrixXd::Zero(3, 1);
  bad(1, 0) = std::nan("");
  try {
    forward(m, bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Numerical);
  }
}

TEST_CASE("mse loss") {
  Eigen::MatrixXd a(2, 1);
  a << 1.0, 0.0;
  const Eigen::MatrixXd z = Eigen::MatrixXd::Zero(2, 1);
  CHECK(mse_loss(a, z) == 0.5);
  CHECK(mse_loss(z, a) == 0.5);
  CHECK(mse_loss(a, a) == 0.0);
  const Eigen::MatrixXd p = random_matrix(8, 6, 1);
  const Eigen::MatrixXd q = random_matrix(8, 6, 2);
  CHECK(mse_loss(p, q) == mse_loss(q, p));
  CHECK_THROWS_AS(mse_loss(p, z), Error);
}

TEST_CASE("backward basics") {
  const MlpModel m = small_model(TaskKind::SimToSim, 3, 7);
  const Eigen::MatrixXd x = random_matrix(3, 5, 8);
  SUBCASE("zero loss gives zero gradients") {
    const Eigen::MatrixXd y = forward(m, x);
    double loss = -1.0;
    const Gradients g = backward(m, x, y, &loss);
    CHECK(loss == 0.0);
    CHECK(max_abs(g) <= 1e-15);
  }
  SUBCASE("loss scale is linear") {
    const Eigen::MatrixXd y = random_matrix(8, 5, 9);
    const Gradients g1 = backward(m, x, y);
    const Gradients g2 = backward(m, x, y, nullptr, 2.0);
    for (std::size_t i = 0; i < g1.parameter_count(); ++i) CHECK(g2.value(i) == 2.0 * g1.value(i));
  }
  SUBCASE("non-finite intermediate names the layer") {
    MlpModel huge = m;
    huge.layers[1].weights.setConstant(1e200);
    try {
      backward(huge, x * 1e150, random_matrix(8, 5, 9));
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::Numerical);
      CHECK(std::string(e.what()).find("layer") != std::string::npos);
    }
  }
}

TEST_CASE("gradient check") {
  SUBCASE("three-parameter network") {
    MlpModel m = init_model(Architecture{2, {}, {{Activation::Tanh, 1}}}, 3);
    REQUIRE(m.parameter_count() == 3);
    const Eigen::MatrixXd x = random_matrix(2, 4, 1);
    const Eigen::MatrixXd y = random_matrix(1, 4, 2, 0.5);
    const GradCheckResult r = gradient_check(m, x, y, 1e-6);
    CHECK(r.checked == 3);
    CHECK(r.max_relative_error < 1e-9);
    const GradCheckResult coarse = gradient_check(m, x, y, 0.1);
    CHECK(coarse.max_relative_error > r.max_relative_error);
  }
  SUBCASE("random small networks for every head") {
    for (TaskKind task : {TaskKind::SimToSim, TaskKind::TaskI, TaskKind::TaskII, TaskKind::TaskIII}) {
      for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        // Random biases keep every pre-activation off the ReLU kink; with zero
        // biases a narrow layer can go fully dead and leave exact zeros.
        MlpModel m = small_model(task, 3, seed, {6, 5, 4, 3});
        for (std::size_t l = 0; l < m.layers.size(); ++l)
          m.layers[l].bias = random_matrix(m.layers[l].bias.size(), 1, seed * 10 + l, 0.5);
        const Eigen::MatrixXd x = random_matrix(3, 4, seed + 100);
        const Eigen::MatrixXd y = random_matrix(m.arch.output_width(), 4, seed + 200, 0.9);
        const GradCheckResult r = gradient_check(m, x, y, 1e-6);
        CHECK(r.checked == m.parameter_count());
        CHECK_MESSAGE(r.max_relative_error < 1e-5, to_string(task) << " seed " << seed);
      }
    }
  }
  SUBCASE("dead unit") {
    MlpModel m = init_model(Architecture{3, {4}, {{Activation::Identity, 1}}}, 2);
    m.layers[0].bias(2) = -1e3;
    const Eigen::MatrixXd x = random_matrix(3, 6, 4);
    const Eigen::MatrixXd y = random_matrix(1, 6, 5);
    const Gradients g = backward(m, x, y);
    for (int c = 0; c < 3; ++c) CHECK(g.layers[0].weights(2, c) == 0.0);
    CHECK(g.layers[0].bias(2) == 0.0);
    CHECK(g.layers[1].weights(0, 2) == 0.0);
    // Flat index of layer-0 row 2: row-major weights.
    for (std::size_t idx : {std::size_t{6}, std::size_t{7}, std::size_t{8}}) {
      MlpModel up = m;
      MlpModel down = m;
      up.parameter(idx) += 1e-6;
      down.parameter(idx) -= 1e-6;
      CHECK(mse_loss(forward(up, x), y) == mse_loss(forward(down, x), y));
    }
  }
  SUBCASE("an injected fault is caught") {
    const MlpModel m = small_model(TaskKind::TaskII, 3, 1);
    const Eigen::MatrixXd x = random_matrix(3, 4, 1);
    const Eigen::MatrixXd y = random_matrix(1, 4, 2, 0.9);
    Gradients g = backward(m, x, y);
    g.value(5) += 0.1;
    const GradCheckResult r = gradient_check(m, x, y, 1e-6, 0, 0, &g);
    CHECK(r.worst_index == 5);
    CHECK(r.max_relative_error > 1e-3);
  }
  CHECK_THROWS_AS(gradient_check(small_model(TaskKind::TaskII, 3, 1), random_matrix(3, 1, 1),
                                 random_matrix(1, 1, 1), 0.0),
                  Error);
}

TEST_CASE("gradcheck subset") {
  const auto all = gradcheck_indices(50, 0, 1);
  CHECK(all.size() == 50);
  const auto some = gradcheck_indices(100000, 1000, 3);
  CHECK(some.size() == 1000);
  CHECK(std::is_sorted(some.begin(), some.end()));
  CHECK(std::adjacent_find(some.begin(), some.end()) == some.end());
  CHECK(some == gradcheck_indices(100000, 1000, 3));
  CHECK(some != gradcheck_indices(100000, 1000, 4));
}

TEST_CASE("input standardisation") {
  MlpModel m = small_model(TaskKind::TaskII, 3, 1);
  Eigen::MatrixXd x = random_matrix(3, 50, 2);
  x.row(0) = x.row(0) * 0.01 + Eigen::RowVectorXd::Constant(50, 4.0);
  x.row(2).setConstant(7.0);
  fit_input_standardization(m, x);
  CHECK(m.input_scale(2) == 1.0);
  const Eigen::MatrixXd z = (x.colwise() - m.input_mean).array().colwise() * m.input_scale.array();
  CHECK(std::abs(z.row(0).mean()) < 1e-12);
  const double var = z.row(0).squaredNorm() / 50.0;
  CHECK(std::abs(var - 1.0) < 1e-9);

  // Gradients stay exact with standardisation in place.
  for (std::size_t l = 0; l < m.layers.size(); ++l)
    m.layers[l].bias = random_matrix(m.layers[l].bias.size(), 1, 40 + l, 0.5);
  const Eigen::MatrixXd y = random_matrix(1, 50, 3, 0.9);
  CHECK(gradient_check(m, x, y, 1e-6).max_relative_error < 1e-5);
}

TEST_CASE("checkpoint round trip") {
  MlpModel m = small_model(TaskKind::SimToSim, 3, 11);
  m.task = TaskKind::SimToSim;
  m.rep_kind = RepKind::WeightedAverage;
  fit_input_standardization(m, random_matrix(3, 20, 1));
  const std::string text = checkpoint_to_json(m);
  const MlpModel back = checkpoint_from_json(text);
  CHECK(back.arch == m.arch);
  CHECK(back.task == m.task);
  CHECK(back.rep_kind == m.rep_kind);
  for (std::size_t l = 0; l < m.layers.size(); ++l) {
    CHECK(back.layers[l].weights == m.layers[l].weights);
    CHECK(back.layers[l].bias == m.layers[l].bias);
  }
  CHECK(back.input_mean == m.input_mean);
  CHECK(back.input_scale == m.input_scale);
  CHECK(checkpoint_to_json(back) == text);

  std::string wrong = text;
  const auto pos = wrong.find("\"version\":1");
  REQUIRE(pos != std::string::npos);
  wrong.replace(pos, 11, "\"version\":9");
  CHECK_THROWS_AS(checkpoint_from_json(wrong), Error);
  CHECK_THROWS_AS(checkpoint_from_json("{\"version\":1}"), Error);
  CHECK_THROWS_AS(checkpoint_from_json("not json"), Error);
}
