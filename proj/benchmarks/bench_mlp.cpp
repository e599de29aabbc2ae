#include <benchmark/benchmark.h>

#include "tacsim/mlp.hpp"
#include "tacsim/random.hpp"

using namespace tacsim;

namespace {

Eigen::MatrixXd random_matrix(Eigen::Index rows, Eigen::Index cols, std::uint64_t seed) {
  Rng rng(seed);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = normal(rng, 0.0, 1.0);
  return m;
}

void BM_Forward(benchmark::State& state) {
  const MlpModel model = init_model(182, TaskKind::TaskII, 1);
  const Eigen::MatrixXd x = random_matrix(182, state.range(0), 2);
  for (auto _ : state) benchmark::DoNotOptimize(forward(model, x));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Forward)->Arg(1)->Arg(32)->Arg(256);

void BM_Backward(benchmark::State& state) {
  const MlpModel model = init_model(182, TaskKind::TaskII, 1);
  const Eigen::MatrixXd x = random_matrix(182, state.range(0), 2);
  const Eigen::MatrixXd y = random_matrix(1, state.range(0), 3);
  for (auto _ : state) benchmark::DoNotOptimize(backward(model, x, y));
  state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_Backward)->Arg(32)->Arg(256);

}  // namespace
