#include <benchmark/benchmark.h>

#include "tacsim/dynamics.hpp"
#include "tacsim/scenarios.hpp"

using namespace tacsim;

namespace {

void BM_IntegrateStep(benchmark::State& state) {
  const TipMesh mesh = generate_tip_mesh();
  const Pose touch = find_touch_pose(mesh, Plane{}, Pose{}, Vec2::Zero());
  MembraneState st = MembraneState::at_rest(mesh);
  apply_contacts(st, detect_contacts(mesh, advance_along_axis(touch, 1.5), Plane{}, Pose{}));
  const DynamicsParams p;
  for (auto _ : state) {
    integrate_step(st, p, mesh.tip_radius);
    benchmark::DoNotOptimize(st.positions.data());
  }
  state.counters["contacts"] = static_cast<double>(st.contacts.size());
}
BENCHMARK(BM_IntegrateStep);

void BM_DetectContacts(benchmark::State& state) {
  const TipMesh mesh = generate_tip_mesh();
  const Cuboid box{Vec3(6, 6, 8)};
  const Pose box_pose{Vec3(0, 0, -8), Vec3(5, 10, 20)};
  const Pose touch = find_touch_pose(mesh, box, box_pose, Vec2::Zero());
  const Pose pressed = advance_along_axis(touch, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(detect_contacts(mesh, pressed, box, box_pose));
}
BENCHMARK(BM_DetectContacts);

void BM_SimulateTap(benchmark::State& state) {
  const TipMesh mesh = generate_tip_mesh();
  const Pose touch = find_touch_pose(mesh, Plane{}, Pose{}, Vec2::Zero());
  const std::vector<double> depths{0.5, 1.0, 1.5, 2.0};
  const DynamicsParams p;
  for (auto _ : state) benchmark::DoNotOptimize(simulate_tap(mesh, Plane{}, Pose{}, touch, p, depths));
}
BENCHMARK(BM_SimulateTap);

}  // namespace
