#include "tacsim/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "tacsim/error.hpp"
#include "tacsim/parallel.hpp"

namespace tacsim {
namespace {

constexpr double kTouchSearchTop = 40.0;
constexpr double kTouchSearchSpan = 60.0;
constexpr double kTouchSearchStep = 0.25;
constexpr int kTouchBisections = 60;

// Sim-to-sim objects at zero rotation, each with its top at z = 0.
struct SimObjectSpec {
  RigidShape shape;
  Vec3 centre;
  Vec3 base_euler_deg;
};

SimObjectSpec sim_object(const TaskGeometry& g, SimObject which) {
  switch (which) {
    case SimObject::Cylinder:
      // Lying along world x.
      return {Cylinder{g.cylinder_radius, g.cylinder_half_length},
              Vec3(0.0, 0.0, -g.cylinder_radius), Vec3(0.0, 90.0, 0.0)};
    case SimObject::Cuboid:
      return {Cuboid{Vec3(g.cuboid_half_width, g.cuboid_half_width, g.cuboid_half_height)},
              Vec3(0.0, 0.0, -g.cuboid_half_height), Vec3::Zero()};
    case SimObject::Plane:
      return {Plane{}, Vec3::Zero(), Vec3::Zero()};
  }
  return {Plane{}, Vec3::Zero(), Vec3::Zero()};
}

std::vector<double> draw_depths(const TapProtocol& tap, Rng& rng) {
  const auto n = static_cast<int>(uniform_int(rng, tap.min_depths, tap.max_depths));
  std::vector<double> depths(static_cast<std::size_t>(n));
  for (int k = 0; k < n; ++k) depths[static_cast<std::size_t>(k)] = tap.max_press * (k + 1) / n;
  return depths;
}

// Builds the setup for a known latent label of a tap task, drawing only the
// nuisance variables (radius perturbation, depth count) from `rng`.
TapSetup tap_task_setup(const TaskSpec& task, std::vector<double> raw_label, Rng& rng) {
  const TaskGeometry& g = task.geometry;
  TapSetup setup;
  setup.raw_label = std::move(raw_label);
  switch (task.kind) {
    case TaskKind::TaskI: {
      const double radius = g.disc_outer_radius +
                            uniform(rng, -g.radius_perturbation, g.radius_perturbation);
      const double angle = setup.raw_label.at(0);
      setup.shape = Disc{g.disc_inner_radius, g.disc_outer_radius, 10.0};
      setup.sensor_xy = radius * Vec2(std::cos(angle), std::sin(angle));
      break;
    }
    case TaskKind::TaskII:
      setup.shape = HalfPlaneEdge{};
      setup.sensor_xy = Vec2(setup.raw_label.at(0), 0.0);
      break;
    case TaskKind::TaskIII:
      setup.shape = Pole{g.pole_radius, 50.0};
      setup.sensor_xy = Vec2(setup.raw_label.at(0), setup.raw_label.at(1));
      break;
    case TaskKind::SimToSim:
      fail(ErrorKind::Domain, "tap_task_setup: sim-to-sim has no tap-task geometry");
  }
  setup.depths = draw_depths(task.tap, rng);
  return setup;
}

double sample_stddev(std::span<const double> xs) {
  if (xs.size() < 2) return 0.0;
  const double mean = std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
  double ss = 0.0;
  for (double x : xs) ss += (x - mean) * (x - mean);
  return std::sqrt(ss / static_cast<double>(xs.size() - 1));
}

std::uint64_t noise_seed(std::uint64_t sample_seed, int step) {
  return derive_seed(sample_seed, static_cast<std::uint64_t>(step) + 1);
}

}  // namespace

std::string_view to_string(TaskKind task) {
  switch (task) {
    case TaskKind::SimToSim: return "simtosim";
    case TaskKind::TaskI: return "task1";
    case TaskKind::TaskII: return "task2";
    case TaskKind::TaskIII: return "task3";
  }
  return "task2";
}

TaskKind parse_task(std::string_view text) {
  if (text == "simtosim") return TaskKind::SimToSim;
  if (text == "task1") return TaskKind::TaskI;
  if (text == "task2") return TaskKind::TaskII;
  if (text == "task3") return TaskKind::TaskIII;
  fail(ErrorKind::Config,
       "unknown task '" + std::string(text) + "' (expected simtosim | task1 | task2 | task3)");
}

std::size_t label_width(TaskKind task) {
  switch (task) {
    case TaskKind::SimToSim: return 5 + kSimObjectCount;
    case TaskKind::TaskI: return 1;
    case TaskKind::TaskII: return 1;
    case TaskKind::TaskIII: return 2;
  }
  return 0;
}

void RandomizationSpec::validate() const {
  baseline.validate();
  if (!(factor >= 0.0 && factor <= 1.0))
    fail(ErrorKind::Domain, "randomization: factor must lie in [0, 1]");
}

DynamicsParams randomize_params(const RandomizationSpec& spec, Rng& rng) {
  spec.validate();
  const double lo = 1.0 - spec.factor;
  const double hi = 1.0 + spec.factor;
  DynamicsParams out = spec.baseline;
  if (spec.per_parameter) {
    out.f_push *= uniform(rng, lo, hi);
    out.f_pull *= uniform(rng, lo, hi);
    out.damping *= uniform(rng, lo, hi);
  } else {
    const double alpha = uniform(rng, lo, hi);
    out.f_push *= alpha;
    out.f_pull *= alpha;
    out.damping *= alpha;
  }
  out.damping = std::clamp(out.damping, 0.0, 1.0);
  return out;
}

void TaskSpec::validate() const {
  const TaskGeometry& g = geometry;
  if (!(g.offset_range > 0.0)) fail(ErrorKind::Domain, "task: offset_range must be > 0");
  if (!(g.rotation_range_deg >= 0.0 && g.rotation_range_deg < 90.0))
    fail(ErrorKind::Domain, "task: rotation_range must lie in [0, 90)");
  if (!(g.pole_radius > 0.0)) fail(ErrorKind::Domain, "task: pole_radius must be > 0");
  if (!(g.disc_inner_radius > 0.0 && g.disc_outer_radius > g.disc_inner_radius))
    fail(ErrorKind::Domain, "task: need 0 < disc_inner_radius < disc_outer_radius");
  if (!(g.radius_perturbation >= 0.0)) fail(ErrorKind::Domain, "task: radius_perturbation must be >= 0");
  if (g.angle_grid < 1) fail(ErrorKind::Domain, "task: angle_grid must be >= 1");
  if (!(g.cuboid_half_width > 0.0 && g.cuboid_half_height > 0.0 && g.cylinder_radius > 0.0 &&
        g.cylinder_half_length > 0.0))
    fail(ErrorKind::Domain, "task: object dimensions must be > 0");
  if (!(tap.max_press > 0.0)) fail(ErrorKind::Domain, "task: max_press must be > 0");
  if (tap.min_depths < 1 || tap.max_depths < tap.min_depths)
    fail(ErrorKind::Domain, "task: need 1 <= min_depths <= max_depths");
  if (tap.steps_per_depth < 1) fail(ErrorKind::Domain, "task: steps_per_depth must be >= 1");
}

std::vector<double> encode_label(const TaskSpec& task, const TapSetup& setup) {
  const TaskGeometry& g = task.geometry;
  const auto& raw = setup.raw_label;
  switch (task.kind) {
    case TaskKind::SimToSim: {
      std::vector<double> out{raw.at(0) / g.offset_range, raw.at(1) / g.offset_range,
                              raw.at(2) / g.rotation_range_deg, raw.at(3) / g.rotation_range_deg,
                              raw.at(4) / g.rotation_range_deg};
      for (int k = 0; k < kSimObjectCount; ++k) out.push_back(k == setup.object_id ? 1.0 : 0.0);
      return out;
    }
    case TaskKind::TaskI: return {raw.at(0) / (2.0 * kPi)};
    case TaskKind::TaskII: return {raw.at(0) / g.offset_range};
    case TaskKind::TaskIII: return {raw.at(0) / g.offset_range, raw.at(1) / g.offset_range};
  }
  return {};
}

std::vector<double> decode_label(const TaskSpec& task, std::span<const double> e) {
  if (e.size() != label_width(task.kind))
    fail(ErrorKind::Schema, "decode_label: width " + std::to_string(e.size()) + " for task " +
                                std::string(to_string(task.kind)));
  const TaskGeometry& g = task.geometry;
  switch (task.kind) {
    case TaskKind::SimToSim: {
      const auto id = std::max_element(e.begin() + 5, e.end()) - (e.begin() + 5);
      return {e[0] * g.offset_range,       e[1] * g.offset_range,
              e[2] * g.rotation_range_deg, e[3] * g.rotation_range_deg,
              e[4] * g.rotation_range_deg, static_cast<double>(id)};
    }
    case TaskKind::TaskI: return {e[0] * 2.0 * kPi};
    case TaskKind::TaskII: return {e[0] * g.offset_range};
    case TaskKind::TaskIII: return {e[0] * g.offset_range, e[1] * g.offset_range};
  }
  return {};
}

GenerationContext GenerationContext::make(TaskSpec task, RandomizationSpec randomization,
                                          RepKind rep_kind, double noise_sigma, int rings,
                                          double tip_radius) {
  task.validate();
  randomization.validate();
  if (!(noise_sigma >= 0.0)) fail(ErrorKind::Domain, "generation: noise sigma must be >= 0");
  GenerationContext ctx;
  ctx.mesh = std::make_shared<const TipMesh>(generate_tip_mesh(rings, tip_radius));
  ctx.task = task;
  ctx.randomization = randomization;
  ctx.rep_kind = rep_kind;
  ctx.noise_sigma = noise_sigma;
  return ctx;
}

TapSetup draw_setup(const TaskSpec& task, std::uint64_t index, Rng& rng) {
  const TaskGeometry& g = task.geometry;
  switch (task.kind) {
    case TaskKind::SimToSim: {
      TapSetup setup;
      setup.object_id = static_cast<int>(uniform_int(rng, 0, kSimObjectCount - 1));
      const Vec3 rot(uniform(rng, -g.rotation_range_deg, g.rotation_range_deg),
                     uniform(rng, -g.rotation_range_deg, g.rotation_range_deg),
                     uniform(rng, -g.rotation_range_deg, g.rotation_range_deg));
      setup.sensor_xy = Vec2(uniform(rng, -g.offset_range, g.offset_range),
                             uniform(rng, -g.offset_range, g.offset_range));
      const SimObjectSpec obj = sim_object(g, static_cast<SimObject>(setup.object_id));
      const Pose random_rotation{obj.centre, rot};
      setup.shape = obj.shape;
      setup.shape_pose = compose(random_rotation, Pose{Vec3::Zero(), obj.base_euler_deg});
      setup.raw_label = {setup.sensor_xy.x(), setup.sensor_xy.y(), rot.x(), rot.y(), rot.z()};
      setup.depths = draw_depths(task.tap, rng);
      return setup;
    }
    case TaskKind::TaskI: {
      const auto i = static_cast<double>(index % static_cast<std::uint64_t>(g.angle_grid));
      return tap_task_setup(task, {2.0 * kPi * i / g.angle_grid}, rng);
    }
    case TaskKind::TaskII:
      return tap_task_setup(task, {uniform(rng, -g.offset_range, g.offset_range)}, rng);
    case TaskKind::TaskIII: {
      const double x = uniform(rng, -g.offset_range, g.offset_range);
      const double y = uniform(rng, -g.offset_range, g.offset_range);
      return tap_task_setup(task, {x, y}, rng);
    }
  }
  return {};
}

Pose find_touch_pose(const TipMesh& mesh, const RigidShape& shape, const Pose& shape_pose,
                     const Vec2& xy) {
  auto clearance = [&](double h) {
    return min_vertex_clearance(mesh, sensor_looking_down(xy, h, mesh.tip_radius), shape,
                                shape_pose);
  };
  double above = kTouchSearchTop;
  while (clearance(above) <= 0.0) {
    above += kTouchSearchSpan;
    if (above > 10.0 * kTouchSearchSpan) fail(ErrorKind::Domain, "find_touch_pose: no clear start");
  }
  // March down to the first penetrating height, then bisect the crossing.
  double below = above;
  bool found = false;
  for (double h = above - kTouchSearchStep; h >= above - kTouchSearchSpan; h -= kTouchSearchStep) {
    if (clearance(h) < 0.0) {
      below = h;
      found = true;
      break;
    }
    above = h;
  }
  if (!found)
    fail(ErrorKind::Domain, "find_touch_pose: sensor at (" + std::to_string(xy.x()) + ", " +
                                std::to_string(xy.y()) + ") misses the object");
  for (int it = 0; it < kTouchBisections; ++it) {
    const double mid = 0.5 * (above + below);
    (clearance(mid) < 0.0 ? below : above) = mid;
  }
  return sensor_looking_down(xy, above, mesh.tip_radius);
}

std::vector<TactileFrame> run_setup(const TipMesh& mesh, const TaskSpec& task,
                                    const TapSetup& setup, const DynamicsParams& params) {
  const Pose touch = find_touch_pose(mesh, setup.shape, setup.shape_pose, setup.sensor_xy);
  return simulate_tap(mesh, setup.shape, setup.shape_pose, touch, params, setup.depths,
                      task.tap.steps_per_depth);
}

Episode gen_simtosim_episode(const GenerationContext& ctx, long id, std::uint64_t seed) {
  if (ctx.task.kind != TaskKind::SimToSim)
    fail(ErrorKind::Domain, "gen_simtosim_episode: context task is not simtosim");
  Rng rng(seed);
  Episode ep;
  ep.id = id;
  ep.seed = seed;
  ep.setup = draw_setup(ctx.task, static_cast<std::uint64_t>(id), rng);
  ep.params = randomize_params(ctx.randomization, rng);
  try {
    ep.frames = run_setup(*ctx.mesh, ctx.task, ep.setup, ep.params);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::Domain) throw;
    ep.setup = draw_setup(ctx.task, static_cast<std::uint64_t>(id), rng);
    ep.frames = run_setup(*ctx.mesh, ctx.task, ep.setup, ep.params);
  }
  ep.label = encode_label(ctx.task, ep.setup);
  return ep;
}

std::vector<Sample> episode_samples(const GenerationContext& ctx, const Episode& episode) {
  const TactileFrame rest = rest_frame(*ctx.mesh);
  std::vector<Sample> out;
  out.reserve(episode.frames.size());
  for (std::size_t k = 0; k < episode.frames.size(); ++k) {
    const int step = static_cast<int>(k);
    Rng noise(noise_seed(episode.seed, step));
    Sample s;
    s.task = ctx.task.kind;
    s.episode = episode.id;
    s.step = step;
    s.rep_kind = ctx.rep_kind;
    s.rep = encode(ctx.rep_kind, episode.frames[k], rest, ctx.noise_sigma, noise).values;
    s.label = episode.label;
    s.params = episode.params;
    s.seed = episode.seed;
    out.push_back(std::move(s));
  }
  return out;
}

Sample gen_task_sample(const GenerationContext& ctx, long index, std::uint64_t seed) {
  if (ctx.task.kind == TaskKind::SimToSim)
    fail(ErrorKind::Domain, "gen_task_sample: sim-to-sim samples come from episodes");
  Rng rng(seed);
  const TapSetup setup = draw_setup(ctx.task, static_cast<std::uint64_t>(index), rng);
  const DynamicsParams params = randomize_params(ctx.randomization, rng);
  const std::vector<TactileFrame> frames = run_setup(*ctx.mesh, ctx.task, setup, params);

  Sample s;
  s.task = ctx.task.kind;
  s.episode = index;
  s.step = static_cast<int>(frames.size()) - 1;
  s.rep_kind = ctx.rep_kind;
  Rng noise(noise_seed(seed, s.step));
  s.rep = encode(ctx.rep_kind, frames.back(), rest_frame(*ctx.mesh), ctx.noise_sigma, noise).values;
  s.label = encode_label(ctx.task, setup);
  s.params = params;
  s.seed = seed;
  return s;
}

std::vector<Sample> generate_samples(const GenerationContext& ctx, long count,
                                     std::uint64_t root_seed, int jobs) {
  if (count <= 0) fail(ErrorKind::Usage, "generate_samples: count must be > 0");
  const auto n = static_cast<std::size_t>(count);
  std::vector<std::vector<Sample>> parts(n);
  parallel_for(n, jobs, [&](std::size_t i) {
    const std::uint64_t seed = derive_seed(root_seed, i);
    const long id = static_cast<long>(i);
    if (ctx.task.kind == TaskKind::SimToSim) {
      parts[i] = episode_samples(ctx, gen_simtosim_episode(ctx, id, seed));
    } else {
      parts[i].push_back(gen_task_sample(ctx, id, seed));
    }
  });
  std::vector<Sample> out;
  for (auto& part : parts)
    for (auto& s : part) out.push_back(std::move(s));
  return out;
}

Sample regenerate_sample(const GenerationContext& ctx, long episode, int step,
                         std::uint64_t seed) {
  if (ctx.task.kind == TaskKind::SimToSim) {
    auto samples = episode_samples(ctx, gen_simtosim_episode(ctx, episode, seed));
    if (step < 0 || static_cast<std::size_t>(step) >= samples.size())
      fail(ErrorKind::Schema, "regenerate_sample: step out of range for episode");
    return samples[static_cast<std::size_t>(step)];
  }
  Sample s = gen_task_sample(ctx, episode, seed);
  if (s.step != step) fail(ErrorKind::Schema, "regenerate_sample: step does not match metadata");
  return s;
}

// ---------------------------------------------------------------------------

PseudoRealEnv::PseudoRealEnv(std::shared_ptr<const TipMesh> mesh, TaskSpec task,
                             const DynamicsParams& baseline, PseudoRealConfig config)
    : mesh_(std::move(mesh)), task_(task), hidden_(baseline), config_(config) {
  if (task_.kind == TaskKind::SimToSim)
    fail(ErrorKind::Schema, "pseudo-real environment supports tasks I-III only");
  task_.validate();
  if (!(config_.multiplier > 0.0)) fail(ErrorKind::Domain, "pseudo_real: multiplier must be > 0");
  if (!(config_.noise_sigma >= 0.0)) fail(ErrorKind::Domain, "pseudo_real: sigma must be >= 0");
  hidden_.f_push *= config_.multiplier;
  hidden_.f_pull *= config_.multiplier;
  hidden_.damping = std::clamp(hidden_.damping * config_.multiplier, 0.0, 1.0);
  hidden_.validate();
}

int PseudoRealEnv::taps_per_round(int requested) const {
  return task_.kind == TaskKind::TaskI ? kTaskIEvalAngles : requested;
}

TapObservation PseudoRealEnv::tap(int round, int tap_index, int taps_in_round,
                                  RepKind kind) const {
  const std::uint64_t seed = derive_seed(
      config_.seed, static_cast<std::uint64_t>(round) * 100000ULL + static_cast<std::uint64_t>(tap_index));
  Rng rng(seed);
  const TaskGeometry& g = task_.geometry;
  std::vector<double> raw;
  switch (task_.kind) {
    case TaskKind::TaskI: raw = {2.0 * kPi * tap_index / taps_in_round}; break;
    case TaskKind::TaskII: raw = {uniform(rng, -g.offset_range, g.offset_range)}; break;
    case TaskKind::TaskIII:
      raw = {uniform(rng, -g.offset_range, g.offset_range),
             uniform(rng, -g.offset_range, g.offset_range)};
      break;
    case TaskKind::SimToSim: break;
  }
  const TapSetup setup = tap_task_setup(task_, raw, rng);
  const std::vector<TactileFrame> frames = run_setup(*mesh_, task_, setup, hidden_);
  Rng noise(derive_seed(seed, 1));
  TapObservation obs;
  obs.rep = encode(kind, frames.back(), rest_frame(*mesh_), config_.noise_sigma, noise);
  obs.label = encode_label(task_, setup);
  return obs;
}

double tap_error(const TaskSpec& task, std::span<const double> predicted,
                 std::span<const double> truth) {
  const std::vector<double> p = decode_label(task, predicted);
  const std::vector<double> t = decode_label(task, truth);
  switch (task.kind) {
    case TaskKind::TaskI: {
      const double d = std::fmod(std::abs(p[0] - t[0]), 2.0 * kPi);
      return std::min(d, 2.0 * kPi - d);
    }
    case TaskKind::TaskII: return std::abs(p[0] - t[0]);
    case TaskKind::TaskIII: return std::hypot(p[0] - t[0], p[1] - t[1]);
    case TaskKind::SimToSim: break;
  }
  fail(ErrorKind::Schema, "tap_error: sim-to-sim has no tap error");
}

RoundsResult pseudo_real_rounds(const PseudoRealEnv& env, const Predictor& predict,
                                RepKind kind, int rounds, int taps_per_round) {
  if (rounds < 1 || taps_per_round < 1)
    fail(ErrorKind::Usage, "pseudo_real_rounds: rounds and taps must be >= 1");
  const int taps = env.taps_per_round(taps_per_round);
  RoundsResult result;
  for (int r = 0; r < rounds; ++r) {
    double sum = 0.0;
    for (int t = 0; t < taps; ++t) {
      const TapObservation obs = env.tap(r, t, taps, kind);
      const std::vector<double> pred = predict(obs);
      if (pred.size() != obs.label.size())
        fail(ErrorKind::Schema, "pseudo_real_rounds: prediction width " +
                                    std::to_string(pred.size()) + " != label width " +
                                    std::to_string(obs.label.size()));
      const double err = tap_error(env.task(), pred, obs.label);
      result.tap_errors.push_back(err);
      sum += err;
    }
    result.round_mae.push_back(sum / taps);
  }
  result.mae = std::accumulate(result.round_mae.begin(), result.round_mae.end(), 0.0) / rounds;
  result.stddev = sample_stddev(result.round_mae);
  return result;
}

}  // namespace tacsim
