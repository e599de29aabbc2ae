#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "tacsim/collision.hpp"
#include "tacsim/dynamics.hpp"
#include "tacsim/mesh.hpp"
#include "tacsim/random.hpp"
#include "tacsim/representations.hpp"

namespace tacsim {

enum class TaskKind { SimToSim, TaskI, TaskII, TaskIII };

/// `simtosim | task1 | task2 | task3`.
std::string_view to_string(TaskKind task);
TaskKind parse_task(std::string_view text);

/// Encoded label width: sim-to-sim packs position, rotation and a one-hot
/// object identity; the tap tasks carry one angle or one/two offsets.
std::size_t label_width(TaskKind task);

enum class SimObject { Cylinder = 0, Cuboid = 1, Plane = 2 };
inline constexpr int kSimObjectCount = 3;

struct RandomizationSpec {
  DynamicsParams baseline;
  double factor = 0.0;
  bool per_parameter = true;

  /// Throws Error{Domain} unless 0 <= factor <= 1.
  void validate() const;
};

/// Scales f_push, f_pull and damping by multipliers drawn from
/// U[1 - factor, 1 + factor]; tau and dt are untouched and damping is
/// clamped to [0, 1].
DynamicsParams randomize_params(const RandomizationSpec& spec, Rng& rng);

struct TapProtocol {
  double max_press = 2.0;
  int min_depths = 3;
  int max_depths = 5;
  int steps_per_depth = kDefaultStepsPerDepth;
};

struct TaskGeometry {
  double offset_range = 5.0;
  double rotation_range_deg = 30.0;
  double pole_radius = 3.0;
  double disc_inner_radius = 15.0;
  double disc_outer_radius = 40.0;
  double radius_perturbation = 0.5;
  int angle_grid = 1000;
  // Sim-to-sim objects.
  double cuboid_half_width = 6.0;
  double cuboid_half_height = 8.0;
  double cylinder_radius = 5.0;
  double cylinder_half_length = 12.0;
};

struct TaskSpec {
  TaskKind kind = TaskKind::TaskII;
  TaskGeometry geometry;
  TapProtocol tap;

  void validate() const;
};

/// Latent description of one tap: what is touched, where, and how deep.
struct TapSetup {
  RigidShape shape;
  Pose shape_pose;
  Vec2 sensor_xy = Vec2::Zero();
  std::vector<double> depths;
  /// Raw label in task units (mm, degrees, radians) before head encoding.
  std::vector<double> raw_label;
  int object_id = -1;
};

/// Head-space encoding of a raw label (angles / 2pi, offsets / range,
/// rotations / range, identity one-hot) and its inverse.
std::vector<double> encode_label(const TaskSpec& task, const TapSetup& setup);
std::vector<double> decode_label(const TaskSpec& task, std::span<const double> encoded);

/// Shared immutable inputs for episode generation.
struct GenerationContext {
  std::shared_ptr<const TipMesh> mesh;
  TaskSpec task;
  RandomizationSpec randomization;
  RepKind rep_kind = RepKind::PinPositions;
  double noise_sigma = 0.0;

  static GenerationContext make(TaskSpec task, RandomizationSpec randomization,
                                RepKind rep_kind, double noise_sigma,
                                int rings = kDefaultRings,
                                double tip_radius = kDefaultTipRadius);
};

/// Draws the latent setup. Task I walks the angle grid by `index`; the other
/// tasks sample uniformly from their ranges.
TapSetup draw_setup(const TaskSpec& task, std::uint64_t index, Rng& rng);

/// Descends the sensor over `xy` until the first vertex touches the shape.
/// Throws Error{Domain} when the sensor would pass the shape without contact.
Pose find_touch_pose(const TipMesh& mesh, const RigidShape& shape, const Pose& shape_pose,
                     const Vec2& xy);

std::vector<TactileFrame> run_setup(const TipMesh& mesh, const TaskSpec& task,
                                    const TapSetup& setup, const DynamicsParams& params);

struct Sample {
  TaskKind task = TaskKind::TaskII;
  long episode = 0;
  int step = 0;
  RepKind rep_kind = RepKind::PinPositions;
  std::vector<double> rep;
  std::vector<double> label;
  DynamicsParams params;
  std::uint64_t seed = 0;
};

struct Episode {
  long id = 0;
  std::uint64_t seed = 0;
  TapSetup setup;
  DynamicsParams params;
  std::vector<TactileFrame> frames;
  std::vector<double> label;
};

/// One sim-to-sim tap: random object, rotation and contact position, fixed
/// dynamics draw, 3-5 recorded frames. A pose that produces no contact is
/// resampled once.
Episode gen_simtosim_episode(const GenerationContext& ctx, long id, std::uint64_t seed);

/// One sample per recorded frame of a sim-to-sim episode.
std::vector<Sample> episode_samples(const GenerationContext& ctx, const Episode& episode);

/// One tap for Tasks I-III, represented at its deepest frame.
Sample gen_task_sample(const GenerationContext& ctx, long index, std::uint64_t seed);

/// For sim-to-sim `count` is the number of episodes, otherwise the number of
/// samples. Item i uses seed derive_seed(root_seed, i); output order is by
/// index whatever `jobs` is.
std::vector<Sample> generate_samples(const GenerationContext& ctx, long count,
                                     std::uint64_t root_seed, int jobs = 1);

/// Rebuilds a sample from its metadata.
Sample regenerate_sample(const GenerationContext& ctx, long episode, int step,
                         std::uint64_t seed);

// ---------------------------------------------------------------------------
// Pseudo-real evaluation environment

struct PseudoRealConfig {
  double multiplier = 1.3;
  double noise_sigma = 1e-2;
  std::uint64_t seed = 2020;
  int rounds = 10;
  int taps_per_round = 10;
};

inline constexpr int kTaskIEvalAngles = 12;

struct TapObservation {
  Representation rep;
  /// Encoded ground truth. Only oracle fixtures may look at it.
  std::vector<double> label;
};

/// Stand-in for the physical sensor: a simulator whose dynamics are offset
/// from the training baseline by a hidden multiplier. Training code only ever
/// receives Samples, never this object's parameters.
class PseudoRealEnv {
 public:
  PseudoRealEnv(std::shared_ptr<const TipMesh> mesh, TaskSpec task,
                const DynamicsParams& baseline, PseudoRealConfig config);

  const TaskSpec& task() const { return task_; }
  const PseudoRealConfig& config() const { return config_; }

  /// 12 for Task I (angles 2*pi*i/12), otherwise the configured count.
  int taps_per_round(int requested) const;

  TapObservation tap(int round, int tap_index, int taps_in_round, RepKind kind) const;

 private:
  std::shared_ptr<const TipMesh> mesh_;
  TaskSpec task_;
  DynamicsParams hidden_;
  PseudoRealConfig config_;
};

using Predictor = std::function<std::vector<double>(const TapObservation&)>;

/// Absolute error of one prediction: mm for offsets (Euclidean for Task III),
/// wrapped radians for Task I.
double tap_error(const TaskSpec& task, std::span<const double> predicted,
                 std::span<const double> truth);

struct RoundsResult {
  std::vector<double> round_mae;
  std::vector<double> tap_errors;
  double mae = 0.0;
  /// Sample standard deviation of the round-level MAEs.
  double stddev = 0.0;
};

RoundsResult pseudo_real_rounds(const PseudoRealEnv& env, const Predictor& predict,
                                RepKind kind, int rounds, int taps_per_round);

}  // namespace tacsim
