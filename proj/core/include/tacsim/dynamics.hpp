#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "tacsim/collision.hpp"
#include "tacsim/geometry.hpp"
#include "tacsim/mesh.hpp"

namespace tacsim {

/// Deformation constants. Vertex mass is one, so forces are accelerations
/// in mm/s^2.
struct DynamicsParams {
  double f_push = 5.0;
  double f_pull = 40.0;
  double damping = 0.15;
  double tau = 0.5;
  double dt = 0.01;

  /// Throws Error{Domain} on non-finite fields, damping outside [0, 1],
  /// negative factors or dt <= 0.
  void validate() const;
};

inline constexpr int kDefaultStepsPerDepth = 10;

/// Inverse-distance push from contact point `p_c` onto vertex `p_i`:
///
///   (f_push / (1 + d^2) + tau * f_push / (1 + d)) * (p_i - p_c) / |p_i - p_c|
///
/// where d = |p_i - p_c| / length_scale. The simulator passes the tip radius
/// as `length_scale` so the +1 terms are commensurate with distances.
/// Throws Error{Numerical} when the points coincide (|p_i - p_c| < 1e-9).
Vec2 pushing_force(const Vec2& p_i, const Vec2& p_c, const DynamicsParams& params,
                   double length_scale = 1.0);

/// Linear restoring force f_pull * (rest - p).
Vec2 pulling_force(const Vec2& p_i, const Vec2& rest_i, const DynamicsParams& params);

/// Image-plane state of every vertex. Contacted vertices are pinned to their
/// contact point with zero velocity; the rest are free.
struct MembraneState {
  std::vector<Vec2> positions;
  std::vector<Vec2> velocities;
  std::vector<Vec2> rest;
  std::vector<char> in_contact;
  ContactSet contacts;
  long step = 0;

  static MembraneState at_rest(const TipMesh& mesh);
  std::size_t free_count() const;
};

/// Replaces the contact set. Newly contacted vertices snap to their contact
/// point; vertices leaving contact keep their position and zero velocity.
void apply_contacts(MembraneState& state, ContactSet contacts);

/// One explicit step for every free vertex:
///
///   dv = (sum_c push(p_i, p_c) + pull(p_i)) * dt
///   v' = (1 - damping) * (v + dv)
///   p' = p + v * dt            (previous velocity)
///
/// Throws Error{Numerical} naming the step when the result is not finite.
void integrate_step(MembraneState& state, const DynamicsParams& params,
                    double length_scale);

/// Observed pins at one instant, in pin order.
struct TactileFrame {
  std::vector<Vec2> pins;
  long step = 0;
};

TactileFrame capture_frame(const MembraneState& state, const TipMesh& mesh);
TactileFrame rest_frame(const TipMesh& mesh);

/// Lowers the sensor from `touch_pose` along its axis by each offset of
/// `depth_profile` in turn, recomputing contacts, running `steps_per_depth`
/// integration steps and recording one frame per depth. Deterministic.
std::vector<TactileFrame> simulate_tap(const TipMesh& mesh, const RigidShape& shape,
                                       const Pose& shape_pose, const Pose& touch_pose,
                                       const DynamicsParams& params,
                                       std::span<const double> depth_profile,
                                       int steps_per_depth = kDefaultStepsPerDepth);

/// Sensor pose translated by `depth` mm along its own axis.
Pose advance_along_axis(const Pose& sensor_pose, double depth);

}  // namespace tacsim
