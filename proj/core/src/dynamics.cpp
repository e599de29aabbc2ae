#include "tacsim/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "tacsim/error.hpp"

namespace tacsim {

void DynamicsParams::validate() const {
  const bool finite = std::isfinite(f_push) && std::isfinite(f_pull) &&
                      std::isfinite(damping) && std::isfinite(tau) && std::isfinite(dt);
  if (!finite) fail(ErrorKind::Domain, "dynamics: parameters must be finite");
  if (f_push < 0.0 || f_pull < 0.0) fail(ErrorKind::Domain, "dynamics: force factors must be >= 0");
  if (tau < 0.0) fail(ErrorKind::Domain, "dynamics: tau must be >= 0");
  if (damping < 0.0 || damping > 1.0) fail(ErrorKind::Domain, "dynamics: damping must lie in [0, 1]");
  if (!(dt > 0.0)) fail(ErrorKind::Domain, "dynamics: dt must be > 0");
}

Vec2 pushing_force(const Vec2& p_i, const Vec2& p_c, const DynamicsParams& params,
                   double length_scale) {
  const Vec2 offset = p_i - p_c;
  const double dist = offset.norm();
  if (dist < 1e-9) fail(ErrorKind::Numerical, "pushing_force: vertex coincides with contact point");
  const double d = dist / length_scale;
  const double magnitude = params.f_push / (1.0 + d * d) + params.tau * params.f_push / (1.0 + d);
  return magnitude * (offset / dist);
}

Vec2 pulling_force(const Vec2& p_i, const Vec2& rest_i, const DynamicsParams& params) {
  return params.f_pull * (rest_i - p_i);
}

MembraneState MembraneState::at_rest(const TipMesh& mesh) {
  MembraneState state;
  state.rest = rest_vertices_2d(mesh);
  state.positions = state.rest;
  state.velocities.assign(state.rest.size(), Vec2::Zero());
  state.in_contact.assign(state.rest.size(), 0);
  return state;
}

std::size_t MembraneState::free_count() const {
  std::size_t n = 0;
  for (char c : in_contact) n += c == 0;
  return n;
}

void apply_contacts(MembraneState& state, ContactSet contacts) {
  std::fill(state.in_contact.begin(), state.in_contact.end(), 0);
  for (std::size_t k = 0; k < contacts.size(); ++k) {
    const std::size_t i = contacts.indices[k];
    state.in_contact[i] = 1;
    state.positions[i] = contacts.points[k];
    state.velocities[i] = Vec2::Zero();
  }
  // Vertices that just left contact start from rest velocity; positions are
  // kept where the constraint left them.
  for (std::size_t k = 0; k < state.contacts.size(); ++k) {
    const std::size_t i = state.contacts.indices[k];
    if (!state.in_contact[i]) state.velocities[i] = Vec2::Zero();
  }
  state.contacts = std::move(contacts);
}

void integrate_step(MembraneState& state, const DynamicsParams& params, double length_scale) {
  const std::size_t n = state.positions.size();
  const double keep = 1.0 - params.damping;
  std::vector<Vec2> next_positions = state.positions;
  for (std::size_t i = 0; i < n; ++i) {
    if (state.in_contact[i]) continue;
    const Vec2& p = state.positions[i];
    Vec2 force = pulling_force(p, state.rest[i], params);
    for (const Vec2& pc : state.contacts.points) force += pushing_force(p, pc, params, length_scale);
    const Vec2 v_old = state.velocities[i];
    state.velocities[i] = keep * (v_old + force * params.dt);
    next_positions[i] = p + v_old * params.dt;
    if (!next_positions[i].allFinite() || !state.velocities[i].allFinite()) {
      fail(ErrorKind::Numerical, "integrate_step: non-finite state at step " +
                                     std::to_string(state.step + 1) + " (vertex " +
                                     std::to_string(i) + ")");
    }
  }
  state.positions = std::move(next_positions);
  ++state.step;
}

TactileFrame capture_frame(const MembraneState& state, const TipMesh& mesh) {
  TactileFrame frame;
  frame.step = state.step;
  frame.pins.reserve(mesh.pin_indices.size());
  for (std::size_t idx : mesh.pin_indices) frame.pins.push_back(state.positions[idx]);
  return frame;
}

TactileFrame rest_frame(const TipMesh& mesh) { return TactileFrame{rest_pins_2d(mesh), 0}; }

Pose advance_along_axis(const Pose& sensor_pose, double depth) {
  Pose out = sensor_pose;
  out.translation += depth * (sensor_pose.rotation() * Vec3::UnitZ());
  return out;
}

std::vector<TactileFrame> simulate_tap(const TipMesh& mesh, const RigidShape& shape,
                                       const Pose& shape_pose, const Pose& touch_pose,
                                       const DynamicsParams& params,
                                       std::span<const double> depth_profile,
                                       int steps_per_depth) {
  if (depth_profile.empty()) fail(ErrorKind::Domain, "simulate_tap: empty depth profile");
  if (steps_per_depth < 1) fail(ErrorKind::Domain, "simulate_tap: steps_per_depth must be >= 1");
  params.validate();

  MembraneState state = MembraneState::at_rest(mesh);
  std::vector<TactileFrame> frames;
  frames.reserve(depth_profile.size());
  for (std::size_t k = 0; k < depth_profile.size(); ++k) {
    try {
      const Pose pose = advance_along_axis(touch_pose, depth_profile[k]);
      apply_contacts(state, detect_contacts(mesh, pose, shape, shape_pose));
      for (int s = 0; s < steps_per_depth; ++s) integrate_step(state, params, mesh.tip_radius);
    } catch (const Error& e) {
      fail(e.kind(), "simulate_tap depth " + std::to_string(k) + " (" +
                         std::to_string(depth_profile[k]) + " mm): " + e.what());
    }
    frames.push_back(capture_frame(state, mesh));
  }
  return frames;
}

}  // namespace tacsim
