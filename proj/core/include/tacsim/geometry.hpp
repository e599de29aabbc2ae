#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace tacsim {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rigid transform: translation in mm plus intrinsic x-y-z Euler angles in
/// degrees. Maps local coordinates to world as `R * p + t`.
struct Pose {
  Vec3 translation = Vec3::Zero();
  Vec3 euler_deg = Vec3::Zero();

  Mat3 rotation() const;
  Vec3 to_world(const Vec3& local) const;
  Vec3 to_local(const Vec3& world) const;

  static Pose from_matrix(const Mat3& rotation, const Vec3& translation);
};

/// Euler angles in degrees for R = Rx(a) * Ry(b) * Rz(c). Valid away from
/// gimbal lock, which the randomised ranges used here never approach.
Vec3 euler_xyz_from_matrix(const Mat3& rotation);

/// `compose(a, b).to_world(p) == a.to_world(b.to_world(p))`.
Pose compose(const Pose& outer, const Pose& inner);

/// Sensor pose with the tip axis pointing down (world -z) and the apex of a
/// dome of `tip_radius` sitting at (x, y, apex_height).
Pose sensor_looking_down(const Vec2& xy, double apex_height, double tip_radius);

constexpr double kPi = 3.14159265358979323846;
constexpr double deg_to_rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad_to_deg(double rad) { return rad * 180.0 / kPi; }

}  // namespace tacsim
