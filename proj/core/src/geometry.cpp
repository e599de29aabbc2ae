#include "tacsim/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace tacsim {

Mat3 Pose::rotation() const {
  const Eigen::AngleAxisd rx(deg_to_rad(euler_deg.x()), Vec3::UnitX());
  const Eigen::AngleAxisd ry(deg_to_rad(euler_deg.y()), Vec3::UnitY());
  const Eigen::AngleAxisd rz(deg_to_rad(euler_deg.z()), Vec3::UnitZ());
  return (rx * ry * rz).toRotationMatrix();
}

Vec3 Pose::to_world(const Vec3& local) const { return rotation() * local + translation; }

Vec3 Pose::to_local(const Vec3& world) const {
  return rotation().transpose() * (world - translation);
}

Pose Pose::from_matrix(const Mat3& rotation, const Vec3& translation) {
  return Pose{translation, euler_xyz_from_matrix(rotation)};
}

Vec3 euler_xyz_from_matrix(const Mat3& r) {
  // R = Rx(a) Ry(b) Rz(c): r(0,2) = sin b, r(1,2) = -sin a cos b,
  // r(2,2) = cos a cos b, r(0,1) = -cos b sin c, r(0,0) = cos b cos c.
  const double b = std::asin(std::clamp(r(0, 2), -1.0, 1.0));
  const double a = std::atan2(-r(1, 2), r(2, 2));
  const double c = std::atan2(-r(0, 1), r(0, 0));
  return {rad_to_deg(a), rad_to_deg(b), rad_to_deg(c)};
}

Pose compose(const Pose& outer, const Pose& inner) {
  const Mat3 ro = outer.rotation();
  return Pose::from_matrix(ro * inner.rotation(), ro * inner.translation + outer.translation);
}

Pose sensor_looking_down(const Vec2& xy, double apex_height, double tip_radius) {
  // Rx(180) maps the apex (0, 0, R) to (0, 0, -R).
  return Pose{Vec3(xy.x(), xy.y(), apex_height + tip_radius), Vec3(180.0, 0.0, 0.0)};
}

}  // namespace tacsim
