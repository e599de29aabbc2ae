#include "tacsim/collision.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "tacsim/error.hpp"

namespace tacsim {
namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double box_sdf(const Vec3& p, const Vec3& half) {
  const Vec3 q = p.cwiseAbs() - half;
  return q.cwiseMax(0.0).norm() + std::min(q.maxCoeff(), 0.0);
}

// Exact distance for a 2D profile (radial, axial) distance pair extruded or
// revolved: inside part plus outside part.
double combine(double a, double b) {
  return std::min(std::max(a, b), 0.0) + Vec2(std::max(a, 0.0), std::max(b, 0.0)).norm();
}

double capped_cylinder_sdf(const Vec3& p, double radius, double half_height) {
  return combine(std::hypot(p.x(), p.y()) - radius, std::abs(p.z()) - half_height);
}

constexpr double kGradientStep = 1e-5;
constexpr double kSurfaceTolerance = 1e-6;
constexpr int kProjectionIterations = 20;

}  // namespace

std::string shape_name(const RigidShape& shape) {
  return std::visit(Overloaded{
                        [](const Plane&) { return std::string("plane"); },
                        [](const Cuboid&) { return std::string("cuboid"); },
                        [](const Cylinder&) { return std::string("cylinder"); },
                        [](const Pole&) { return std::string("pole"); },
                        [](const Disc&) { return std::string("disc"); },
                        [](const HalfPlaneEdge&) { return std::string("edge"); },
                    },
                    shape);
}

void validate_shape(const RigidShape& shape) {
  auto positive = [&](double v, const char* field) {
    if (!(v > 0.0) || !std::isfinite(v))
      fail(ErrorKind::Domain, shape_name(shape) + ": " + field + " must be > 0");
  };
  std::visit(Overloaded{
                 [](const Plane&) {},
                 [&](const Cuboid& s) {
                   positive(s.half_extents.x(), "half_extents.x");
                   positive(s.half_extents.y(), "half_extents.y");
                   positive(s.half_extents.z(), "half_extents.z");
                 },
                 [&](const Cylinder& s) {
                   positive(s.radius, "radius");
                   positive(s.half_height, "half_height");
                 },
                 [&](const Pole& s) {
                   positive(s.radius, "radius");
                   positive(s.length, "length");
                 },
                 [&](const Disc& s) {
                   positive(s.inner_radius, "inner_radius");
                   positive(s.outer_radius - s.inner_radius, "outer_radius - inner_radius");
                   positive(s.thickness, "thickness");
                 },
                 [&](const HalfPlaneEdge& s) {
                   positive(s.width, "width");
                   positive(s.half_length, "half_length");
                   positive(s.thickness, "thickness");
                 },
             },
             shape);
}

double local_signed_distance(const RigidShape& shape, const Vec3& p) {
  return std::visit(
      Overloaded{
          [&](const Plane&) { return p.z(); },
          [&](const Cuboid& s) { return box_sdf(p, s.half_extents); },
          [&](const Cylinder& s) { return capped_cylinder_sdf(p, s.radius, s.half_height); },
          [&](const Pole& s) {
            return capped_cylinder_sdf(p + Vec3(0.0, 0.0, 0.5 * s.length), s.radius,
                                       0.5 * s.length);
          },
          [&](const Disc& s) {
            const double mid = 0.5 * (s.inner_radius + s.outer_radius);
            const double half_width = 0.5 * (s.outer_radius - s.inner_radius);
            const double radial = std::abs(std::hypot(p.x(), p.y()) - mid) - half_width;
            const double axial = std::abs(p.z() + 0.5 * s.thickness) - 0.5 * s.thickness;
            return combine(radial, axial);
          },
          [&](const HalfPlaneEdge& s) {
            const Vec3 centre(-0.5 * s.width, 0.0, -0.5 * s.thickness);
            return box_sdf(p - centre, Vec3(0.5 * s.width, s.half_length, 0.5 * s.thickness));
          },
      },
      shape);
}

double signed_distance(const RigidShape& shape, const Pose& pose, const Vec3& p) {
  return local_signed_distance(shape, pose.to_local(p));
}

Vec3 sdf_gradient(const RigidShape& shape, const Pose& pose, const Vec3& p) {
  const Vec3 local = pose.to_local(p);
  Vec3 g;
  for (int axis = 0; axis < 3; ++axis) {
    Vec3 step = Vec3::Zero();
    step[axis] = kGradientStep;
    g[axis] = (local_signed_distance(shape, local + step) -
               local_signed_distance(shape, local - step)) /
              (2.0 * kGradientStep);
  }
  const double n = g.norm();
  if (n < 1e-12) return pose.rotation() * Vec3::UnitZ();
  return pose.rotation() * (g / n);
}

Vec3 project_to_surface(const RigidShape& shape, const Pose& pose, const Vec3& p) {
  Vec3 q = p;
  for (int it = 0; it < kProjectionIterations; ++it) {
    const double d = signed_distance(shape, pose, q);
    if (std::abs(d) < kSurfaceTolerance) break;
    q -= d * sdf_gradient(shape, pose, q);
  }
  return q;
}

ContactSet detect_contacts(const TipMesh& mesh, const Pose& sensor_pose,
                           const RigidShape& shape, const Pose& shape_pose) {
  ContactSet contacts;
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    const Vec3 world = sensor_pose.to_world(mesh.vertices[i]);
    if (signed_distance(shape, shape_pose, world) < 0.0) {
      const Vec3 surface = project_to_surface(shape, shape_pose, world);
      contacts.indices.push_back(i);
      contacts.points.push_back(image_projection(sensor_pose.to_local(surface)));
    }
  }
  if (static_cast<double>(contacts.size()) >
      kMaxContactFraction * static_cast<double>(mesh.vertices.size())) {
    fail(ErrorKind::DegenerateContact,
         "detect_contacts: " + std::to_string(contacts.size()) + " of " +
             std::to_string(mesh.vertices.size()) + " vertices in contact");
  }
  return contacts;
}

double min_vertex_clearance(const TipMesh& mesh, const Pose& sensor_pose,
                            const RigidShape& shape, const Pose& shape_pose) {
  double best = std::numeric_limits<double>::infinity();
  for (const Vec3& v : mesh.vertices)
    best = std::min(best, signed_distance(shape, shape_pose, sensor_pose.to_world(v)));
  return best;
}

}  // namespace tacsim
