#pragma once

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

#include "tacsim/geometry.hpp"
#include "tacsim/mesh.hpp"

namespace tacsim {

// All primitives are expressed in their own local frame; a Pose places them
// in the world. Dimensions are millimetres.

/// Solid half-space z <= 0.
struct Plane {};

/// Box centred at the origin.
struct Cuboid {
  Vec3 half_extents{1.0, 1.0, 1.0};
};

/// Capped cylinder centred at the origin, axis along z.
struct Cylinder {
  double radius = 5.0;
  double half_height = 10.0;
};

/// Vertical rod whose flat tip is at z = 0, extending down to z = -length.
struct Pole {
  double radius = 1.0;
  double length = 50.0;
};

/// Flat annulus about the z axis with its top face at z = 0.
struct Disc {
  double inner_radius = 10.0;
  double outer_radius = 25.0;
  double thickness = 10.0;
};

/// Rectangular block occupying x <= 0 with its top face at z = 0, so the
/// vertical face x = 0 forms a straight edge along y.
struct HalfPlaneEdge {
  double width = 40.0;      // extent along -x
  double half_length = 40.0;  // extent along +-y
  double thickness = 10.0;
};

using RigidShape = std::variant<Plane, Cuboid, Cylinder, Pole, Disc, HalfPlaneEdge>;

std::string shape_name(const RigidShape& shape);
/// Throws Error{Domain} when a dimension is not strictly positive.
void validate_shape(const RigidShape& shape);

/// Signed distance in the shape's local frame: negative inside.
double local_signed_distance(const RigidShape& shape, const Vec3& p);

double signed_distance(const RigidShape& shape, const Pose& pose, const Vec3& p);

/// Unit outward normal from central differences of the distance field.
Vec3 sdf_gradient(const RigidShape& shape, const Pose& pose, const Vec3& p);

/// Walks `p` along the gradient until |sdf| < 1e-6 mm (at most 20 steps).
Vec3 project_to_surface(const RigidShape& shape, const Pose& pose, const Vec3& p);

/// Vertices penetrating a shape and, for each, the image-plane position
/// (sensor frame) of its nearest surface point.
struct ContactSet {
  std::vector<std::size_t> indices;
  std::vector<Vec2> points;

  bool empty() const { return indices.empty(); }
  std::size_t size() const { return indices.size(); }
};

inline constexpr double kMaxContactFraction = 0.5;

/// Throws Error{DegenerateContact} if more than half the vertices penetrate.
ContactSet detect_contacts(const TipMesh& mesh, const Pose& sensor_pose,
                           const RigidShape& shape, const Pose& shape_pose);

/// Minimum signed distance over all vertices for a given sensor pose.
double min_vertex_clearance(const TipMesh& mesh, const Pose& sensor_pose,
                            const RigidShape& shape, const Pose& shape_pose);

}  // namespace tacsim
