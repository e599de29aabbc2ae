#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "tacsim/geometry.hpp"

namespace tacsim {

/// Rest geometry of the sensor tip. Vertices sit on a dome of `tip_radius`
/// centred at the origin, with the sensor axis along +z. Every vertex is a
/// pin; `pin_indices` lists the ones the camera observes.
struct TipMesh {
  double tip_radius = 20.0;
  int rings = 6;
  std::vector<Vec3> vertices;
  std::vector<int> ring_of_vertex;
  std::vector<std::size_t> pin_indices;

  std::size_t vertex_count() const { return vertices.size(); }
  std::size_t pin_count() const { return pin_indices.size(); }
};

inline constexpr double kDefaultTipRadius = 20.0;
inline constexpr int kDefaultRings = 6;
inline constexpr double kDefaultPolarExtentDeg = 60.0;

/// Hexagonal concentric-ring dome: one apex vertex, then ring k holds 6k
/// vertices evenly spaced in azimuth at polar angle extent * k / (rings + 1).
/// The outermost ring is unobserved; with rings == 0 the apex is the only pin.
TipMesh generate_tip_mesh(int rings = kDefaultRings,
                          double tip_radius = kDefaultTipRadius,
                          double polar_extent_deg = kDefaultPolarExtentDeg);

/// Orthographic camera view along the sensor axis.
inline Vec2 image_projection(const Vec3& p) { return {p.x(), p.y()}; }

/// Image-plane rest positions of the observed pins, in pin order.
std::vector<Vec2> rest_pins_2d(const TipMesh& mesh);

/// Image-plane rest positions of every vertex.
std::vector<Vec2> rest_vertices_2d(const TipMesh& mesh);

std::string mesh_to_json(const TipMesh& mesh);
/// Throws Error{Schema} on malformed documents or out-of-range pin indices.
TipMesh mesh_from_json(const std::string& text);

}  // namespace tacsim
