#include "tacsim/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <json.hpp>

#include "tacsim/error.hpp"

namespace tacsim {

using nlohmann::json;

TipMesh generate_tip_mesh(int rings, double tip_radius, double polar_extent_deg) {
  if (rings < 0) fail(ErrorKind::Domain, "generate_tip_mesh: rings must be >= 0");
  if (!(tip_radius > 0.0)) fail(ErrorKind::Domain, "generate_tip_mesh: tip_radius must be > 0");

  TipMesh mesh;
  mesh.tip_radius = tip_radius;
  mesh.rings = rings;
  mesh.vertices.emplace_back(0.0, 0.0, tip_radius);
  mesh.ring_of_vertex.push_back(0);

  const double extent = deg_to_rad(polar_extent_deg);
  for (int k = 1; k <= rings; ++k) {
    const double polar = extent * static_cast<double>(k) / static_cast<double>(rings + 1);
    const int count = 6 * k;
    for (int j = 0; j < count; ++j) {
      const double azimuth = 2.0 * kPi * static_cast<double>(j) / static_cast<double>(count);
      mesh.vertices.emplace_back(tip_radius * std::sin(polar) * std::cos(azimuth),
                                 tip_radius * std::sin(polar) * std::sin(azimuth),
                                 tip_radius * std::cos(polar));
      mesh.ring_of_vertex.push_back(k);
    }
  }

  const int last_observed = std::max(rings - 1, 0);
  for (std::size_t i = 0; i < mesh.vertices.size(); ++i) {
    if (mesh.ring_of_vertex[i] <= last_observed) mesh.pin_indices.push_back(i);
  }
  return mesh;
}

std::vector<Vec2> rest_pins_2d(const TipMesh& mesh) {
  std::vector<Vec2> out;
  out.reserve(mesh.pin_indices.size());
  for (std::size_t idx : mesh.pin_indices) out.push_back(image_projection(mesh.vertices[idx]));
  return out;
}

std::vector<Vec2> rest_vertices_2d(const TipMesh& mesh) {
  std::vector<Vec2> out;
  out.reserve(mesh.vertices.size());
  for (const Vec3& v : mesh.vertices) out.push_back(image_projection(v));
  return out;
}

std::string mesh_to_json(const TipMesh& mesh) {
  json doc;
  doc["tip_radius"] = mesh.tip_radius;
  doc["rings"] = mesh.rings;
  json verts = json::array();
  for (const Vec3& v : mesh.vertices) verts.push_back({v.x(), v.y(), v.z()});
  doc["vertices"] = std::move(verts);
  doc["ring_of_vertex"] = mesh.ring_of_vertex;
  doc["pin_indices"] = mesh.pin_indices;
  return doc.dump(2);
}

TipMesh mesh_from_json(const std::string& text) {
  TipMesh mesh;
  try {
    const json doc = json::parse(text);
    mesh.tip_radius = doc.at("tip_radius").get<double>();
    mesh.rings = doc.value("rings", 0);
    for (const auto& v : doc.at("vertices")) {
      if (!v.is_array() || v.size() != 3) fail(ErrorKind::Schema, "mesh: vertex must be [x,y,z]");
      mesh.vertices.emplace_back(v[0].get<double>(), v[1].get<double>(), v[2].get<double>());
    }
    mesh.pin_indices = doc.at("pin_indices").get<std::vector<std::size_t>>();
    if (doc.contains("ring_of_vertex")) {
      mesh.ring_of_vertex = doc["ring_of_vertex"].get<std::vector<int>>();
    } else {
      mesh.ring_of_vertex.assign(mesh.vertices.size(), 0);
    }
  } catch (const json::exception& e) {
    fail(ErrorKind::Schema, std::string("mesh: ") + e.what());
  }
  if (!(mesh.tip_radius > 0.0)) fail(ErrorKind::Schema, "mesh: tip_radius must be > 0");
  if (mesh.ring_of_vertex.size() != mesh.vertices.size())
    fail(ErrorKind::Schema, "mesh: ring_of_vertex length mismatch");
  std::set<std::size_t> seen;
  for (std::size_t idx : mesh.pin_indices) {
    if (idx >= mesh.vertices.size()) fail(ErrorKind::Schema, "mesh: pin index out of range");
    if (!seen.insert(idx).second) fail(ErrorKind::Schema, "mesh: duplicate pin index");
  }
  return mesh;
}

}  // namespace tacsim
