#include "oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace oracle {

void advance(std::vector<P2>& pos, std::vector<P2>& vel, const std::vector<P2>& rest,
             const std::map<std::size_t, P2>& contacts, const Params& k, double length_scale,
             int steps) {
  const std::size_t n = rest.size();
  for (const auto& [c, pt] : contacts) {
    pos[c] = pt;
    vel[c] = {0.0, 0.0};
  }
  for (int s = 0; s < steps; ++s) {
    std::vector<P2> next_pos = pos;
    std::vector<P2> next_vel = vel;
    for (std::size_t i = 0; i < n; ++i) {
      if (contacts.count(i)) continue;
      double fx = k.f_pull * (rest[i][0] - pos[i][0]);
      double fy = k.f_pull * (rest[i][1] - pos[i][1]);
      for (const auto& [c, pc] : contacts) {
        (void)c;
        const double dx = pos[i][0] - pc[0];
        const double dy = pos[i][1] - pc[1];
        const double dist = std::sqrt(dx * dx + dy * dy);
        const double d = dist / length_scale;
        const double mag = k.f_push / (1.0 + d * d) + k.tau * k.f_push / (1.0 + d);
        fx += mag * dx / dist;
        fy += mag * dy / dist;
      }
      next_vel[i][0] = (1.0 - k.damping) * (vel[i][0] + fx * k.dt);
      next_vel[i][1] = (1.0 - k.damping) * (vel[i][1] + fy * k.dt);
      next_pos[i][0] = pos[i][0] + vel[i][0] * k.dt;
      next_pos[i][1] = pos[i][1] + vel[i][1] * k.dt;
    }
    pos = next_pos;
    vel = next_vel;
  }
}

std::vector<P2> rollout(const std::vector<P2>& rest, const std::map<std::size_t, P2>& contacts,
                        const Params& params, double length_scale, int steps,
                        std::vector<P2>* velocities) {
  std::vector<P2> pos = rest;
  std::vector<P2> vel(rest.size(), P2{0.0, 0.0});
  advance(pos, vel, rest, contacts, params, length_scale, steps);
  if (velocities) *velocities = vel;
  return pos;
}

double box_distance_sampled(const std::array<double, 3>& h, const std::array<double, 3>& p,
                            int m) {
  // Grid search on each face, then repeatedly re-grid a window around the
  // best node until the cell is far below the tolerance of interest.
  double best = std::numeric_limits<double>::infinity();
  for (int axis = 0; axis < 3; ++axis) {
    const int u = (axis + 1) % 3;
    const int v = (axis + 2) % 3;
    for (double side : {-1.0, 1.0}) {
      double lo_u = -h[u], hi_u = h[u], lo_v = -h[v], hi_v = h[v];
      for (int pass = 0; pass < 6; ++pass) {
        double face_best = std::numeric_limits<double>::infinity();
        double bu = 0.0, bv = 0.0;
        for (int a = 0; a <= m; ++a) {
          for (int b = 0; b <= m; ++b) {
            std::array<double, 3> q{};
            q[axis] = side * h[axis];
            q[u] = lo_u + (hi_u - lo_u) * a / m;
            q[v] = lo_v + (hi_v - lo_v) * b / m;
            const double d = std::hypot(p[0] - q[0], p[1] - q[1], p[2] - q[2]);
            if (d < face_best) {
              face_best = d;
              bu = q[u];
              bv = q[v];
            }
          }
        }
        best = std::min(best, face_best);
        const double cu = (hi_u - lo_u) / m;
        const double cv = (hi_v - lo_v) / m;
        lo_u = std::max(-h[u], bu - cu);
        hi_u = std::min(h[u], bu + cu);
        lo_v = std::max(-h[v], bv - cv);
        hi_v = std::min(h[v], bv + cv);
      }
    }
  }
  const bool inside = std::abs(p[0]) < h[0] && std::abs(p[1]) < h[1] && std::abs(p[2]) < h[2];
  return inside ? -best : best;
}

std::vector<P2> normalize(const std::vector<P2>& pins) {
  std::vector<P2> out(pins.size());
  double sx = 0.0;
  double sy = 0.0;
  for (std::size_t i = 0; i < pins.size(); ++i) {
    out[i] = {pins[i][0] - pins[0][0], pins[i][1] - pins[0][1]};
    sx += std::abs(out[i][0]);
    sy += std::abs(out[i][1]);
  }
  const double n = static_cast<double>(pins.size());
  const double scale = (sx / n + sy / n) / 2.0;
  for (auto& q : out) {
    q[0] /= scale;
    q[1] /= scale;
  }
  return out;
}

}  // namespace oracle

namespace oracle {
namespace {

double cross(const P2& o, const P2& a, const P2& b) {
  return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]);
}

}  // namespace

std::vector<P2> convex_hull(std::vector<P2> pts) {
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  if (pts.size() < 3) return pts;
  std::vector<P2> hull(2 * pts.size());
  std::size_t k = 0;
  for (const P2& p : pts) {
    while (k >= 2 && cross(hull[k - 2], hull[k - 1], p) <= 0) --k;
    hull[k++] = p;
  }
  for (std::size_t i = pts.size() - 1, t = k + 1; i-- > 0;) {
    while (k >= t && cross(hull[k - 2], hull[k - 1], pts[i]) <= 0) --k;
    hull[k++] = pts[i];
  }
  hull.resize(k - 1);
  return hull;
}

bool inside_convex_hull(const std::vector<P2>& hull, const P2& q, double tol) {
  if (hull.size() < 3) return false;
  for (std::size_t i = 0; i < hull.size(); ++i) {
    const P2& a = hull[i];
    const P2& b = hull[(i + 1) % hull.size()];
    const double len = std::hypot(b[0] - a[0], b[1] - a[1]);
    if (cross(a, b, q) / len < -tol) return false;
  }
  return true;
}

}  // namespace oracle
