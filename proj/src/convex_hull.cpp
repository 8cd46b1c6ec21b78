#include "vantage/convex_hull.hpp"

#include <Eigen/Geometry>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <unordered_map>
#include <unordered_set>

namespace vantage {

namespace {

struct Face {
  int a, b, c;
  Vec3 normal;   // outward, unit
  double offset; // plane: normal . x = offset
  bool alive = true;
};

double signed_distance(const Face& f, const Vec3& p) {
  return f.normal.dot(p) - f.offset;
}

Face make_face(const std::vector<Vec3>& pts, int a, int b, int c, const Vec3& interior) {
  Face f{a, b, c, Vec3::Zero(), 0.0, true};
  Vec3 n = (pts[b] - pts[a]).cross(pts[c] - pts[a]);
  double len = n.norm();
  if (len > 0) n /= len;
  if (n.dot(interior - pts[a]) > 0) {  // flip to point away from the interior
    std::swap(f.b, f.c);
    n = -n;
  }
  f.normal = n;
  f.offset = n.dot(pts[a]);
  return f;
}

}  // namespace

HullResult convex_hull_vertices(const std::vector<Vec3>& points) {
  HullResult result;
  const size_t n = points.size();
  if (n < 4) {
    result.degenerate = true;
    return result;
  }

  double diag = 0.0;
  {
    Aabb box{points[0], points[0]};
    for (const auto& p : points) box.expand(p);
    diag = box.extent().norm();
  }
  if (diag <= 0.0) {
    result.degenerate = true;
    return result;
  }
  const double eps = 1e-10 * diag;

  // Initial simplex: spread extremes, then farthest from line, then from plane.
  int i0 = 0, i1 = 0;
  for (size_t i = 1; i < n; ++i) {
    if (points[i].x() < points[i0].x()) i0 = static_cast<int>(i);
    if (points[i].x() > points[i1].x()) i1 = static_cast<int>(i);
  }
  if (i0 == i1 || (points[i1] - points[i0]).norm() < eps) {
    result.degenerate = true;
    return result;
  }
  Vec3 dir = (points[i1] - points[i0]).normalized();
  int i2 = -1;
  double best = eps;
  for (size_t i = 0; i < n; ++i) {
    Vec3 rel = points[i] - points[i0];
    double d = (rel - rel.dot(dir) * dir).norm();
    if (d > best) {
      best = d;
      i2 = static_cast<int>(i);
    }
  }
  if (i2 < 0) {
    result.degenerate = true;
    return result;
  }
  Vec3 plane_n = (points[i1] - points[i0]).cross(points[i2] - points[i0]).normalized();
  int i3 = -1;
  best = eps;
  for (size_t i = 0; i < n; ++i) {
    double d = std::abs(plane_n.dot(points[i] - points[i0]));
    if (d > best) {
      best = d;
      i3 = static_cast<int>(i);
    }
  }
  if (i3 < 0) {
    result.degenerate = true;
    return result;
  }

  Vec3 interior = 0.25 * (points[i0] + points[i1] + points[i2] + points[i3]);
  std::vector<Face> faces;
  faces.push_back(make_face(points, i0, i1, i2, interior));
  faces.push_back(make_face(points, i0, i1, i3, interior));
  faces.push_back(make_face(points, i0, i2, i3, interior));
  faces.push_back(make_face(points, i1, i2, i3, interior));

  std::vector<char> used(n, 0);
  used[i0] = used[i1] = used[i2] = used[i3] = 1;

  std::vector<int> visible;
  for (size_t pi = 0; pi < n; ++pi) {
    if (used[pi]) continue;
    const Vec3& p = points[pi];
    visible.clear();
    for (size_t fi = 0; fi < faces.size(); ++fi) {
      if (faces[fi].alive && signed_distance(faces[fi], p) > eps)
        visible.push_back(static_cast<int>(fi));
    }
    if (visible.empty()) continue;  // inside the current hull

    // Horizon: directed edges of visible faces whose undirected twin lies in
    // a hidden face.
    std::unordered_set<uint64_t> visible_set;
    for (int fi : visible) visible_set.insert(static_cast<uint64_t>(fi));
    auto edge_key = [](int u, int v) {
      uint64_t lo = static_cast<uint32_t>(std::min(u, v));
      uint64_t hi = static_cast<uint32_t>(std::max(u, v));
      return (hi << 32) | lo;
    };
    std::unordered_map<uint64_t, int> edge_visible_count;
    for (int fi : visible) {
      const Face& f = faces[fi];
      edge_visible_count[edge_key(f.a, f.b)]++;
      edge_visible_count[edge_key(f.b, f.c)]++;
      edge_visible_count[edge_key(f.c, f.a)]++;
    }
    std::vector<std::pair<int, int>> horizon;
    for (int fi : visible) {
      const Face& f = faces[fi];
      const std::pair<int, int> edges[3] = {{f.a, f.b}, {f.b, f.c}, {f.c, f.a}};
      for (const auto& [u, v] : edges) {
        if (edge_visible_count[edge_key(u, v)] == 1) horizon.emplace_back(u, v);
      }
    }
    for (int fi : visible) faces[fi].alive = false;
    for (const auto& [u, v] : horizon) {
      // Keep the horizon edge's direction so the new fan stays consistently
      // oriented with the surviving surface.
      Face nf{u, v, static_cast<int>(pi), Vec3::Zero(), 0.0, true};
      Vec3 nrm = (points[v] - points[u]).cross(p - points[u]);
      double len = nrm.norm();
      if (len > 0) nrm /= len;
      if (nrm.dot(interior - points[u]) > 0) nrm = -nrm;  // numeric safety
      nf.normal = nrm;
      nf.offset = nrm.dot(points[u]);
      faces.push_back(nf);
    }
    used[pi] = 1;

    // Compact occasionally to keep the scan cheap.
    if (faces.size() > 64 && faces.size() > 4 * static_cast<size_t>(std::count_if(
                                 faces.begin(), faces.end(),
                                 [](const Face& f) { return f.alive; }))) {
      std::vector<Face> keep;
      keep.reserve(faces.size() / 2);
      for (auto& f : faces)
        if (f.alive) keep.push_back(f);
      faces.swap(keep);
    }
  }

  std::unordered_set<int> verts;
  for (const auto& f : faces) {
    if (!f.alive) continue;
    verts.insert(f.a);
    verts.insert(f.b);
    verts.insert(f.c);
  }
  result.vertices.assign(verts.begin(), verts.end());
  std::sort(result.vertices.begin(), result.vertices.end());
  return result;
}

}  // namespace vantage
