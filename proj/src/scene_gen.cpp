#include "vantage/scene_gen.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <random>
#include <stdexcept>

namespace vantage {

SceneKind scene_kind_from_name(const std::string& name) {
  if (name == "room-box") return SceneKind::room_box;
  if (name == "cluster-field") return SceneKind::cluster_field;
  if (name == "wall-corridor") return SceneKind::wall_corridor;
  throw std::invalid_argument("unknown scene kind '" + name + "'");
}

std::string scene_kind_name(SceneKind kind) {
  switch (kind) {
    case SceneKind::room_box: return "room-box";
    case SceneKind::cluster_field: return "cluster-field";
    case SceneKind::wall_corridor: return "wall-corridor";
  }
  throw std::logic_error("bad scene kind");
}

void SceneSpec::validate() const {
  if (landmark_count < 4) throw std::invalid_argument("scene needs >= 4 landmarks");
  if ((extent.array() <= 0.0).any())
    throw std::invalid_argument("scene extent must be positive");
  if (cluster_count < 1) throw std::invalid_argument("cluster count must be >= 1");
  if (!(cluster_fraction >= 0.0 && cluster_fraction <= 1.0))
    throw std::invalid_argument("cluster fraction must lie in [0, 1]");
  if (!(cluster_sigma > 0.0)) throw std::invalid_argument("cluster sigma must be > 0");
}

namespace {

// Face parameterization of the axis-aligned box [-h, h]: face index f in
// 0..5 covers -x,+x,-y,+y,-z,+z. Returns the world point of in-face
// coordinates (a, b) in [0,1]^2 pushed `depth` inward along the face normal.
Vec3 face_point(const Vec3& h, int f, double a, double b, double depth) {
  int axis = f / 2;
  double sign = (f % 2 == 0) ? -1.0 : 1.0;
  int u = (axis + 1) % 3, v = (axis + 2) % 3;
  Vec3 p;
  p[axis] = sign * (h[axis] - depth);
  p[u] = (2.0 * a - 1.0) * h[u];
  p[v] = (2.0 * b - 1.0) * h[v];
  return p;
}

std::vector<Vec3> shell_samples(const Vec3& h, double spacing) {
  std::vector<Vec3> out;
  for (int f = 0; f < 6; ++f) {
    int axis = f / 2;
    int u = (axis + 1) % 3, v = (axis + 2) % 3;
    int nu = std::max(2, static_cast<int>(std::ceil(2.0 * h[u] / spacing)) + 1);
    int nv = std::max(2, static_cast<int>(std::ceil(2.0 * h[v] / spacing)) + 1);
    for (int i = 0; i < nu; ++i)
      for (int j = 0; j < nv; ++j)
        out.push_back(face_point(h, f, i / double(nu - 1), j / double(nv - 1), 0.0));
  }
  return out;
}

GeneratedScene make_room_box(const SceneSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec3 h = 0.5 * spec.extent;

  // Uneven per-face density; floor and ceiling carry little texture.
  std::array<double, 6> weight;
  double total = 0.0;
  for (int f = 0; f < 6; ++f) {
    double w = 0.05 + std::pow(uni(rng), 2.0);
    if (f >= 4) w *= 0.15;
    weight[f] = w;
    total += w;
  }
  for (auto& w : weight) w /= total;

  std::discrete_distribution<int> face_dist(weight.begin(), weight.end());

  struct Patch {
    int face;
    double a, b;
  };
  std::vector<Patch> patches(spec.cluster_count);
  for (auto& patch : patches)
    patch = {face_dist(rng), 0.15 + 0.7 * uni(rng), 0.15 + 0.7 * uni(rng)};

  std::vector<Landmark> landmarks;
  landmarks.reserve(spec.landmark_count);
  int n_clustered = static_cast<int>(std::lround(spec.cluster_fraction * spec.landmark_count));
  for (int i = 0; i < spec.landmark_count; ++i) {
    int face;
    double a, b;
    if (i < n_clustered) {
      const Patch& patch = patches[i % patches.size()];
      face = patch.face;
      int axis = face / 2;
      int u = (axis + 1) % 3, v = (axis + 2) % 3;
      a = std::clamp(patch.a + gauss(rng) * spec.cluster_sigma / (2.0 * h[u]), 0.0, 1.0);
      b = std::clamp(patch.b + gauss(rng) * spec.cluster_sigma / (2.0 * h[v]), 0.0, 1.0);
    } else {
      face = face_dist(rng);
      a = uni(rng);
      b = uni(rng);
    }
    double depth = std::clamp(std::abs(gauss(rng)) * 0.03, 0.005, 0.12);
    landmarks.push_back({i, face_point(h, face, a, b, depth)});
  }

  GeneratedScene scene{LandmarkCloud(std::move(landmarks)), shell_samples(h, 0.12), 0.15};
  return scene;
}

GeneratedScene make_cluster_field(const SceneSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec3 h = 0.5 * spec.extent;

  struct Blob {
    Vec3 center;
    double weight;
  };
  std::vector<Blob> blobs(spec.cluster_count);
  double total = 0.0;
  for (auto& blob : blobs) {
    blob.center = Vec3((uni(rng) - 0.5) * 1.6 * h.x(), (uni(rng) - 0.5) * 1.6 * h.y(),
                       (uni(rng) - 0.5) * 1.6 * h.z());
    blob.weight = std::exp(1.5 * gauss(rng));
    total += blob.weight;
  }
  std::vector<double> weights;
  for (auto& blob : blobs) weights.push_back(blob.weight / total);
  std::discrete_distribution<int> blob_dist(weights.begin(), weights.end());

  std::vector<Landmark> landmarks;
  landmarks.reserve(spec.landmark_count);
  for (int i = 0; i < spec.landmark_count; ++i) {
    Vec3 p;
    if (uni(rng) < spec.cluster_fraction) {
      const Blob& blob = blobs[blob_dist(rng)];
      p = blob.center + spec.cluster_sigma * Vec3(gauss(rng), gauss(rng), gauss(rng));
    } else {
      p = Vec3((uni(rng) - 0.5) * 2.0 * h.x(), (uni(rng) - 0.5) * 2.0 * h.y(),
               (uni(rng) - 0.5) * 2.0 * h.z());
    }
    p = p.cwiseMax(-h).cwiseMin(h);
    landmarks.push_back({i, p});
  }
  return {LandmarkCloud(std::move(landmarks)), {}, 0.15};
}

GeneratedScene make_wall_corridor(const SceneSpec& spec) {
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Vec3 h = 0.5 * spec.extent;

  // Dividing wall at x = 0 spanning the full cross-section, with one round
  // opening whose center is seeded inside the middle half.
  double gy = (uni(rng) - 0.5) * h.y();
  double gz = (uni(rng) - 0.5) * h.z();
  double gap = spec.gap_radius;

  std::vector<Vec3> dense = shell_samples(h, 0.12);
  const double spacing = 0.1;
  int ny = static_cast<int>(std::ceil(2.0 * h.y() / spacing)) + 1;
  int nz = static_cast<int>(std::ceil(2.0 * h.z() / spacing)) + 1;
  for (int i = 0; i < ny; ++i)
    for (int j = 0; j < nz; ++j) {
      double y = -h.y() + 2.0 * h.y() * i / (ny - 1);
      double z = -h.z() + 2.0 * h.z() * j / (nz - 1);
      if (Vec2(y - gy, z - gz).norm() <= gap) continue;
      dense.push_back({-0.06, y, z});
      dense.push_back({0.06, y, z});
    }

  // Landmarks: most on the outer shell, some on the dividing wall.
  std::vector<Landmark> landmarks;
  landmarks.reserve(spec.landmark_count);
  std::uniform_int_distribution<int> face(0, 5);
  for (int i = 0; i < spec.landmark_count; ++i) {
    if (uni(rng) < 0.25) {
      double y = (uni(rng) - 0.5) * 2.0 * h.y();
      double z = (uni(rng) - 0.5) * 2.0 * h.z();
      if (Vec2(y - gy, z - gz).norm() <= gap) {
        --i;
        continue;
      }
      double x = (uni(rng) < 0.5 ? -1 : 1) * std::clamp(0.06 + std::abs(gauss(rng)) * 0.02, 0.06, 0.12);
      landmarks.push_back({static_cast<int64_t>(landmarks.size()), Vec3(x, y, z)});
    } else {
      double depth = std::clamp(std::abs(gauss(rng)) * 0.03, 0.005, 0.12);
      landmarks.push_back({static_cast<int64_t>(landmarks.size()),
                           face_point(h, face(rng), uni(rng), uni(rng), depth)});
    }
  }
  return {LandmarkCloud(std::move(landmarks)), std::move(dense), 0.15};
}

}  // namespace

GeneratedScene generate_scene(const SceneSpec& spec) {
  spec.validate();
  switch (spec.kind) {
    case SceneKind::room_box: return make_room_box(spec);
    case SceneKind::cluster_field: return make_cluster_field(spec);
    case SceneKind::wall_corridor: return make_wall_corridor(spec);
  }
  throw std::logic_error("bad scene kind");
}

}  // namespace vantage
