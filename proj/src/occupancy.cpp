#include "vantage/occupancy.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "vantage/serial.hpp"

namespace vantage {

namespace {
constexpr uint64_t kOccMagic = 0x564f43433031764full;  // "VOCC01vO"
}

OccupancyMap::OccupancyMap(double cell_edge) : cell_edge_(cell_edge) {
  if (!(cell_edge > 0.0)) throw std::invalid_argument("cell edge must be positive");
}

std::vector<Eigen::Vector3i> OccupancyMap::sorted_voxels() const {
  std::vector<int64_t> keys(cells_.begin(), cells_.end());
  std::sort(keys.begin(), keys.end());
  std::vector<Eigen::Vector3i> out;
  out.reserve(keys.size());
  for (int64_t k : keys) out.push_back(unkey(k));
  return out;
}

bool OccupancyMap::segment_hits_occupied(const Vec3& a, const Vec3& b,
                                         const Eigen::Vector3i* exempt) const {
  if (cells_.empty()) return false;
  Eigen::Vector3i cur = voxel_of(a);
  Eigen::Vector3i end = voxel_of(b);
  Vec3 d = b - a;
  double seg_len = d.norm();

  auto blocked = [&](const Eigen::Vector3i& v) {
    if (exempt && v == *exempt) return false;
    return occupied(v);
  };

  if (blocked(cur)) return true;
  if (seg_len == 0.0) return false;

  Eigen::Vector3i step;
  Vec3 t_max, t_delta;
  for (int i = 0; i < 3; ++i) {
    if (d[i] > 0) {
      step[i] = 1;
      double boundary = (cur[i] + 1) * cell_edge_;
      t_max[i] = (boundary - a[i]) / d[i];
      t_delta[i] = cell_edge_ / d[i];
    } else if (d[i] < 0) {
      step[i] = -1;
      double boundary = cur[i] * cell_edge_;
      t_max[i] = (boundary - a[i]) / d[i];
      t_delta[i] = -cell_edge_ / d[i];
    } else {
      step[i] = 0;
      t_max[i] = std::numeric_limits<double>::infinity();
      t_delta[i] = std::numeric_limits<double>::infinity();
    }
  }

  while (cur != end) {
    int axis = 0;
    if (t_max[1] < t_max[axis]) axis = 1;
    if (t_max[2] < t_max[axis]) axis = 2;
    if (t_max[axis] > 1.0) break;  // next boundary lies past b
    cur[axis] += step[axis];
    t_max[axis] += t_delta[axis];
    if (blocked(cur)) return true;
  }
  // b's own voxel always touches the segment; re-check it in case rounding
  // ended the walk one boundary early.
  return cur != end && blocked(end);
}

OccupancyMap OccupancyMap::inflated(double radius) const {
  if (radius <= 0.0) return *this;
  OccupancyMap out(cell_edge_);
  int r = static_cast<int>(std::ceil(radius / cell_edge_)) + 1;
  double reach = radius + 0.5 * cell_edge_ * std::sqrt(3.0);
  std::vector<Eigen::Vector3i> offsets;
  for (int x = -r; x <= r; ++x)
    for (int y = -r; y <= r; ++y)
      for (int z = -r; z <= r; ++z) {
        double dist = cell_edge_ * Vec3(x, y, z).norm();
        if (dist <= reach) offsets.push_back({x, y, z});
      }
  for (const auto& v : sorted_voxels())
    for (const auto& o : offsets) out.mark_voxel(v + o);
  return out;
}

OccupancyMap build_occupancy(const std::vector<Vec3>& points, double cell_edge) {
  if (points.empty()) throw std::invalid_argument("occupancy input is empty");
  OccupancyMap map(cell_edge);
  for (const auto& p : points) map.mark(p);
  return map;
}

OccupancyMap build_occupancy(const LandmarkCloud& cloud, double cell_edge) {
  OccupancyMap map(cell_edge);
  if (cloud.empty()) throw std::invalid_argument("occupancy input is empty");
  for (const auto& lm : cloud.landmarks()) map.mark(lm.position);
  return map;
}

void save_occupancy(const OccupancyMap& map, const std::filesystem::path& path) {
  atomic_write_file(path, [&](std::ostream& os) {
    BinaryWriter w(os);
    w.put_u64(kOccMagic);
    w.put_u32(1);
    w.put_f64(map.cell_edge());
    auto voxels = map.sorted_voxels();
    w.put_u64(voxels.size());
    for (const auto& v : voxels) {
      w.put_i32(v.x());
      w.put_i32(v.y());
      w.put_i32(v.z());
    }
  });
}

OccupancyMap load_occupancy(const std::filesystem::path& path) {
  auto is = open_input(path);
  BinaryReader r(is, path.string());
  if (r.get_u64() != kOccMagic) throw io_error(path.string() + ": not an occupancy file");
  if (r.get_u32() != 1) throw io_error(path.string() + ": unsupported occupancy version");
  OccupancyMap map(r.get_f64());
  uint64_t n = r.get_u64();
  for (uint64_t i = 0; i < n; ++i) {
    int32_t x = r.get_i32();
    int32_t y = r.get_i32();
    int32_t z = r.get_i32();
    map.mark_voxel({x, y, z});
  }
  return map;
}

}  // namespace vantage
