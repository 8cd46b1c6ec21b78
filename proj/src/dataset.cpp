#include "vantage/dataset.hpp"

#include "vantage/serial.hpp"

namespace vantage {

namespace {
constexpr uint64_t kDatasetMagic = 0x5644415430317644ull;  // "VDAT01vD"

void put_pose(BinaryWriter& w, const Pose& pose) {
  const Mat3& r = pose.rotation();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) w.put_f64(r(i, j));
  w.put_f64s(pose.translation().data(), 3);
}

Pose get_pose(BinaryReader& r) {
  Mat3 rot;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) rot(i, j) = r.get_f64();
  Vec3 t;
  r.get_f64s(t.data(), 3);
  return Pose(rot, t);
}

}  // namespace

size_t Dataset::positive_count() const {
  size_t n = 0;
  for (const auto& s : samples) n += (s.label == 1);
  return n;
}

void save_dataset(const Dataset& dataset, const std::filesystem::path& path) {
  atomic_write_file(path, [&](std::ostream& os) {
    BinaryWriter w(os);
    w.put_u64(kDatasetMagic);
    w.put_u32(1);
    w.put_u32(static_cast<uint32_t>(dataset.encoding.bins_u));
    w.put_u32(static_cast<uint32_t>(dataset.encoding.bins_v));
    w.put_u32(static_cast<uint32_t>(dataset.encoding.channels));
    w.put_u32(static_cast<uint32_t>(dataset.encoding.image_width));
    w.put_u32(static_cast<uint32_t>(dataset.encoding.image_height));
    w.put_u64(dataset.samples.size());
    for (const auto& s : dataset.samples) {
      w.put_i64(s.cell_index);
      w.put_i32(s.direction_index);
      w.put_u8(static_cast<uint8_t>(s.label));
      w.put_u32(static_cast<uint32_t>(s.visible_count));
      put_pose(w, s.ground_truth);
      w.put_u8(s.recovered ? 1 : 0);
      if (s.recovered) {
        put_pose(w, *s.recovered);
        w.put_f64(s.error.translation_m);
        w.put_f64(s.error.rotation_deg);
      }
      w.put_u32(static_cast<uint32_t>(s.feature.values.size()));
      w.put_f64s(s.feature.values.data(), s.feature.values.size());
      w.put_u32(static_cast<uint32_t>(s.feature.occupied.size()));
      w.put_bytes(s.feature.occupied.data(), s.feature.occupied.size());
    }
  });
}

Dataset load_dataset(const std::filesystem::path& path) {
  auto is = open_input(path);
  BinaryReader r(is, path.string());
  if (r.get_u64() != kDatasetMagic) throw io_error(path.string() + ": not a dataset file");
  if (r.get_u32() != 1) throw io_error(path.string() + ": unsupported dataset version");
  Dataset dataset;
  dataset.encoding.bins_u = static_cast<int>(r.get_u32());
  dataset.encoding.bins_v = static_cast<int>(r.get_u32());
  dataset.encoding.channels = static_cast<Channels>(r.get_u32());
  dataset.encoding.image_width = static_cast<int>(r.get_u32());
  dataset.encoding.image_height = static_cast<int>(r.get_u32());
  uint64_t n = r.get_u64();
  dataset.samples.resize(n);
  for (uint64_t i = 0; i < n; ++i) {
    LabeledSample& s = dataset.samples[i];
    s.cell_index = r.get_i64();
    s.direction_index = r.get_i32();
    s.label = r.get_u8();
    s.visible_count = static_cast<int>(r.get_u32());
    s.ground_truth = get_pose(r);
    if (r.get_u8()) {
      s.recovered = get_pose(r);
      s.error.translation_m = r.get_f64();
      s.error.rotation_deg = r.get_f64();
    }
    uint32_t vals = r.get_u32();
    if (vals != static_cast<uint32_t>(dataset.encoding.feature_length()))
      throw io_error(path.string() + ": feature length mismatch");
    s.feature.values.resize(vals);
    r.get_f64s(s.feature.values.data(), vals);
    uint32_t bins = r.get_u32();
    s.feature.occupied.resize(bins);
    r.get_bytes(s.feature.occupied.data(), bins);
  }
  return dataset;
}

}  // namespace vantage
