#include "vantage/model_bundle.hpp"

#include <stdexcept>

#include "vantage/serial.hpp"

namespace vantage {

namespace {
constexpr uint64_t kBundleMagic = 0x564d444c30317642ull;  // "VMDL01vB"

void put_matrix(BinaryWriter& w, const Eigen::MatrixXd& m) {
  w.put_u32(static_cast<uint32_t>(m.rows()));
  w.put_u32(static_cast<uint32_t>(m.cols()));
  // row-major blob
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) w.put_f64(m(r, c));
}

Eigen::MatrixXd get_matrix(BinaryReader& r) {
  uint32_t rows = r.get_u32();
  uint32_t cols = r.get_u32();
  if (static_cast<uint64_t>(rows) * cols > (1ull << 28))
    throw io_error(r.name() + ": matrix too large");
  Eigen::MatrixXd m(rows, cols);
  for (uint32_t i = 0; i < rows; ++i)
    for (uint32_t j = 0; j < cols; ++j) m(i, j) = r.get_f64();
  return m;
}

void put_vector(BinaryWriter& w, const std::vector<double>& v) {
  w.put_u32(static_cast<uint32_t>(v.size()));
  w.put_f64s(v.data(), v.size());
}

std::vector<double> get_vector(BinaryReader& r) {
  uint32_t n = r.get_u32();
  if (n > (1u << 24)) throw io_error(r.name() + ": vector too large");
  std::vector<double> v(n);
  r.get_f64s(v.data(), n);
  return v;
}

}  // namespace

void ModelBundle::validate() const {
  encoding.validate();
  if (params.input_size() != encoding.feature_length())
    throw std::invalid_argument("bundle layer-1 input size " +
                                std::to_string(params.input_size()) +
                                " does not match encoding length " +
                                std::to_string(encoding.feature_length()));
  if (static_cast<int>(stats.mean.size()) != channel_count(encoding.channels))
    throw std::invalid_argument("bundle stats do not match encoding channels");
  if (!params.all_finite())
    throw std::invalid_argument("bundle weights contain non-finite entries");
}

double score_viewpoint(const ModelBundle& bundle, const VisibilityRecord& record) {
  EncodedFeature feature = encode(record, bundle.encoding);
  EncodedFeature standardized = standardize(feature, bundle.encoding, bundle.stats);
  Eigen::Map<const Eigen::VectorXd> x(standardized.values.data(),
                                      static_cast<Eigen::Index>(standardized.values.size()));
  return forward_eval(bundle.params, x);
}

Eigen::VectorXd score_features(const ModelBundle& bundle,
                               const std::vector<EncodedFeature>& features) {
  Eigen::MatrixXd inputs(bundle.params.input_size(),
                         static_cast<Eigen::Index>(features.size()));
  for (size_t i = 0; i < features.size(); ++i) {
    EncodedFeature s = standardize(features[i], bundle.encoding, bundle.stats);
    inputs.col(static_cast<Eigen::Index>(i)) =
        Eigen::Map<const Eigen::VectorXd>(s.values.data(),
                                          static_cast<Eigen::Index>(s.values.size()));
  }
  return forward_eval_batch(bundle.params, inputs);
}

void save_bundle(const ModelBundle& bundle, const std::filesystem::path& path) {
  atomic_write_file(path, [&](std::ostream& os) {
    BinaryWriter w(os);
    w.put_u64(kBundleMagic);
    w.put_u32(1);
    w.put_u32(static_cast<uint32_t>(bundle.encoding.bins_u));
    w.put_u32(static_cast<uint32_t>(bundle.encoding.bins_v));
    w.put_u32(static_cast<uint32_t>(bundle.encoding.channels));
    w.put_u32(static_cast<uint32_t>(bundle.encoding.image_width));
    w.put_u32(static_cast<uint32_t>(bundle.encoding.image_height));
    put_vector(w, bundle.stats.mean);
    put_vector(w, bundle.stats.stddev);
    put_matrix(w, bundle.params.w1);
    put_matrix(w, bundle.params.w2);
    put_matrix(w, bundle.params.w3);
    put_vector(w, {bundle.params.b1.data(),
                   bundle.params.b1.data() + bundle.params.b1.size()});
    put_vector(w, {bundle.params.b2.data(),
                   bundle.params.b2.data() + bundle.params.b2.size()});
    put_vector(w, {bundle.params.b3.data(),
                   bundle.params.b3.data() + bundle.params.b3.size()});
    w.put_u64(bundle.seed);
    w.put_u32(static_cast<uint32_t>(bundle.epochs));
    w.put_f64(bundle.final_loss);
    w.put_f64(bundle.positive_weight);
    w.put_f64(bundle.negative_weight);
  });
}

ModelBundle load_bundle(const std::filesystem::path& path) {
  auto is = open_input(path);
  BinaryReader r(is, path.string());
  if (r.get_u64() != kBundleMagic) throw io_error(path.string() + ": not a model bundle");
  if (r.get_u32() != 1) throw io_error(path.string() + ": unsupported bundle version");
  ModelBundle bundle;
  bundle.encoding.bins_u = static_cast<int>(r.get_u32());
  bundle.encoding.bins_v = static_cast<int>(r.get_u32());
  bundle.encoding.channels = static_cast<Channels>(r.get_u32());
  bundle.encoding.image_width = static_cast<int>(r.get_u32());
  bundle.encoding.image_height = static_cast<int>(r.get_u32());
  bundle.stats.mean = get_vector(r);
  bundle.stats.stddev = get_vector(r);
  bundle.params.w1 = get_matrix(r);
  bundle.params.w2 = get_matrix(r);
  bundle.params.w3 = get_matrix(r);
  auto b1 = get_vector(r);
  auto b2 = get_vector(r);
  auto b3 = get_vector(r);
  bundle.params.b1 = Eigen::Map<const Eigen::VectorXd>(b1.data(), b1.size());
  bundle.params.b2 = Eigen::Map<const Eigen::VectorXd>(b2.data(), b2.size());
  bundle.params.b3 = Eigen::Map<const Eigen::VectorXd>(b3.data(), b3.size());
  bundle.seed = r.get_u64();
  bundle.epochs = static_cast<int>(r.get_u32());
  bundle.final_loss = r.get_f64();
  bundle.positive_weight = r.get_f64();
  bundle.negative_weight = r.get_f64();
  bundle.validate();
  return bundle;
}

}  // namespace vantage
