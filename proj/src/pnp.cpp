#include "vantage/pnp.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Geometry>
#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <stdexcept>

namespace vantage {

namespace {

// Camera-from-world parameterization used internally by the solvers.
struct Extrinsic {
  Mat3 r = Mat3::Identity();
  Vec3 t = Vec3::Zero();

  Vec3 apply(const Vec3& p) const { return r * p + t; }
  static Extrinsic from_pose(const Pose& pose) {
    Mat3 rcw = pose.rotation().transpose();
    return {rcw, -(rcw * pose.translation())};
  }
  Pose to_pose() const { return Pose(r.transpose(), -(r.transpose() * t)); }
};

constexpr double kBehindCameraResidual = 1e6;

double point_error_px(const PinholeCamera& camera, const Extrinsic& ext,
                      const Correspondence& c) {
  Vec3 pc = ext.apply(c.world);
  if (pc.z() <= 1e-9) return kBehindCameraResidual;
  Vec2 px(camera.fx * pc.x() / pc.z() + camera.cx,
          camera.fy * pc.y() / pc.z() + camera.cy);
  return (px - c.pixel).norm();
}

}  // namespace

std::optional<Pose> dlt_pose(const PinholeCamera& camera,
                             const std::vector<Correspondence>& points) {
  const size_t n = points.size();
  if (n < 6) return std::nullopt;

  // Hartley normalization of the world points for conditioning.
  Vec3 centroid = Vec3::Zero();
  for (const auto& c : points) centroid += c.world;
  centroid /= static_cast<double>(n);
  double mean_dist = 0.0;
  for (const auto& c : points) mean_dist += (c.world - centroid).norm();
  mean_dist /= static_cast<double>(n);
  if (!(mean_dist > 1e-12)) return std::nullopt;
  double scale = std::sqrt(3.0) / mean_dist;

  Eigen::MatrixXd a(2 * n, 12);
  for (size_t i = 0; i < n; ++i) {
    Vec3 x = scale * (points[i].world - centroid);
    double xn = (points[i].pixel.x() - camera.cx) / camera.fx;
    double yn = (points[i].pixel.y() - camera.cy) / camera.fy;
    Eigen::RowVector4d xh(x.x(), x.y(), x.z(), 1.0);
    a.row(2 * i).setZero();
    a.row(2 * i + 1).setZero();
    a.block<1, 4>(2 * i, 0) = xh;
    a.block<1, 4>(2 * i, 8) = -xn * xh;
    a.block<1, 4>(2 * i + 1, 4) = xh;
    a.block<1, 4>(2 * i + 1, 8) = -yn * xh;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinV);
  Eigen::VectorXd p = svd.matrixV().col(11);
  Eigen::Matrix<double, 3, 4> m;
  m.row(0) = p.segment<4>(0);
  m.row(1) = p.segment<4>(4);
  m.row(2) = p.segment<4>(8);

  // Undo the normalization: X_norm = scale * (X - centroid).
  Eigen::Matrix4d t_norm = Eigen::Matrix4d::Identity();
  t_norm.block<3, 3>(0, 0) = scale * Mat3::Identity();
  t_norm.block<3, 1>(0, 3) = -scale * centroid;
  m = m * t_norm;

  // Fix the global sign so the majority of the sample lies in front.
  int front = 0;
  for (const auto& c : points) {
    double z = m.row(2).head<3>().dot(c.world) + m(2, 3);
    front += z > 0 ? 1 : -1;
  }
  if (front < 0) m = -m;

  Mat3 a3 = m.block<3, 3>(0, 0);
  Eigen::JacobiSVD<Mat3> rsvd(a3, Eigen::ComputeFullU | Eigen::ComputeFullV);
  double sigma_sum = rsvd.singularValues().sum();
  if (!(sigma_sum > 1e-15) || !a3.allFinite()) return std::nullopt;
  Mat3 uv = rsvd.matrixU() * rsvd.matrixV().transpose();
  Mat3 rot = rsvd.matrixU() *
             Eigen::Vector3d(1.0, 1.0, uv.determinant() < 0 ? -1.0 : 1.0).asDiagonal() *
             rsvd.matrixV().transpose();
  double s = 3.0 / sigma_sum;
  Vec3 tcw = s * m.col(3);
  if (!rot.allFinite() || !tcw.allFinite()) return std::nullopt;
  return Extrinsic{rot, tcw}.to_pose();
}

double reprojection_rmse(const PinholeCamera& camera,
                         const std::vector<Correspondence>& points, const Pose& pose) {
  if (points.empty()) return 0.0;
  Extrinsic ext = Extrinsic::from_pose(pose);
  double sum = 0.0;
  for (const auto& c : points) {
    double e = point_error_px(camera, ext, c);
    sum += e * e;
  }
  return std::sqrt(sum / static_cast<double>(points.size()));
}

Pose refine_pose(const PinholeCamera& camera, const std::vector<Correspondence>& points,
                 const Pose& initial, int max_iterations) {
  Extrinsic ext = Extrinsic::from_pose(initial);
  Extrinsic best = ext;
  double best_err = reprojection_rmse(camera, points, initial);

  for (int iter = 0; iter < max_iterations; ++iter) {
    Eigen::Matrix<double, 6, 6> h = Eigen::Matrix<double, 6, 6>::Zero();
    Eigen::Matrix<double, 6, 1> g = Eigen::Matrix<double, 6, 1>::Zero();
    size_t used = 0;
    for (const auto& c : points) {
      Vec3 pc = ext.apply(c.world);
      if (pc.z() <= 1e-9) continue;
      double iz = 1.0 / pc.z();
      Vec2 px(camera.fx * pc.x() * iz + camera.cx, camera.fy * pc.y() * iz + camera.cy);
      Vec2 r = px - c.pixel;
      Eigen::Matrix<double, 2, 3> du;
      du << camera.fx * iz, 0.0, -camera.fx * pc.x() * iz * iz,
            0.0, camera.fy * iz, -camera.fy * pc.y() * iz * iz;
      Eigen::Matrix<double, 3, 6> dp;
      dp.block<3, 3>(0, 0) << 0, pc.z(), -pc.y(),
                              -pc.z(), 0, pc.x(),
                              pc.y(), -pc.x(), 0;  // -[p_c]^ for left perturbation
      dp.block<3, 3>(0, 3) = Mat3::Identity();
      Eigen::Matrix<double, 2, 6> j = du * dp;
      h += j.transpose() * j;
      g += j.transpose() * r;
      ++used;
    }
    if (used < 3) break;
    h.diagonal().array() += 1e-12 * h.trace();
    Eigen::Matrix<double, 6, 1> delta = h.ldlt().solve(-g);
    if (!delta.allFinite()) break;

    Vec3 omega = delta.head<3>();
    double angle = omega.norm();
    Mat3 drot = angle < 1e-15 ? Mat3::Identity() : axis_angle_rotation(omega, angle);
    ext.r = drot * ext.r;
    ext.t += delta.tail<3>();

    double err = 0.0;
    for (const auto& c : points) {
      double e = point_error_px(camera, ext, c);
      err += e * e;
    }
    err = std::sqrt(err / static_cast<double>(points.size()));
    if (err < best_err) {
      best_err = err;
      best = ext;
    }
    if (delta.norm() < 1e-14) break;
  }
  return best.to_pose();
}

RansacResult ransac_pnp(const PinholeCamera& camera,
                        const std::vector<Correspondence>& points, int min_inliers,
                        double inlier_threshold_px, int max_iterations, uint64_t seed) {
  RansacResult result;
  const size_t n = points.size();
  min_inliers = std::max(min_inliers, 6);
  if (n < static_cast<size_t>(min_inliers)) return result;

  std::mt19937_64 rng(seed);
  std::vector<size_t> indices(n);
  std::iota(indices.begin(), indices.end(), size_t{0});

  std::vector<Correspondence> minimal(6);
  std::vector<char> best_mask;
  int best_count = 0;
  Pose best_pose;
  int adaptive_limit = max_iterations;

  auto count_inliers = [&](const Pose& pose) {
    Extrinsic ext = Extrinsic::from_pose(pose);
    int count = 0;
    for (const auto& c : points)
      if (point_error_px(camera, ext, c) < inlier_threshold_px) ++count;
    return count;
  };

  int iter = 0;
  for (; iter < max_iterations && iter < adaptive_limit; ++iter) {
    // Partial Fisher-Yates draw of 6 distinct indices.
    for (int k = 0; k < 6; ++k) {
      std::uniform_int_distribution<size_t> pick(k, n - 1);
      std::swap(indices[k], indices[pick(rng)]);
      minimal[k] = points[indices[k]];
    }
    auto hyp = dlt_pose(camera, minimal);
    if (!hyp) continue;
    int count = count_inliers(*hyp);
    if (count <= best_count) continue;

    // Local optimization: minimal DLT hypotheses amplify pixel noise, so a
    // short refinement over the provisional consensus set recovers the
    // inliers the raw hypothesis misses.
    Pose candidate = *hyp;
    if (count >= 4) {
      Extrinsic ext = Extrinsic::from_pose(candidate);
      std::vector<Correspondence> provisional;
      provisional.reserve(count);
      for (const auto& c : points)
        if (point_error_px(camera, ext, c) < inlier_threshold_px)
          provisional.push_back(c);
      Pose optimized = refine_pose(camera, provisional, candidate, 10);
      int opt_count = count_inliers(optimized);
      if (opt_count > count) {
        candidate = optimized;
        count = opt_count;
      }
    }
    if (count > best_count) {
      best_count = count;
      best_pose = candidate;
      // Standard adaptive termination at 99.9% confidence.
      double w = static_cast<double>(count) / static_cast<double>(n);
      double denom = std::log(1.0 - std::min(0.999999, std::pow(w, 6)));
      if (denom < 0.0)
        adaptive_limit = static_cast<int>(
            std::min<double>(max_iterations, std::ceil(std::log(1e-3) / denom)));
    }
  }
  result.iterations_run = iter;
  if (best_count < min_inliers) return result;

  // Refine, re-collect inliers against the refined pose, and refine again;
  // minimal-sample hypotheses under pixel noise start with a depleted
  // consensus set, and one re-collection round recovers most of it.
  Pose refined = best_pose;
  int final_count = best_count;
  for (int round = 0; round < 3; ++round) {
    Extrinsic ext = Extrinsic::from_pose(refined);
    std::vector<Correspondence> inliers;
    inliers.reserve(points.size());
    for (const auto& c : points)
      if (point_error_px(camera, ext, c) < inlier_threshold_px) inliers.push_back(c);
    if (static_cast<int>(inliers.size()) < min_inliers) break;
    refined = refine_pose(camera, inliers, refined);
    Extrinsic rext = Extrinsic::from_pose(refined);
    int count = 0;
    for (const auto& c : points)
      if (point_error_px(camera, rext, c) < inlier_threshold_px) ++count;
    bool converged = count == final_count;
    final_count = count;
    if (converged) break;
  }

  result.pose = refined;
  result.inliers = final_count;
  return result;
}

void OracleConfig::validate() const {
  if (pixel_noise < 0.0) throw std::invalid_argument("pixel noise must be >= 0");
  if (!(outlier_fraction >= 0.0 && outlier_fraction < 1.0))
    throw std::invalid_argument("outlier fraction must lie in [0, 1)");
  if (ransac_iterations < 1) throw std::invalid_argument("ransac iterations must be >= 1");
  if (!(inlier_threshold_px > 0.0))
    throw std::invalid_argument("inlier threshold must be > 0");
  if (min_correspondences < 6)
    throw std::invalid_argument("min correspondences must be >= 6");
  if (!(success_translation_m > 0.0) || !(success_rotation_deg > 0.0))
    throw std::invalid_argument("success thresholds must be > 0");
}

OracleOutcome localize_oracle(const VisibilityRecord& record, const LandmarkCloud& cloud,
                              const PinholeCamera& camera, const Pose& truth,
                              const OracleConfig& config, uint64_t seed) {
  (void)cloud;  // world points reconstructed from the record's camera-frame data
  config.validate();
  OracleOutcome outcome;
  outcome.correspondences = static_cast<int>(record.visible.size());
  if (record.visible.size() < static_cast<size_t>(config.min_correspondences))
    return outcome;

  std::mt19937_64 rng(seed);
  std::vector<Correspondence> points;
  points.reserve(record.visible.size());
  for (const auto& obs : record.visible) {
    Correspondence c;
    c.world = truth.camera_to_world(obs.point_cam);
    c.pixel = obs.pixel;
    if (config.pixel_noise > 0.0) {
      std::normal_distribution<double> noise(0.0, config.pixel_noise);
      c.pixel.x() += noise(rng);
      c.pixel.y() += noise(rng);
    }
    points.push_back(c);
  }

  // Swap a deterministic count of observations for uniform in-image pixels.
  size_t n_outliers = static_cast<size_t>(
      std::lround(config.outlier_fraction * static_cast<double>(points.size())));
  if (n_outliers > 0) {
    std::vector<size_t> order(points.size());
    std::iota(order.begin(), order.end(), size_t{0});
    for (size_t k = 0; k < n_outliers; ++k) {
      std::uniform_int_distribution<size_t> pick(k, order.size() - 1);
      std::swap(order[k], order[pick(rng)]);
      std::uniform_real_distribution<double> du(0.0, camera.width);
      std::uniform_real_distribution<double> dv(0.0, camera.height);
      points[order[k]].pixel = Vec2(du(rng), dv(rng));
    }
  }

  // The configured minimum gates the input size above; the consensus bar
  // itself is 6 inliers.
  std::uniform_int_distribution<uint64_t> reseed;
  RansacResult ransac = ransac_pnp(camera, points, 6, config.inlier_threshold_px,
                                   config.ransac_iterations, reseed(rng));
  outcome.inliers = ransac.inliers;
  if (!ransac.pose) return outcome;

  outcome.recovered = ransac.pose;
  outcome.error = pose_error(*ransac.pose, truth);
  outcome.success = outcome.error.translation_m <= config.success_translation_m &&
                    outcome.error.rotation_deg <= config.success_rotation_deg;
  return outcome;
}

}  // namespace vantage
