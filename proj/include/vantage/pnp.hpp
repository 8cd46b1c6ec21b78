#pragma once

#include <optional>

#include "vantage/geometry.hpp"
#include "vantage/visibility.hpp"

namespace vantage {

/// A 2D-3D correspondence: observed pixel against a world point.
struct Correspondence {
  Vec2 pixel = Vec2::Zero();
  Vec3 world = Vec3::Zero();
};

/// Direct linear transform for the camera pose from >= 6 correspondences
/// (normalized image coordinates internally; the rotation is projected onto
/// SO(3) and the sign fixed by cheirality). Absent when the system is
/// rank-deficient.
std::optional<Pose> dlt_pose(const PinholeCamera& camera,
                             const std::vector<Correspondence>& points);

/// Gauss-Newton reprojection-error minimization starting from `initial`,
/// at most max_iterations steps.
Pose refine_pose(const PinholeCamera& camera, const std::vector<Correspondence>& points,
                 const Pose& initial, int max_iterations = 20);

/// Mean squared reprojection error; points behind the camera count as a
/// large fixed residual.
double reprojection_rmse(const PinholeCamera& camera,
                         const std::vector<Correspondence>& points, const Pose& pose);

struct RansacResult {
  std::optional<Pose> pose;
  int inliers = 0;
  int iterations_run = 0;
};

/// RANSAC over minimal 6-point DLT hypotheses with adaptive termination,
/// followed by Gauss-Newton refinement on the best inlier set. Deterministic
/// under seed.
RansacResult ransac_pnp(const PinholeCamera& camera,
                        const std::vector<Correspondence>& points, int min_inliers,
                        double inlier_threshold_px, int max_iterations, uint64_t seed);

/// Self-supervision oracle configuration. Defaults follow the finest
/// benchmark tier for the success thresholds.
struct OracleConfig {
  double pixel_noise = 1.0;       // Gaussian sigma, pixels
  double outlier_fraction = 0.2;  // replaced by uniform in-image pixels
  int ransac_iterations = 500;
  double inlier_threshold_px = 2.0;
  int min_correspondences = 6;
  double success_translation_m = 0.05;
  double success_rotation_deg = 0.4;

  void validate() const;
};

struct OracleOutcome {
  std::optional<Pose> recovered;
  PoseError error;  // against the ground truth; meaningful when recovered
  int correspondences = 0;
  int inliers = 0;
  bool success = false;  // recovered && error within the success thresholds
};

/// Attempts localization from a viewpoint's visible landmarks: perturbs the
/// observations with pixel noise, swaps an outlier fraction for uniform
/// random pixels, then runs RANSAC + refinement. Failure (too few
/// correspondences or no consensus) is an absent pose, never an error.
OracleOutcome localize_oracle(const VisibilityRecord& record, const LandmarkCloud& cloud,
                              const PinholeCamera& camera, const Pose& truth,
                              const OracleConfig& config, uint64_t seed);

}  // namespace vantage
