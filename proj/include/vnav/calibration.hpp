#pragma once

#include <array>
#include <string>
#include <vector>

#include "vnav/depth_image.hpp"
#include "vnav/geometry.hpp"

namespace vnav {

// One fiducial marker seen in one image. Corner order follows the marker
// frame: (-s/2, s/2), (s/2, s/2), (s/2, -s/2), (-s/2, -s/2).
struct MarkerObservation {
    std::string image_id;
    int marker_id = 0;
    double marker_size = 0.0; // edge length, meters
    std::array<Vec2, 4> corners{}; // pixel coordinates, sub-pixel

    void validate() const;
};

struct MarkerPose {
    Vec3 rvec = Vec3::Zero();
    Vec3 tvec = Vec3::Zero(); // meters, camera frame; tvec.z > 0
    double reprojection_rms = 0.0; // pixels, per-corner
};

struct CalibrationSample {
    double d_pred = 0.0; // relative inverse depth sampled at the corner
    double z_real = 0.0; // metric corner depth from the marker pose
    bool fallback = false; // nearest-valid neighbor used instead of bilinear
};

struct CalibrationResult {
    double s1 = 1.0; // scale factor
    double s2 = 0.0; // disparity shift, 1/m
    double lambda = 0.0;
    double residual_rms = 0.0;
    double depth_spread_ratio = 1.0; // max(z_real) / min(z_real)
    double condition_number = 1.0; // of A^T A + lambda I
    size_t sample_count = 0;
    std::vector<std::string> warnings;
};

// Marker corners in the marker frame, z = 0 plane, centroid at the origin.
std::array<Vec3, 4> marker_object_points(double marker_size);

// Planar-homography initialization followed by Gauss-Newton refinement of
// the 6-DoF pixel reprojection residual.
MarkerPose estimate_marker_pose(const CameraIntrinsics& intr, const MarkerObservation& obs);

// Camera-frame z of each corner under the pose.
std::array<double, 4> corner_depths(const MarkerPose& pose, double marker_size);

struct DepthSample {
    double value = 0.0;
    bool fallback = false;
};

// Bilinear interpolation over the 4 neighboring pixels; falls back to the
// nearest valid neighbor (flagged) when some are invalid.
DepthSample sample_relative_depth(const DepthImage& img, double u, double v);

struct RidgeSolution {
    double s1 = 0.0;
    double s2 = 0.0;
    double condition_number = 1.0;
    double residual_rms = 0.0;
};

// Closed-form solution of min ||Ax - b||^2 + lambda ||x||^2 for the 2-column
// system; x = (A^T A + lambda I)^-1 A^T b.
RidgeSolution solve_ridge(const Eigen::MatrixX2d& A, const Eigen::VectorXd& b, double lambda);

struct CalibrationImage {
    DepthImage relative; // DepthKind::relative_inverse
    std::vector<MarkerObservation> markers;
};

inline constexpr double kDefaultRidgeLambda = 1e-6;

// Batch calibration: per corner, one row [d_pred, 1] of A and one entry
// 1/z_real of b, then the ridge solve.
CalibrationResult calibrate(const std::vector<CalibrationImage>& images,
                            const CameraIntrinsics& intr,
                            double lambda = kDefaultRidgeLambda);

// Denominator floor below which corrected pixels are masked invalid.
inline constexpr double kCorrectionDenominatorFloor = 1e-6;

// Element-wise D_metric = 1 / (s1 * D_rel + s2); near-zero or negative
// denominators and invalid inputs yield invalid pixels.
DepthImage apply_scale_correction(const DepthImage& relative, double s1, double s2);

} // namespace vnav
