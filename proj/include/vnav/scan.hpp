#pragma once

#include <vector>

#include "vnav/depth_image.hpp"
#include "vnav/geometry.hpp"

namespace vnav {

// Polar binning of the robot-frame plane. Sectors are half-open
// [theta_k, theta_k+1); theta = atan2(y, x), so straight ahead is pi/2.
struct ScanConfig {
    double angle_min = -kPi;
    double angle_max = kPi;
    int num_bins = 720;
    double range_max = 10.0;
    double h_min = 0.05;
    double h_max = 0.45;
    int pixel_stride = 2;

    void validate() const;
    double bin_width() const { return (angle_max - angle_min) / num_bins; }
    double bin_center(int k) const { return angle_min + (k + 0.5) * bin_width(); }
    // Bin holding azimuth theta, or -1 when theta falls outside the span.
    // Full-circle configs wrap theta instead of rejecting it.
    int bin_index(double theta) const;

    // Full 360-degree ring at 0.5-degree resolution.
    static ScanConfig default_ring(double h_max_value);

    bool operator==(const ScanConfig&) const = default;
};

struct VirtualScan {
    std::vector<double> ranges; // num_bins entries, each in (0, range_max]
    ScanConfig config;
};

using ObstacleCloud = std::vector<Vec3>;

// Back-projects every valid pixel on the stride grid into the robot frame.
ObstacleCloud depth_to_cloud(const DepthImage& depth, const CameraIntrinsics& intr,
                             const CameraExtrinsics& ext, int stride);

// Keeps points with h_min < z < h_max (strict on both sides).
ObstacleCloud height_filter(const ObstacleCloud& cloud, double h_min, double h_max);

// Per-sector minimum range; empty sectors read range_max.
VirtualScan project_to_scan(const ObstacleCloud& obstacles, const ScanConfig& cfg);

// Element-wise minimum of scans sharing one config.
VirtualScan merge_scans(const std::vector<VirtualScan>& scans);

// Scale correction, back-projection, height filter and polar binning in
// sequence: relative depth in, virtual scan out.
VirtualScan visual_to_scan(const DepthImage& relative, double s1, double s2,
                           const CameraIntrinsics& intr, const CameraExtrinsics& ext,
                           const ScanConfig& cfg);

// Flags bins whose center azimuth falls inside the camera's horizontal field
// of view (plan view, computed for a level camera). Used to tell genuinely
// observed free space from never-observed sectors.
std::vector<bool> covered_bins(const CameraIntrinsics& intr, const CameraExtrinsics& ext,
                               const ScanConfig& cfg);

} // namespace vnav
