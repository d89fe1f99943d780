#include "vnav/scan.hpp"

#include <algorithm>
#include <cmath>

#include "vnav/calibration.hpp"

namespace vnav {

void ScanConfig::validate() const {
    if (!(angle_min < angle_max))
        raise(ErrorKind::argument, "scan config: angle_min must be < angle_max");
    if (num_bins < 1) raise(ErrorKind::argument, "scan config: num_bins must be >= 1");
    if (!(range_max > 0.0)) raise(ErrorKind::argument, "scan config: range_max must be positive");
    if (!(h_min >= 0.0) || !(h_min < h_max))
        raise(ErrorKind::argument, "scan config: need 0 <= h_min < h_max");
    if (pixel_stride < 1) raise(ErrorKind::argument, "scan config: pixel_stride must be >= 1");
}

int ScanConfig::bin_index(double theta) const {
    const double span = angle_max - angle_min;
    double t = theta;
    if (std::abs(span - 2.0 * kPi) < 1e-12) {
        t = std::fmod(t - angle_min, 2.0 * kPi);
        if (t < 0.0) t += 2.0 * kPi;
        t += angle_min;
    }
    if (t < angle_min || t >= angle_max) return -1;
    const int k = static_cast<int>((t - angle_min) / bin_width());
    return std::min(k, num_bins - 1);
}

ScanConfig ScanConfig::default_ring(double h_max_value) {
    ScanConfig cfg;
    cfg.h_max = h_max_value;
    return cfg;
}

ObstacleCloud depth_to_cloud(const DepthImage& depth, const CameraIntrinsics& intr,
                             const CameraExtrinsics& ext, int stride) {
    if (depth.kind != DepthKind::metric)
        raise(ErrorKind::argument, "depth_to_cloud: depth image must be metric");
    if (stride < 1) raise(ErrorKind::argument, "depth_to_cloud: stride must be >= 1");
    intr.validate();
    ext.validate();
    if (depth.width != intr.width || depth.height != intr.height)
        raise(ErrorKind::config_mismatch, "depth_to_cloud: image size does not match intrinsics");

    ObstacleCloud cloud;
    cloud.reserve((depth.pixel_count() / static_cast<size_t>(stride)) / stride + 1);
    for (int v = 0; v < depth.height; v += stride) {
        for (int u = 0; u < depth.width; u += stride) {
            const double z = depth.at(u, v);
            if (!std::isfinite(z) || z <= 0.0) continue;
            const Vec3 p_cam = backproject_pixel(intr, u, v, z);
            cloud.push_back(cam_to_robot(ext, p_cam));
        }
    }
    return cloud;
}

ObstacleCloud height_filter(const ObstacleCloud& cloud, double h_min, double h_max) {
    ObstacleCloud out;
    out.reserve(cloud.size());
    for (const Vec3& p : cloud)
        if (p.z() > h_min && p.z() < h_max) out.push_back(p);
    return out;
}

VirtualScan project_to_scan(const ObstacleCloud& obstacles, const ScanConfig& cfg) {
    cfg.validate();
    VirtualScan scan;
    scan.config = cfg;
    scan.ranges.assign(static_cast<size_t>(cfg.num_bins), cfg.range_max);
    for (const Vec3& p : obstacles) {
        const double r = std::hypot(p.x(), p.y());
        if (r <= 0.0 || r > cfg.range_max) continue;
        const int k = cfg.bin_index(std::atan2(p.y(), p.x()));
        if (k < 0) continue;
        scan.ranges[static_cast<size_t>(k)] = std::min(scan.ranges[static_cast<size_t>(k)], r);
    }
    return scan;
}

VirtualScan merge_scans(const std::vector<VirtualScan>& scans) {
    if (scans.empty()) raise(ErrorKind::empty_input, "merge_scans: no scans");
    VirtualScan out = scans.front();
    for (size_t i = 1; i < scans.size(); ++i) {
        if (!(scans[i].config == out.config))
            raise(ErrorKind::config_mismatch, "merge_scans: scan configs differ");
        if (scans[i].ranges.size() != out.ranges.size())
            raise(ErrorKind::config_mismatch, "merge_scans: scan lengths differ");
        for (size_t k = 0; k < out.ranges.size(); ++k)
            out.ranges[k] = std::min(out.ranges[k], scans[i].ranges[k]);
    }
    return out;
}

VirtualScan visual_to_scan(const DepthImage& relative, double s1, double s2,
                           const CameraIntrinsics& intr, const CameraExtrinsics& ext,
                           const ScanConfig& cfg) {
    cfg.validate();
    const DepthImage metric = apply_scale_correction(relative, s1, s2);
    const ObstacleCloud cloud = depth_to_cloud(metric, intr, ext, cfg.pixel_stride);
    const ObstacleCloud obstacles = height_filter(cloud, cfg.h_min, cfg.h_max);
    return project_to_scan(obstacles, cfg);
}

std::vector<bool> covered_bins(const CameraIntrinsics& intr, const CameraExtrinsics& ext,
                               const ScanConfig& cfg) {
    cfg.validate();
    intr.validate();
    ext.validate();
    const Vec3 optical_axis = ext.rotation * Vec3(0.0, 0.0, 1.0);
    const double cam_azimuth = std::atan2(optical_axis.y(), optical_axis.x());
    // Pixel-center azimuth offsets relative to the optical axis; positive
    // normalized x (right in the image) decreases azimuth.
    const double delta_min = -std::atan((intr.width - 1 - intr.cx) / intr.fx);
    const double delta_max = std::atan(intr.cx / intr.fx);

    std::vector<bool> covered(static_cast<size_t>(cfg.num_bins), false);
    for (int k = 0; k < cfg.num_bins; ++k) {
        const double delta = normalize_angle(cfg.bin_center(k) - cam_azimuth);
        covered[static_cast<size_t>(k)] = delta >= delta_min && delta <= delta_max;
    }
    return covered;
}

} // namespace vnav
