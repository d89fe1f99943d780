#include "doctest.h"

#include <cmath>
#include <limits>
#include <random>

#include "vnav/scan.hpp"

using namespace vnav;

namespace {

CameraExtrinsics level_camera(double height) {
    return CameraExtrinsics::mounted(Vec3(0.0, 0.0, height));
}

} // namespace

TEST_CASE("depth_to_cloud back-projects through the mounting transform") {
    CameraIntrinsics intr;
    intr.fx = intr.fy = 100.0;
    intr.cx = intr.cy = 0.0;
    intr.width = intr.height = 1;
    const DepthImage depth = DepthImage::constant(1, 1, 2.0);
    const ObstacleCloud cloud = depth_to_cloud(depth, intr, level_camera(0.42), 1);
    REQUIRE(cloud.size() == 1);
    CHECK(cloud[0].x() == doctest::Approx(0.0));
    CHECK(cloud[0].y() == doctest::Approx(2.0));
    CHECK(cloud[0].z() == doctest::Approx(0.42));
}

TEST_CASE("stride 4 visits the ceiling-divided pixel grid") {
    const CameraIntrinsics intr = CameraIntrinsics::from_hfov(640, 480, 1.3);
    const DepthImage depth = DepthImage::constant(640, 480, 3.0);
    const ObstacleCloud cloud = depth_to_cloud(depth, intr, level_camera(0.3), 4);
    CHECK(cloud.size() == 160u * 120u);
}

TEST_CASE("pitched camera maps analytic ground depths to z near zero") {
    const CameraIntrinsics intr = CameraIntrinsics::from_hfov(64, 48, 1.0);
    const CameraExtrinsics ext = CameraExtrinsics::mounted(Vec3(0.0, 0.0, 0.42),
                                                           20.0 * kPi / 180.0);
    DepthImage depth;
    depth.width = intr.width;
    depth.height = intr.height;
    depth.data.assign(depth.pixel_count(), std::numeric_limits<double>::quiet_NaN());
    for (int v = 0; v < intr.height; ++v) {
        for (int u = 0; u < intr.width; ++u) {
            const Vec3 dir((u - intr.cx) / intr.fx, (v - intr.cy) / intr.fy, 1.0);
            const Vec3 dir_rob = ext.rotation * dir;
            if (dir_rob.z() >= -1e-6) continue; // at or above the horizon
            depth.at(u, v) = -ext.translation.z() / dir_rob.z();
        }
    }
    const ObstacleCloud cloud = depth_to_cloud(depth, intr, ext, 1);
    CHECK(cloud.size() > 100);
    for (const Vec3& p : cloud) {
        const Vec2 flat(p.x(), p.y());
        CHECK(std::abs(p.z()) <= 1e-6 * (flat.norm() + 0.42));
    }
}

TEST_CASE("depth_to_cloud rejects mismatched image dimensions") {
    const CameraIntrinsics intr = CameraIntrinsics::from_hfov(64, 48, 1.0);
    const DepthImage depth = DepthImage::constant(32, 48, 2.0);
    try {
        depth_to_cloud(depth, intr, level_camera(0.3), 1);
        FAIL("expected config mismatch");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::config_mismatch);
    }
}

TEST_CASE("height filter keeps the open band only") {
    const ObstacleCloud cloud = {
        Vec3(0.0, 1.0, 1.5),  // overhead
        Vec3(0.0, 1.0, 0.0),  // ground
        Vec3(0.0, 1.0, 1.0),  // exactly h_max
        Vec3(0.0, 1.0, 0.05), // exactly h_min
        Vec3(0.0, 1.0, 0.3),  // inside
    };
    const ObstacleCloud kept = height_filter(cloud, 0.05, 1.0);
    REQUIRE(kept.size() == 1);
    CHECK(kept[0].z() == doctest::Approx(0.3));
}

TEST_CASE("project_to_scan keeps the per-bin minimum") {
    ScanConfig cfg;
    const ObstacleCloud cloud = {Vec3(0.0, 2.0, 0.3), Vec3(0.0, 3.0, 0.3)};
    const VirtualScan scan = project_to_scan(cloud, cfg);
    const int forward = cfg.bin_index(kForwardAngle);
    REQUIRE(forward >= 0);
    CHECK(scan.ranges[static_cast<size_t>(forward)] == doctest::Approx(2.0));
    int occupied = 0;
    for (double r : scan.ranges)
        if (r < cfg.range_max) ++occupied;
    CHECK(occupied == 1);
}

TEST_CASE("empty cloud yields a scan of range_max") {
    ScanConfig cfg;
    const VirtualScan scan = project_to_scan({}, cfg);
    for (double r : scan.ranges) CHECK(r == cfg.range_max);
}

TEST_CASE("points beyond range_max or at the origin are dropped") {
    ScanConfig cfg;
    cfg.range_max = 5.0;
    const ObstacleCloud cloud = {Vec3(0.0, 6.0, 0.3), Vec3(0.0, 0.0, 0.3)};
    const VirtualScan scan = project_to_scan(cloud, cfg);
    for (double r : scan.ranges) CHECK(r == 5.0);
}

TEST_CASE("bin boundaries are half-open: theta on a boundary joins the upper bin") {
    ScanConfig cfg;
    cfg.angle_min = -4.0;
    cfg.angle_max = 4.0;
    cfg.num_bins = 8;
    CHECK(cfg.bin_index(-1.0) == 3);
    CHECK(cfg.bin_index(-4.0) == 0);
    CHECK(cfg.bin_index(4.0) == -1);
    CHECK(cfg.bin_index(-4.5) == -1);

    // One ulp below a boundary lands in the lower bin. Anchoring the span at
    // zero keeps theta - angle_min exact, so the perturbation survives it.
    ScanConfig exact;
    exact.angle_min = 0.0;
    exact.angle_max = 8.0;
    exact.num_bins = 8;
    CHECK(exact.bin_index(3.0) == 3);
    CHECK(exact.bin_index(std::nextafter(3.0, 0.0)) == 2);

    // Through the cloud path: atan2(0, 1) is exactly zero, the bin-4 boundary.
    const ObstacleCloud cloud = {Vec3(1.0, 0.0, 0.2)};
    cfg.h_min = 0.0;
    cfg.h_max = 1.0;
    const VirtualScan scan = project_to_scan(cloud, cfg);
    CHECK(scan.ranges[4] == doctest::Approx(1.0));
    CHECK(scan.ranges[3] == cfg.range_max);
}

TEST_CASE("full-circle configs wrap angles instead of discarding them") {
    const ScanConfig cfg;
    CHECK(cfg.bin_index(3.0 * kPi / 2.0) == cfg.bin_index(-kPi / 2.0));
    CHECK(cfg.bin_index(kForwardAngle + 2.0 * kPi) == cfg.bin_index(kForwardAngle));
    CHECK(cfg.bin_index(kForwardAngle) >= 0);
}

TEST_CASE("bin centers sit mid-bin and invert bin_index") {
    ScanConfig cfg;
    cfg.num_bins = 90;
    CHECK(cfg.bin_center(0) == doctest::Approx(cfg.angle_min + 0.5 * cfg.bin_width()));
    for (int k = 0; k < cfg.num_bins; k += 7) CHECK(cfg.bin_index(cfg.bin_center(k)) == k);
}

TEST_CASE("merge_scans is idempotent, commutative and has range_max identity") {
    ScanConfig cfg;
    cfg.num_bins = 32;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dr(0.1, cfg.range_max);
    VirtualScan a, b;
    a.config = b.config = cfg;
    a.ranges.resize(32);
    b.ranges.resize(32);
    for (size_t k = 0; k < 32; ++k) {
        a.ranges[k] = dr(rng);
        b.ranges[k] = dr(rng);
    }
    VirtualScan identity;
    identity.config = cfg;
    identity.ranges.assign(32, cfg.range_max);

    CHECK(merge_scans({a, identity}).ranges == a.ranges);
    CHECK(merge_scans({a, a}).ranges == a.ranges);
    CHECK(merge_scans({a, b}).ranges == merge_scans({b, a}).ranges);
    for (size_t k = 0; k < 32; ++k)
        CHECK(merge_scans({a, b}).ranges[k] == std::min(a.ranges[k], b.ranges[k]));
}

TEST_CASE("merge_scans rejects mismatched configs and empty input") {
    VirtualScan a;
    a.config = ScanConfig{};
    a.ranges.assign(static_cast<size_t>(a.config.num_bins), 1.0);
    VirtualScan b = a;
    b.config.num_bins = 360;
    b.ranges.assign(360, 1.0);
    CHECK_THROWS_AS(merge_scans({a, b}), Error);
    CHECK_THROWS_AS(merge_scans({}), Error);
}

TEST_CASE("visual_to_scan sees a constant-depth wall at its metric range") {
    const CameraIntrinsics intr = CameraIntrinsics::from_hfov(64, 48, 1.2);
    const CameraExtrinsics ext = level_camera(0.25);
    const DepthImage rel = DepthImage::constant(64, 48, 0.5, DepthKind::relative_inverse);
    ScanConfig cfg;
    cfg.pixel_stride = 1;
    cfg.h_min = 0.05;
    cfg.h_max = 0.45;
    const VirtualScan scan = visual_to_scan(rel, 1.0, 0.0, intr, ext, cfg);
    const int forward = cfg.bin_index(kForwardAngle);
    CHECK(scan.ranges[static_cast<size_t>(forward)] == doctest::Approx(2.0).epsilon(1e-9));
    // Bins behind the robot stay empty.
    CHECK(scan.ranges[static_cast<size_t>(cfg.bin_index(-kForwardAngle))] == cfg.range_max);
}

TEST_CASE("covered_bins marks exactly the camera's horizontal field") {
    const CameraIntrinsics intr = CameraIntrinsics::from_hfov(320, 240, kPi / 2.0);
    const CameraExtrinsics ext = level_camera(0.3);
    ScanConfig cfg;
    const std::vector<bool> covered = covered_bins(intr, ext, cfg);
    REQUIRE(covered.size() == static_cast<size_t>(cfg.num_bins));
    CHECK(covered[static_cast<size_t>(cfg.bin_index(kForwardAngle))]);
    CHECK_FALSE(covered[static_cast<size_t>(cfg.bin_index(0.0))]);
    CHECK_FALSE(covered[static_cast<size_t>(cfg.bin_index(kPi))]);

    size_t count = 0;
    for (bool c : covered)
        if (c) ++count;
    const double expected = kPi / 2.0 / cfg.bin_width();
    CHECK(std::abs(static_cast<double>(count) - expected) <= 2.0);
}

TEST_CASE("scan config validation rejects inverted bands") {
    ScanConfig cfg;
    cfg.h_min = 0.5;
    cfg.h_max = 0.4;
    CHECK_THROWS_AS(cfg.validate(), Error);
    ScanConfig cfg2;
    cfg2.num_bins = 0;
    CHECK_THROWS_AS(cfg2.validate(), Error);
    ScanConfig cfg3;
    cfg3.pixel_stride = 0;
    CHECK_THROWS_AS(cfg3.validate(), Error);
}

TEST_CASE("default_ring only changes the height ceiling") {
    const ScanConfig ring = ScanConfig::default_ring(1.6);
    CHECK(ring.h_max == 1.6);
    CHECK(ring.num_bins == ScanConfig{}.num_bins);
    CHECK(ring.h_min == ScanConfig{}.h_min);
}
