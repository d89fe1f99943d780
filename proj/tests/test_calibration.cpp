#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "vnav/calibration.hpp"

using namespace vnav;

namespace {

CameraIntrinsics test_camera() {
    CameraIntrinsics intr;
    intr.fx = intr.fy = 500.0;
    intr.cx = 320.0;
    intr.cy = 240.0;
    intr.width = 640;
    intr.height = 480;
    return intr;
}

MarkerObservation project_marker(const CameraIntrinsics& intr, const Mat3& R, const Vec3& t,
                                 double size, const std::string& image_id = "img0") {
    MarkerObservation obs;
    obs.image_id = image_id;
    obs.marker_size = size;
    const auto object = marker_object_points(size);
    for (size_t i = 0; i < 4; ++i) obs.corners[i] = project_point(intr, R * object[i] + t);
    return obs;
}

// Inverse depth of the marker plane is affine in normalized image
// coordinates, so a bilinear sample at any pixel of this field is exact.
DepthImage plane_relative_depth(const CameraIntrinsics& intr, const Mat3& R, const Vec3& t,
                                double s1_true, double s2_true) {
    const Vec3 n = R.col(2);
    const double c = n.dot(t);
    REQUIRE(c > 0.0);
    DepthImage img;
    img.width = intr.width;
    img.height = intr.height;
    img.kind = DepthKind::relative_inverse;
    img.data.resize(img.pixel_count());
    for (int v = 0; v < intr.height; ++v) {
        for (int u = 0; u < intr.width; ++u) {
            const double xn = (u - intr.cx) / intr.fx;
            const double yn = (v - intr.cy) / intr.fy;
            const double inv_z = (n.x() * xn + n.y() * yn + n.z()) / c;
            img.at(u, v) = (inv_z - s2_true) / s1_true;
        }
    }
    return img;
}

struct RidgeOracle {
    double s1 = 0.0;
    double s2 = 0.0;
};

// Cramer's rule on the 2x2 normal equations, independent of the library path.
RidgeOracle cramer_ridge(const Eigen::MatrixX2d& A, const Eigen::VectorXd& b, double lambda) {
    double m00 = lambda, m01 = 0.0, m11 = lambda, r0 = 0.0, r1 = 0.0;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        m00 += A(i, 0) * A(i, 0);
        m01 += A(i, 0) * A(i, 1);
        m11 += A(i, 1) * A(i, 1);
        r0 += A(i, 0) * b(i);
        r1 += A(i, 1) * b(i);
    }
    const double det = m00 * m11 - m01 * m01;
    return {(r0 * m11 - r1 * m01) / det, (m00 * r1 - m01 * r0) / det};
}

} // namespace

TEST_CASE("marker_object_points spans the square in corner order") {
    const auto pts = marker_object_points(0.2);
    CHECK(pts[0].x() == doctest::Approx(-0.1));
    CHECK(pts[0].y() == doctest::Approx(0.1));
    CHECK(pts[0].z() == doctest::Approx(0.0));
    Vec3 centroid = Vec3::Zero();
    for (const Vec3& p : pts) {
        CHECK(p.z() == 0.0);
        centroid += p;
    }
    CHECK(centroid.norm() == doctest::Approx(0.0));
}

TEST_CASE("pose recovery is exact on noise-free fronto-parallel corners") {
    const CameraIntrinsics intr = test_camera();
    const Vec3 t(0.0, 0.0, 1.5);
    const MarkerObservation obs = project_marker(intr, Mat3::Identity(), t, 0.2);
    const MarkerPose pose = estimate_marker_pose(intr, obs);
    CHECK(pose.rvec.norm() < 1e-6);
    CHECK((pose.tvec - t).norm() < 1e-6);
    CHECK(pose.reprojection_rms < 1e-8);
}

TEST_CASE("pose recovery is exact for a rotated offset marker") {
    const CameraIntrinsics intr = test_camera();
    const Vec3 rvec(30.0 * kPi / 180.0, 0.0, 0.0);
    const Vec3 t(0.2, -0.1, 2.0);
    const MarkerObservation obs = project_marker(intr, rodrigues(rvec), t, 0.2);
    const MarkerPose pose = estimate_marker_pose(intr, obs);
    CHECK((pose.rvec - rvec).norm() < 1e-6);
    CHECK((pose.tvec - t).norm() < 1e-6);
    CHECK(pose.reprojection_rms < 1e-8);
}

TEST_CASE("pose recovery works through lens distortion") {
    CameraIntrinsics intr = test_camera();
    intr.distortion = {-0.12, 0.05, 0.001, -0.0005};
    const Vec3 rvec(0.2, -0.3, 0.4);
    const Vec3 t(-0.15, 0.1, 1.2);
    const MarkerObservation obs = project_marker(intr, rodrigues(rvec), t, 0.2);
    const MarkerPose pose = estimate_marker_pose(intr, obs);
    CHECK((pose.rvec - rvec).norm() < 1e-6);
    CHECK((pose.tvec - t).norm() < 1e-6);
    CHECK(pose.reprojection_rms < 1e-8);
}

TEST_CASE("pose recovery across 200 random noise-free poses") {
    const CameraIntrinsics intr = test_camera();
    std::mt19937_64 rng(19);
    std::uniform_real_distribution<double> angle(-0.5, 0.5);
    std::uniform_real_distribution<double> lateral(-0.4, 0.4);
    std::uniform_real_distribution<double> depth(0.6, 3.5);
    int checked = 0;
    for (int i = 0; i < 200; ++i) {
        const Vec3 rvec(angle(rng), angle(rng), angle(rng) * 4.0);
        const Vec3 t(lateral(rng), lateral(rng), depth(rng));
        MarkerObservation obs;
        try {
            obs = project_marker(intr, rodrigues(rvec), t, 0.2);
        } catch (const Error&) {
            continue; // corner left the positive-depth half-space
        }
        const MarkerPose pose = estimate_marker_pose(intr, obs);
        CHECK((pose.rvec - rvec).norm() < 1e-6);
        CHECK((pose.tvec - t).norm() < 1e-6);
        CHECK(pose.reprojection_rms < 1e-8);
        ++checked;
    }
    CHECK(checked > 150);
}

TEST_CASE("corner noise of 0.5 px keeps median depth error under 2% at 2 m") {
    const CameraIntrinsics intr = test_camera();
    const Vec3 t(0.0, 0.0, 2.0);
    const MarkerObservation clean = project_marker(intr, Mat3::Identity(), t, 0.2);
    std::vector<double> rel_errors;
    for (int seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(static_cast<uint64_t>(seed) + 1000);
        std::normal_distribution<double> gauss(0.0, 0.5);
        MarkerObservation noisy = clean;
        for (Vec2& c : noisy.corners) c += Vec2(gauss(rng), gauss(rng));
        const MarkerPose pose = estimate_marker_pose(intr, noisy);
        rel_errors.push_back(std::abs(pose.tvec.z() - 2.0) / 2.0);
    }
    std::sort(rel_errors.begin(), rel_errors.end());
    const double median = rel_errors[rel_errors.size() / 2];
    INFO("measured median relative z error: ", median);
    CHECK(median < 0.02);
}

TEST_CASE("collinear corners are rejected as degenerate") {
    MarkerObservation obs;
    obs.marker_size = 0.2;
    obs.corners = {Vec2(100, 100), Vec2(150, 100), Vec2(200, 100), Vec2(250, 100)};
    try {
        estimate_marker_pose(test_camera(), obs);
        FAIL("expected a degenerate-configuration error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::degenerate);
    }
}

TEST_CASE("self-intersecting corner order fails validation") {
    MarkerObservation obs;
    obs.marker_size = 0.2;
    obs.corners = {Vec2(100, 100), Vec2(200, 200), Vec2(200, 100), Vec2(100, 200)};
    CHECK_THROWS_AS(obs.validate(), Error);
}

TEST_CASE("corner_depths of a fronto-parallel marker are all the range") {
    MarkerPose pose;
    pose.rvec = Vec3::Zero();
    pose.tvec = Vec3(0.0, 0.0, 2.0);
    const auto depths = corner_depths(pose, 0.2);
    for (double d : depths) CHECK(d == doctest::Approx(2.0));
}

TEST_CASE("corner_depths of a pitched marker split symmetrically") {
    MarkerPose pose;
    pose.rvec = Vec3(45.0 * kPi / 180.0, 0.0, 0.0);
    pose.tvec = Vec3(0.0, 0.0, 2.0);
    const auto depths = corner_depths(pose, 0.2);
    const double shift = 0.1 * std::sin(45.0 * kPi / 180.0);
    // Corners 0/1 sit at object y = +0.1 and tilt away; 2/3 tilt closer.
    CHECK(std::abs(depths[0] - (2.0 + shift)) < 1e-12);
    CHECK(std::abs(depths[3] - (2.0 - shift)) < 1e-12);
    CHECK(depths[0] == doctest::Approx(depths[1]));
    CHECK(depths[2] == doctest::Approx(depths[3]));
}

TEST_CASE("corner_depths are invariant to in-plane rotation") {
    MarkerPose a, b;
    a.tvec = b.tvec = Vec3(0.1, -0.2, 1.7);
    a.rvec = Vec3::Zero();
    b.rvec = Vec3(0.0, 0.0, 1.1);
    const auto da = corner_depths(a, 0.2);
    const auto db = corner_depths(b, 0.2);
    for (size_t i = 0; i < 4; ++i) CHECK(db[i] == doctest::Approx(da[i]));
}

TEST_CASE("corner_depths behind the camera raise") {
    MarkerPose pose;
    pose.tvec = Vec3(0.0, 0.0, -1.0);
    CHECK_THROWS_AS(corner_depths(pose, 0.2), Error);
}

TEST_CASE("sample_relative_depth is exact on constant and linear fields") {
    DepthImage constant = DepthImage::constant(16, 16, 0.5, DepthKind::relative_inverse);
    const DepthSample s = sample_relative_depth(constant, 7.3, 2.8);
    CHECK(s.value == doctest::Approx(0.5));
    CHECK_FALSE(s.fallback);

    DepthImage ramp;
    ramp.width = 32;
    ramp.height = 4;
    ramp.kind = DepthKind::relative_inverse;
    ramp.data.resize(ramp.pixel_count());
    for (int v = 0; v < 4; ++v)
        for (int u = 0; u < 32; ++u) ramp.at(u, v) = u;
    const DepthSample lin = sample_relative_depth(ramp, 10.25, 1.5);
    CHECK(lin.value == doctest::Approx(10.25));
}

TEST_CASE("sample_relative_depth falls back to the nearest valid neighbor") {
    DepthImage img = DepthImage::constant(4, 4, 1.0, DepthKind::relative_inverse);
    img.at(2, 2) = std::numeric_limits<double>::quiet_NaN();
    img.at(1, 1) = 0.25;
    const DepthSample s = sample_relative_depth(img, 1.9, 1.9);
    CHECK(s.fallback);
    CHECK(std::isfinite(s.value));

    DepthImage dead = DepthImage::constant(4, 4, std::numeric_limits<double>::quiet_NaN(),
                                           DepthKind::relative_inverse);
    try {
        sample_relative_depth(dead, 1.5, 1.5);
        FAIL("expected invalid-depth error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::invalid_depth);
    }
}

TEST_CASE("solve_ridge identity system returns (1, 0)") {
    Eigen::MatrixX2d A(3, 2);
    Eigen::VectorXd b(3);
    A << 0.2, 1.0, 0.7, 1.0, 1.4, 1.0;
    b << 0.2, 0.7, 1.4;
    const RidgeSolution sol = solve_ridge(A, b, 0.0);
    CHECK(sol.s1 == doctest::Approx(1.0));
    CHECK(sol.s2 == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("solve_ridge recovers a synthetic affine relation") {
    std::vector<double> a_vals;
    for (double a = 0.1; a < 1.95; a += 0.2) a_vals.push_back(a);
    Eigen::MatrixX2d A(static_cast<Eigen::Index>(a_vals.size()), 2);
    Eigen::VectorXd b(static_cast<Eigen::Index>(a_vals.size()));
    for (size_t i = 0; i < a_vals.size(); ++i) {
        A(static_cast<Eigen::Index>(i), 0) = a_vals[i];
        A(static_cast<Eigen::Index>(i), 1) = 1.0;
        b(static_cast<Eigen::Index>(i)) = 2.5 * a_vals[i] + 0.2;
    }
    const RidgeSolution sol = solve_ridge(A, b, 1e-12);
    CHECK(std::abs(sol.s1 - 2.5) < 1e-9);
    CHECK(std::abs(sol.s2 - 0.2) < 1e-9);
    CHECK(sol.residual_rms < 1e-9);
}

TEST_CASE("large lambda shrinks the solution toward zero") {
    Eigen::MatrixX2d A(2, 2);
    Eigen::VectorXd b(2);
    A << 0.5, 1.0, 1.5, 1.0;
    b << 1.0, 2.0;
    const RidgeSolution weak = solve_ridge(A, b, 1e-9);
    const RidgeSolution strong = solve_ridge(A, b, 1e9);
    CHECK(std::abs(strong.s1) < 1e-6);
    CHECK(std::abs(strong.s2) < 1e-6);
    CHECK(std::abs(strong.s1) < std::abs(weak.s1));
}

TEST_CASE("solve_ridge matches a Cramer oracle on random systems") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> dd(0.1, 2.0);
    std::uniform_real_distribution<double> db(-1.0, 3.0);
    for (int trial = 0; trial < 50; ++trial) {
        const int n = 2 + static_cast<int>(rng() % 30);
        Eigen::MatrixX2d A(n, 2);
        Eigen::VectorXd b(n);
        for (int i = 0; i < n; ++i) {
            A(i, 0) = dd(rng);
            A(i, 1) = 1.0;
            b(i) = db(rng);
        }
        const RidgeSolution sol = solve_ridge(A, b, 0.0);
        const RidgeOracle oracle = cramer_ridge(A, b, 0.0);
        CHECK(std::abs(sol.s1 - oracle.s1) <= 1e-12 * std::max(1.0, std::abs(oracle.s1)));
        CHECK(std::abs(sol.s2 - oracle.s2) <= 1e-12 * std::max(1.0, std::abs(oracle.s2)));
    }
}

TEST_CASE("identical depths with zero lambda are ill-conditioned") {
    Eigen::MatrixX2d A(4, 2);
    Eigen::VectorXd b(4);
    for (int i = 0; i < 4; ++i) {
        A(i, 0) = 0.5;
        A(i, 1) = 1.0;
        b(i) = 1.0;
    }
    try {
        solve_ridge(A, b, 0.0);
        FAIL("expected ill-conditioned error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ill_conditioned);
        CHECK(std::string(e.what()).find("far") != std::string::npos);
    }
}

TEST_CASE("calibrate recovers the distortion from near and far markers") {
    const CameraIntrinsics intr = test_camera();
    const double s1_true = 2.5, s2_true = 0.2;
    std::vector<CalibrationImage> images;
    int id = 0;
    for (const double z : {0.5, 4.0}) {
        const Mat3 R = rodrigues(Vec3(0.15, -0.1, 0.05));
        const Vec3 t(0.05, -0.03, z);
        CalibrationImage img;
        img.relative = plane_relative_depth(intr, R, t, s1_true, s2_true);
        img.markers.push_back(project_marker(intr, R, t, z * 0.2, "img" + std::to_string(id++)));
        images.push_back(std::move(img));
    }
    const CalibrationResult result = calibrate(images, intr, 1e-8);
    CHECK(std::abs(result.s1 - s1_true) / s1_true < 1e-6);
    CHECK(std::abs(result.s2 - s2_true) / std::abs(s2_true) < 1e-6);
    CHECK(result.sample_count == 8);
    CHECK(result.depth_spread_ratio > 2.0);

    // Corrected depth reproduces the plane depth field.
    const DepthImage corrected = apply_scale_correction(images[0].relative, result.s1, result.s2);
    const double z_center = corrected.at(320, 240);
    const Vec3 n = rodrigues(Vec3(0.15, -0.1, 0.05)).col(2);
    const double expected = n.dot(Vec3(0.05, -0.03, 0.5)) / n.z();
    CHECK(std::abs(z_center - expected) / expected < 1e-6);
}

TEST_CASE("round-trip property holds for random distortions with spread samples") {
    const CameraIntrinsics intr = test_camera();
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> ds1(0.5, 5.0);
    std::uniform_real_distribution<double> ds2(-0.5, 0.5);
    for (int trial = 0; trial < 10; ++trial) {
        const double s1_true = ds1(rng);
        const double s2_true = ds2(rng);
        std::vector<CalibrationImage> images;
        for (const double z : {0.6, 1.5, 3.8}) {
            CalibrationImage img;
            img.relative = plane_relative_depth(intr, Mat3::Identity(), Vec3(0, 0, z), s1_true,
                                                s2_true);
            img.markers.push_back(
                project_marker(intr, Mat3::Identity(), Vec3(0, 0, z), 0.15 * z));
            images.push_back(std::move(img));
        }
        // Recovery to 1e-6 needs the ridge bias out of the way; the default
        // lambda trades a few 1e-6 of bias for conditioning, so it only has
        // to stay well under any realistic depth-noise floor.
        const CalibrationResult result = calibrate(images, intr, 1e-10);
        CHECK(std::abs(result.s1 - s1_true) / s1_true < 1e-6);
        CHECK(std::abs(result.s2 - s2_true) <= 1e-6 * std::max(1.0, std::abs(s2_true)));

        const CalibrationResult biased = calibrate(images, intr);
        CHECK(std::abs(biased.s1 - s1_true) / s1_true < 1e-4);
        CHECK(std::abs(biased.s2 - s2_true) <= 1e-4 * std::max(1.0, std::abs(s2_true)));
    }
}

TEST_CASE("single-distance calibration warns about depth spread") {
    const CameraIntrinsics intr = test_camera();
    CalibrationImage img;
    img.relative = plane_relative_depth(intr, Mat3::Identity(), Vec3(0, 0, 2.0), 1.0, 0.0);
    img.markers.push_back(project_marker(intr, Mat3::Identity(), Vec3(0, 0, 2.0), 0.3));
    const CalibrationResult result = calibrate({img}, intr);
    CHECK(result.depth_spread_ratio == doctest::Approx(1.0));
    bool warned = false;
    for (const std::string& w : result.warnings)
        if (w.find("spread") != std::string::npos) warned = true;
    CHECK(warned);
}

TEST_CASE("clustered depths push the condition number over the warning threshold") {
    const CameraIntrinsics intr = test_camera();
    std::vector<CalibrationImage> images;
    for (const double z : {1.998, 2.002}) {
        CalibrationImage img;
        img.relative = plane_relative_depth(intr, Mat3::Identity(), Vec3(0, 0, z), 1.0, 0.0);
        img.markers.push_back(project_marker(intr, Mat3::Identity(), Vec3(0, 0, z), 0.3));
        images.push_back(std::move(img));
    }
    const CalibrationResult result = calibrate(images, intr);
    CHECK(result.condition_number > 1e6);
    bool warned = false;
    for (const std::string& w : result.warnings)
        if (w.find("condition") != std::string::npos) warned = true;
    CHECK(warned);
}

TEST_CASE("residual_rms does not grow as consistent samples are added") {
    const CameraIntrinsics intr = test_camera();
    std::vector<CalibrationImage> images;
    double last = std::numeric_limits<double>::infinity();
    for (const double z : {0.5, 1.0, 2.0, 3.5}) {
        CalibrationImage img;
        img.relative = plane_relative_depth(intr, Mat3::Identity(), Vec3(0, 0, z), 2.0, 0.1);
        img.markers.push_back(project_marker(intr, Mat3::Identity(), Vec3(0, 0, z), 0.2 * z));
        images.push_back(std::move(img));
        if (images.size() < 2) continue;
        const CalibrationResult result = calibrate(images, intr);
        CHECK(result.residual_rms <= last + 1e-12);
        last = result.residual_rms;
    }
}

TEST_CASE("calibrate with no usable samples reports emptiness") {
    const CameraIntrinsics intr = test_camera();
    CHECK_THROWS_AS(calibrate({}, intr), Error);

    CalibrationImage img;
    img.relative = DepthImage::constant(intr.width, intr.height,
                                        std::numeric_limits<double>::quiet_NaN(),
                                        DepthKind::relative_inverse);
    img.markers.push_back(project_marker(intr, Mat3::Identity(), Vec3(0, 0, 2.0), 0.3));
    try {
        calibrate({img}, intr);
        FAIL("expected empty-input error");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::empty_input);
    }
}
