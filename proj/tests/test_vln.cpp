#include "doctest.h"

#include <cmath>
#include <random>
#include <utility>

#include "vnav/vln.hpp"

using namespace vnav;

namespace {

RegionConfidence scores(double left, double center, double right) {
    RegionConfidence rc;
    rc.left = left;
    rc.center = center;
    rc.right = right;
    return rc;
}

} // namespace

TEST_CASE("waypoint rule steers toward a confident side region") {
    RegionConfidence rc = scores(0.1, 0.2, 0.9);
    rc.phi_right = -0.4;
    const HighLevelCommand cmd = command_from_confidence(rc);
    CHECK(cmd.theta_cmd == -0.4);
    CHECK(cmd.d_cmd == doctest::Approx(1.27).epsilon(1e-12));

    RegionConfidence rc2 = scores(0.7, 0.3, 0.2);
    rc2.phi_left = 0.4;
    const HighLevelCommand cmd2 = command_from_confidence(rc2);
    CHECK(cmd2.theta_cmd == 0.4);
    CHECK(cmd2.d_cmd == doctest::Approx(2.35).epsilon(1e-12));
}

TEST_CASE("low confidence keeps heading and takes the long step") {
    const HighLevelCommand cmd = command_from_confidence(scores(0.3, 0.5, 0.2));
    CHECK(cmd.theta_cmd == 0.0);
    CHECK(cmd.d_cmd == 3.0);
}

TEST_CASE("step length branches at exactly 0.65 and 0.80") {
    // 0.80 belongs to the middle branch.
    const HighLevelCommand mid = command_from_confidence(scores(0.1, 0.80, 0.1));
    CHECK(mid.d_cmd == doctest::Approx(2.4).epsilon(1e-12));
    CHECK(mid.theta_cmd == 0.0);

    // 0.65 does not clear the steering threshold.
    RegionConfidence rc = scores(0.65, 0.1, 0.1);
    rc.phi_left = 0.3;
    const HighLevelCommand low = command_from_confidence(rc);
    CHECK(low.theta_cmd == 0.0);
    CHECK(low.d_cmd == 3.0);

    // Just above each boundary the other piece applies.
    const HighLevelCommand above_mid = command_from_confidence(scores(0.1, 0.651, 0.1));
    CHECK(above_mid.d_cmd == doctest::Approx(2.0 + 0.5 * 0.651).epsilon(1e-12));
    const HighLevelCommand above_hi = command_from_confidence(scores(0.1, 0.801, 0.1));
    CHECK(above_hi.d_cmd == doctest::Approx(1.0 + 0.3 * 0.801).epsilon(1e-12));
}

TEST_CASE("step length stays within [1, 3] and angle comes from the region set") {
    std::mt19937 rng(20260813u);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int i = 0; i < 500; ++i) {
        const RegionConfidence rc = scores(u(rng), u(rng), u(rng));
        const HighLevelCommand cmd = command_from_confidence(rc);
        CHECK(cmd.d_cmd >= 1.0);
        CHECK(cmd.d_cmd <= 3.0);
        const bool from_set = cmd.theta_cmd == 0.0 || cmd.theta_cmd == rc.phi_left ||
                              cmd.theta_cmd == rc.phi_right;
        CHECK(from_set);
    }
}

TEST_CASE("steering angle depends only on the winning branch, not the scale") {
    RegionConfidence a = scores(0.9, 0.5, 0.6);
    RegionConfidence b = scores(0.9 * 1.1, 0.5 * 1.1, 0.6 * 1.1);
    CHECK(command_from_confidence(a).theta_cmd == a.phi_left);
    CHECK(command_from_confidence(b).theta_cmd == b.phi_left);
    CHECK(command_from_confidence(a).theta_cmd == command_from_confidence(b).theta_cmd);

    RegionConfidence c = scores(0.2, 0.1, 0.15);
    RegionConfidence d = scores(0.2 * 3.0, 0.1 * 3.0, 0.15 * 3.0);
    CHECK(command_from_confidence(c).theta_cmd == 0.0);
    CHECK(command_from_confidence(d).theta_cmd == 0.0);
}

TEST_CASE("region argmax resolves ties center first, then left") {
    CHECK(scores(0.7, 0.7, 0.7).argmax_region() == Region::center);
    CHECK(scores(0.7, 0.7, 0.2).argmax_region() == Region::center);
    CHECK(scores(0.2, 0.7, 0.7).argmax_region() == Region::center);
    CHECK(scores(0.7, 0.2, 0.7).argmax_region() == Region::left);
    CHECK(scores(0.9, 0.2, 0.1).argmax_region() == Region::left);
    CHECK(scores(0.1, 0.2, 0.9).argmax_region() == Region::right);

    // The tie also routes the steering angle.
    RegionConfidence tie = scores(0.9, 0.2, 0.9);
    tie.phi_left = 0.3;
    tie.phi_right = -0.3;
    CHECK(command_from_confidence(tie).theta_cmd == 0.3);
}

TEST_CASE("default region angles sit at +-25 degrees") {
    const RegionConfidence rc;
    CHECK(rc.phi_left == doctest::Approx(25.0 * kPi / 180.0));
    CHECK(rc.phi_right == doctest::Approx(-25.0 * kPi / 180.0));
    CHECK(rc.phi_center == 0.0);
}

TEST_CASE("world waypoint lands ahead of the pose") {
    HighLevelCommand straight;
    straight.d_cmd = 2.0;
    straight.theta_cmd = 0.0;
    const Vec2 w = to_world(straight, Pose2D{});
    CHECK(std::abs(w.x()) <= 1e-12);
    CHECK(w.y() == doctest::Approx(2.0).epsilon(1e-12));

    Pose2D west;
    west.x = 1.0;
    west.y = 2.0;
    west.heading = kPi;
    HighLevelCommand step;
    step.d_cmd = 1.5;
    const Vec2 v = to_world(step, west);
    CHECK(v.x() == doctest::Approx(-0.5).epsilon(1e-12));
    CHECK(v.y() == doctest::Approx(2.0).epsilon(1e-12));

    // Turning -pi/2 from the default heading points along +x.
    HighLevelCommand right;
    right.d_cmd = 3.0;
    right.theta_cmd = -kPi / 2.0;
    const Vec2 r = to_world(right, Pose2D{});
    CHECK(r.x() == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(std::abs(r.y()) <= 1e-12);
}

TEST_CASE("world waypoint equals the rigid transform of the local waypoint") {
    std::mt19937 rng(99u);
    std::uniform_real_distribution<double> upos(-5.0, 5.0);
    std::uniform_real_distribution<double> uang(-kPi, kPi);
    std::uniform_real_distribution<double> udist(1.0, 3.0);
    for (int i = 0; i < 200; ++i) {
        Pose2D pose;
        pose.x = upos(rng);
        pose.y = upos(rng);
        pose.heading = uang(rng);
        HighLevelCommand cmd;
        cmd.d_cmd = udist(rng);
        cmd.theta_cmd = uang(rng) / 4.0;
        const Vec2 local = cmd.d_cmd * Vec2(std::cos(kForwardAngle + cmd.theta_cmd),
                                            std::sin(kForwardAngle + cmd.theta_cmd));
        CHECK((to_world(cmd, pose) - pose.to_world(local)).norm() <= 1e-12);
    }
}

TEST_CASE("arrival fires after K consecutive confident center frames") {
    const RegionConfidence center_high = scores(0.1, 0.9, 0.1);
    ArrivalDetector det;
    bool reached = false;
    for (int i = 0; i < 4; ++i) {
        std::tie(det, reached) = arrival_update(det, center_high);
        CHECK(det.consecutive_center_count == i + 1);
        CHECK(!reached);
    }
    std::tie(det, reached) = arrival_update(det, center_high);
    CHECK(det.consecutive_center_count == 5);
    CHECK(reached);
}

TEST_CASE("a non-qualifying frame resets the arrival streak") {
    const RegionConfidence center_high = scores(0.1, 0.9, 0.1);
    const RegionConfidence left_high = scores(0.95, 0.9, 0.1);
    ArrivalDetector det;
    bool reached = false;
    std::tie(det, reached) = arrival_update(det, center_high);
    std::tie(det, reached) = arrival_update(det, center_high);
    CHECK(det.consecutive_center_count == 2);
    std::tie(det, reached) = arrival_update(det, left_high);
    CHECK(det.consecutive_center_count == 0);
    CHECK(!reached);
}

TEST_CASE("confidence on a side region never advances arrival") {
    ArrivalDetector det;
    bool reached = false;
    std::tie(det, reached) = arrival_update(det, scores(0.99, 0.1, 0.1));
    CHECK(det.consecutive_center_count == 0);
    CHECK(!reached);
    std::tie(det, reached) = arrival_update(det, scores(0.1, 0.1, 0.99));
    CHECK(det.consecutive_center_count == 0);
}

TEST_CASE("arrival threshold is strict and ties count as center") {
    ArrivalDetector det;
    CHECK(det.K == 5);
    CHECK(det.confidence_threshold == 0.80);

    // Exactly at the threshold does not qualify.
    bool reached = false;
    std::tie(det, reached) = arrival_update(det, scores(0.1, 0.80, 0.1));
    CHECK(det.consecutive_center_count == 0);

    // A center/left tie resolves to center and qualifies.
    std::tie(det, reached) = arrival_update(det, scores(0.9, 0.9, 0.1));
    CHECK(det.consecutive_center_count == 1);

    ArrivalDetector eager;
    eager.K = 1;
    std::tie(eager, reached) = arrival_update(eager, scores(0.1, 0.9, 0.1));
    CHECK(reached);
}

TEST_CASE("arrival update leaves its input untouched") {
    const ArrivalDetector det;
    const auto [next, reached] = arrival_update(det, scores(0.1, 0.9, 0.1));
    CHECK(det.consecutive_center_count == 0);
    CHECK(next.consecutive_center_count == 1);
    CHECK(!reached);
}

TEST_CASE("confidence validation rejects malformed inputs") {
    CHECK_THROWS_AS(command_from_confidence(scores(-0.1, 0.5, 0.5)), Error);
    CHECK_THROWS_AS(command_from_confidence(scores(0.5, 1.1, 0.5)), Error);
    const double nan = std::nan("");
    CHECK_THROWS_AS(command_from_confidence(scores(0.5, nan, 0.5)), Error);

    RegionConfidence bad_left = scores(0.5, 0.5, 0.5);
    bad_left.phi_left = -0.1;
    CHECK_THROWS_AS(command_from_confidence(bad_left), Error);
    RegionConfidence bad_right = scores(0.5, 0.5, 0.5);
    bad_right.phi_right = 0.1;
    CHECK_THROWS_AS(command_from_confidence(bad_right), Error);

    ArrivalDetector bad_k;
    bad_k.K = 0;
    CHECK_THROWS_AS(arrival_update(bad_k, scores(0.1, 0.9, 0.1)), Error);
    CHECK_THROWS_AS(arrival_update(ArrivalDetector{}, scores(2.0, 0.1, 0.1)), Error);
}
