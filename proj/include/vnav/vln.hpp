#pragma once

#include <utility>

#include "vnav/geometry.hpp"

namespace vnav {

enum class Region { left, center, right };

// Language-grounded confidence for the three image regions. Angles follow
// the robot convention: positive is left of forward.
struct RegionConfidence {
    double left = 0.0;
    double center = 0.0;
    double right = 0.0;
    double phi_left = 25.0 * kPi / 180.0;
    double phi_center = 0.0;
    double phi_right = -25.0 * kPi / 180.0;

    void validate() const;
    double max_score() const;
    // Ties resolve center first, then left.
    Region argmax_region() const;
};

struct HighLevelCommand {
    double d_cmd = 0.0; // meters
    double theta_cmd = 0.0; // radians relative to forward at issue time
};

// Piecewise waypoint rule: steer toward the best region only when its
// confidence clears 0.65, and step shorter the more confident it is.
HighLevelCommand command_from_confidence(const RegionConfidence& rc);

// Waypoint d_cmd ahead at heading + theta_cmd, in world coordinates.
Vec2 to_world(const HighLevelCommand& cmd, const Pose2D& pose);

struct ArrivalDetector {
    int consecutive_center_count = 0;
    int K = 5;
    double confidence_threshold = 0.80;
};

// Counts consecutive frames whose argmax is the center region above the
// confidence threshold; arrival once the streak reaches K.
std::pair<ArrivalDetector, bool> arrival_update(const ArrivalDetector& det,
                                                const RegionConfidence& rc);

} // namespace vnav
