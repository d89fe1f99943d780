#include "vnav/vln.hpp"

#include <algorithm>
#include <cmath>

namespace vnav {

void RegionConfidence::validate() const {
    for (const double s : {left, center, right})
        if (!(s >= 0.0) || !(s <= 1.0))
            raise(ErrorKind::argument, "region confidence: scores must lie in [0, 1]");
    if (!(phi_left > 0.0) || !(phi_right < 0.0))
        raise(ErrorKind::argument, "region confidence: need phi_left > 0 > phi_right");
}

double RegionConfidence::max_score() const { return std::max({left, center, right}); }

Region RegionConfidence::argmax_region() const {
    if (center >= left && center >= right) return Region::center;
    if (left >= right) return Region::left;
    return Region::right;
}

HighLevelCommand command_from_confidence(const RegionConfidence& rc) {
    rc.validate();
    const double s_max = rc.max_score();

    HighLevelCommand cmd;
    if (s_max > 0.65) {
        switch (rc.argmax_region()) {
        case Region::left: cmd.theta_cmd = rc.phi_left; break;
        case Region::center: cmd.theta_cmd = rc.phi_center; break;
        case Region::right: cmd.theta_cmd = rc.phi_right; break;
        }
    } else {
        cmd.theta_cmd = 0.0;
    }

    if (s_max > 0.80)
        cmd.d_cmd = 1.0 + 0.3 * s_max;
    else if (s_max > 0.65)
        cmd.d_cmd = 2.0 + 0.5 * s_max;
    else
        cmd.d_cmd = 3.0;
    return cmd;
}

Vec2 to_world(const HighLevelCommand& cmd, const Pose2D& pose) {
    const double azimuth = pose.heading + cmd.theta_cmd;
    return pose.position() + cmd.d_cmd * Vec2(std::cos(azimuth), std::sin(azimuth));
}

std::pair<ArrivalDetector, bool> arrival_update(const ArrivalDetector& det,
                                                const RegionConfidence& rc) {
    rc.validate();
    if (det.K < 1) raise(ErrorKind::argument, "arrival detector: K must be >= 1");
    ArrivalDetector next = det;
    const bool qualifies =
        rc.argmax_region() == Region::center && rc.max_score() > det.confidence_threshold;
    next.consecutive_center_count = qualifies ? det.consecutive_center_count + 1 : 0;
    return {next, next.consecutive_center_count >= det.K};
}

} // namespace vnav
