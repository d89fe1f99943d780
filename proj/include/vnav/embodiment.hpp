#pragma once

#include <string>
#include <vector>

#include "vnav/geometry.hpp"

namespace vnav {

// One mounted camera together with its depth-scale calibration.
struct CameraRig {
    CameraIntrinsics intrinsics;
    CameraExtrinsics extrinsics;
    double s1 = 1.0;
    double s2 = 0.0;
    std::string calibration_ref; // path the calibration was loaded from, if any

    void validate() const {
        intrinsics.validate();
        extrinsics.validate();
        if (!(s1 > 0.0)) raise(ErrorKind::argument, "camera rig: s1 must be positive");
    }
};

// Body geometry, dynamic limits and camera setup of one robot.
struct EmbodimentProfile {
    std::string name = "robot";
    RobotBody body;
    DynamicLimits limits;
    std::vector<CameraRig> cameras;

    void validate() const {
        body.validate();
        limits.validate();
        for (const CameraRig& cam : cameras) cam.validate();
    }
};

} // namespace vnav
