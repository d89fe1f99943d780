#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <cmath>
#include <vector>

#include "vnav/error.hpp"

namespace vnav {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

inline constexpr double kPi = 3.14159265358979323846;

// Robot frame: y forward, x right, z up. Straight ahead is theta = pi/2.
inline constexpr double kForwardAngle = kPi / 2.0;

// Normalizes an angle to (-pi, pi].
double normalize_angle(double a);

// True if R is orthonormal with det +1 within `tol`.
bool is_rotation(const Mat3& R, double tol = 1e-9);

// Pinhole intrinsics with Brown-Conrady radial-tangential distortion
// (k1, k2, p1, p2[, k3]). Units: pixels.
struct CameraIntrinsics {
    double fx = 0.0;
    double fy = 0.0;
    double cx = 0.0;
    double cy = 0.0;
    int width = 0;
    int height = 0;
    std::vector<double> distortion; // empty means no distortion

    void validate() const;
    bool has_distortion() const;

    // Square-pixel intrinsics from a horizontal field of view, principal
    // point at the image center.
    static CameraIntrinsics from_hfov(int width, int height, double hfov_rad);
};

// Rigid transform camera frame -> robot frame. The camera optical frame is
// z-forward, x-right, y-down; translation is (lateral, longitudinal, height)
// in the robot frame.
struct CameraExtrinsics {
    Mat3 rotation = Mat3::Identity();
    Vec3 translation = Vec3::Zero();

    void validate() const;

    // Fixed axis permutation: cam z -> robot y, cam x -> robot x,
    // cam y -> robot -z. A level forward-facing camera.
    static Mat3 base_rotation();

    // Camera yawed about robot z by `yaw` (0 = forward, +left) and pitched
    // down by `pitch_down`, mounted at `translation`.
    static CameraExtrinsics mounted(const Vec3& translation, double pitch_down = 0.0,
                                    double yaw = 0.0);
};

// World-frame planar pose. `heading` is the azimuth of the robot's forward
// (+y) axis, normalized to (-pi, pi].
struct Pose2D {
    double x = 0.0;
    double y = 0.0;
    double heading = kForwardAngle;

    Vec2 position() const { return {x, y}; }
    // Unit axes of the robot frame expressed in the world frame.
    Vec2 forward_axis() const { return {std::cos(heading), std::sin(heading)}; }
    Vec2 right_axis() const { return {std::sin(heading), -std::cos(heading)}; }

    Vec2 to_world(const Vec2& p_robot) const;
    Vec2 to_robot(const Vec2& p_world) const;
};

// Cuboid body split at the drive center: x in [-W/2, W/2],
// y in [-L_rear, L_front]. h_robot is the physical height.
struct RobotBody {
    double L_front = 0.20;
    double L_rear = 0.20;
    double W = 0.40;
    double h_robot = 0.45;

    void validate() const;
    double circumscribed_radius() const;
};

struct DynamicLimits {
    double v_max = 0.5;        // m/s
    double omega_max = kPi / 2; // rad/s
    double a_v_max = 3.0;      // m/s^2
    double a_omega_max = 3.0;  // rad/s^2

    void validate() const;
};

// [(u-cx)*Z/fx, (v-cy)*Z/fy, Z] in the camera frame. (u, v) must already be
// free of lens distortion.
Vec3 backproject_pixel(const CameraIntrinsics& intr, double u, double v, double Z);

// Pinhole projection with the distortion model applied. p.z must be > 0.
Vec2 project_point(const CameraIntrinsics& intr, const Vec3& p);

// Applies the radial-tangential model to normalized image coordinates.
Vec2 distort_normalized(const CameraIntrinsics& intr, const Vec2& xn);

// Inverts the distortion model for pixel (u, v); returns normalized image
// coordinates with reprojection residual < 1e-10.
Vec2 undistort_pixel(const CameraIntrinsics& intr, double u, double v);

// Axis-angle rotation vector -> rotation matrix and back. The inverse
// returns the vector with angle in [0, pi].
Mat3 rodrigues(const Vec3& rvec);
Vec3 rodrigues_inv(const Mat3& R);

// p_rob = R * p_cam + t.
Vec3 cam_to_robot(const CameraExtrinsics& ext, const Vec3& p_cam);

} // namespace vnav
