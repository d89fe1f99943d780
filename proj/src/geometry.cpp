#include "vnav/geometry.hpp"

#include <Eigen/Dense>

#include <sstream>

namespace vnav {

double normalize_angle(double a) {
    double r = std::fmod(a + kPi, 2.0 * kPi);
    if (r <= 0.0) r += 2.0 * kPi;
    return r - kPi;
}

bool is_rotation(const Mat3& R, double tol) {
    const Mat3 should_be_identity = R.transpose() * R;
    if ((should_be_identity - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
    return std::abs(R.determinant() - 1.0) <= tol;
}

void CameraIntrinsics::validate() const {
    if (!(fx > 0.0) || !(fy > 0.0))
        raise(ErrorKind::argument, "intrinsics: focal lengths must be positive");
    if (width <= 0 || height <= 0)
        raise(ErrorKind::argument, "intrinsics: image dimensions must be positive");
    if (!(cx >= 0.0 && cx < width) || !(cy >= 0.0 && cy < height))
        raise(ErrorKind::argument, "intrinsics: principal point outside image");
    if (!distortion.empty() && distortion.size() != 4 && distortion.size() != 5)
        raise(ErrorKind::argument, "intrinsics: distortion must be (k1,k2,p1,p2[,k3])");
}

bool CameraIntrinsics::has_distortion() const {
    for (double d : distortion)
        if (d != 0.0) return true;
    return false;
}

CameraIntrinsics CameraIntrinsics::from_hfov(int width, int height, double hfov_rad) {
    CameraIntrinsics intr;
    intr.width = width;
    intr.height = height;
    intr.fx = intr.fy = (width / 2.0) / std::tan(hfov_rad / 2.0);
    intr.cx = width / 2.0;
    intr.cy = height / 2.0;
    intr.validate();
    return intr;
}

void CameraExtrinsics::validate() const {
    if (!is_rotation(rotation))
        raise(ErrorKind::argument, "extrinsics: rotation is not a rotation matrix");
}

Mat3 CameraExtrinsics::base_rotation() {
    Mat3 R;
    // columns: images of the camera x, y, z axes in the robot frame
    R << 1, 0, 0,
         0, 0, 1,
         0, -1, 0;
    return R;
}

CameraExtrinsics CameraExtrinsics::mounted(const Vec3& translation, double pitch_down, double yaw) {
    CameraExtrinsics ext;
    const Mat3 Rz = Eigen::AngleAxisd(yaw, Vec3::UnitZ()).toRotationMatrix();
    const Mat3 Rx = Eigen::AngleAxisd(-pitch_down, Vec3::UnitX()).toRotationMatrix();
    ext.rotation = Rz * base_rotation() * Rx;
    ext.translation = translation;
    return ext;
}

Vec2 Pose2D::to_world(const Vec2& p_robot) const {
    return position() + right_axis() * p_robot.x() + forward_axis() * p_robot.y();
}

Vec2 Pose2D::to_robot(const Vec2& p_world) const {
    const Vec2 d = p_world - position();
    return {d.dot(right_axis()), d.dot(forward_axis())};
}

void RobotBody::validate() const {
    if (!(L_front > 0.0) || !(L_rear > 0.0) || !(W > 0.0) || !(h_robot > 0.0))
        raise(ErrorKind::argument, "body: all dimensions must be strictly positive");
}

double RobotBody::circumscribed_radius() const {
    const double l = std::max(L_front, L_rear);
    return std::sqrt(l * l + (W / 2.0) * (W / 2.0));
}

void DynamicLimits::validate() const {
    if (!(v_max > 0.0) || !(omega_max > 0.0) || !(a_v_max > 0.0) || !(a_omega_max > 0.0))
        raise(ErrorKind::argument, "limits: all limits must be strictly positive");
}

Vec3 backproject_pixel(const CameraIntrinsics& intr, double u, double v, double Z) {
    if (!std::isfinite(Z) || Z <= 0.0)
        raise(ErrorKind::invalid_depth, "backproject_pixel: depth must be finite and positive");
    return {(u - intr.cx) * Z / intr.fx, (v - intr.cy) * Z / intr.fy, Z};
}

Vec2 distort_normalized(const CameraIntrinsics& intr, const Vec2& xn) {
    if (intr.distortion.empty()) return xn;
    const double k1 = intr.distortion[0];
    const double k2 = intr.distortion.size() > 1 ? intr.distortion[1] : 0.0;
    const double p1 = intr.distortion.size() > 2 ? intr.distortion[2] : 0.0;
    const double p2 = intr.distortion.size() > 3 ? intr.distortion[3] : 0.0;
    const double k3 = intr.distortion.size() > 4 ? intr.distortion[4] : 0.0;

    const double x = xn.x(), y = xn.y();
    const double r2 = x * x + y * y;
    const double radial = 1.0 + r2 * (k1 + r2 * (k2 + r2 * k3));
    const double xd = x * radial + 2.0 * p1 * x * y + p2 * (r2 + 2.0 * x * x);
    const double yd = y * radial + p1 * (r2 + 2.0 * y * y) + 2.0 * p2 * x * y;
    return {xd, yd};
}

Vec2 project_point(const CameraIntrinsics& intr, const Vec3& p) {
    if (!(p.z() > 0.0))
        raise(ErrorKind::behind_camera, "project_point: point is behind the camera");
    const Vec2 xd = distort_normalized(intr, {p.x() / p.z(), p.y() / p.z()});
    return {intr.fx * xd.x() + intr.cx, intr.fy * xd.y() + intr.cy};
}

Vec2 undistort_pixel(const CameraIntrinsics& intr, double u, double v) {
    const Vec2 target((u - intr.cx) / intr.fx, (v - intr.cy) / intr.fy);
    if (!intr.has_distortion()) return target;

    Vec2 x = target;
    constexpr int kMaxIter = 100;
    for (int i = 0; i < kMaxIter; ++i) {
        const Vec2 distorted = distort_normalized(intr, x);
        const Vec2 err = distorted - target;
        if (err.cwiseAbs().maxCoeff() < 1e-13) break;
        x -= err;
    }
    const double residual = (distort_normalized(intr, x) - target).norm();
    if (residual >= 1e-10) {
        std::ostringstream msg;
        msg << "undistort_pixel: no convergence at (" << u << ", " << v
            << "), residual " << residual;
        raise(ErrorKind::non_convergence, msg.str());
    }
    return x;
}

Mat3 rodrigues(const Vec3& rvec) {
    const double angle = rvec.norm();
    if (angle == 0.0) return Mat3::Identity();
    return Eigen::AngleAxisd(angle, rvec / angle).toRotationMatrix();
}

Vec3 rodrigues_inv(const Mat3& R) {
    if (!is_rotation(R))
        raise(ErrorKind::argument, "rodrigues_inv: matrix is not a rotation");
    const Eigen::AngleAxisd aa(R);
    return aa.angle() * aa.axis();
}

Vec3 cam_to_robot(const CameraExtrinsics& ext, const Vec3& p_cam) {
    return ext.rotation * p_cam + ext.translation;
}

} // namespace vnav
