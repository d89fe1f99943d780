#include "vnav/calibration.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace vnav {

namespace {

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
    auto cross = [](const Vec2& p, const Vec2& q) { return p.x() * q.y() - p.y() * q.x(); };
    const double d1 = cross(b - a, c - a);
    const double d2 = cross(b - a, d - a);
    const double d3 = cross(d - c, a - c);
    const double d4 = cross(d - c, b - c);
    return ((d1 > 0) != (d2 > 0)) && ((d3 > 0) != (d4 > 0));
}

} // namespace

void MarkerObservation::validate() const {
    if (!(marker_size > 0.0))
        raise(ErrorKind::argument, "marker observation: marker_size must be positive");
    for (const Vec2& c : corners)
        if (!c.allFinite())
            raise(ErrorKind::argument, "marker observation: non-finite corner");
    // A simple quadrilateral: opposite edges must not cross.
    if (segments_intersect(corners[0], corners[1], corners[2], corners[3]) ||
        segments_intersect(corners[1], corners[2], corners[3], corners[0]))
        raise(ErrorKind::argument, "marker observation: self-intersecting corner quadrilateral");
}

std::array<Vec3, 4> marker_object_points(double marker_size) {
    if (!(marker_size > 0.0))
        raise(ErrorKind::argument, "marker_object_points: marker_size must be positive");
    const double h = marker_size / 2.0;
    return {Vec3(-h, h, 0.0), Vec3(h, h, 0.0), Vec3(h, -h, 0.0), Vec3(-h, -h, 0.0)};
}

namespace {

// Homography marker plane -> normalized image plane, DLT over the 4 corners.
Eigen::Matrix3d corner_homography(const std::array<Vec3, 4>& obj,
                                  const std::array<Vec2, 4>& norm) {
    Eigen::Matrix<double, 8, 9> M = Eigen::Matrix<double, 8, 9>::Zero();
    for (int i = 0; i < 4; ++i) {
        const double X = obj[i].x(), Y = obj[i].y();
        const double x = norm[i].x(), y = norm[i].y();
        M.row(2 * i) << X, Y, 1, 0, 0, 0, -x * X, -x * Y, -x;
        M.row(2 * i + 1) << 0, 0, 0, X, Y, 1, -y * X, -y * Y, -y;
    }
    Eigen::JacobiSVD<Eigen::Matrix<double, 8, 9>> svd(M, Eigen::ComputeFullV);
    const Eigen::Matrix<double, 9, 1> h = svd.matrixV().col(8);
    Eigen::Matrix3d H;
    H << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
    return H;
}

Mat3 closest_rotation(const Mat3& M) {
    Eigen::JacobiSVD<Mat3> svd(M, Eigen::ComputeFullU | Eigen::ComputeFullV);
    Mat3 R = svd.matrixU() * svd.matrixV().transpose();
    if (R.determinant() < 0.0) {
        Mat3 D = Mat3::Identity();
        D(2, 2) = -1.0;
        R = svd.matrixU() * D * svd.matrixV().transpose();
    }
    return R;
}

// Sum over corners of the squared pixel reprojection error; +inf when a
// corner lands behind the camera.
double reprojection_cost(const CameraIntrinsics& intr, const std::array<Vec3, 4>& obj,
                         const std::array<Vec2, 4>& observed,
                         const Eigen::Matrix<double, 6, 1>& beta) {
    const Mat3 R = rodrigues(beta.head<3>());
    const Vec3 t = beta.tail<3>();
    double cost = 0.0;
    for (int i = 0; i < 4; ++i) {
        const Vec3 p = R * obj[i] + t;
        if (!(p.z() > 0.0)) return std::numeric_limits<double>::infinity();
        cost += (project_point(intr, p) - observed[i]).squaredNorm();
    }
    return cost;
}

Eigen::Matrix<double, 8, 1> reprojection_residual(const CameraIntrinsics& intr,
                                                  const std::array<Vec3, 4>& obj,
                                                  const std::array<Vec2, 4>& observed,
                                                  const Eigen::Matrix<double, 6, 1>& beta) {
    const Mat3 R = rodrigues(beta.head<3>());
    const Vec3 t = beta.tail<3>();
    Eigen::Matrix<double, 8, 1> r;
    for (int i = 0; i < 4; ++i) {
        const Vec3 p = R * obj[i] + t;
        if (!(p.z() > 0.0))
            raise(ErrorKind::behind_camera, "pnp: corner behind camera during refinement");
        r.segment<2>(2 * i) = project_point(intr, p) - observed[i];
    }
    return r;
}

} // namespace

MarkerPose estimate_marker_pose(const CameraIntrinsics& intr, const MarkerObservation& obs) {
    intr.validate();
    obs.validate();

    const std::array<Vec3, 4> obj = marker_object_points(obs.marker_size);

    double scale = 0.0;
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            scale = std::max(scale, (obs.corners[i] - obs.corners[j]).norm());
    if (scale <= 0.0)
        raise(ErrorKind::degenerate, "pnp: coincident marker corners");
    for (int i = 0; i < 4; ++i)
        for (int j = i + 1; j < 4; ++j)
            for (int k = j + 1; k < 4; ++k) {
                const Vec2 e1 = obs.corners[j] - obs.corners[i];
                const Vec2 e2 = obs.corners[k] - obs.corners[i];
                const double area2 = std::abs(e1.x() * e2.y() - e1.y() * e2.x());
                if (area2 <= 1e-9 * scale * scale)
                    raise(ErrorKind::degenerate, "pnp: collinear marker corners");
            }

    std::array<Vec2, 4> norm;
    for (int i = 0; i < 4; ++i)
        norm[i] = undistort_pixel(intr, obs.corners[i].x(), obs.corners[i].y());

    const Eigen::Matrix3d H = corner_homography(obj, norm);
    Vec3 h1 = H.col(0), h2 = H.col(1), h3 = H.col(2);
    const double denom = h1.norm() + h2.norm();
    if (!(denom > 0.0))
        raise(ErrorKind::degenerate, "pnp: degenerate homography");
    const double lam = 2.0 / denom;
    Vec3 r1 = lam * h1, r2 = lam * h2, t = lam * h3;
    if (t.z() < 0.0) {
        r1 = -r1;
        r2 = -r2;
        t = -t;
    }
    Mat3 R0;
    R0.col(0) = r1;
    R0.col(1) = r2;
    R0.col(2) = r1.cross(r2);
    const Mat3 R_init = closest_rotation(R0);

    Eigen::Matrix<double, 6, 1> beta;
    beta.head<3>() = rodrigues_inv(R_init);
    beta.tail<3>() = t;

    double cost = reprojection_cost(intr, obj, obs.corners, beta);
    std::ostringstream trace;
    trace << std::sqrt(cost / 4.0);
    if (!std::isfinite(cost))
        raise(ErrorKind::non_convergence, "pnp: initialization behind camera");

    for (int iter = 0; iter < 50; ++iter) {
        Eigen::Matrix<double, 8, 6> J;
        for (int j = 0; j < 6; ++j) {
            const double h = 1e-7 * std::max(1.0, std::abs(beta(j)));
            Eigen::Matrix<double, 6, 1> bp = beta, bm = beta;
            bp(j) += h;
            bm(j) -= h;
            J.col(j) = (reprojection_residual(intr, obj, obs.corners, bp) -
                        reprojection_residual(intr, obj, obs.corners, bm)) /
                       (2.0 * h);
        }
        const Eigen::Matrix<double, 8, 1> r = reprojection_residual(intr, obj, obs.corners, beta);
        const Eigen::Matrix<double, 6, 1> delta =
            (J.transpose() * J).ldlt().solve(-J.transpose() * r);
        if (!delta.allFinite())
            raise(ErrorKind::non_convergence,
                  "pnp: normal equations produced non-finite step; rms trace px: " + trace.str());

        double alpha = 1.0;
        double new_cost = std::numeric_limits<double>::infinity();
        for (int halving = 0; halving < 25; ++halving) {
            new_cost = reprojection_cost(intr, obj, obs.corners, beta + alpha * delta);
            if (new_cost <= cost) break;
            alpha /= 2.0;
        }
        if (new_cost > cost) break; // stationary: no descent direction left
        beta += alpha * delta;
        cost = new_cost;
        trace << " " << std::sqrt(cost / 4.0);
        if ((alpha * delta).norm() < 1e-10) break;
    }

    if (!std::isfinite(cost))
        raise(ErrorKind::non_convergence, "pnp: diverged; rms trace px: " + trace.str());
    if (!(beta(5) > 0.0))
        raise(ErrorKind::behind_camera, "pnp: refined pose places marker behind camera");

    MarkerPose pose;
    pose.rvec = beta.head<3>();
    pose.tvec = beta.tail<3>();
    pose.reprojection_rms = std::sqrt(cost / 4.0);
    return pose;
}

std::array<double, 4> corner_depths(const MarkerPose& pose, double marker_size) {
    const std::array<Vec3, 4> obj = marker_object_points(marker_size);
    const Mat3 R = rodrigues(pose.rvec);
    std::array<double, 4> depths{};
    for (int i = 0; i < 4; ++i) {
        depths[i] = (R * obj[i] + pose.tvec).z();
        if (!(depths[i] > 0.0))
            raise(ErrorKind::behind_camera, "corner_depths: corner at or behind the camera");
    }
    return depths;
}

DepthSample sample_relative_depth(const DepthImage& img, double u, double v) {
    if (img.width < 2 || img.height < 2)
        raise(ErrorKind::argument, "sample_relative_depth: image too small");
    if (!(u >= 0.0) || !(v >= 0.0) || !(u <= img.width - 1.0) || !(v <= img.height - 1.0))
        raise(ErrorKind::argument, "sample_relative_depth: sample point outside image");

    const int u0 = std::min(static_cast<int>(std::floor(u)), img.width - 2);
    const int v0 = std::min(static_cast<int>(std::floor(v)), img.height - 2);
    const double du = u - u0, dv = v - v0;

    const int us[4] = {u0, u0 + 1, u0, u0 + 1};
    const int vs[4] = {v0, v0, v0 + 1, v0 + 1};
    bool all_valid = true;
    for (int i = 0; i < 4; ++i) all_valid &= img.valid(us[i], vs[i]);

    if (all_valid) {
        const double f00 = img.at(u0, v0), f10 = img.at(u0 + 1, v0);
        const double f01 = img.at(u0, v0 + 1), f11 = img.at(u0 + 1, v0 + 1);
        const double value = (1.0 - dv) * ((1.0 - du) * f00 + du * f10) +
                             dv * ((1.0 - du) * f01 + du * f11);
        return {value, false};
    }

    double best_d2 = std::numeric_limits<double>::infinity();
    double best_value = 0.0;
    for (int i = 0; i < 4; ++i) {
        if (!img.valid(us[i], vs[i])) continue;
        const double d2 = (u - us[i]) * (u - us[i]) + (v - vs[i]) * (v - vs[i]);
        if (d2 < best_d2) {
            best_d2 = d2;
            best_value = img.at(us[i], vs[i]);
        }
    }
    if (!std::isfinite(best_d2))
        raise(ErrorKind::invalid_depth, "sample_relative_depth: all four neighbors invalid");
    return {best_value, true};
}

RidgeSolution solve_ridge(const Eigen::MatrixX2d& A, const Eigen::VectorXd& b, double lambda) {
    const auto n = A.rows();
    if (n < 2) raise(ErrorKind::argument, "solve_ridge: need at least 2 rows");
    if (b.size() != n) raise(ErrorKind::argument, "solve_ridge: A and b row counts differ");
    if (lambda < 0.0) raise(ErrorKind::argument, "solve_ridge: lambda must be >= 0");

    const Eigen::Matrix2d M =
        A.transpose() * A + lambda * Eigen::Matrix2d::Identity();
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(M);
    const double e_min = eig.eigenvalues()(0);
    const double e_max = eig.eigenvalues()(1);
    if (e_min <= 1e-12 * e_max)
        raise(ErrorKind::ill_conditioned,
              "solve_ridge: normal matrix is singular; add samples at both a near and a "
              "far distance");

    const Eigen::Vector2d x = M.llt().solve(A.transpose() * b);
    RidgeSolution sol;
    sol.s1 = x(0);
    sol.s2 = x(1);
    sol.condition_number = e_max / e_min;
    sol.residual_rms = std::sqrt((A * x - b).squaredNorm() / static_cast<double>(n));
    return sol;
}

CalibrationResult calibrate(const std::vector<CalibrationImage>& images,
                            const CameraIntrinsics& intr, double lambda) {
    if (images.empty())
        raise(ErrorKind::empty_input, "calibrate: no images");
    intr.validate();

    std::vector<CalibrationSample> samples;
    std::vector<std::string> warnings;
    size_t skipped_samples = 0;
    size_t fallback_samples = 0;

    for (const CalibrationImage& image : images) {
        if (image.relative.kind != DepthKind::relative_inverse)
            raise(ErrorKind::argument, "calibrate: depth images must be relative-inverse");
        for (const MarkerObservation& obs : image.markers) {
            MarkerPose pose;
            std::array<double, 4> depths{};
            try {
                pose = estimate_marker_pose(intr, obs);
                depths = corner_depths(pose, obs.marker_size);
            } catch (const Error& e) {
                warnings.push_back("marker " + std::to_string(obs.marker_id) + " in image '" +
                                   obs.image_id + "' skipped: " + e.what());
                continue;
            }
            for (int c = 0; c < 4; ++c) {
                try {
                    const DepthSample s =
                        sample_relative_depth(image.relative, obs.corners[c].x(), obs.corners[c].y());
                    if (s.fallback) ++fallback_samples;
                    samples.push_back({s.value, depths[c], s.fallback});
                } catch (const Error&) {
                    ++skipped_samples;
                }
            }
        }
    }

    if (skipped_samples > 0)
        warnings.push_back(std::to_string(skipped_samples) +
                           " corner sample(s) skipped: no valid depth neighbors");
    if (fallback_samples > 0)
        warnings.push_back(std::to_string(fallback_samples) +
                           " corner sample(s) used nearest-valid fallback interpolation");
    if (samples.size() < 2)
        raise(ErrorKind::empty_input, "calibrate: fewer than 2 usable corner samples");

    Eigen::MatrixX2d A(samples.size(), 2);
    Eigen::VectorXd b(samples.size());
    double z_min = std::numeric_limits<double>::infinity();
    double z_max = 0.0;
    for (size_t i = 0; i < samples.size(); ++i) {
        A(static_cast<Eigen::Index>(i), 0) = samples[i].d_pred;
        A(static_cast<Eigen::Index>(i), 1) = 1.0;
        b(static_cast<Eigen::Index>(i)) = 1.0 / samples[i].z_real;
        z_min = std::min(z_min, samples[i].z_real);
        z_max = std::max(z_max, samples[i].z_real);
    }

    const RidgeSolution sol = solve_ridge(A, b, lambda);

    CalibrationResult result;
    result.s1 = sol.s1;
    result.s2 = sol.s2;
    result.lambda = lambda;
    result.residual_rms = sol.residual_rms;
    result.depth_spread_ratio = z_max / z_min;
    result.condition_number = sol.condition_number;
    result.sample_count = samples.size();
    result.warnings = std::move(warnings);

    if (result.depth_spread_ratio < 2.0) {
        std::ostringstream w;
        w << "depth_spread_ratio " << result.depth_spread_ratio
          << " < 2: add views at both a near and a far distance";
        result.warnings.push_back(w.str());
    }
    if (result.condition_number > 1e6) {
        std::ostringstream w;
        w << "condition_number " << result.condition_number << " > 1e6: samples are depth-clustered";
        result.warnings.push_back(w.str());
    }
    if (!(result.s1 > 0.0))
        result.warnings.push_back("s1 <= 0: calibration is not physically meaningful");
    return result;
}

DepthImage apply_scale_correction(const DepthImage& relative, double s1, double s2) {
    if (relative.kind != DepthKind::relative_inverse)
        raise(ErrorKind::argument, "apply_scale_correction: input must be relative-inverse");
    DepthImage out = relative;
    out.kind = DepthKind::metric;
    for (double& p : out.data) {
        if (!std::isfinite(p)) {
            p = std::numeric_limits<double>::quiet_NaN();
            continue;
        }
        const double den = s1 * static_cast<double>(p) + s2;
        p = den <= kCorrectionDenominatorFloor
                ? std::numeric_limits<double>::quiet_NaN()
                : 1.0 / den;
    }
    return out;
}

} // namespace vnav
