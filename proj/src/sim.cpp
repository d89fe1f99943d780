#include "vnav/sim.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>
#include <random>

#include "vnav/calibration.hpp"

namespace vnav {

namespace {

constexpr double kRayEps = 1e-9;
constexpr double kWallThickness = 0.2;
constexpr double kWallHeight = 3.0;
constexpr double kMinRange = 1e-9;

bool height_bands_overlap(double z0, double height, double band_lo, double band_hi) {
    return z0 < band_hi && z0 + height > band_lo;
}

std::vector<Box> wall_boxes(const World& w) {
    const double mx = (w.bounds_min.x() + w.bounds_max.x()) / 2.0;
    const double my = (w.bounds_min.y() + w.bounds_max.y()) / 2.0;
    const double hx = (w.bounds_max.x() - w.bounds_min.x()) / 2.0;
    const double hy = (w.bounds_max.y() - w.bounds_min.y()) / 2.0;
    const double t = kWallThickness / 2.0;
    std::vector<Box> walls(4);
    walls[0] = {{w.bounds_min.x() - t, my}, {t, hy + kWallThickness}, kWallHeight, 0.0};
    walls[1] = {{w.bounds_max.x() + t, my}, {t, hy + kWallThickness}, kWallHeight, 0.0};
    walls[2] = {{mx, w.bounds_min.y() - t}, {hx + kWallThickness, t}, kWallHeight, 0.0};
    walls[3] = {{mx, w.bounds_max.y() + t}, {hx + kWallThickness, t}, kWallHeight, 0.0};
    return walls;
}

std::array<Vec2, 4> body_corners_world(const Pose2D& pose, const RobotBody& body) {
    const double hw = body.W / 2.0;
    return {pose.to_world({-hw, body.L_front}), pose.to_world({hw, body.L_front}),
            pose.to_world({hw, -body.L_rear}), pose.to_world({-hw, -body.L_rear})};
}

} // namespace

uint64_t mix_seed(uint64_t a, uint64_t b) {
    uint64_t x = a + 0x9E3779B97F4A7C15ull * (b + 0x632BE59BD9B4E019ull);
    x ^= x >> 30;
    x *= 0xBF58476D1CE4E5B9ull;
    x ^= x >> 27;
    x *= 0x94D049BB133111EBull;
    x ^= x >> 31;
    return x;
}

void World::validate(const RobotBody& body) const {
    if (!(bounds_min.x() < bounds_max.x()) || !(bounds_min.y() < bounds_max.y()))
        raise(ErrorKind::argument, "world: empty bounds rectangle");
    for (const Cylinder& c : cylinders)
        if (!(c.radius > 0.0) || !(c.height > 0.0))
            raise(ErrorKind::argument, "world: cylinder needs positive radius and height");
    for (const Box& b : boxes)
        if (!(b.half_extents.x() > 0.0) || !(b.half_extents.y() > 0.0) || !(b.height > 0.0))
            raise(ErrorKind::argument, "world: box needs positive extents and height");
    if (!contains(start.position()) || !contains(goal))
        raise(ErrorKind::argument, "world: start or goal outside bounds");
    if (check_collision(*this, start, body))
        raise(ErrorKind::argument, "world: start pose collides");
    if (check_collision(*this, Pose2D{goal.x(), goal.y(), kForwardAngle}, body))
        raise(ErrorKind::argument, "world: goal position collides");
}

void EpisodeConfig::validate() const {
    if (!(dt > 0.0)) raise(ErrorKind::argument, "episode config: dt must be positive");
    if (!(timeout_s > 0.0)) raise(ErrorKind::argument, "episode config: timeout must be positive");
    embodiment.validate();
    if (distortion) distortion->validate();
    scan.validate();
    planner.validate();
}

Mat3 robot_to_world_rotation(double heading) {
    return Eigen::AngleAxisd(heading - kForwardAngle, Vec3::UnitZ()).toRotationMatrix();
}

CameraPose camera_world_pose(const Pose2D& robot, const CameraExtrinsics& ext) {
    const Mat3 R_rw = robot_to_world_rotation(robot.heading);
    CameraPose cam;
    cam.rotation = R_rw * ext.rotation;
    cam.position = Vec3(robot.x, robot.y, 0.0) + R_rw * ext.translation;
    return cam;
}

namespace {

// Nearest positive hit of O + t*D with the cylinder's lateral surface or top
// cap; returns infinity on a miss.
double ray_cylinder(const Vec3& O, const Vec3& D, const Cylinder& c) {
    double best = std::numeric_limits<double>::infinity();
    const double ox = O.x() - c.center.x(), oy = O.y() - c.center.y();
    const double a = D.x() * D.x() + D.y() * D.y();
    if (a > 1e-18) {
        const double b = ox * D.x() + oy * D.y();
        const double q = ox * ox + oy * oy - c.radius * c.radius;
        const double disc = b * b - a * q;
        if (disc >= 0.0) {
            const double sq = std::sqrt(disc);
            for (const double t : {(-b - sq) / a, (-b + sq) / a}) {
                if (t <= kRayEps) continue;
                const double z = O.z() + t * D.z();
                if (z >= c.z0 && z <= c.z0 + c.height) {
                    best = t;
                    break;
                }
            }
        }
    }
    if (std::abs(D.z()) > 1e-15) {
        const double t = (c.z0 + c.height - O.z()) / D.z();
        if (t > kRayEps && t < best) {
            const double hx = ox + t * D.x(), hy = oy + t * D.y();
            if (hx * hx + hy * hy <= c.radius * c.radius) best = t;
        }
    }
    return best;
}

double ray_box(const Vec3& O, const Vec3& D, const Box& b) {
    const double lo[3] = {b.center.x() - b.half_extents.x(), b.center.y() - b.half_extents.y(),
                          b.z0};
    const double hi[3] = {b.center.x() + b.half_extents.x(), b.center.y() + b.half_extents.y(),
                          b.z0 + b.height};
    double t_near = -std::numeric_limits<double>::infinity();
    double t_far = std::numeric_limits<double>::infinity();
    for (int axis = 0; axis < 3; ++axis) {
        const double o = O(axis), d = D(axis);
        if (std::abs(d) < 1e-15) {
            if (o < lo[axis] || o > hi[axis]) return std::numeric_limits<double>::infinity();
            continue;
        }
        double t1 = (lo[axis] - o) / d;
        double t2 = (hi[axis] - o) / d;
        if (t1 > t2) std::swap(t1, t2);
        t_near = std::max(t_near, t1);
        t_far = std::min(t_far, t2);
        if (t_near > t_far) return std::numeric_limits<double>::infinity();
    }
    return t_near > kRayEps ? t_near : std::numeric_limits<double>::infinity();
}

} // namespace

DepthImage render_depth(const World& world, const CameraPose& cam, const CameraIntrinsics& intr,
                        const RenderOptions& opts) {
    intr.validate();
    if (opts.stride < 1) raise(ErrorKind::argument, "render_depth: stride must be >= 1");
    if (!(opts.max_range > 0.0)) raise(ErrorKind::argument, "render_depth: max_range must be > 0");
    if (!is_rotation(cam.rotation))
        raise(ErrorKind::argument, "render_depth: camera rotation is not a rotation matrix");

    const Vec2 cam_xy(cam.position.x(), cam.position.y());
    const bool cull = std::isfinite(opts.max_range);

    std::vector<Cylinder> cyls;
    for (const Cylinder& c : world.cylinders)
        if (!cull || (c.center - cam_xy).norm() - c.radius <= opts.max_range) cyls.push_back(c);
    std::vector<Box> boxes = world.boxes;
    for (const Box& wbox : wall_boxes(world)) boxes.push_back(wbox);
    if (cull) {
        std::vector<Box> kept;
        for (const Box& b : boxes)
            if ((b.center - cam_xy).norm() - b.half_extents.norm() <= opts.max_range)
                kept.push_back(b);
        boxes.swap(kept);
    }

    DepthImage img = DepthImage::constant(intr.width, intr.height,
                                          std::numeric_limits<double>::quiet_NaN(),
                                          DepthKind::metric);
    std::vector<double> xn(static_cast<size_t>(intr.width));
    std::vector<double> yn(static_cast<size_t>(intr.height));
    for (int u = 0; u < intr.width; ++u) xn[static_cast<size_t>(u)] = (u - intr.cx) / intr.fx;
    for (int v = 0; v < intr.height; ++v) yn[static_cast<size_t>(v)] = (v - intr.cy) / intr.fy;

    for (int v = 0; v < intr.height; v += opts.stride) {
        for (int u = 0; u < intr.width; u += opts.stride) {
            const Vec3 d_cam(xn[static_cast<size_t>(u)], yn[static_cast<size_t>(v)], 1.0);
            const Vec3 D = cam.rotation * d_cam;
            double best = std::numeric_limits<double>::infinity();
            if (std::abs(D.z()) > 1e-15) {
                const double t = -cam.position.z() / D.z();
                if (t > kRayEps) best = t;
            }
            for (const Cylinder& c : cyls) best = std::min(best, ray_cylinder(cam.position, D, c));
            for (const Box& b : boxes) best = std::min(best, ray_box(cam.position, D, b));
            if (std::isfinite(best) && best <= opts.max_range)
                img.at(u, v) = best;
        }
    }
    return img;
}

namespace {

// Applies fn(bin, lo, hi) to every bin whose sector overlaps the unwrapped
// angular interval [lo, hi] (width <= 2*pi); lo/hi passed to fn stay in the
// interval's own unwrapped coordinates.
template <typename Fn>
void for_bins_in_interval(const ScanConfig& cfg, double lo, double hi, Fn&& fn) {
    const double width = cfg.bin_width();
    for (const double shift : {-2.0 * kPi, 0.0, 2.0 * kPi}) {
        const double a = lo + shift, b = hi + shift;
        if (b < cfg.angle_min || a > cfg.angle_max) continue;
        int k0 = static_cast<int>(std::floor((a - cfg.angle_min) / width));
        int k1 = static_cast<int>(std::floor((b - cfg.angle_min) / width));
        k0 = std::max(k0, 0);
        k1 = std::min(k1, cfg.num_bins - 1);
        for (int k = k0; k <= k1; ++k) {
            const double bin_lo = cfg.angle_min + k * width;
            const double bin_hi = bin_lo + width;
            const double s_lo = std::max(bin_lo, a) - shift;
            const double s_hi = std::min(bin_hi, b) - shift;
            if (s_lo <= s_hi) fn(k, s_lo, s_hi);
        }
    }
}

void update_bin(VirtualScan& scan, int k, double value) {
    if (value > scan.config.range_max) return;
    value = std::max(value, kMinRange);
    auto& slot = scan.ranges[static_cast<size_t>(k)];
    slot = std::min(slot, value);
}

// Exact sector minima of the distance to a circle of radius R centered at c
// (robot frame).
void scan_circle(VirtualScan& scan, const Vec2& c, double R) {
    const double d = c.norm();
    const double psi = std::atan2(c.y(), c.x());
    if (d > R) {
        const double half = std::asin(std::min(R / d, 1.0));
        for_bins_in_interval(scan.config, psi - half, psi + half, [&](int k, double lo, double hi) {
            const double phi = std::max({lo - psi, psi - hi, 0.0});
            const double s2 = std::max(R * R - d * d * std::sin(phi) * std::sin(phi), 0.0);
            update_bin(scan, k, d * std::cos(phi) - std::sqrt(s2));
        });
        return;
    }
    // Origin inside the circle: every direction hits the boundary; distance
    // shrinks as the ray turns away from the center.
    const double width = scan.config.bin_width();
    for (int k = 0; k < scan.config.num_bins; ++k) {
        const double na = normalize_angle(scan.config.angle_min + k * width - psi);
        const double nb = na + width;
        double phi = std::max(std::abs(na), std::abs(nb));
        if (na <= kPi && nb >= kPi) phi = kPi;
        phi = std::min(phi, kPi);
        const double s2 = std::max(R * R - d * d * std::sin(phi) * std::sin(phi), 0.0);
        update_bin(scan, k, d * std::cos(phi) + std::sqrt(s2));
    }
}

// Exact sector minima of the distance to segment AB (robot frame).
void scan_segment(VirtualScan& scan, const Vec2& A, const Vec2& B) {
    const Vec2 E = B - A;
    const double len2 = E.squaredNorm();
    if (len2 < 1e-24) {
        const double d = A.norm();
        if (d <= 0.0) return;
        const int k = scan.config.bin_index(std::atan2(A.y(), A.x()));
        if (k >= 0) update_bin(scan, k, d);
        return;
    }
    const double s_line = -A.dot(E) / len2;
    const Vec2 F = A + s_line * E; // foot of the perpendicular on the line
    const double h_line = F.norm();

    if (h_line < 1e-9) {
        // Origin (nearly) on the supporting line: only the ray along the
        // line can hit, at the nearer endpoint.
        if (s_line >= 0.0 && s_line <= 1.0) return; // on the segment itself
        const Vec2& near_end = A.norm() < B.norm() ? A : B;
        const double d = near_end.norm();
        const int k = scan.config.bin_index(std::atan2(near_end.y(), near_end.x()));
        if (k >= 0) update_bin(scan, k, d);
        return;
    }

    const double az_a = std::atan2(A.y(), A.x());
    const double delta = normalize_angle(std::atan2(B.y(), B.x()) - az_a);
    const double lo = std::min(az_a, az_a + delta);
    const double hi = std::max(az_a, az_a + delta);
    // The foot azimuth in the same unwrapped coordinates as [lo, hi].
    const double theta_f = az_a + normalize_angle(std::atan2(F.y(), F.x()) - az_a);

    for_bins_in_interval(scan.config, lo, hi, [&](int k, double s_lo, double s_hi) {
        const double theta = std::clamp(theta_f, s_lo, s_hi);
        const double cosv = std::cos(theta - theta_f);
        if (cosv <= 1e-12) return;
        update_bin(scan, k, h_line / cosv);
    });
}

} // namespace

VirtualScan ground_truth_scan(const World& world, const Pose2D& pose, const ScanConfig& cfg) {
    cfg.validate();
    VirtualScan scan;
    scan.config = cfg;
    scan.ranges.assign(static_cast<size_t>(cfg.num_bins), cfg.range_max);

    for (const Cylinder& c : world.cylinders) {
        if (!height_bands_overlap(c.z0, c.height, cfg.h_min, cfg.h_max)) continue;
        scan_circle(scan, pose.to_robot(c.center), c.radius);
    }
    auto scan_rect = [&](const Box& b) {
        const Vec2 c0 = pose.to_robot({b.center.x() - b.half_extents.x(), b.center.y() - b.half_extents.y()});
        const Vec2 c1 = pose.to_robot({b.center.x() + b.half_extents.x(), b.center.y() - b.half_extents.y()});
        const Vec2 c2 = pose.to_robot({b.center.x() + b.half_extents.x(), b.center.y() + b.half_extents.y()});
        const Vec2 c3 = pose.to_robot({b.center.x() - b.half_extents.x(), b.center.y() + b.half_extents.y()});
        scan_segment(scan, c0, c1);
        scan_segment(scan, c1, c2);
        scan_segment(scan, c2, c3);
        scan_segment(scan, c3, c0);
    };
    for (const Box& b : world.boxes) {
        if (!height_bands_overlap(b.z0, b.height, cfg.h_min, cfg.h_max)) continue;
        scan_rect(b);
    }
    for (const Box& wall : wall_boxes(world)) scan_rect(wall);
    return scan;
}

namespace {

struct Interval {
    double lo = 0.0;
    double hi = 0.0;
};

Interval project_polygon(const std::array<Vec2, 4>& pts, const Vec2& axis) {
    Interval iv{pts[0].dot(axis), pts[0].dot(axis)};
    for (int i = 1; i < 4; ++i) {
        const double p = pts[i].dot(axis);
        iv.lo = std::min(iv.lo, p);
        iv.hi = std::max(iv.hi, p);
    }
    return iv;
}

std::array<Vec2, 4> box_corners(const Box& b) {
    return {Vec2(b.center.x() - b.half_extents.x(), b.center.y() - b.half_extents.y()),
            Vec2(b.center.x() + b.half_extents.x(), b.center.y() - b.half_extents.y()),
            Vec2(b.center.x() + b.half_extents.x(), b.center.y() + b.half_extents.y()),
            Vec2(b.center.x() - b.half_extents.x(), b.center.y() + b.half_extents.y())};
}

bool rects_intersect(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b,
                     const std::array<Vec2, 4>& axes) {
    for (const Vec2& axis : axes) {
        const Interval ia = project_polygon(a, axis);
        const Interval ib = project_polygon(b, axis);
        if (ia.hi <= ib.lo || ib.hi <= ia.lo) return false;
    }
    return true;
}

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
    const Vec2 e = b - a;
    const double len2 = e.squaredNorm();
    if (len2 < 1e-24) return (p - a).norm();
    const double t = std::clamp((p - a).dot(e) / len2, 0.0, 1.0);
    return (p - (a + t * e)).norm();
}

double convex_quad_distance(const std::array<Vec2, 4>& a, const std::array<Vec2, 4>& b,
                            const std::array<Vec2, 4>& axes) {
    if (rects_intersect(a, b, axes)) {
        double penetration = std::numeric_limits<double>::infinity();
        for (const Vec2& axis : axes) {
            const Interval ia = project_polygon(a, axis);
            const Interval ib = project_polygon(b, axis);
            penetration = std::min(penetration, std::min(ia.hi - ib.lo, ib.hi - ia.lo));
        }
        return -penetration;
    }
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            best = std::min(best, point_segment_distance(a[i], b[j], b[(j + 1) % 4]));
            best = std::min(best, point_segment_distance(b[i], a[j], a[(j + 1) % 4]));
        }
    return best;
}

std::array<Vec2, 4> sat_axes(const Pose2D& pose) {
    return {Vec2(1.0, 0.0), Vec2(0.0, 1.0), pose.right_axis(), pose.forward_axis()};
}

} // namespace

bool check_collision(const World& world, const Pose2D& pose, const RobotBody& body) {
    body.validate();
    const std::array<Vec2, 4> corners = body_corners_world(pose, body);
    for (const Vec2& c : corners)
        if (!world.contains(c)) return true;

    for (const Cylinder& cyl : world.cylinders) {
        if (!height_bands_overlap(cyl.z0, cyl.height, 0.0, body.h_robot)) continue;
        if (footprint_clearance(pose.to_robot(cyl.center), body) < cyl.radius) return true;
    }
    const std::array<Vec2, 4> axes = sat_axes(pose);
    for (const Box& b : world.boxes) {
        if (!height_bands_overlap(b.z0, b.height, 0.0, body.h_robot)) continue;
        if (rects_intersect(corners, box_corners(b), axes)) return true;
    }
    return false;
}

double world_clearance(const World& world, const Pose2D& pose, const RobotBody& body) {
    const std::array<Vec2, 4> corners = body_corners_world(pose, body);
    double best = std::numeric_limits<double>::infinity();
    for (const Vec2& c : corners) {
        const double m = std::min(std::min(c.x() - world.bounds_min.x(), world.bounds_max.x() - c.x()),
                                  std::min(c.y() - world.bounds_min.y(), world.bounds_max.y() - c.y()));
        best = std::min(best, m);
    }
    for (const Cylinder& cyl : world.cylinders) {
        if (!height_bands_overlap(cyl.z0, cyl.height, 0.0, body.h_robot)) continue;
        best = std::min(best, footprint_clearance(pose.to_robot(cyl.center), body) - cyl.radius);
    }
    const std::array<Vec2, 4> axes = sat_axes(pose);
    for (const Box& b : world.boxes) {
        if (!height_bands_overlap(b.z0, b.height, 0.0, body.h_robot)) continue;
        best = std::min(best, convex_quad_distance(corners, box_corners(b), axes));
    }
    return best;
}

RobotState step_dynamics(const RobotState& state, const VelocityCommand& cmd,
                         const DynamicLimits& limits, double dt) {
    if (!(dt > 0.0)) raise(ErrorKind::argument, "step_dynamics: dt must be positive");
    limits.validate();
    RobotState next;
    next.v = std::clamp(cmd.v, state.v - limits.a_v_max * dt, state.v + limits.a_v_max * dt);
    next.v = std::clamp(next.v, -limits.v_max, limits.v_max);
    next.omega = std::clamp(cmd.omega, state.omega - limits.a_omega_max * dt,
                            state.omega + limits.a_omega_max * dt);
    next.omega = std::clamp(next.omega, -limits.omega_max, limits.omega_max);
    next.pose = rollout(state.pose, {next.v, next.omega}, dt, 1).front();
    return next;
}

VirtualScan episode_scan(const World& world, const Pose2D& pose, const EpisodeConfig& cfg,
                         uint64_t frame_index) {
    VirtualScan merged;
    merged.config = cfg.scan;
    merged.ranges.assign(static_cast<size_t>(cfg.scan.num_bins), cfg.scan.range_max);
    std::vector<bool> covered(static_cast<size_t>(cfg.scan.num_bins), false);

    RenderOptions opts;
    opts.stride = cfg.scan.pixel_stride;
    opts.max_range = cfg.scan.range_max + 2.0;

    for (size_t cam_idx = 0; cam_idx < cfg.embodiment.cameras.size(); ++cam_idx) {
        const CameraRig& rig = cfg.embodiment.cameras[cam_idx];
        const CameraPose cam = camera_world_pose(pose, rig.extrinsics);
        DepthImage depth = render_depth(world, cam, rig.intrinsics, opts);
        if (!cfg.use_ground_truth_depth && cfg.distortion) {
            DisparityDistortion d = *cfg.distortion;
            d.seed = mix_seed(mix_seed(cfg.seed, frame_index), cam_idx);
            depth = apply_scale_correction(distort_to_relative(depth, d), rig.s1, rig.s2);
        }
        const ObstacleCloud cloud =
            depth_to_cloud(depth, rig.intrinsics, rig.extrinsics, cfg.scan.pixel_stride);
        const VirtualScan cam_scan =
            project_to_scan(height_filter(cloud, cfg.scan.h_min, cfg.scan.h_max), cfg.scan);
        for (size_t k = 0; k < merged.ranges.size(); ++k)
            merged.ranges[k] = std::min(merged.ranges[k], cam_scan.ranges[k]);
        const std::vector<bool> cov = covered_bins(rig.intrinsics, rig.extrinsics, cfg.scan);
        for (size_t k = 0; k < covered.size(); ++k)
            covered[k] = covered[k] || cov[k];
    }

    if (cfg.oracle_ring) {
        const VirtualScan gt = ground_truth_scan(world, pose, cfg.scan);
        for (size_t k = 0; k < merged.ranges.size(); ++k)
            if (!covered[k]) merged.ranges[k] = gt.ranges[k];
    }
    return merged;
}

EpisodeResult run_episode(const World& world, const EpisodeConfig& cfg, Policy& policy) {
    cfg.validate();
    world.validate(cfg.embodiment.body);

    RobotState state;
    state.pose = world.start;

    EpisodeResult result;
    result.trajectory.push_back(state.pose);
    result.min_clearance = world_clearance(world, state.pose, cfg.embodiment.body);

    double t = 0.0;
    uint64_t frame = 0;
    while (true) {
        if (goal_reached(state.pose, world.goal, cfg.planner.goal_tolerance)) {
            result.success = 1;
            break;
        }
        if (t > cfg.timeout_s + 1e-9) {
            result.timeout = 1;
            break;
        }
        VelocityCommand cmd;
        try {
            Observation obs;
            obs.scan = episode_scan(world, state.pose, cfg, frame);
            obs.goal = state.pose.to_robot(world.goal);
            obs.v = state.v;
            obs.omega = state.omega;
            obs.limits = cfg.embodiment.limits;
            obs.body = cfg.embodiment.body;
            cmd = policy.act(obs);
        } catch (const Error& e) {
            result.timeout = 1;
            result.error = e.what();
            break;
        }
        state = step_dynamics(state, cmd, cfg.embodiment.limits, cfg.dt);
        ++frame;
        // Product instead of accumulation: 100 steps of 0.1 s must read as
        // exactly 10 s, not a drifted 9.99999999999998.
        t = static_cast<double>(frame) * cfg.dt;
        result.trajectory.push_back(state.pose);
        result.min_clearance =
            std::min(result.min_clearance, world_clearance(world, state.pose, cfg.embodiment.body));
        if (check_collision(world, state.pose, cfg.embodiment.body)) {
            result.collision = 1;
            break;
        }
    }
    result.T_act = t;
    return result;
}

void GenerationConfig::validate() const {
    body.validate();
    if (!(bounds_min.x() < bounds_max.x()) || !(bounds_min.y() < bounds_max.y()))
        raise(ErrorKind::argument, "generation config: empty bounds");
    if (!(radius_min > 0.0) || !(radius_max >= radius_min))
        raise(ErrorKind::argument, "generation config: bad radius range");
    if (!(cylinder_height > 0.0))
        raise(ErrorKind::argument, "generation config: cylinder height must be positive");
    if (!(edge_margin > 0.0) || !(clearance_radius > 0.0))
        raise(ErrorKind::argument, "generation config: margins must be positive");
    if (!(feasibility_resolution > 0.0))
        raise(ErrorKind::argument, "generation config: resolution must be positive");
    if (max_attempts < 1) raise(ErrorKind::argument, "generation config: max_attempts must be >= 1");
}

World generate_scenario(uint64_t seed, double density, const GenerationConfig& cfg) {
    cfg.validate();
    if (density < 0.0) raise(ErrorKind::argument, "generate_scenario: density must be >= 0");

    std::mt19937_64 rng(seed);
    const double mid_x = (cfg.bounds_min.x() + cfg.bounds_max.x()) / 2.0;
    const double area = (cfg.bounds_max.x() - cfg.bounds_min.x()) *
                        (cfg.bounds_max.y() - cfg.bounds_min.y());

    for (int attempt = 0; attempt < cfg.max_attempts; ++attempt) {
        World world;
        world.bounds_min = cfg.bounds_min;
        world.bounds_max = cfg.bounds_max;
        world.start = Pose2D{mid_x, cfg.bounds_min.y() + cfg.edge_margin, kForwardAngle};
        world.goal = Vec2(mid_x, cfg.bounds_max.y() - cfg.edge_margin);

        int count = 0;
        if (density > 0.0) {
            std::poisson_distribution<int> poisson(density * area);
            count = poisson(rng);
        }
        for (int i = 0; i < count; ++i) {
            std::uniform_real_distribution<double> radius_dist(cfg.radius_min, cfg.radius_max);
            const double r = radius_dist(rng);
            std::uniform_real_distribution<double> x_dist(cfg.bounds_min.x() + r,
                                                          cfg.bounds_max.x() - r);
            std::uniform_real_distribution<double> y_dist(cfg.bounds_min.y() + r,
                                                          cfg.bounds_max.y() - r);
            const Vec2 center(x_dist(rng), y_dist(rng));
            if ((center - world.start.position()).norm() < cfg.clearance_radius + r) continue;
            if ((center - world.goal).norm() < cfg.clearance_radius + r) continue;
            world.cylinders.push_back({center, r, cfg.cylinder_height, 0.0});
        }

        try {
            world.validate(cfg.body);
        } catch (const Error&) {
            continue;
        }
        const double len = dijkstra_path_length(world, cfg.body, cfg.feasibility_resolution);
        if (!std::isfinite(len)) continue;
        if (std::isfinite(cfg.max_detour_ratio) &&
            len > cfg.max_detour_ratio * (world.goal - world.start.position()).norm())
            continue;
        return world;
    }
    raise(ErrorKind::non_convergence,
          "generate_scenario: no feasible world found; lower the density");
}

double dijkstra_path_length(const World& world, const RobotBody& body, double resolution) {
    if (!(resolution > 0.0))
        raise(ErrorKind::argument, "dijkstra_path_length: resolution must be positive");
    body.validate();

    const double span_x = world.bounds_max.x() - world.bounds_min.x();
    const double span_y = world.bounds_max.y() - world.bounds_min.y();
    const int nx = std::max(1, static_cast<int>(std::ceil(span_x / resolution)));
    const int ny = std::max(1, static_cast<int>(std::ceil(span_y / resolution)));
    const double inflation = body.circumscribed_radius();

    auto cell_center = [&](int i, int j) {
        return Vec2(world.bounds_min.x() + (i + 0.5) * resolution,
                    world.bounds_min.y() + (j + 0.5) * resolution);
    };

    std::vector<uint8_t> occupied(static_cast<size_t>(nx) * ny, 0);
    for (int j = 0; j < ny; ++j) {
        for (int i = 0; i < nx; ++i) {
            const Vec2 p = cell_center(i, j);
            bool occ = p.x() - world.bounds_min.x() < inflation ||
                       world.bounds_max.x() - p.x() < inflation ||
                       p.y() - world.bounds_min.y() < inflation ||
                       world.bounds_max.y() - p.y() < inflation;
            for (const Cylinder& c : world.cylinders) {
                if (occ) break;
                if (!height_bands_overlap(c.z0, c.height, 0.0, body.h_robot)) continue;
                occ = (p - c.center).norm() <= c.radius + inflation;
            }
            for (const Box& b : world.boxes) {
                if (occ) break;
                if (!height_bands_overlap(b.z0, b.height, 0.0, body.h_robot)) continue;
                const double dx = std::max(std::abs(p.x() - b.center.x()) - b.half_extents.x(), 0.0);
                const double dy = std::max(std::abs(p.y() - b.center.y()) - b.half_extents.y(), 0.0);
                occ = std::hypot(dx, dy) <= inflation;
            }
            occupied[static_cast<size_t>(j) * nx + i] = occ ? 1 : 0;
        }
    }

    auto cell_of = [&](const Vec2& p) {
        const int i = std::clamp(static_cast<int>((p.x() - world.bounds_min.x()) / resolution), 0,
                                 nx - 1);
        const int j = std::clamp(static_cast<int>((p.y() - world.bounds_min.y()) / resolution), 0,
                                 ny - 1);
        return std::pair<int, int>(i, j);
    };
    const auto [si, sj] = cell_of(world.start.position());
    const auto [gi, gj] = cell_of(world.goal);
    const size_t start_idx = static_cast<size_t>(sj) * nx + si;
    const size_t goal_idx = static_cast<size_t>(gj) * nx + gi;
    if (occupied[start_idx]) raise(ErrorKind::argument, "dijkstra_path_length: start cell occupied");
    if (occupied[goal_idx]) raise(ErrorKind::argument, "dijkstra_path_length: goal cell occupied");

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> dist(occupied.size(), inf);
    using QItem = std::pair<double, size_t>;
    std::priority_queue<QItem, std::vector<QItem>, std::greater<QItem>> queue;
    dist[start_idx] = 0.0;
    queue.push({0.0, start_idx});

    const int di[8] = {1, -1, 0, 0, 1, 1, -1, -1};
    const int dj[8] = {0, 0, 1, -1, 1, -1, 1, -1};
    const double step_cost[8] = {resolution, resolution, resolution, resolution,
                                 resolution * std::sqrt(2.0), resolution * std::sqrt(2.0),
                                 resolution * std::sqrt(2.0), resolution * std::sqrt(2.0)};

    while (!queue.empty()) {
        const auto [d, idx] = queue.top();
        queue.pop();
        if (d > dist[idx]) continue;
        if (idx == goal_idx) return d;
        const int i = static_cast<int>(idx % static_cast<size_t>(nx));
        const int j = static_cast<int>(idx / static_cast<size_t>(nx));
        for (int n = 0; n < 8; ++n) {
            const int ni = i + di[n], nj = j + dj[n];
            if (ni < 0 || ni >= nx || nj < 0 || nj >= ny) continue;
            const size_t nidx = static_cast<size_t>(nj) * nx + ni;
            if (occupied[nidx]) continue;
            const double nd = d + step_cost[n];
            if (nd < dist[nidx]) {
                dist[nidx] = nd;
                queue.push({nd, nidx});
            }
        }
    }
    return inf;
}

} // namespace vnav
