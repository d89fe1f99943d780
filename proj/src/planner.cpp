#include "vnav/planner.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vnav {

void Observation::validate() const {
    limits.validate();
    body.validate();
    if (!goal.allFinite()) raise(ErrorKind::argument, "observation: non-finite goal");
    if (scan.ranges.empty()) raise(ErrorKind::argument, "observation: empty scan");
    if (scan.ranges.size() != static_cast<size_t>(scan.config.num_bins))
        raise(ErrorKind::argument, "observation: scan length does not match its config");
    const double tol = 1e-9;
    if (std::abs(v) > limits.v_max + tol || std::abs(omega) > limits.omega_max + tol)
        raise(ErrorKind::argument, "observation: velocity outside dynamic limits");
}

void PlannerConfig::validate() const {
    if (beta < 0.0) raise(ErrorKind::argument, "planner config: beta must be >= 0");
    if (!(dt > 0.0)) raise(ErrorKind::argument, "planner config: dt must be positive");
    if (horizon_steps < 1 || v_samples < 1 || omega_samples < 1)
        raise(ErrorKind::argument, "planner config: counts must be >= 1");
    if (safety_margin < 0.0) raise(ErrorKind::argument, "planner config: negative safety_margin");
    if (!(goal_tolerance > 0.0))
        raise(ErrorKind::argument, "planner config: goal_tolerance must be positive");
    if (!(clearance_cap > 0.0))
        raise(ErrorKind::argument, "planner config: clearance_cap must be positive");
}

std::vector<PointFeature> encode_point_features(const VirtualScan& scan, const RobotBody& body,
                                                double beta) {
    body.validate();
    std::vector<PointFeature> features;
    features.reserve(scan.ranges.size());
    for (size_t k = 0; k < scan.ranges.size(); ++k) {
        const double d = scan.ranges[k];
        if (!(d > beta))
            raise(ErrorKind::argument, "encode_point_features: range <= beta, encoding undefined");
        const double phi = scan.config.bin_center(static_cast<int>(k));
        PointFeature f;
        f.sin_phi = std::sin(phi);
        f.cos_phi = std::cos(phi);
        f.inv_gap = 1.0 / (d - beta);
        f.L_front = body.L_front;
        f.L_rear = body.L_rear;
        f.half_W = body.W / 2.0;
        features.push_back(f);
    }
    return features;
}

double footprint_clearance(const Vec2& p, const RobotBody& body) {
    const Vec2 center(0.0, (body.L_front - body.L_rear) / 2.0);
    const Vec2 half(body.W / 2.0, (body.L_front + body.L_rear) / 2.0);
    const double qx = std::abs(p.x() - center.x()) - half.x();
    const double qy = std::abs(p.y() - center.y()) - half.y();
    const double outside = std::hypot(std::max(qx, 0.0), std::max(qy, 0.0));
    const double inside = std::min(std::max(qx, qy), 0.0);
    return outside + inside;
}

VelocityWindow admissible_window(double v, double omega, const DynamicLimits& limits, double dt,
                                 bool forward_only) {
    if (!(dt > 0.0)) raise(ErrorKind::argument, "admissible_window: dt must be positive");
    limits.validate();
    VelocityWindow w;
    const double v_floor = forward_only ? 0.0 : -limits.v_max;
    w.v_max = std::min(limits.v_max, v + limits.a_v_max * dt);
    w.v_min = std::min(std::max(v_floor, v - limits.a_v_max * dt), w.v_max);
    w.omega_max = std::min(limits.omega_max, omega + limits.a_omega_max * dt);
    w.omega_min = std::min(std::max(-limits.omega_max, omega - limits.a_omega_max * dt), w.omega_max);
    return w;
}

namespace {

Pose2D step_pose(const Pose2D& p, double v, double omega, double dt) {
    Pose2D n = p;
    if (omega == 0.0) {
        n.x += v * std::cos(p.heading) * dt;
        n.y += v * std::sin(p.heading) * dt;
        return n;
    }
    const double dh = omega * dt;
    // Below ~1e-9 rad the heading increment is lost to rounding inside the
    // exact-arc sine differences and the step would collapse to zero motion;
    // the midpoint chord is exact to O(dh^2) and stays conditioned.
    if (std::abs(dh) < 1e-9) {
        const double mid = p.heading + 0.5 * dh;
        n.x += v * std::cos(mid) * dt;
        n.y += v * std::sin(mid) * dt;
        n.heading = normalize_angle(p.heading + dh);
        return n;
    }
    const double h1 = p.heading + dh;
    n.x += v / omega * (std::sin(h1) - std::sin(p.heading));
    n.y += -v / omega * (std::cos(h1) - std::cos(p.heading));
    n.heading = normalize_angle(h1);
    return n;
}

} // namespace

std::vector<Pose2D> rollout(const Pose2D& start, const VelocityCommand& cmd, double dt, int steps) {
    if (steps < 1) raise(ErrorKind::argument, "rollout: steps must be >= 1");
    if (!(dt > 0.0)) raise(ErrorKind::argument, "rollout: dt must be positive");
    std::vector<Pose2D> poses;
    poses.reserve(static_cast<size_t>(steps));
    Pose2D p = start;
    for (int i = 0; i < steps; ++i) {
        p = step_pose(p, cmd.v, cmd.omega, dt);
        poses.push_back(p);
    }
    return poses;
}

namespace {

double sample_value(double lo, double hi, int i, int n) {
    if (n == 1) return (lo + hi) / 2.0;
    return lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
}

} // namespace

VelocityCommand plan(const Observation& obs, const PlannerConfig& cfg) {
    obs.validate();
    cfg.validate();

    const VelocityWindow window =
        admissible_window(obs.v, obs.omega, obs.limits, cfg.dt, cfg.forward_only);

    // Scan bins become static points in the planning frame. Points that stay
    // farther than the clearance cap from any reachable footprint can only
    // ever contribute the capped value, so they are dropped up front.
    const double reach = obs.limits.v_max * cfg.dt * cfg.horizon_steps +
                         obs.body.circumscribed_radius() + cfg.clearance_cap;
    std::vector<Vec2> points;
    points.reserve(obs.scan.ranges.size());
    for (size_t k = 0; k < obs.scan.ranges.size(); ++k) {
        const double r = obs.scan.ranges[k];
        if (r > reach) continue;
        const double phi = obs.scan.config.bin_center(static_cast<int>(k));
        points.emplace_back(r * std::cos(phi), r * std::sin(phi));
    }

    const Pose2D start; // robot frame: origin, heading pi/2

    bool found = false;
    VelocityCommand best{};
    double best_score = -std::numeric_limits<double>::infinity();

    for (int iv = 0; iv < cfg.v_samples; ++iv) {
        const double v = sample_value(window.v_min, window.v_max, iv, cfg.v_samples);
        for (int iw = 0; iw < cfg.omega_samples; ++iw) {
            const double omega =
                sample_value(window.omega_min, window.omega_max, iw, cfg.omega_samples);

            Pose2D p = start;
            double min_clearance = cfg.clearance_cap;
            // Progress counts the closest approach over the horizon, not the
            // endpoint: a rollout that sweeps past the goal at full speed must
            // not lose to one that brakes to park on it, or the robot crawls
            // asymptotically instead of driving into the goal tolerance.
            double closest = obs.goal.norm();
            bool safe = true;
            for (int step = 0; step < cfg.horizon_steps && safe; ++step) {
                p = step_pose(p, v, omega, cfg.dt);
                closest = std::min(closest, (obs.goal - p.position()).norm());
                for (const Vec2& q : points) {
                    const double c = footprint_clearance(p.to_robot(q), obs.body);
                    if (c < cfg.safety_margin) {
                        safe = false;
                        break;
                    }
                    min_clearance = std::min(min_clearance, c);
                }
            }
            if (!safe) continue;

            const double goal_progress = obs.goal.norm() - closest;
            const double score =
                cfg.w_goal * goal_progress + cfg.w_clearance * min_clearance + cfg.w_speed * v;

            const bool better =
                !found || score > best_score ||
                (score == best_score && (std::abs(omega) < std::abs(best.omega) ||
                                         (std::abs(omega) == std::abs(best.omega) && v > best.v)));
            if (better) {
                found = true;
                best_score = score;
                best = {v, omega};
            }
        }
    }
    if (found) return best;

    // Nothing is safe: stop as hard as the window allows and rotate toward
    // the goal.
    VelocityCommand halt;
    halt.v = std::clamp(0.0, window.v_min, window.v_max);
    const double heading_error = normalize_angle(std::atan2(obs.goal.y(), obs.goal.x()) - kForwardAngle);
    const double omega_target = heading_error == 0.0
                                    ? 0.0
                                    : std::copysign(obs.limits.omega_max, heading_error);
    halt.omega = std::clamp(omega_target, window.omega_min, window.omega_max);
    return halt;
}

bool goal_reached(const Pose2D& pose, const Vec2& goal_world, double tolerance) {
    if (tolerance < 0.0) raise(ErrorKind::argument, "goal_reached: negative tolerance");
    return (pose.position() - goal_world).norm() <= tolerance;
}

} // namespace vnav
