#pragma once

#include <vector>

#include "vnav/geometry.hpp"
#include "vnav/scan.hpp"

namespace vnav {

// Everything the policy sees: scan, goal in the robot frame, current
// velocity, and the embodiment it is driving.
struct Observation {
    VirtualScan scan;
    Vec2 goal = Vec2::Zero(); // meters, robot frame
    double v = 0.0;
    double omega = 0.0;
    DynamicLimits limits;
    RobotBody body;

    void validate() const;
};

// Dimension-aware per-bin encoding: angle, inverse gap and body extents.
struct PointFeature {
    double sin_phi = 0.0;
    double cos_phi = 0.0;
    double inv_gap = 0.0; // 1 / (d - beta)
    double L_front = 0.0;
    double L_rear = 0.0;
    double half_W = 0.0;
};

struct VelocityCommand {
    double v = 0.0;
    double omega = 0.0;
};

struct VelocityWindow {
    double v_min = 0.0;
    double v_max = 0.0;
    double omega_min = 0.0;
    double omega_max = 0.0;

    bool contains(const VelocityCommand& c, double tol = 1e-12) const {
        return c.v >= v_min - tol && c.v <= v_max + tol && c.omega >= omega_min - tol &&
               c.omega <= omega_max + tol;
    }
};

struct PlannerConfig {
    double beta = 0.0; // inverse-gap offset, meters; must stay below every range
    double dt = 0.1; // s
    int horizon_steps = 15;
    int v_samples = 7;
    int omega_samples = 15;
    double w_goal = 1.0;
    double w_clearance = 0.4;
    double w_speed = 0.1;
    double safety_margin = 0.05; // meters
    double goal_tolerance = 0.5; // meters
    double clearance_cap = 1.0; // clearance beyond this does not improve the score
    bool forward_only = true;

    void validate() const;
};

std::vector<PointFeature> encode_point_features(const VirtualScan& scan, const RobotBody& body,
                                                double beta);

// Signed distance from p to the body rectangle x in [-W/2, W/2],
// y in [-L_rear, L_front]; negative inside.
double footprint_clearance(const Vec2& p, const RobotBody& body);

// One-step reachable velocity box under the acceleration limits.
VelocityWindow admissible_window(double v, double omega, const DynamicLimits& limits, double dt,
                                 bool forward_only = true);

// Constant-command unicycle integration; returns the poses after steps
// 1..steps (exact arcs, straight line when omega = 0).
std::vector<Pose2D> rollout(const Pose2D& start, const VelocityCommand& cmd, double dt, int steps);

// Deterministic sampling planner: velocity grid over the admissible window,
// rollout safety check against the scan points, weighted scoring, fixed
// tie-break, stop-and-rotate fallback.
VelocityCommand plan(const Observation& obs, const PlannerConfig& cfg);

bool goal_reached(const Pose2D& pose, const Vec2& goal_world, double tolerance);

// Anything mapping an Observation to a command can drive the robot.
class Policy {
public:
    virtual ~Policy() = default;
    virtual VelocityCommand act(const Observation& obs) = 0;
};

class SamplingPlanner : public Policy {
public:
    explicit SamplingPlanner(const PlannerConfig& cfg = {}) : cfg_(cfg) { cfg_.validate(); }
    VelocityCommand act(const Observation& obs) override { return plan(obs, cfg_); }
    const PlannerConfig& config() const { return cfg_; }

private:
    PlannerConfig cfg_;
};

} // namespace vnav
