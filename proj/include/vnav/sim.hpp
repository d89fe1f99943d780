#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vnav/depth_image.hpp"
#include "vnav/embodiment.hpp"
#include "vnav/geometry.hpp"
#include "vnav/planner.hpp"
#include "vnav/scan.hpp"

namespace vnav {

// Vertical-extruded obstacles: footprint in the plane, solid over
// [z0, z0 + height].
struct Cylinder {
    Vec2 center = Vec2::Zero();
    double radius = 0.0;
    double height = 0.0;
    double z0 = 0.0;
};

struct Box {
    Vec2 center = Vec2::Zero();
    Vec2 half_extents = Vec2::Zero(); // world-axis-aligned
    double height = 0.0;
    double z0 = 0.0;
};

struct World {
    std::vector<Cylinder> cylinders;
    std::vector<Box> boxes;
    Vec2 bounds_min{-4.0, 0.0};
    Vec2 bounds_max{4.0, 12.0};
    Pose2D start;
    Vec2 goal = Vec2::Zero();

    bool contains(const Vec2& p) const {
        return p.x() >= bounds_min.x() && p.x() <= bounds_max.x() && p.y() >= bounds_min.y() &&
               p.y() <= bounds_max.y();
    }
    // Checks the start/goal invariant for a concrete body.
    void validate(const RobotBody& body) const;
};

struct RobotState {
    Pose2D pose;
    double v = 0.0;
    double omega = 0.0;
};

struct EpisodeResult {
    int success = 0;
    int collision = 0;
    int timeout = 0;
    double T_act = 0.0; // seconds until termination
    std::vector<Pose2D> trajectory;
    double min_clearance = std::numeric_limits<double>::infinity();
    std::string error; // non-empty when a pipeline error aborted the episode
};

struct EpisodeConfig {
    double dt = 0.1;
    double timeout_s = 60.0;
    EmbodimentProfile embodiment;
    std::optional<DisparityDistortion> distortion;
    bool use_ground_truth_depth = false;
    // Fill bins no camera covers from the exact 2D scan, mirroring a rig
    // that pairs a front camera with a surrounding lidar.
    bool oracle_ring = false;
    ScanConfig scan;
    PlannerConfig planner;
    uint64_t seed = 0;

    void validate() const;
};

// World <- camera rigid transform: p_world = rotation * p_cam + position.
struct CameraPose {
    Mat3 rotation = Mat3::Identity();
    Vec3 position = Vec3::Zero();
};

// Rotation taking robot-frame vectors to world frame for a given heading.
Mat3 robot_to_world_rotation(double heading);

// Deterministic stream-splitting hash for deriving per-episode and
// per-frame RNG seeds.
uint64_t mix_seed(uint64_t a, uint64_t b);

CameraPose camera_world_pose(const Pose2D& robot, const CameraExtrinsics& ext);

struct RenderOptions {
    int stride = 1; // render every stride-th pixel per axis; others invalid
    double max_range = std::numeric_limits<double>::infinity();
};

// Per-pixel ray cast against ground plane, obstacles and the arena walls;
// values are camera-frame Z (perpendicular depth), misses are invalid.
DepthImage render_depth(const World& world, const CameraPose& cam, const CameraIntrinsics& intr,
                        const RenderOptions& opts = {});

// Exact per-sector minimum distance in the plane to the footprints of all
// obstacles whose vertical extent intersects (h_min, h_max), plus the arena
// walls. Analytic, no ray sampling.
VirtualScan ground_truth_scan(const World& world, const Pose2D& pose, const ScanConfig& cfg);

// True iff the body rectangle intersects an obstacle footprint overlapping
// the robot's height span or pokes outside the bounds.
bool check_collision(const World& world, const Pose2D& pose, const RobotBody& body);

// Signed distance from the body rectangle to the nearest obstacle footprint
// or bounds edge; negative when colliding.
double world_clearance(const World& world, const Pose2D& pose, const RobotBody& body);

// Acceleration-clipped velocity tracking plus exact constant-twist pose
// integration over dt.
RobotState step_dynamics(const RobotState& state, const VelocityCommand& cmd,
                         const DynamicLimits& limits, double dt);

// The perception stack for one frame: per-camera depth render, optional
// disparity distortion and scale correction, scan conversion, merge, and the
// optional oracle ring fill.
VirtualScan episode_scan(const World& world, const Pose2D& pose, const EpisodeConfig& cfg,
                         uint64_t frame_index);

EpisodeResult run_episode(const World& world, const EpisodeConfig& cfg, Policy& policy);

struct GenerationConfig {
    Vec2 bounds_min{-4.0, 0.0};
    Vec2 bounds_max{4.0, 12.0};
    RobotBody body;
    double radius_min = 0.15;
    double radius_max = 0.35;
    double cylinder_height = 2.0;
    double edge_margin = 1.0; // start/goal inset from the short walls
    double clearance_radius = 1.2; // obstacle-free disc around start and goal
    double feasibility_resolution = 0.05;
    // Reject worlds whose shortest path exceeds this multiple of the
    // straight-line distance (infinity disables the check).
    double max_detour_ratio = std::numeric_limits<double>::infinity();
    int max_attempts = 200;

    void validate() const;
};

// BARN-style corridor: fixed start and goal at opposite ends, Poisson-count
// uniformly placed cylinders, regenerated until the inflated-grid shortest
// path exists. Deterministic per seed.
World generate_scenario(uint64_t seed, double density, const GenerationConfig& cfg = {});

// 8-connected shortest path on the occupancy grid inflated by the body's
// circumscribed radius; infinity when unreachable.
double dijkstra_path_length(const World& world, const RobotBody& body, double resolution);

} // namespace vnav
