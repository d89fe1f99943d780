#pragma once

#include <string>
#include <vector>

#include "vnav/benchmark.hpp"
#include "vnav/calibration.hpp"
#include "vnav/embodiment.hpp"
#include "vnav/geometry.hpp"
#include "vnav/planner.hpp"
#include "vnav/scan.hpp"
#include "vnav/sim.hpp"
#include "vnav/vln.hpp"

// Line-oriented key-value text formats. `#` starts a comment, keys are
// `key = value`, lists are `[a, b, c]`. Loaders raise ErrorKind::io for
// unreadable paths and ErrorKind::format for malformed content.
namespace vnav {

struct CameraFile {
    CameraIntrinsics intrinsics;
    CameraExtrinsics extrinsics;
};

CameraFile load_camera(const std::string& path);
void save_camera(const CameraFile& cam, const std::string& path);

std::vector<MarkerObservation> load_annotations(const std::string& path);
void save_annotations(const std::vector<MarkerObservation>& annotations,
                      const std::string& path);

CalibrationResult load_calibration(const std::string& path);
void save_calibration(const CalibrationResult& calib, const std::string& path);

VirtualScan load_scan(const std::string& path);
void save_scan(const VirtualScan& scan, const std::string& path);

ScanConfig load_scan_config(const std::string& path);
void save_scan_config(const ScanConfig& cfg, const std::string& path);

PlannerConfig load_planner_config(const std::string& path);
void save_planner_config(const PlannerConfig& cfg, const std::string& path);

DynamicLimits load_limits(const std::string& path);
void save_limits(const DynamicLimits& limits, const std::string& path);

World load_scenario(const std::string& path);
void save_scenario(const World& world, const std::string& path);

// Camera and calibration references inside the file resolve relative to the
// embodiment file's directory.
EmbodimentProfile load_embodiment(const std::string& path);

// Loads everything except the embodiment, which travels separately.
EpisodeConfig load_episode_config(const std::string& path);

struct ConfidenceRecord {
    double t = 0.0;
    RegionConfidence rc;
};

std::vector<ConfidenceRecord> load_confidence_stream(const std::string& path);
RegionConfidence parse_confidence_line(const std::string& line);

void save_trajectory(const EpisodeResult& result, const std::string& path);

// Self-contained SVG: bounds, obstacles, trajectory with periodic footprint
// outlines, red S/G markers.
void emit_trajectory_plot(const EpisodeResult& result, const World& world, const RobotBody& body,
                          const std::string& path);

} // namespace vnav
