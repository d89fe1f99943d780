#include "vnav/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

namespace vnav {

namespace {

std::string trim(const std::string& s) {
    const auto begin = s.find_first_not_of(" \t\r");
    if (begin == std::string::npos) return "";
    const auto end = s.find_last_not_of(" \t\r");
    return s.substr(begin, end - begin + 1);
}

std::string fmt(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct ParsedFile {
    std::string path;
    std::vector<std::pair<std::string, std::string>> entries; // key = value, in order
    std::vector<std::pair<size_t, std::string>> bare; // (line number, content)
};

ParsedFile parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::io, "cannot open " + path);
    ParsedFile pf;
    pf.path = path;
    std::string line;
    size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            pf.bare.emplace_back(line_no, line);
        } else {
            pf.entries.emplace_back(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
        }
    }
    return pf;
}

[[noreturn]] void format_error(const std::string& path, const std::string& what) {
    raise(ErrorKind::format, path + ": " + what);
}

const std::string* find_value(const ParsedFile& pf, const std::string& key) {
    for (const auto& [k, v] : pf.entries)
        if (k == key) return &v;
    return nullptr;
}

std::string need_value(const ParsedFile& pf, const std::string& key) {
    const std::string* v = find_value(pf, key);
    if (!v) format_error(pf.path, "missing key '" + key + "'");
    return *v;
}

double to_double(const ParsedFile& pf, const std::string& key, const std::string& text) {
    try {
        size_t used = 0;
        const double x = std::stod(text, &used);
        if (trim(text.substr(used)).empty()) return x;
    } catch (const std::exception&) {
    }
    format_error(pf.path, "key '" + key + "': expected a number, got '" + text + "'");
}

double need_double(const ParsedFile& pf, const std::string& key) {
    return to_double(pf, key, need_value(pf, key));
}

long long need_int(const ParsedFile& pf, const std::string& key) {
    const double x = need_double(pf, key);
    const long long i = static_cast<long long>(x);
    if (static_cast<double>(i) != x)
        format_error(pf.path, "key '" + key + "': expected an integer");
    return i;
}

double get_double(const ParsedFile& pf, const std::string& key, double fallback) {
    const std::string* v = find_value(pf, key);
    return v ? to_double(pf, key, *v) : fallback;
}

std::vector<double> parse_list(const ParsedFile& pf, const std::string& key,
                               const std::string& text) {
    std::string body = trim(text);
    if (!body.empty() && body.front() == '[') {
        if (body.back() != ']') format_error(pf.path, "key '" + key + "': unterminated list");
        body = body.substr(1, body.size() - 2);
    }
    for (char& c : body)
        if (c == ',') c = ' ';
    std::vector<double> values;
    std::istringstream ss(body);
    double x = 0.0;
    while (ss >> x) values.push_back(x);
    std::string rest;
    if (ss.clear(), ss >> rest)
        format_error(pf.path, "key '" + key + "': bad list element '" + rest + "'");
    return values;
}

std::vector<double> need_list(const ParsedFile& pf, const std::string& key, size_t count) {
    const std::vector<double> values = parse_list(pf, key, need_value(pf, key));
    if (values.size() != count)
        format_error(pf.path, "key '" + key + "': expected " + std::to_string(count) +
                                  " values, got " + std::to_string(values.size()));
    return values;
}

std::string list_str(const std::vector<double>& values) {
    std::string out = "[";
    for (size_t i = 0; i < values.size(); ++i) {
        if (i) out += ", ";
        out += fmt(values[i]);
    }
    return out + "]";
}

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::io, "cannot write " + path);
    return out;
}

void finish_out(std::ofstream& out, const std::string& path) {
    if (!out) raise(ErrorKind::io, "write failed for " + path);
}

} // namespace

CameraFile load_camera(const std::string& path) {
    const ParsedFile pf = parse_file(path);
    CameraFile cam;
    cam.intrinsics.fx = need_double(pf, "fx");
    cam.intrinsics.fy = need_double(pf, "fy");
    cam.intrinsics.cx = need_double(pf, "cx");
    cam.intrinsics.cy = need_double(pf, "cy");
    cam.intrinsics.width = static_cast<int>(need_int(pf, "width"));
    cam.intrinsics.height = static_cast<int>(need_int(pf, "height"));
    if (const std::string* v = find_value(pf, "dist"))
        cam.intrinsics.distortion = parse_list(pf, "dist", *v);
    const std::vector<double> rvec = need_list(pf, "ext_rvec", 3);
    const std::vector<double> t = need_list(pf, "ext_t", 3);
    cam.extrinsics.rotation = rodrigues(Vec3(rvec[0], rvec[1], rvec[2]));
    cam.extrinsics.translation = Vec3(t[0], t[1], t[2]);
    cam.intrinsics.validate();
    cam.extrinsics.validate();
    return cam;
}

void save_camera(const CameraFile& cam, const std::string& path) {
    cam.intrinsics.validate();
    cam.extrinsics.validate();
    std::ofstream out = open_out(path);
    out << "# pinhole camera: pixels for fx/fy/cx/cy, meters for ext_t,\n";
    out << "# ext_rvec is the camera-to-robot axis-angle rotation\n";
    out << "fx = " << fmt(cam.intrinsics.fx) << "\n";
    out << "fy = " << fmt(cam.intrinsics.fy) << "\n";
    out << "cx = " << fmt(cam.intrinsics.cx) << "\n";
    out << "cy = " << fmt(cam.intrinsics.cy) << "\n";
    out << "width = " << cam.intrinsics.width << "\n";
    out << "height = " << cam.intrinsics.height << "\n";
    out << "dist = " << list_str(cam.intrinsics.distortion) << "\n";
    const Vec3 rvec = rodrigues_inv(cam.extrinsics.rotation);
    out << "ext_rvec = " << list_str({rvec.x(), rvec.y(), rvec.z()}) << "\n";
    out << "ext_t = " << list_str({cam.extrinsics.translation.x(), cam.extrinsics.translation.y(),
                                   cam.extrinsics.translation.z()})
        << "\n";
    finish_out(out, path);
}

std::vector<MarkerObservation> load_annotations(const std::string& path) {
    const ParsedFile pf = parse_file(path);
    if (!pf.entries.empty())
        format_error(path, "annotation files hold one record per line, not key-value pairs");
    std::vector<MarkerObservation> annotations;
    for (const auto& [line_no, line] : pf.bare) {
        std::istringstream ss(line);
        MarkerObservation obs;
        ss >> obs.image_id >> obs.marker_id >> obs.marker_size;
        for (int c = 0; c < 4; ++c) {
            double u = 0.0, v = 0.0;
            ss >> u >> v;
            obs.corners[static_cast<size_t>(c)] = Vec2(u, v);
        }
        if (!ss) format_error(path, "line " + std::to_string(line_no) +
                                        ": expected image_id marker_id size and 8 corner values");
        std::string rest;
        if (ss >> rest)
            format_error(path, "line " + std::to_string(line_no) + ": trailing token '" + rest + "'");
        obs.validate();
        annotations.push_back(std::move(obs));
    }
    return annotations;
}

void save_annotations(const std::vector<MarkerObservation>& annotations,
                      const std::string& path) {
    std::ofstream out = open_out(path);
    out << "# image_id marker_id size u1 v1 u2 v2 u3 v3 u4 v4\n";
    for (const MarkerObservation& obs : annotations) {
        out << obs.image_id << ' ' << obs.marker_id << ' ' << fmt(obs.marker_size);
        for (const Vec2& c : obs.corners) out << ' ' << fmt(c.x()) << ' ' << fmt(c.y());
        out << "\n";
    }
    finish_out(out, path);
}

CalibrationResult load_calibration(const std::string& path) {
    const ParsedFile pf = parse_file(path);
    CalibrationResult calib;
    calib.s1 = need_double(pf, "s1");
    calib.s2 = need_double(pf, "s2");
    calib.lambda = get_double(pf, "lambda", 0.0);
    calib.residual_rms = get_double(pf, "residual_rms", 0.0);
    calib.condition_number = get_double(pf, "condition_number", 1.0);
    calib.sample_count = static_cast<size_t>(get_double(pf, "sample_count", 0.0));
    calib.depth_spread_ratio = get_double(pf, "depth_spread_ratio", 1.0);
    return calib;
}

void save_calibration(const CalibrationResult& calib, const std::string& path) {
    std::ofstream out = open_out(path);
    for (const std::string& w : calib.warnings) out << "# warning: " << w << "\n";
    out << "s1 = " << fmt(calib.s1) << "\n";
    out << "s2 = " << fmt(calib.s2) << "\n";
    out << "lambda = " << fmt(calib.lambda) << "\n";
    out << "residual_rms = " << fmt(calib.residual_rms) << "\n";
    out << "condition_number = " << fmt(calib.condition_number) << "\n";
    out << "sample_count = " << calib.sample_count << "\n";
    out << "depth_spread_ratio = " << fmt(calib.depth_spread_ratio) << "\n";
    finish_out(out, path);
}

VirtualScan load_scan(const std::string& path) {
    const ParsedFile pf = parse_file(path);
    VirtualScan scan;
    scan.config.angle_min = need_double(pf, "angle_min");
    scan.config.angle_max = need_double(pf, "angle_max");
    scan.config.num_bins = static_cast<int>(need_int(pf, "num_bins"));
    scan.config.range_max = need_double(pf, "range_max");
    scan.config.validate();
    for (const auto& [line_no, line] : pf.bare) {
        try {
            size_t used = 0;
            const double r = std::stod(line, &used);
            if (!trim(line.substr(used)).empty()) throw std::invalid_argument(line);
            scan.ranges.push_back(r);
        } catch (const std::exception&) {
            format_error(path, "line " + std::to_string(line_no) + ": expected one range value");
        }
    }
    if (scan.ranges.size() != static_cast<size_t>(scan.config.num_bins))
        format_error(path, "expected " + std::to_string(scan.config.num_bins) + " ranges, got " +
                               std::to_string(scan.ranges.size()));
    for (double& r : scan.ranges) {
        if (r > scan.config.range_max && r < scan.config.range_max + 1e-9)
            r = scan.config.range_max;
        if (!(r > 0.0) || r > scan.config.range_max)
            format_error(path, "range values must lie in (0, range_max]");
    }
    return scan;
}

void save_scan(const VirtualScan& scan, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "angle_min = " << fmt(scan.config.angle_min) << "\n";
    out << "angle_max = " << fmt(scan.config.angle_max) << "\n";
    out << "num_bins = " << scan.config.num_bins << "\n";
    out << "range_max = " << fmt(scan.config.range_max) << "\n";
    for (const double r : scan.ranges) out << fmt(r) << "\n";
    finish_out(out, path);
}

ScanConfig load_scan_config(const std::string& path) {
    const ParsedFile pf = parse_file(path);
    ScanConfig cfg;
    cfg.angle_min = get_double(pf, "angle_min", cfg.angle_min);
    cfg.angle_max = get_double(pf, "angle_max", cfg.angle_max);
    cfg.num_bins = static_cast<int>(get_double(pf, "num_bins", cfg.num_bins));
    cfg.range_max = get_double(pf, "range_max", cfg.range_max);
    cfg.h_min = get_double(pf, "h_min", cfg.h_min);
    cfg.h_max = get_double(pf, "h_max", cfg.h_max);
    cfg.pixel_stride = static_cast<int>(get_double(pf, "pixel_stride", cfg.pixel_stride));
    cfg.validate();
    return cfg;
}

void save_scan_config(const ScanConfig& cfg, const std::string& path) {
    cfg.validate();
    std::ofstream out = open_out(path);
    out << "angle_min = " << fmt(cfg.angle_min) << "\n";
    out << "angle_max = " << fmt(cfg.angle_max) << "\n";
    out << "num_bins = " << cfg.num_bins << "\n";
    out << "range_max = " << fmt(cfg.range_max) << "\n";
    out << "h_min = " << fmt(cfg.h_min) << "\n";
    out << "h_max = " << fmt(cfg.h_max) << "\n";
    out << "pixel_stride = " << cfg.pixel_stride << "\n";
    finish_out(out, path);
}

PlannerConfig load_planner_config(const std::string& path) {
    const ParsedFile pf = parse_file(path);
    PlannerConfig cfg;
    cfg.beta = get_double(pf, "beta", cfg.beta);
    cfg.dt = get_double(pf, "dt", cfg.dt);
    cfg.horizon_steps = static_cast<int>(get_double(pf, "horizon_steps", cfg.horizon_steps));
    cfg.v_samples = static_cast<int>(get_double(pf, "v_samples", cfg.v_samples));
    cfg.omega_samples = static_cast<int>(get_double(pf, "omega_samples", cfg.omega_samples));
    cfg.w_goal = get_double(pf, "w_goal", cfg.w_goal);
    cfg.w_clearance = get_double(pf, "w_clearance", cfg.w_clearance);
    cfg.w_speed = get_double(pf, "w_speed", cfg.w_speed);
    cfg.safety_margin = get_double(pf, "safety_margin", cfg.safety_margin);
    cfg.goal_tolerance = get_double(pf, "goal_tolerance", cfg.goal_tolerance);
    cfg.clearance_cap = get_double(pf, "clearance_cap", cfg.clearance_cap);
    cfg.forward_only = get_double(pf, "forward_only", cfg.forward_only ? 1.0 : 0.0) != 0.0;
    cfg.validate();
    return cfg;
}

void save_planner_config(const PlannerConfig& cfg, const std::string& path) {
    cfg.validate();
    std::ofstream out = open_out(path);
    out << "beta = " << fmt(cfg.beta) << "\n";
    out << "dt = " << fmt(cfg.dt) << "\n";
    out << "horizon_steps = " << cfg.horizon_steps << "\n";
    out << "v_samples = " << cfg.v_samples << "\n";
    out << "omega_samples = " << cfg.omega_samples << "\n";
    out << "w_goal = " << fmt(cfg.w_goal) << "\n";
    out << "w_clearance = " << fmt(cfg.w_clearance) << "\n";
    out << "w_speed = " << fmt(cfg.w_speed) << "\n";
    out << "safety_margin = " << fmt(cfg.safety_margin) << "\n";
    out << "goal_tolerance = " << fmt(cfg.goal_tolerance) << "\n";
    out << "clearance_cap = " << fmt(cfg.clearance_cap) << "\n";
    out << "forward_only = " << (cfg.forward_only ? 1 : 0) << "\n";
    finish_out(out, path);
}

DynamicLimits load_limits(const std::string& path) {
    const ParsedFile pf = parse_file(path);
    DynamicLimits limits;
    limits.v_max = need_double(pf, "v_max");
    limits.omega_max = need_double(pf, "omega_max");
    limits.a_v_max = need_double(pf, "a_v_max");
    limits.a_omega_max = need_double(pf, "a_omega_max");
    limits.validate();
    return limits;
}

void save_limits(const DynamicLimits& limits, const std::string& path) {
    limits.validate();
    std::ofstream out = open_out(path);
    out << "v_max = " << fmt(limits.v_max) << "\n";
    out << "omega_max = " << fmt(limits.omega_max) << "\n";
    out << "a_v_max = " << fmt(limits.a_v_max) << "\n";
    out << "a_omega_max = " << fmt(limits.a_omega_max) << "\n";
    finish_out(out, path);
}

World load_scenario(const std::string& path) {
    const ParsedFile pf = parse_file(path);
    World world;
    const std::vector<double> bounds = need_list(pf, "bounds", 4);
    world.bounds_min = Vec2(bounds[0], bounds[1]);
    world.bounds_max = Vec2(bounds[2], bounds[3]);
    const std::vector<double> start = need_list(pf, "start", 3);
    world.start = Pose2D{start[0], start[1], start[2]};
    const std::vector<double> goal = need_list(pf, "goal", 2);
    world.goal = Vec2(goal[0], goal[1]);

    for (const auto& [line_no, line] : pf.bare) {
        std::istringstream ss(line);
        std::string kind;
        ss >> kind;
        std::vector<double> vals;
        double x = 0.0;
        while (ss >> x) vals.push_back(x);
        const std::string where = path + ": line " + std::to_string(line_no);
        if (kind == "cyl") {
            if (vals.size() != 4 && vals.size() != 5)
                raise(ErrorKind::format, where + ": cyl needs x y r h [z0]");
            Cylinder c{{vals[0], vals[1]}, vals[2], vals[3], vals.size() == 5 ? vals[4] : 0.0};
            world.cylinders.push_back(c);
        } else if (kind == "box") {
            if (vals.size() != 5 && vals.size() != 6)
                raise(ErrorKind::format, where + ": box needs x y hx hy h [z0]");
            Box b{{vals[0], vals[1]}, {vals[2], vals[3]}, vals[4], vals.size() == 6 ? vals[5] : 0.0};
            world.boxes.push_back(b);
        } else {
            raise(ErrorKind::format, where + ": unknown obstacle kind '" + kind + "'");
        }
    }
    return world;
}

void save_scenario(const World& world, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "bounds = " << list_str({world.bounds_min.x(), world.bounds_min.y(),
                                    world.bounds_max.x(), world.bounds_max.y()})
        << "\n";
    out << "start = " << list_str({world.start.x, world.start.y, world.start.heading}) << "\n";
    out << "goal = " << list_str({world.goal.x(), world.goal.y()}) << "\n";
    for (const Cylinder& c : world.cylinders) {
        out << "cyl " << fmt(c.center.x()) << ' ' << fmt(c.center.y()) << ' ' << fmt(c.radius)
            << ' ' << fmt(c.height);
        if (c.z0 != 0.0) out << ' ' << fmt(c.z0);
        out << "\n";
    }
    for (const Box& b : world.boxes) {
        out << "box " << fmt(b.center.x()) << ' ' << fmt(b.center.y()) << ' '
            << fmt(b.half_extents.x()) << ' ' << fmt(b.half_extents.y()) << ' ' << fmt(b.height);
        if (b.z0 != 0.0) out << ' ' << fmt(b.z0);
        out << "\n";
    }
    finish_out(out, path);
}

EmbodimentProfile load_embodiment(const std::string& path) {
    const ParsedFile pf = parse_file(path);
    EmbodimentProfile profile;
    if (const std::string* v = find_value(pf, "name")) profile.name = *v;
    const std::vector<double> body = need_list(pf, "body", 4);
    profile.body.L_front = body[0];
    profile.body.L_rear = body[1];
    profile.body.W = body[2];
    profile.body.h_robot = body[3];
    const std::vector<double> limits = need_list(pf, "limits", 4);
    profile.limits.v_max = limits[0];
    profile.limits.omega_max = limits[1];
    profile.limits.a_v_max = limits[2];
    profile.limits.a_omega_max = limits[3];

    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    for (const auto& [key, value] : pf.entries) {
        if (key != "camera") continue;
        std::istringstream ss(value);
        std::string cam_ref, calib_ref;
        ss >> cam_ref >> calib_ref;
        if (cam_ref.empty()) format_error(path, "camera entry without a file reference");
        const CameraFile cam = load_camera((base / cam_ref).string());
        CameraRig rig;
        rig.intrinsics = cam.intrinsics;
        rig.extrinsics = cam.extrinsics;
        if (!calib_ref.empty()) {
            rig.calibration_ref = (base / calib_ref).string();
            const CalibrationResult calib = load_calibration(rig.calibration_ref);
            rig.s1 = calib.s1;
            rig.s2 = calib.s2;
        }
        profile.cameras.push_back(std::move(rig));
    }
    profile.validate();
    return profile;
}

EpisodeConfig load_episode_config(const std::string& path) {
    const ParsedFile pf = parse_file(path);
    EpisodeConfig cfg;
    cfg.dt = get_double(pf, "dt", cfg.dt);
    cfg.timeout_s = get_double(pf, "timeout_s", cfg.timeout_s);
    cfg.use_ground_truth_depth =
        get_double(pf, "use_ground_truth_depth", cfg.use_ground_truth_depth ? 1.0 : 0.0) != 0.0;
    cfg.oracle_ring = get_double(pf, "oracle_ring", cfg.oracle_ring ? 1.0 : 0.0) != 0.0;
    cfg.seed = static_cast<uint64_t>(get_double(pf, "seed", 0.0));
    if (const std::string* v = find_value(pf, "distortion")) {
        const std::vector<double> d = parse_list(pf, "distortion", *v);
        if (d.size() != 3)
            format_error(path, "distortion expects [s1_true, s2_true, noise_sigma]");
        DisparityDistortion dist;
        dist.s1_true = d[0];
        dist.s2_true = d[1];
        dist.noise_sigma = d[2];
        cfg.distortion = dist;
    }
    const std::filesystem::path base = std::filesystem::path(path).parent_path();
    if (const std::string* v = find_value(pf, "scan_config"))
        cfg.scan = load_scan_config((base / *v).string());
    if (const std::string* v = find_value(pf, "planner_config"))
        cfg.planner = load_planner_config((base / *v).string());
    return cfg;
}

RegionConfidence parse_confidence_line(const std::string& line) {
    std::istringstream ss(line);
    double t = 0.0;
    RegionConfidence rc;
    if (!(ss >> t >> rc.left >> rc.center >> rc.right))
        raise(ErrorKind::format, "confidence record: expected 't s_left s_center s_right', got '" +
                                     line + "'");
    std::string rest;
    if (ss >> rest)
        raise(ErrorKind::format, "confidence record: trailing token '" + rest + "'");
    rc.validate();
    return rc;
}

std::vector<ConfidenceRecord> load_confidence_stream(const std::string& path) {
    const ParsedFile pf = parse_file(path);
    std::vector<ConfidenceRecord> records;
    for (const auto& [line_no, line] : pf.bare) {
        ConfidenceRecord rec;
        try {
            rec.rc = parse_confidence_line(line);
        } catch (const Error& e) {
            raise(e.kind(), path + ": line " + std::to_string(line_no) + ": " + e.what());
        }
        std::istringstream ss(line);
        ss >> rec.t;
        records.push_back(rec);
    }
    return records;
}

void save_trajectory(const EpisodeResult& result, const std::string& path) {
    std::ofstream out = open_out(path);
    out << "# S=" << result.success << " C=" << result.collision << " O=" << result.timeout
        << " T_act=" << fmt(result.T_act) << " min_clearance=" << fmt(result.min_clearance)
        << "\n";
    out << "# x y heading\n";
    for (const Pose2D& p : result.trajectory)
        out << fmt(p.x) << ' ' << fmt(p.y) << ' ' << fmt(p.heading) << "\n";
    finish_out(out, path);
}

namespace {

std::string svg_num(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.6g", x);
    return buf;
}

} // namespace

void emit_trajectory_plot(const EpisodeResult& result, const World& world, const RobotBody& body,
                          const std::string& path) {
    const double w = world.bounds_max.x() - world.bounds_min.x();
    const double h = world.bounds_max.y() - world.bounds_min.y();
    auto mx = [&](double x) { return x - world.bounds_min.x(); };
    auto my = [&](double y) { return world.bounds_max.y() - y; };

    std::ofstream out = open_out(path);
    out << "<svg xmlns=\"http://www.w3.org/2000/svg\" viewBox=\"0 0 " << svg_num(w) << ' '
        << svg_num(h) << "\">\n";
    out << "<rect x=\"0\" y=\"0\" width=\"" << svg_num(w) << "\" height=\"" << svg_num(h)
        << "\" fill=\"white\" stroke=\"black\" stroke-width=\"0.05\"/>\n";
    for (const Box& b : world.boxes)
        out << "<rect x=\"" << svg_num(mx(b.center.x() - b.half_extents.x())) << "\" y=\""
            << svg_num(my(b.center.y() + b.half_extents.y())) << "\" width=\""
            << svg_num(2.0 * b.half_extents.x()) << "\" height=\""
            << svg_num(2.0 * b.half_extents.y()) << "\" fill=\"#b0b0b0\"/>\n";
    for (const Cylinder& c : world.cylinders)
        out << "<circle cx=\"" << svg_num(mx(c.center.x())) << "\" cy=\""
            << svg_num(my(c.center.y())) << "\" r=\"" << svg_num(c.radius)
            << "\" fill=\"#808080\"/>\n";

    const size_t n = result.trajectory.size();
    const size_t outline_step = std::max<size_t>(1, n / 24);
    for (size_t i = 0; i < n; i += outline_step) {
        const Pose2D& p = result.trajectory[i];
        const double hw = body.W / 2.0;
        const Vec2 corners[4] = {p.to_world({-hw, body.L_front}), p.to_world({hw, body.L_front}),
                                 p.to_world({hw, -body.L_rear}), p.to_world({-hw, -body.L_rear})};
        out << "<polygon points=\"";
        for (int k = 0; k < 4; ++k) {
            if (k) out << ' ';
            out << svg_num(mx(corners[k].x())) << ',' << svg_num(my(corners[k].y()));
        }
        out << "\" fill=\"none\" stroke=\"#88aacc\" stroke-width=\"0.015\"/>\n";
    }

    out << "<polyline points=\"";
    for (size_t i = 0; i < n; ++i) {
        if (i) out << ' ';
        out << svg_num(mx(result.trajectory[i].x)) << ',' << svg_num(my(result.trajectory[i].y));
    }
    out << "\" fill=\"none\" stroke=\"#2244cc\" stroke-width=\"0.04\"/>\n";

    out << "<text x=\"" << svg_num(mx(world.start.x)) << "\" y=\"" << svg_num(my(world.start.y))
        << "\" fill=\"red\" font-size=\"0.5\" text-anchor=\"middle\">S</text>\n";
    out << "<text x=\"" << svg_num(mx(world.goal.x())) << "\" y=\"" << svg_num(my(world.goal.y()))
        << "\" fill=\"red\" font-size=\"0.5\" text-anchor=\"middle\">G</text>\n";
    out << "</svg>\n";
    finish_out(out, path);
}

} // namespace vnav
