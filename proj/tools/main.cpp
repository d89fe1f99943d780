#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "vnav/benchmark.hpp"
#include "vnav/calibration.hpp"
#include "vnav/io.hpp"
#include "vnav/planner.hpp"
#include "vnav/scan.hpp"
#include "vnav/sim.hpp"
#include "vnav/vln.hpp"

namespace fs = std::filesystem;
using namespace vnav;

// Exit codes: 0 success, 1 internal, 2 usage, 3 unreadable/unwritable file,
// 4 malformed file content, 5 numeric or domain failure.
namespace {

int exit_code_for(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::io: return 3;
    case ErrorKind::format: return 4;
    case ErrorKind::internal: return 1;
    default: return 5;
    }
}

const char* kind_label(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::io: return "io";
    case ErrorKind::format: return "format";
    case ErrorKind::internal: return "internal";
    default: return "domain";
    }
}

std::string g17(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

struct GlobalOpts {
    uint64_t seed = 0;
    bool seed_set = false;
    int jobs = 1;
    bool verbose = false;
};

struct CalibrateOpts {
    std::string images, annotations, camera, out;
    double lambda = kDefaultRidgeLambda;
};

void run_calibrate(const CalibrateOpts& o, const GlobalOpts& g) {
    const CameraFile cam = load_camera(o.camera);
    const std::vector<MarkerObservation> annotations = load_annotations(o.annotations);

    std::vector<CalibrationImage> images;
    std::map<std::string, size_t> index;
    for (const MarkerObservation& obs : annotations) {
        auto [it, fresh] = index.emplace(obs.image_id, images.size());
        if (fresh) {
            CalibrationImage img;
            img.relative = load_pfm((fs::path(o.images) / (obs.image_id + ".pfm")).string(),
                                    DepthKind::relative_inverse);
            images.push_back(std::move(img));
        }
        images[it->second].markers.push_back(obs);
    }

    const CalibrationResult result = calibrate(images, cam.intrinsics, o.lambda);
    save_calibration(result, o.out);
    if (g.verbose)
        for (const std::string& w : result.warnings) std::cerr << "warning: " << w << '\n';
    std::cout << "s1 = " << g17(result.s1) << "\ns2 = " << g17(result.s2)
              << "\nresidual_rms = " << g17(result.residual_rms)
              << "\nsample_count = " << result.sample_count << '\n';
}

struct EvalDepthOpts {
    std::string pred, gt;
};

void run_eval_depth(const EvalDepthOpts& o) {
    const DepthImage pred = load_pfm(o.pred, DepthKind::metric);
    const DepthImage gt = load_pfm(o.gt, DepthKind::metric);
    const DepthErrors e = eval_depth(pred, gt);
    std::cout << "mae = " << g17(e.mae) << "\nrmse = " << g17(e.rmse)
              << "\npixel_count = " << e.pixel_count << '\n';
}

struct ScanOpts {
    std::string depth, camera, calib, config, out;
};

void run_scan(const ScanOpts& o) {
    const DepthImage depth = load_pfm(o.depth, DepthKind::relative_inverse);
    const CameraFile cam = load_camera(o.camera);
    double s1 = 1.0, s2 = 0.0;
    if (!o.calib.empty()) {
        const CalibrationResult calib = load_calibration(o.calib);
        s1 = calib.s1;
        s2 = calib.s2;
    }
    const ScanConfig cfg = o.config.empty() ? ScanConfig{} : load_scan_config(o.config);
    const VirtualScan scan = visual_to_scan(depth, s1, s2, cam.intrinsics, cam.extrinsics, cfg);
    save_scan(scan, o.out);
}

struct PlanOpts {
    std::string scan, limits, config;
    std::vector<double> goal;
    std::vector<double> body;
    double v = 0.0, omega = 0.0;
};

void run_plan(const PlanOpts& o) {
    Observation obs;
    obs.scan = load_scan(o.scan);
    obs.goal = Vec2(o.goal[0], o.goal[1]);
    obs.body.L_front = o.body[0];
    obs.body.L_rear = o.body[1];
    obs.body.W = o.body[2];
    obs.limits = load_limits(o.limits);
    obs.v = o.v;
    obs.omega = o.omega;
    const PlannerConfig cfg = o.config.empty() ? PlannerConfig{} : load_planner_config(o.config);
    const VelocityCommand cmd = plan(obs, cfg);
    std::cout << g17(cmd.v) << ' ' << g17(cmd.omega) << '\n';
}

struct SimulateOpts {
    std::string scenario, embodiment, config, out, plot;
};

void run_simulate(const SimulateOpts& o, const GlobalOpts& g) {
    const World world = load_scenario(o.scenario);
    EpisodeConfig cfg = o.config.empty() ? EpisodeConfig{} : load_episode_config(o.config);
    cfg.embodiment = load_embodiment(o.embodiment);
    if (g.seed_set) cfg.seed = g.seed;

    SamplingPlanner planner(cfg.planner);
    const EpisodeResult result = run_episode(world, cfg, planner);
    save_trajectory(result, o.out);
    if (!o.plot.empty()) emit_trajectory_plot(result, world, cfg.embodiment.body, o.plot);

    std::cout << "S = " << result.success << "\nC = " << result.collision
              << "\nO = " << result.timeout << "\nT_act = " << g17(result.T_act)
              << "\nmin_clearance = " << g17(result.min_clearance) << '\n';
    if (!result.error.empty()) std::cout << "error = " << result.error << '\n';
}

struct GenScenariosOpts {
    int count = 1;
    double density = 0.2;
    double max_detour = 0.0;
    bool max_detour_set = false;
    std::string out;
};

void run_gen_scenarios(const GenScenariosOpts& o, const GlobalOpts& g) {
    fs::create_directories(o.out);
    GenerationConfig cfg;
    if (o.max_detour_set) cfg.max_detour_ratio = o.max_detour;
    for (int i = 0; i < o.count; ++i) {
        const World world = generate_scenario(mix_seed(g.seed, static_cast<uint64_t>(i)),
                                              o.density, cfg);
        char name[32];
        std::snprintf(name, sizeof(name), "scenario_%03d.txt", i);
        save_scenario(world, (fs::path(o.out) / name).string());
    }
    std::cout << "wrote " << o.count << " scenarios to " << o.out << '\n';
}

struct BenchmarkOpts {
    std::string suite, embodiment, config, out;
    double vmax = 0.0;
    bool vmax_set = false;
    int trials = 2;
};

void run_benchmark_cmd(const BenchmarkOpts& o, const GlobalOpts& g) {
    std::vector<fs::path> files;
    {
        std::error_code ec;
        fs::directory_iterator it(o.suite, ec);
        if (ec) raise(ErrorKind::io, "cannot read suite directory " + o.suite);
        for (const auto& entry : it)
            if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    std::vector<World> scenarios;
    scenarios.reserve(files.size());
    for (const fs::path& f : files) scenarios.push_back(load_scenario(f.string()));

    EpisodeConfig ep = o.config.empty() ? EpisodeConfig{} : load_episode_config(o.config);
    ep.embodiment = load_embodiment(o.embodiment);
    if (o.vmax_set) ep.embodiment.limits.v_max = o.vmax;

    BenchmarkConfig cfg;
    cfg.trials = o.trials;
    cfg.jobs = g.jobs;
    cfg.base_seed = g.seed;
    const BenchmarkRun run = run_benchmark(scenarios, ep, cfg);

    fs::create_directories(o.out);
    const std::vector<std::string> written = emit_report(run.report, {"csv", "md"}, o.out);
    for (const EpisodeRecord& rec : run.records) {
        char name[48];
        std::snprintf(name, sizeof(name), "trajectory_s%03d_t%d.txt", rec.scenario_id, rec.trial);
        save_trajectory(rec.result, (fs::path(o.out) / name).string());
    }
    if (g.verbose)
        for (const std::string& p : written) std::cerr << "wrote " << p << '\n';
    std::cout << "episodes = " << run.report.rows.size()
              << "\nmetric = " << g17(run.report.metric)
              << "\nsuccess_rate = " << g17(run.report.success_rate)
              << "\ncollision_rate = " << g17(run.report.collision_rate)
              << "\ntimeout_rate = " << g17(run.report.timeout_rate) << '\n';
}

struct VlnStepOpts {
    std::string conf;
    std::vector<double> pose;
    int arrival_k = 5;
    double threshold = 0.80;
};

void run_vln_step(const VlnStepOpts& o) {
    std::vector<ConfidenceRecord> records;
    if (fs::exists(o.conf)) {
        records = load_confidence_stream(o.conf);
    } else {
        ConfidenceRecord rec;
        rec.rc = parse_confidence_line(o.conf);
        std::istringstream ss(o.conf);
        ss >> rec.t;
        records.push_back(rec);
    }
    const Pose2D pose{o.pose[0], o.pose[1], o.pose[2]};
    ArrivalDetector det;
    det.K = o.arrival_k;
    det.confidence_threshold = o.threshold;
    for (const ConfidenceRecord& rec : records) {
        const HighLevelCommand cmd = command_from_confidence(rec.rc);
        const Vec2 wp = to_world(cmd, pose);
        bool reached = false;
        std::tie(det, reached) = arrival_update(det, rec.rc);
        std::cout << g17(rec.t) << ' ' << g17(wp.x()) << ' ' << g17(wp.y()) << ' '
                  << (reached ? 1 : 0) << '\n';
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Visual local navigation toolkit: depth scale calibration, "
                 "depth-to-scan abstraction, reactive planning, simulation and benchmarks"};
    app.require_subcommand(1);

    auto g = std::make_shared<GlobalOpts>();
    CLI::Option* seed_opt =
        app.add_option("--seed", g->seed, "Seed controlling all stochastic behavior");
    app.add_option("--jobs", g->jobs, "Worker threads for the benchmark")
        ->check(CLI::PositiveNumber);
    app.add_flag("--verbose", g->verbose, "Extra progress output on stderr");

    auto cal = std::make_shared<CalibrateOpts>();
    CLI::App* cal_cmd = app.add_subcommand("calibrate", "Fit the depth scale from marker views");
    cal_cmd->fallthrough();
    cal_cmd->add_option("--images", cal->images, "Directory of <image_id>.pfm relative depths")
        ->required();
    cal_cmd->add_option("--annotations", cal->annotations, "Marker corner annotation file")
        ->required();
    cal_cmd->add_option("--camera", cal->camera, "Camera model file")->required();
    cal_cmd->add_option("--lambda", cal->lambda, "Ridge regularization weight");
    cal_cmd->add_option("--out", cal->out, "Calibration output file")->required();
    cal_cmd->callback([cal, g] { run_calibrate(*cal, *g); });

    auto ev = std::make_shared<EvalDepthOpts>();
    CLI::App* ev_cmd = app.add_subcommand("eval-depth", "Compare a metric depth map to ground truth");
    ev_cmd->fallthrough();
    ev_cmd->add_option("--pred", ev->pred, "Predicted metric depth PFM")->required();
    ev_cmd->add_option("--gt", ev->gt, "Ground-truth metric depth PFM")->required();
    ev_cmd->callback([ev] { run_eval_depth(*ev); });

    auto sc = std::make_shared<ScanOpts>();
    CLI::App* sc_cmd = app.add_subcommand("scan", "Turn a relative depth map into a virtual scan");
    sc_cmd->fallthrough();
    sc_cmd->add_option("--depth", sc->depth, "Relative inverse depth PFM")->required();
    sc_cmd->add_option("--camera", sc->camera, "Camera model file")->required();
    sc_cmd->add_option("--calib", sc->calib, "Calibration file (identity scale when omitted)");
    sc_cmd->add_option("--config", sc->config, "Scan configuration file");
    sc_cmd->add_option("--out", sc->out, "Scan output file")->required();
    sc_cmd->callback([sc] { run_scan(*sc); });

    auto pl = std::make_shared<PlanOpts>();
    CLI::App* pl_cmd = app.add_subcommand("plan", "One planning step: scan plus goal to velocity");
    pl_cmd->fallthrough();
    pl_cmd->add_option("--scan", pl->scan, "Virtual scan file")->required();
    pl_cmd->add_option("--goal", pl->goal, "Goal x,y in the robot frame (meters)")
        ->required()
        ->delimiter(',')
        ->expected(2);
    pl_cmd->add_option("--body", pl->body, "Footprint L_front,L_rear,W (meters)")
        ->required()
        ->delimiter(',')
        ->expected(3);
    pl_cmd->add_option("--limits", pl->limits, "Dynamic limits file")->required();
    pl_cmd->add_option("--config", pl->config, "Planner configuration file");
    pl_cmd->add_option("--v", pl->v, "Current linear velocity (m/s)");
    pl_cmd->add_option("--omega", pl->omega, "Current angular velocity (rad/s)");
    pl_cmd->callback([pl] { run_plan(*pl); });

    auto si = std::make_shared<SimulateOpts>();
    CLI::App* si_cmd = app.add_subcommand("simulate", "Run one closed-loop episode");
    si_cmd->fallthrough();
    si_cmd->add_option("--scenario", si->scenario, "Scenario file")->required();
    si_cmd->add_option("--embodiment", si->embodiment, "Embodiment profile file")->required();
    si_cmd->add_option("--config", si->config, "Episode configuration file");
    si_cmd->add_option("--out", si->out, "Trajectory output file")->required();
    si_cmd->add_option("--plot", si->plot, "Also emit an SVG trajectory plot here");
    si_cmd->callback([si, g, seed_opt] {
        g->seed_set = seed_opt->count() > 0;
        run_simulate(*si, *g);
    });

    auto gen = std::make_shared<GenScenariosOpts>();
    CLI::App* gen_cmd = app.add_subcommand("gen-scenarios", "Sample obstacle-course scenarios");
    gen_cmd->fallthrough();
    gen_cmd->add_option("--count", gen->count, "Number of scenarios")
        ->required()
        ->check(CLI::PositiveNumber);
    gen_cmd->add_option("--density", gen->density, "Obstacles per square meter")->required();
    CLI::Option* detour_opt = gen_cmd->add_option(
        "--max-detour", gen->max_detour, "Reject worlds whose shortest path exceeds this "
                                         "multiple of the straight-line distance");
    gen_cmd->add_option("--out", gen->out, "Output directory")->required();
    gen_cmd->callback([gen, g, detour_opt] {
        gen->max_detour_set = detour_opt->count() > 0;
        run_gen_scenarios(*gen, *g);
    });

    auto be = std::make_shared<BenchmarkOpts>();
    CLI::App* be_cmd = app.add_subcommand("benchmark", "Run the episode suite and report metrics");
    be_cmd->fallthrough();
    be_cmd->add_option("--suite", be->suite, "Directory of scenario files")->required();
    be_cmd->add_option("--embodiment", be->embodiment, "Embodiment profile file")->required();
    be_cmd->add_option("--config", be->config, "Episode configuration file");
    CLI::Option* vmax_opt =
        be_cmd->add_option("--vmax", be->vmax, "Override the embodiment's top speed (m/s)");
    be_cmd->add_option("--trials", be->trials, "Trials per scenario")->check(CLI::PositiveNumber);
    be_cmd->add_option("--out", be->out, "Output directory")->required();
    be_cmd->callback([be, g, vmax_opt] {
        be->vmax_set = vmax_opt->count() > 0;
        run_benchmark_cmd(*be, *g);
    });

    auto vl = std::make_shared<VlnStepOpts>();
    CLI::App* vl_cmd =
        app.add_subcommand("vln-step", "Region confidences to world-frame waypoints");
    vl_cmd->fallthrough();
    vl_cmd->add_option("--conf", vl->conf,
                       "Confidence file, or one literal 't s_left s_center s_right' line")
        ->required();
    vl_cmd->add_option("--pose", vl->pose, "Robot pose x,y,heading")
        ->required()
        ->delimiter(',')
        ->expected(3);
    vl_cmd->add_option("--arrival-k", vl->arrival_k, "Consecutive center frames for arrival")
        ->check(CLI::PositiveNumber);
    vl_cmd->add_option("--threshold", vl->threshold, "Arrival confidence threshold");
    vl_cmd->callback([vl] { run_vln_step(*vl); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ConversionError& e) {
        std::cerr << "vnav: bad numeric argument: " << e.what() << '\n';
        return 5;
    } catch (const CLI::ParseError& e) {
        std::cerr << "vnav: " << e.what() << '\n';
        return 2;
    } catch (const Error& e) {
        std::cerr << "vnav: error (" << kind_label(e.kind()) << "): " << e.what() << '\n';
        return exit_code_for(e.kind());
    } catch (const std::exception& e) {
        std::cerr << "vnav: internal error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}
