#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "vnav/sim.hpp"

namespace vnav {

// S * T_opt / clip(T_act, 2*T_opt, 8*T_opt); 0.5 at best, 0 on failure.
double metric_score(int S, double T_act, double T_opt);

// T_opt = L_path / v_max.
double optimal_time(double path_length, double v_max);

struct EpisodeRecord {
    int scenario_id = 0;
    int trial = 0;
    EpisodeResult result;
    double T_opt = 0.0;
};

struct EpisodeRow {
    int scenario_id = 0;
    int trial = 0;
    int S = 0;
    int C = 0;
    int O = 0;
    double T_act = 0.0;
    double T_opt = 0.0;
    double metric = 0.0;
};

struct MetricsReport {
    std::vector<EpisodeRow> rows;
    double metric = 0.0;
    double success_rate = 0.0;
    double collision_rate = 0.0;
    double timeout_rate = 0.0;
    double v_max = 0.0; // config echo
    uint64_t base_seed = 0;
};

MetricsReport aggregate(const std::vector<EpisodeRecord>& records, double v_max,
                        uint64_t base_seed);

// Writes the requested formats ("csv" -> results.csv, "md" -> report.md)
// into out_dir; returns the paths written. Output is byte-deterministic for
// a given report.
std::vector<std::string> emit_report(const MetricsReport& report,
                                     const std::vector<std::string>& formats,
                                     const std::string& out_dir);

// Parses a results.csv produced by emit_report (rows and aggregate footer).
MetricsReport load_report_csv(const std::string& path);

struct BenchmarkConfig {
    int trials = 2;
    // Episode timeout as a multiple of T_opt; 10 puts the boundary 25%
    // beyond the metric's lower saturation at 8*T_opt.
    double timeout_factor = 10.0;
    int jobs = 1;
    uint64_t base_seed = 0;
    double dijkstra_resolution = 0.05;

    void validate() const;
};

struct BenchmarkRun {
    MetricsReport report;
    std::vector<EpisodeRecord> records; // full results, trajectory included
};

// Runs trials x scenarios episodes on a worker pool. Episode seeds derive
// from (base_seed, episode index), so results do not depend on the number
// of workers.
BenchmarkRun run_benchmark(const std::vector<World>& scenarios,
                           const EpisodeConfig& episode_template, const BenchmarkConfig& cfg);

} // namespace vnav
