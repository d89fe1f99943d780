#include "vnav/benchmark.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

namespace vnav {

double metric_score(int S, double T_act, double T_opt) {
    if (!(T_opt > 0.0)) raise(ErrorKind::argument, "metric_score: T_opt must be positive");
    if (S == 0) return 0.0;
    const double clipped = std::clamp(T_act, 2.0 * T_opt, 8.0 * T_opt);
    return T_opt / clipped;
}

double optimal_time(double path_length, double v_max) {
    if (!(path_length > 0.0) || !(v_max > 0.0))
        raise(ErrorKind::argument, "optimal_time: inputs must be positive");
    return path_length / v_max;
}

MetricsReport aggregate(const std::vector<EpisodeRecord>& records, double v_max,
                        uint64_t base_seed) {
    if (records.empty()) raise(ErrorKind::empty_input, "aggregate: no episodes");
    MetricsReport report;
    report.v_max = v_max;
    report.base_seed = base_seed;
    report.rows.reserve(records.size());
    double sum_s = 0.0, sum_c = 0.0, sum_o = 0.0, sum_m = 0.0;
    for (const EpisodeRecord& rec : records) {
        const EpisodeResult& r = rec.result;
        if (r.success + r.collision + r.timeout != 1)
            raise(ErrorKind::argument, "aggregate: episode lacks exactly one terminal flag");
        EpisodeRow row;
        row.scenario_id = rec.scenario_id;
        row.trial = rec.trial;
        row.S = r.success;
        row.C = r.collision;
        row.O = r.timeout;
        row.T_act = r.T_act;
        row.T_opt = rec.T_opt;
        row.metric = metric_score(r.success, r.T_act, rec.T_opt);
        report.rows.push_back(row);
        sum_s += row.S;
        sum_c += row.C;
        sum_o += row.O;
        sum_m += row.metric;
    }
    const double n = static_cast<double>(records.size());
    report.success_rate = sum_s / n;
    report.collision_rate = sum_c / n;
    report.timeout_rate = sum_o / n;
    report.metric = sum_m / n;
    return report;
}

namespace {

std::string fmt_double(double x) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", x);
    return buf;
}

std::string fmt_fixed(double x, int digits) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.*f", digits, x);
    return buf;
}

void write_csv(const MetricsReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::io, "emit_report: cannot write " + path);
    out << "# v_max=" << fmt_double(report.v_max) << " base_seed=" << report.base_seed << "\n";
    out << "scenario,trial,S,C,O,T_act,T_opt,metric\n";
    for (const EpisodeRow& r : report.rows)
        out << r.scenario_id << ',' << r.trial << ',' << r.S << ',' << r.C << ',' << r.O << ','
            << fmt_double(r.T_act) << ',' << fmt_double(r.T_opt) << ',' << fmt_double(r.metric)
            << "\n";
    out << "aggregate,," << fmt_double(report.success_rate) << ','
        << fmt_double(report.collision_rate) << ',' << fmt_double(report.timeout_rate) << ",,,"
        << fmt_double(report.metric) << "\n";
    if (!out) raise(ErrorKind::io, "emit_report: write failed for " + path);
}

void write_markdown(const MetricsReport& report, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) raise(ErrorKind::io, "emit_report: cannot write " + path);
    out << "# Benchmark report\n\n";
    out << "Episodes: " << report.rows.size() << "; v_max " << fmt_double(report.v_max)
        << " m/s; base seed " << report.base_seed << ".\n\n";
    out << "| Metric | SR | CR | TO |\n";
    out << "| --- | --- | --- | --- |\n";
    out << "| " << fmt_fixed(report.metric, 4) << " | " << fmt_fixed(report.success_rate * 100.0, 1)
        << "% | " << fmt_fixed(report.collision_rate * 100.0, 1) << "% | "
        << fmt_fixed(report.timeout_rate * 100.0, 1) << "% |\n";
    if (!out) raise(ErrorKind::io, "emit_report: write failed for " + path);
}

} // namespace

std::vector<std::string> emit_report(const MetricsReport& report,
                                     const std::vector<std::string>& formats,
                                     const std::string& out_dir) {
    std::vector<std::string> written;
    for (const std::string& fmt : formats) {
        std::string path;
        if (fmt == "csv")
            path = (std::filesystem::path(out_dir) / "results.csv").string();
        else if (fmt == "md")
            path = (std::filesystem::path(out_dir) / "report.md").string();
        else
            raise(ErrorKind::argument, "emit_report: unknown format '" + fmt + "'");
        if (fmt == "csv")
            write_csv(report, path);
        else
            write_markdown(report, path);
        written.push_back(path);
    }
    return written;
}

MetricsReport load_report_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) raise(ErrorKind::io, "load_report_csv: cannot open " + path);
    MetricsReport report;
    std::string line;
    size_t line_no = 0;
    bool saw_aggregate = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (line[0] == '#') {
            std::istringstream meta(line.substr(1));
            std::string token;
            while (meta >> token) {
                const auto eq = token.find('=');
                if (eq == std::string::npos) continue;
                const std::string key = token.substr(0, eq);
                const std::string value = token.substr(eq + 1);
                if (key == "v_max") report.v_max = std::stod(value);
                if (key == "base_seed") report.base_seed = std::stoull(value);
            }
            continue;
        }
        if (line.rfind("scenario,", 0) == 0) continue;
        std::vector<std::string> fields;
        std::istringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        while (fields.size() < 8) fields.emplace_back();
        if (fields[0] == "aggregate") {
            report.success_rate = std::stod(fields[2]);
            report.collision_rate = std::stod(fields[3]);
            report.timeout_rate = std::stod(fields[4]);
            report.metric = std::stod(fields[7]);
            saw_aggregate = true;
            continue;
        }
        if (fields.size() != 8)
            raise(ErrorKind::format,
                  "load_report_csv: line " + std::to_string(line_no) + ": expected 8 fields");
        EpisodeRow row;
        row.scenario_id = std::stoi(fields[0]);
        row.trial = std::stoi(fields[1]);
        row.S = std::stoi(fields[2]);
        row.C = std::stoi(fields[3]);
        row.O = std::stoi(fields[4]);
        row.T_act = std::stod(fields[5]);
        row.T_opt = std::stod(fields[6]);
        row.metric = std::stod(fields[7]);
        report.rows.push_back(row);
    }
    if (!saw_aggregate)
        raise(ErrorKind::format, "load_report_csv: missing aggregate footer in " + path);
    return report;
}

void BenchmarkConfig::validate() const {
    if (trials < 1) raise(ErrorKind::argument, "benchmark config: trials must be >= 1");
    if (!(timeout_factor > 0.0))
        raise(ErrorKind::argument, "benchmark config: timeout_factor must be positive");
    if (jobs < 1) raise(ErrorKind::argument, "benchmark config: jobs must be >= 1");
    if (!(dijkstra_resolution > 0.0))
        raise(ErrorKind::argument, "benchmark config: resolution must be positive");
}

BenchmarkRun run_benchmark(const std::vector<World>& scenarios,
                           const EpisodeConfig& episode_template, const BenchmarkConfig& cfg) {
    cfg.validate();
    episode_template.validate();
    if (scenarios.empty()) raise(ErrorKind::empty_input, "run_benchmark: no scenarios");

    const double v_max = episode_template.embodiment.limits.v_max;
    std::vector<double> t_opt(scenarios.size());
    for (size_t s = 0; s < scenarios.size(); ++s) {
        const double len = dijkstra_path_length(scenarios[s], episode_template.embodiment.body,
                                                cfg.dijkstra_resolution);
        if (!std::isfinite(len))
            raise(ErrorKind::argument,
                  "run_benchmark: scenario " + std::to_string(s) + " is infeasible");
        t_opt[s] = optimal_time(len, v_max);
    }

    const size_t n_tasks = scenarios.size() * static_cast<size_t>(cfg.trials);
    std::vector<EpisodeRecord> records(n_tasks);
    std::atomic<size_t> next{0};

    auto worker = [&]() {
        while (true) {
            const size_t idx = next.fetch_add(1);
            if (idx >= n_tasks) break;
            const size_t s = idx / static_cast<size_t>(cfg.trials);
            const int trial = static_cast<int>(idx % static_cast<size_t>(cfg.trials));

            EpisodeConfig ep = episode_template;
            ep.seed = mix_seed(cfg.base_seed, idx);
            ep.timeout_s = cfg.timeout_factor * t_opt[s];

            EpisodeRecord rec;
            rec.scenario_id = static_cast<int>(s);
            rec.trial = trial;
            rec.T_opt = t_opt[s];
            try {
                SamplingPlanner planner(ep.planner);
                rec.result = run_episode(scenarios[s], ep, planner);
            } catch (const Error& e) {
                rec.result.timeout = 1;
                rec.result.T_act = ep.timeout_s;
                rec.result.error = e.what();
            }
            records[idx] = std::move(rec);
        }
    };

    const int n_threads = std::min<int>(cfg.jobs, static_cast<int>(n_tasks));
    if (n_threads <= 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<size_t>(n_threads));
        for (int i = 0; i < n_threads; ++i) pool.emplace_back(worker);
        for (std::thread& t : pool) t.join();
    }

    BenchmarkRun run;
    run.report = aggregate(records, v_max, cfg.base_seed);
    run.records = std::move(records);
    return run;
}

} // namespace vnav
