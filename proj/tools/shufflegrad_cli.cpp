// Command-line front end: `run` executes an experiment config and writes the
// results CSV, `verify` runs the bundled property checks, and `sweep-rate`
// runs a sweep and fits log-log slopes of the mean gap against K.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "shufflegrad/experiment.hpp"

namespace fs = std::filesystem;
using namespace shufflegrad;

namespace {

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& content) {
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
}

ExperimentSpec load_spec(const std::string& config_path, std::uint64_t* seed_override, Step stride_override) {
    ExperimentSpec spec = parse_config(read_file(config_path));
    if (seed_override) spec.master_seed = *seed_override;
    if (stride_override > 0) spec.stride = stride_override;
    return spec;
}

void print_rows(const std::vector<ResultRow>& rows) {
    std::printf("%6s %6s %8s %-6s %-18s %-8s %14s %14s %6s %6s %10s\n", "n", "K", "T", "scheme",
                "schedule", "tracker", "mean_gap", "ci95", "reps", "fail", "wall_ms");
    for (const ResultRow& r : rows) {
        std::printf("%6lld %6lld %8lld %-6s %-18s %-8s %14.6e %14.6e %6d %6d %10.1f\n",
                    static_cast<long long>(r.n), static_cast<long long>(r.K),
                    static_cast<long long>(r.T), r.scheme.c_str(), r.schedule.c_str(),
                    r.tracker.c_str(), r.mean_gap, r.ci_half_width, r.replications,
                    r.failed_replications, r.wall_time_ms);
    }
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"shuffling proximal subgradient experiments"};
    app.require_subcommand(1);

    std::string out_dir = "out";
    int threads = 1;
    std::uint64_t seed = 0;
    bool seed_set = false;
    Step stride = 0;
    app.add_option("--out", out_dir, "output directory for CSV/JSON artifacts");
    app.add_option("--threads", threads, "worker threads for replications")->check(CLI::PositiveNumber);
    app.add_option("--seed", seed, "override the config's master_seed")->each([&](const std::string&) {
        seed_set = true;
    });
    app.add_option("--stride", stride, "override the gap-recording stride");

    std::string run_config;
    CLI::App* cmd_run = app.add_subcommand("run", "run an experiment config and emit CSV");
    cmd_run->add_option("config", run_config, "JSON experiment config")->required();

    bool full = false;
    CLI::App* cmd_verify = app.add_subcommand("verify", "run the bundled property checks");
    cmd_verify->add_flag("--full", full, "larger enumerations (n <= 5) and 10^5 Monte-Carlo trials");

    std::string sweep_config;
    CLI::App* cmd_sweep = app.add_subcommand("sweep-rate", "run a sweep and fit log-log slopes vs K");
    cmd_sweep->add_option("config", sweep_config, "JSON experiment config")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*cmd_run) {
            const ExperimentSpec spec = load_spec(run_config, seed_set ? &seed : nullptr, stride);
            const ExperimentResult result = run_experiment(spec, threads);
            print_rows(result.rows);
            const fs::path csv_path = fs::path(out_dir) / (spec.name + ".csv");
            write_file(csv_path, to_csv(result.rows));
            write_file(fs::path(out_dir) / (spec.name + "_series.csv"), series_to_csv(result.series));
            std::cout << "wrote " << csv_path.string() << "\n";
        } else if (*cmd_verify) {
            VerifyOptions options;
            options.threads = threads;
            const VerifyReport report = verify_suite(full ? VerifyLevel::Full : VerifyLevel::Fast, options);
            std::cout << report_to_text(report);
            const fs::path json_path = fs::path(out_dir) / "verify_report.json";
            write_file(json_path, report_to_json(report));
            std::cout << "wrote " << json_path.string() << "\n";
            return report.all_pass ? 0 : 1;
        } else if (*cmd_sweep) {
            const ExperimentSpec spec = load_spec(sweep_config, seed_set ? &seed : nullptr, stride);
            const ExperimentResult result = run_experiment(spec, threads);
            print_rows(result.rows);
            const auto slopes = fit_sweep_slopes(result.rows);
            std::printf("\n%6s %-8s %10s %12s %8s %6s\n", "n", "tracker", "slope", "intercept", "r2", "cells");
            for (const SlopeRow& s : slopes) {
                std::printf("%6lld %-8s %10.4f %12.4f %8.4f %6d\n", static_cast<long long>(s.n),
                            s.tracker.c_str(), s.slope, s.intercept, s.r2, s.cells);
            }
            write_file(fs::path(out_dir) / (spec.name + ".csv"), to_csv(result.rows));
            write_file(fs::path(out_dir) / (spec.name + "_series.csv"), series_to_csv(result.series));
            write_file(fs::path(out_dir) / (spec.name + "_slopes.csv"), slopes_to_csv(slopes));
            std::cout << "wrote " << (fs::path(out_dir) / (spec.name + "_slopes.csv")).string() << "\n";
        }
    } catch (const std::exception& err) {
        std::cerr << "error: " << err.what() << "\n";
        return 2;
    }
    return 0;
}
