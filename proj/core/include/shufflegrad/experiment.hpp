#ifndef SHUFFLEGRAD_EXPERIMENT_HPP
#define SHUFFLEGRAD_EXPERIMENT_HPP

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "shufflegrad/diagnostics.hpp"
#include "shufflegrad/optimizer.hpp"
#include "shufflegrad/problems.hpp"
#include "shufflegrad/samplers.hpp"
#include "shufflegrad/stepsize.hpp"

namespace shufflegrad {

// Parsed experiment description. The JSON surface is documented in the README;
// parse_config rejects unknown keys and reports offending key paths.
struct ProblemSpec {
    std::string family = "lad";  // hard | lad | hinge
    double G = 1.0;              // hard
    double mu = 1.0;             // hard
    Step d = 2;                  // lad / hinge
    std::uint64_t seed = 0;
    bool planted = true;  // lad

    struct PsiSpec {
        std::string kind = "zero";  // zero | sqnorm | ball | box | l1 | sqnorm_ball
        double mu = 0.0;
        double radius = 1.0;
        double lambda = 0.0;
        double lower = -1.0;
        double upper = 1.0;
    };
    PsiSpec psi;
};

struct ScheduleSpec {
    std::string kind = "const_over_sqrt_T";  // epoch_decay | const_over_sqrt_T | inv_sqrt_t | polyak
    double eta = 1.0;
    bool auto_eta = false;  // expand the optimized eta from instance statistics
    int m = 2;              // polyak
    std::optional<double> mu;  // polyak; defaults to the regularizer's modulus
};

struct ExperimentSpec {
    std::string name = "experiment";
    ProblemSpec problem;
    IndexScheme scheme = IndexScheme::RR;
    ScheduleSpec schedule;
    std::vector<Step> sweep_n;
    std::vector<Step> sweep_K;
    int replications = 32;
    std::uint64_t master_seed = 0;
    bool out_last = true;
    bool out_average = false;
    bool out_suffix = false;
    Step stride = 0;  // gap-recording stride; 0 means the per-cell default n
    std::int64_t ref_budget = 1'000'000;
};

ExperimentSpec parse_config(const std::string& text);

// One aggregated sweep result. wall_time_ms is measured and therefore kept
// out of the CSV so identical seeds produce byte-identical files; it is
// reported on the human-readable summary instead.
struct ResultRow {
    Step n = 0;
    Step K = 0;
    Step T = 0;
    std::string scheme;
    std::string schedule;
    std::string tracker;  // last | average | suffix
    double mean_gap = 0.0;
    double ci_half_width = 0.0;
    int replications = 0;
    int failed_replications = 0;
    double wall_time_ms = 0.0;
};

// Trajectory sample: mean over replications of F(x_{t+1}) - F_ref at the
// recorded steps (every `stride` steps, default n, plus t = T).
struct SeriesRow {
    Step n = 0;
    Step K = 0;
    Step t = 0;
    double mean_gap = 0.0;
};

struct ExperimentResult {
    std::vector<ResultRow> rows;
    std::vector<SeriesRow> series;
};

ExperimentResult run_experiment(const ExperimentSpec& spec, int threads = 1);

// CSV schema (fixed order):
//   n,K,T,scheme,schedule,tracker,mean_gap,ci_half_width,replications,failed_replications
std::string to_csv(const std::vector<ResultRow>& rows);
std::vector<ResultRow> parse_csv(const std::string& text);

// Series CSV schema: n,K,t,mean_gap
std::string series_to_csv(const std::vector<SeriesRow>& rows);

// Log-log slope of mean_gap against K, per (n, tracker) group.
struct SlopeRow {
    Step n = 0;
    std::string tracker;
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
    int cells = 0;
};

std::vector<SlopeRow> fit_sweep_slopes(const std::vector<ResultRow>& rows);
std::string slopes_to_csv(const std::vector<SlopeRow>& rows);

// The optimized eta of the matching convergence guarantee, expanded from the
// instance's Lipschitz statistics and the distance D_star = ||x_star - x_1||.
double auto_eta_value(IndexScheme scheme, StepKind kind, const LipschitzStats& stats,
                      double D_star, const Horizon& horizon);

// Bundled property checks runnable from the CLI. `fast` keeps enumerations at
// n <= 4 and Monte-Carlo trials at 10^4; `full` raises them to n <= 5 and
// 10^5. The swap function is injectable for fault testing.
enum class VerifyLevel { Fast, Full };

struct VerifyOptions {
    SwapFn swap_fn = swap_transform;
    int threads = 1;
    std::uint64_t seed = 2024;
};

struct CheckResult {
    std::string name;
    bool pass = false;
    std::string detail;
};

struct VerifyReport {
    VerifyLevel level = VerifyLevel::Fast;
    std::vector<CheckResult> checks;
    bool all_pass = false;
};

VerifyReport verify_suite(VerifyLevel level, const VerifyOptions& options = {});

std::string report_to_json(const VerifyReport& report);
std::string report_to_text(const VerifyReport& report);

}  // namespace shufflegrad

#endif
