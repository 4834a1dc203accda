#ifndef SHUFFLEGRAD_OPTIMIZER_HPP
#define SHUFFLEGRAD_OPTIMIZER_HPP

#include <cstdint>
#include <optional>
#include <vector>

#include "shufflegrad/core.hpp"
#include "shufflegrad/problems.hpp"
#include "shufflegrad/samplers.hpp"
#include "shufflegrad/stepsize.hpp"
#include "shufflegrad/vec.hpp"

namespace shufflegrad {

// Which summaries a run should populate. The loop never stores the whole
// trajectory: the average is a running sum, the suffix average an n-length
// ring buffer, and the gap series is evaluated every `gap_stride` steps (a
// full objective evaluation costs n oracle calls).
struct Trackers {
    bool last = true;
    bool average = false;
    bool suffix = false;
    Step gap_stride = 0;  // 0 = no gap series
    bool index_log = false;
};

struct RunConfig {
    Horizon horizon;
    vec x1;
    StepSchedule schedule;
    SamplerScheme scheme;
    std::uint64_t seed = 0;
    Trackers trackers;
    // Reference value used by the gap series; falls back to the problem's
    // analytic reference when absent.
    std::optional<double> F_ref;
};

struct Trace {
    vec last;                                      // x_{T+1}
    std::optional<vec> average;                    // (1/T) sum_{t=1..T} x_{t+1}
    std::optional<vec> suffix;                     // mean of the final n post-update iterates (T >= n)
    std::vector<std::pair<Step, double>> gaps;     // (t, F(x_{t+1}) - F_ref)
    std::vector<int> index_log;                    // I(1..T) when requested
    std::vector<vec> last_epoch;                   // final min(T, n) iterates, oldest first (suffix tracker)
};

// Runs T steps of the proximal subgradient loop
//   x_{t+1} = argmin_x psi(x) + <g_{I(t)}(x_t), x> + ||x - x_t||^2 / (2 eta_t)
// and fills the requested trackers. Deterministic given the seed. Aborts with
// a diagnostic (step index and iterate norm) if an iterate turns non-finite.
Trace run(const FiniteSumProblem& problem, const RunConfig& cfg);

// Mean of the last n recorded iterates; empty when fewer than n were kept.
std::optional<vec> suffix_average(const Trace& trace, Step n);

// F(x) - F_ref; +infinity when x lies outside dom psi.
double evaluate_gap(const FiniteSumProblem& problem, const vec& x, double F_ref);

}  // namespace shufflegrad

#endif
