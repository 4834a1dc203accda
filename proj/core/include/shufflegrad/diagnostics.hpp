#ifndef SHUFFLEGRAD_DIAGNOSTICS_HPP
#define SHUFFLEGRAD_DIAGNOSTICS_HPP

#include <cstdint>
#include <string>
#include <vector>

#include "shufflegrad/core.hpp"
#include "shufflegrad/optimizer.hpp"
#include "shufflegrad/problems.hpp"
#include "shufflegrad/samplers.hpp"
#include "shufflegrad/stepsize.hpp"

namespace shufflegrad {

enum class ConvexitySetting { Convex, StronglyConvex };

std::string to_string(ConvexitySetting setting);

// Closed-form constant Phi such that |E[f_{I(t)}(x_s) - f(x_s)]| <= Phi eta_s
// for the matching scheme/stepsize family:
//   RR convex           4 (G2^2 + 2 sqrt(n) G1 G2)
//   RR strongly convex  sqrt(2) G2^2 + 2 sqrt(2n) G1 G2
//   SS convex           8 q(T) G2^2 + 2 sqrt(2 n q(T)) G1 G2
//   SS strongly convex  8 (T/n + 1) G2^2 + 2 sqrt(2 (T+n)) G1 G2
// where G1/G2 are the mean and root mean square of the Lipschitz constants.
struct PhiConstant {
    IndexScheme scheme = IndexScheme::RR;
    ConvexitySetting setting = ConvexitySetting::Convex;
    double value = 0.0;
};

PhiConstant phi_bound(IndexScheme scheme, ConvexitySetting setting, Step n, Step T,
                      const LipschitzStats& stats);

// Monte-Carlo estimate of E[Omega_t(x_s)] = E[f_{I(t)}(x_s) - f(x_s)]: each
// replication materializes the index stream up to t, advances the iterate to
// x_s, and records the bias of the component the sampler will use at step t.
struct OmegaEstimate {
    Step t = 0;
    Step s = 0;
    double mean = 0.0;
    double half_width = 0.0;  // normal-approximation 95% CI
    std::int64_t trials = 0;
};

OmegaEstimate estimate_omega(const FiniteSumProblem& problem, const SamplerScheme& scheme,
                             const StepSchedule& schedule, const vec& x1, Step t, Step s,
                             std::int64_t trials, std::uint64_t seed, int threads = 1);

// Same estimator over every pair (t, s) with s <= t <= T, sharing one
// trajectory per replication. Entry for (t, s) sits at index
// (t-1) t / 2 + (s-1) of the returned vector.
std::vector<OmegaEstimate> estimate_omega_grid(const FiniteSumProblem& problem,
                                               const SamplerScheme& scheme,
                                               const StepSchedule& schedule, const vec& x1, Step T,
                                               std::int64_t trials, std::uint64_t seed,
                                               int threads = 1);

// Conformance of the estimated biases against Phi: every (t, s) pair must
// satisfy |mean| <= Phi eta_s + CI half-width.
struct OmegaConformance {
    PhiConstant phi;
    std::vector<OmegaEstimate> estimates;
    double worst_margin = 0.0;  // max over pairs of |mean| - (Phi eta_s + CI)
    bool pass = false;
};

OmegaConformance check_omega_conformance(const FiniteSumProblem& problem, IndexScheme scheme,
                                         ConvexitySetting setting, const StepSchedule& schedule,
                                         const vec& x1, Step T, std::int64_t trials,
                                         std::uint64_t seed, int threads = 1);

// Ordinary least squares on (ln x, ln y). r2 is 1 for a perfect fit,
// including the degenerate all-equal-y case.
struct RateFit {
    double slope = 0.0;
    double intercept = 0.0;
    double r2 = 0.0;
};

RateFit fit_rate(const std::vector<std::pair<double, double>>& points);

// Runs the worst-case instance as single-component proximal descent with
// eta_t = 1/(mu t) from 0 and compares the smallest post-update gap with the
// floor G^2 / (2 mu (T+1)); the gap can never undercut it.
struct LowerBoundReport {
    double min_gap = 0.0;
    double bound = 0.0;
    bool pass = false;
};

LowerBoundReport lower_bound_check(double G, double mu, Step T);

}  // namespace shufflegrad

#endif
