#include "shufflegrad/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "shufflegrad/parallel.hpp"
#include "shufflegrad/welford.hpp"
#include "shufflegrad/prox.hpp"
#include "shufflegrad/rng.hpp"

namespace shufflegrad {

namespace {

using Accumulator = Welford;

}  // namespace

std::string to_string(ConvexitySetting setting) {
    return setting == ConvexitySetting::Convex ? "convex" : "strongly_convex";
}

PhiConstant phi_bound(IndexScheme scheme, ConvexitySetting setting, Step n, Step T,
                      const LipschitzStats& stats) {
    if (n < 1 || T < 1) throw std::invalid_argument("phi_bound: require n >= 1 and T >= 1");
    const double G1 = stats.G_f1;
    const double G2 = stats.G_f2;
    const double nd = static_cast<double>(n);
    const double Td = static_cast<double>(T);
    const double qT = static_cast<double>(epoch_index(T, n));
    PhiConstant phi;
    phi.scheme = scheme;
    phi.setting = setting;
    if (scheme == IndexScheme::RR) {
        phi.value = (setting == ConvexitySetting::Convex)
                        ? 4.0 * (G2 * G2 + 2.0 * std::sqrt(nd) * G1 * G2)
                        : std::sqrt(2.0) * G2 * G2 + 2.0 * std::sqrt(2.0 * nd) * G1 * G2;
    } else if (scheme == IndexScheme::SS) {
        phi.value = (setting == ConvexitySetting::Convex)
                        ? 8.0 * qT * G2 * G2 + 2.0 * std::sqrt(2.0 * nd * qT) * G1 * G2
                        : 8.0 * (Td / nd + 1.0) * G2 * G2 + 2.0 * std::sqrt(2.0 * (Td + nd)) * G1 * G2;
    } else {
        throw std::invalid_argument("phi_bound: only RR and SS carry a bias constant");
    }
    return phi;
}

namespace {

// Accumulators are indexed by pair_index(t, s) = (t-1) t / 2 + (s-1).
std::size_t pair_index(Step t, Step s) {
    return static_cast<std::size_t>((t - 1) * t / 2 + (s - 1));
}

// One replication: runs the trajectory to x_{T}, tabulates f_i(x_s) for every
// component and step, then deposits Omega_t(x_s) = f_{I(t)}(x_s) - f(x_s) for
// the requested pairs. Requesting all pairs costs one trajectory, not T^2.
void omega_replication(const FiniteSumProblem& problem, const SamplerScheme& scheme,
                       const StepSchedule& schedule, const vec& x1, Step T, std::uint64_t seed,
                       const std::function<void(Step t, Step s, double omega)>& deposit) {
    SamplerState sampler = make_sampler(scheme, problem.n, seed);
    std::vector<int> indices(static_cast<std::size_t>(T));
    for (Step t = 1; t <= T; ++t) indices[static_cast<std::size_t>(t - 1)] = sampler.next_index(t);

    // values[(s-1) * n + (i-1)] = f_i(x_s); row_mean[s-1] = f(x_s).
    const std::size_t n = static_cast<std::size_t>(problem.n);
    std::vector<double> values(static_cast<std::size_t>(T) * n);
    std::vector<double> row_mean(static_cast<std::size_t>(T));
    vec x = x1;
    vec g(x.size());
    for (Step s = 1; s <= T; ++s) {
        double sum = 0.0;
        for (int i = 1; i <= problem.n; ++i) {
            const double v = problem.value(i, x);
            values[static_cast<std::size_t>(s - 1) * n + static_cast<std::size_t>(i - 1)] = v;
            sum += v;
        }
        row_mean[static_cast<std::size_t>(s - 1)] = sum / static_cast<double>(problem.n);
        if (s == T) break;
        problem.subgradient(indices[static_cast<std::size_t>(s - 1)], x, g);
        x = prox_step(problem.regularizer, x, g, step_at(schedule, s));
        if (!all_finite(x)) {
            throw std::runtime_error("estimate_omega: non-finite iterate at step " + std::to_string(s));
        }
    }
    for (Step t = 1; t <= T; ++t) {
        const int it = indices[static_cast<std::size_t>(t - 1)];
        for (Step s = 1; s <= t; ++s) {
            const double omega =
                values[static_cast<std::size_t>(s - 1) * n + static_cast<std::size_t>(it - 1)] -
                row_mean[static_cast<std::size_t>(s - 1)];
            deposit(t, s, omega);
        }
    }
}

std::vector<Accumulator> run_omega_trials(const FiniteSumProblem& problem, const SamplerScheme& scheme,
                                          const StepSchedule& schedule, const vec& x1, Step T,
                                          std::int64_t trials, std::uint64_t seed, int threads) {
    if (trials < 100) throw std::invalid_argument("estimate_omega: trials must be >= 100");
    if (x1.size() != static_cast<std::size_t>(problem.d)) {
        throw std::invalid_argument("estimate_omega: x1 dimension mismatch");
    }
    const std::size_t cells = pair_index(T, T) + 1;
    // Replications are grouped into fixed-size blocks and block accumulators
    // merge in block order, so the aggregate is bit-identical for any thread
    // count; only the work assignment of whole blocks varies.
    constexpr std::int64_t kBlock = 256;
    const std::int64_t blocks = (trials + kBlock - 1) / kBlock;
    std::vector<std::vector<Accumulator>> partial(static_cast<std::size_t>(blocks));
    parallel_for(blocks, threads, [&](std::int64_t blk) {
        std::vector<Accumulator> acc(cells);
        const std::int64_t lo = blk * kBlock;
        const std::int64_t hi = std::min(trials, lo + kBlock);
        for (std::int64_t rep = lo; rep < hi; ++rep) {
            omega_replication(problem, scheme, schedule, x1, T,
                              derive_seed(seed, static_cast<std::uint64_t>(rep)),
                              [&](Step t, Step s, double omega) { acc[pair_index(t, s)].add(omega); });
        }
        partial[static_cast<std::size_t>(blk)] = std::move(acc);
    });
    std::vector<Accumulator> total(cells);
    for (const auto& acc : partial) {
        for (std::size_t c = 0; c < cells; ++c) total[c].merge(acc[c]);
    }
    return total;
}

}  // namespace

OmegaEstimate estimate_omega(const FiniteSumProblem& problem, const SamplerScheme& scheme,
                             const StepSchedule& schedule, const vec& x1, Step t, Step s,
                             std::int64_t trials, std::uint64_t seed, int threads) {
    if (s < 1 || s > t) throw std::invalid_argument("estimate_omega: require 1 <= s <= t");
    if (t > schedule.horizon.T) throw std::invalid_argument("estimate_omega: t exceeds the schedule horizon");
    if (trials < 100) throw std::invalid_argument("estimate_omega: trials must be >= 100");
    if (x1.size() != static_cast<std::size_t>(problem.d)) {
        throw std::invalid_argument("estimate_omega: x1 dimension mismatch");
    }
    // One pair only: materialize the index stream to t, advance the iterate
    // just to x_s, and record f_{I(t)}(x_s) - f(x_s).
    constexpr std::int64_t kBlock = 256;
    const std::int64_t blocks = (trials + kBlock - 1) / kBlock;
    std::vector<Accumulator> partial(static_cast<std::size_t>(blocks));
    parallel_for(blocks, threads, [&](std::int64_t blk) {
        Accumulator acc;
        vec g(x1.size());
        const std::int64_t lo = blk * kBlock;
        const std::int64_t hi = std::min(trials, lo + kBlock);
        for (std::int64_t rep = lo; rep < hi; ++rep) {
            SamplerState sampler =
                make_sampler(scheme, problem.n, derive_seed(seed, static_cast<std::uint64_t>(rep)));
            std::vector<int> indices(static_cast<std::size_t>(t));
            for (Step j = 1; j <= t; ++j) indices[static_cast<std::size_t>(j - 1)] = sampler.next_index(j);
            vec x = x1;
            for (Step j = 1; j < s; ++j) {
                problem.subgradient(indices[static_cast<std::size_t>(j - 1)], x, g);
                x = prox_step(problem.regularizer, x, g, step_at(schedule, j));
                if (!all_finite(x)) {
                    throw std::runtime_error("estimate_omega: non-finite iterate at step " + std::to_string(j));
                }
            }
            const int it = indices[static_cast<std::size_t>(t - 1)];
            acc.add(problem.value(it, x) - problem.average_value(x));
        }
        partial[static_cast<std::size_t>(blk)] = acc;
    });
    Accumulator total;
    for (const Accumulator& acc : partial) total.merge(acc);
    return OmegaEstimate{t, s, total.mean, total.half_width95(), total.count};
}

std::vector<OmegaEstimate> estimate_omega_grid(const FiniteSumProblem& problem,
                                               const SamplerScheme& scheme,
                                               const StepSchedule& schedule, const vec& x1, Step T,
                                               std::int64_t trials, std::uint64_t seed, int threads) {
    if (T < 1 || T > schedule.horizon.T) {
        throw std::invalid_argument("estimate_omega_grid: require 1 <= T <= schedule horizon");
    }
    const auto cells = run_omega_trials(problem, scheme, schedule, x1, T, trials, seed, threads);
    std::vector<OmegaEstimate> out;
    out.reserve(cells.size());
    for (Step t = 1; t <= T; ++t) {
        for (Step s = 1; s <= t; ++s) {
            const Accumulator& acc = cells[pair_index(t, s)];
            out.push_back(OmegaEstimate{t, s, acc.mean, acc.half_width95(), acc.count});
        }
    }
    return out;
}

OmegaConformance check_omega_conformance(const FiniteSumProblem& problem, IndexScheme scheme,
                                         ConvexitySetting setting, const StepSchedule& schedule,
                                         const vec& x1, Step T, std::int64_t trials,
                                         std::uint64_t seed, int threads) {
    OmegaConformance report;
    report.phi = phi_bound(scheme, setting, problem.n, T, problem.lipschitz);
    SamplerScheme sampler_scheme = (scheme == IndexScheme::RR) ? SamplerScheme::rr() : SamplerScheme::ss();
    report.estimates =
        estimate_omega_grid(problem, sampler_scheme, schedule, x1, T, trials, seed, threads);
    report.worst_margin = -std::numeric_limits<double>::infinity();
    for (const OmegaEstimate& est : report.estimates) {
        const double envelope = report.phi.value * step_at(schedule, est.s) + est.half_width;
        report.worst_margin = std::max(report.worst_margin, std::abs(est.mean) - envelope);
    }
    report.pass = report.worst_margin <= 0.0;
    return report;
}

RateFit fit_rate(const std::vector<std::pair<double, double>>& points) {
    if (points.size() < 3) throw std::invalid_argument("fit_rate: need at least 3 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (const auto& [x, y] : points) {
        if (!(x > 0.0) || !(y > 0.0)) {
            throw std::invalid_argument("fit_rate: points must be strictly positive for a log-log fit");
        }
        const double lx = std::log(x);
        const double ly = std::log(y);
        sx += lx;
        sy += ly;
        sxx += lx * lx;
        sxy += lx * ly;
        syy += ly * ly;
    }
    const double n = static_cast<double>(points.size());
    const double var_x = sxx - sx * sx / n;
    if (!(var_x > 0.0)) throw std::invalid_argument("fit_rate: x values must not all coincide");
    RateFit fit;
    fit.slope = (sxy - sx * sy / n) / var_x;
    fit.intercept = (sy - fit.slope * sx) / n;
    double ss_res = 0.0;
    const double ss_tot = syy - sy * sy / n;
    for (const auto& [x, y] : points) {
        const double pred = fit.intercept + fit.slope * std::log(x);
        const double resid = std::log(y) - pred;
        ss_res += resid * resid;
    }
    fit.r2 = (ss_tot > 0.0) ? 1.0 - ss_res / ss_tot : 1.0;
    return fit;
}

LowerBoundReport lower_bound_check(double G, double mu, Step T) {
    if (!(G > 0.0) || !(mu > 0.0) || T < 1) {
        throw std::invalid_argument("lower_bound_check: require G > 0, mu > 0, T >= 1");
    }
    const FiniteSumProblem problem = hard_instance(G, mu, T, T + 1, 1);
    RunConfig cfg;
    cfg.horizon = Horizon(T, 1);
    cfg.x1 = zeros(static_cast<std::size_t>(T + 1));
    cfg.schedule = StepSchedule::polyak(1, mu, cfg.horizon);  // eta_t = 1/(mu t)
    cfg.scheme = SamplerScheme::ig({1});
    cfg.trackers.last = true;
    cfg.trackers.gap_stride = 1;
    cfg.F_ref = problem.reference->F_star;
    const Trace trace = run(problem, cfg);

    LowerBoundReport report;
    report.min_gap = std::numeric_limits<double>::infinity();
    for (const auto& [t, gap] : trace.gaps) report.min_gap = std::min(report.min_gap, gap);
    report.bound = G * G / (2.0 * mu * static_cast<double>(T + 1));
    report.pass = report.min_gap >= report.bound - kDefaultTol;
    return report;
}

}  // namespace shufflegrad
