#include "shufflegrad/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace shufflegrad {

Trace run(const FiniteSumProblem& problem, const RunConfig& cfg) {
    const Step T = cfg.horizon.T;
    const Step n = cfg.horizon.n;
    if (n != problem.n) {
        throw std::invalid_argument("run: horizon n=" + std::to_string(n) + " does not match problem n=" +
                                    std::to_string(problem.n));
    }
    if (cfg.schedule.horizon.T != T || cfg.schedule.horizon.n != n) {
        throw std::invalid_argument("run: schedule horizon does not match the run horizon");
    }
    if (cfg.x1.size() != static_cast<std::size_t>(problem.d)) {
        throw std::invalid_argument("run: x1 dimension mismatch");
    }
    if (!problem.regularizer.in_domain(cfg.x1, 1e-9)) {
        throw std::invalid_argument("run: x1 must lie in dom psi");
    }
    double F_ref = 0.0;
    if (cfg.trackers.gap_stride > 0) {
        if (cfg.F_ref) {
            F_ref = *cfg.F_ref;
        } else if (problem.reference) {
            F_ref = problem.reference->F_star;
        } else {
            throw std::invalid_argument("run: gap series requested but no reference value available");
        }
    }

    SamplerState sampler = make_sampler(cfg.scheme, n, cfg.seed);
    Trace trace;
    if (cfg.trackers.index_log) trace.index_log.reserve(static_cast<std::size_t>(T));

    vec x = cfg.x1;
    vec g(x.size());
    vec iterate_sum = cfg.trackers.average ? zeros(x.size()) : vec{};
    std::vector<vec> ring;
    if (cfg.trackers.suffix) ring.resize(static_cast<std::size_t>(std::min(T, n)));

    for (Step t = 1; t <= T; ++t) {
        const int i = sampler.next_index(t);
        if (cfg.trackers.index_log) trace.index_log.push_back(i);
        problem.subgradient(i, x, g);
        vec next = prox_step(problem.regularizer, x, g, step_at(cfg.schedule, t));
        if (!all_finite(next)) {
            throw std::runtime_error("run: non-finite iterate at step t=" + std::to_string(t) +
                                     ", ||x_t|| = " + std::to_string(norm2(x)));
        }
        x = std::move(next);
        if (cfg.trackers.average) axpy(1.0, x, iterate_sum);
        if (cfg.trackers.suffix) {
            ring[static_cast<std::size_t>((t - 1) % static_cast<Step>(ring.size()))] = x;
        }
        if (cfg.trackers.gap_stride > 0 && (t % cfg.trackers.gap_stride == 0 || t == T)) {
            trace.gaps.emplace_back(t, evaluate_gap(problem, x, F_ref));
        }
    }

    trace.last = std::move(x);
    if (cfg.trackers.average) {
        scale(1.0 / static_cast<double>(T), iterate_sum);
        trace.average = std::move(iterate_sum);
    }
    if (cfg.trackers.suffix) {
        // Unroll the ring chronologically: oldest entry sits right after the
        // slot of step T.
        const Step len = static_cast<Step>(ring.size());
        trace.last_epoch.reserve(static_cast<std::size_t>(len));
        for (Step k = 0; k < len; ++k) {
            trace.last_epoch.push_back(ring[static_cast<std::size_t>((T + k) % len)]);
        }
        if (T >= n) {
            vec suffix = zeros(trace.last.size());
            for (const vec& p : trace.last_epoch) axpy(1.0 / static_cast<double>(n), p, suffix);
            trace.suffix = std::move(suffix);
        }
    }
    return trace;
}

std::optional<vec> suffix_average(const Trace& trace, Step n) {
    if (n < 1) throw std::invalid_argument("suffix_average: n must be >= 1");
    if (static_cast<Step>(trace.last_epoch.size()) < n) return std::nullopt;
    vec out = zeros(trace.last_epoch.front().size());
    const std::size_t start = trace.last_epoch.size() - static_cast<std::size_t>(n);
    for (std::size_t k = start; k < trace.last_epoch.size(); ++k) {
        axpy(1.0 / static_cast<double>(n), trace.last_epoch[k], out);
    }
    return out;
}

double evaluate_gap(const FiniteSumProblem& problem, const vec& x, double F_ref) {
    const double F = problem.objective(x);
    if (!std::isfinite(F)) return F;  // +inf outside dom psi
    return F - F_ref;
}

}  // namespace shufflegrad
