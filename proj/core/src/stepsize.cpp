#include "shufflegrad/stepsize.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace shufflegrad {

std::string to_string(StepKind kind) {
    switch (kind) {
        case StepKind::EpochDecay: return "epoch_decay";
        case StepKind::ConstOverSqrtT: return "const_over_sqrt_T";
        case StepKind::InvSqrtT: return "inv_sqrt_t";
        case StepKind::PolyakStr: return "polyak";
    }
    return "?";
}

namespace {

void require_positive_eta(double eta) {
    if (!(eta > 0.0)) throw std::invalid_argument("StepSchedule: eta must be positive");
}

}  // namespace

StepSchedule StepSchedule::epoch_decay(double eta, Horizon horizon) {
    require_positive_eta(eta);
    return {StepKind::EpochDecay, horizon, eta, 1, 1.0};
}

StepSchedule StepSchedule::const_over_sqrt_T(double eta, Horizon horizon) {
    require_positive_eta(eta);
    return {StepKind::ConstOverSqrtT, horizon, eta, 1, 1.0};
}

StepSchedule StepSchedule::inv_sqrt_t(double eta, Horizon horizon) {
    require_positive_eta(eta);
    return {StepKind::InvSqrtT, horizon, eta, 1, 1.0};
}

StepSchedule StepSchedule::polyak(int m, double mu, Horizon horizon) {
    if (m < 1) throw std::invalid_argument("StepSchedule: polyak numerator m must be >= 1");
    if (!(mu > 0.0)) throw std::invalid_argument("StepSchedule: polyak requires mu > 0");
    return {StepKind::PolyakStr, horizon, 1.0, m, mu};
}

double step_at(const StepSchedule& schedule, Step t) {
    const Step T = schedule.horizon.T;
    if (t < 1 || t > T) {
        throw std::invalid_argument("step_at: t=" + std::to_string(t) + " outside [1, " + std::to_string(T) + "]");
    }
    switch (schedule.kind) {
        case StepKind::EpochDecay: {
            const double qT = static_cast<double>(schedule.horizon.epochs());
            const double qt = static_cast<double>(schedule.horizon.epoch_of(t));
            return schedule.eta * (qT - qt + 1.0) / (qT * std::sqrt(static_cast<double>(T)));
        }
        case StepKind::ConstOverSqrtT:
            return schedule.eta / std::sqrt(static_cast<double>(T));
        case StepKind::InvSqrtT:
            return schedule.eta / std::sqrt(static_cast<double>(t));
        case StepKind::PolyakStr:
            return static_cast<double>(schedule.m) / (schedule.mu * static_cast<double>(t));
    }
    throw std::logic_error("step_at: unknown schedule kind");
}

GammaWeights gamma_weights(const StepSchedule& schedule, double mu) {
    if (mu < 0.0) throw std::invalid_argument("gamma_weights: mu must be nonnegative");
    const Step T = schedule.horizon.T;
    GammaWeights w;
    w.mu = mu;
    w.gammas.resize(static_cast<std::size_t>(T) + 1);
    w.gammas[0] = 1.0;
    for (Step t = 1; t <= T; ++t) {
        w.gammas[static_cast<std::size_t>(t)] =
            w.gammas[static_cast<std::size_t>(t - 1)] * (1.0 + mu * step_at(schedule, t));
    }
    return w;
}

StepsizeLemmaReport verify_stepsize_lemma(double eta_star, Step n, Step T) {
    if (!(eta_star > 0.0) || n < 1 || T < 1) {
        throw std::invalid_argument("verify_stepsize_lemma: require eta_star > 0, n >= 1, T >= 1");
    }
    const Step qT = epoch_index(T, n);
    std::vector<double> eta(static_cast<std::size_t>(T));
    for (Step t = 1; t <= T; ++t) {
        eta[static_cast<std::size_t>(t - 1)] = eta_star * static_cast<double>(qT - epoch_index(t, n) + 1);
    }
    std::vector<double> suffix(static_cast<std::size_t>(T) + 1, 0.0);
    for (Step t = T; t >= 1; --t) {
        suffix[static_cast<std::size_t>(t - 1)] =
            suffix[static_cast<std::size_t>(t)] + eta[static_cast<std::size_t>(t - 1)];
    }
    StepsizeLemmaReport report;
    report.lhs1 = suffix[0];
    report.rhs1 = eta_star * static_cast<double>(qT) * static_cast<double>(T) / 2.0;
    double ratio_sum = 0.0;
    for (Step t = 1; t <= T; ++t) {
        ratio_sum += eta[static_cast<std::size_t>(t - 1)] * eta[static_cast<std::size_t>(t - 1)] /
                     suffix[static_cast<std::size_t>(t - 1)];
    }
    report.lhs2 = ratio_sum;
    report.rhs2 = 9.0 * eta_star * (static_cast<double>(qT) + std::log(static_cast<double>(n))) / 2.0;
    report.pass = (report.lhs1 + kDefaultTol >= report.rhs1) && (report.lhs2 <= report.rhs2 + kDefaultTol);
    return report;
}

double binomial_coefficient(std::int64_t top, std::int64_t k) {
    if (k < 0 || k > top) return 0.0;
    k = std::min(k, top - k);
    double c = 1.0;
    for (std::int64_t i = 1; i <= k; ++i) {
        c *= static_cast<double>(top - k + i) / static_cast<double>(i);
        if (c > 1e300) return std::numeric_limits<double>::infinity();
    }
    return c;
}

GammaEtaIdentityReport gamma_eta_identity_report(int m, double mu, Step T) {
    const Horizon horizon(T, 1);
    const StepSchedule schedule = StepSchedule::polyak(m, mu, horizon);
    const GammaWeights w = gamma_weights(schedule, mu);
    GammaEtaIdentityReport report;
    double sum = 0.0;
    for (Step t = 1; t <= T; ++t) {
        const double got = w.at(t) * step_at(schedule, t);
        const double want = binomial_coefficient(m + t - 1, m - 1) / mu;
        if (!std::isfinite(got) || !std::isfinite(want)) {
            report.saturated = true;
            continue;
        }
        sum += got;
        report.max_pointwise_rel_err =
            std::max(report.max_pointwise_rel_err, std::abs(got - want) / std::abs(want));
    }
    const double want_sum = (binomial_coefficient(m + T, m) - 1.0) / mu;
    if (report.saturated || !std::isfinite(want_sum)) {
        report.saturated = true;
    } else {
        report.telescoped_rel_err = std::abs(sum - want_sum) / std::abs(want_sum);
    }
    return report;
}

}  // namespace shufflegrad
