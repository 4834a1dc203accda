#ifndef SHUFFLEGRAD_STEPSIZE_HPP
#define SHUFFLEGRAD_STEPSIZE_HPP

#include <string>
#include <vector>

#include "shufflegrad/core.hpp"

namespace shufflegrad {

// The four stepsize rules. All are non-increasing in t and need the horizon at
// construction (EpochDecay and ConstOverSqrtT reference q(T) and sqrt(T)).
//
//   EpochDecay     eta_t = eta * (q(T) - q(t) + 1) / (q(T) * sqrt(T))
//   ConstOverSqrtT eta_t = eta / sqrt(T)
//   InvSqrtT       eta_t = eta / sqrt(t)
//   PolyakStr      eta_t = m / (mu * t)
enum class StepKind { EpochDecay, ConstOverSqrtT, InvSqrtT, PolyakStr };

std::string to_string(StepKind kind);

struct StepSchedule {
    StepKind kind = StepKind::ConstOverSqrtT;
    Horizon horizon;
    double eta = 1.0;  // scale for the three convex rules
    int m = 1;         // numerator for PolyakStr
    double mu = 1.0;   // strong-convexity modulus for PolyakStr

    static StepSchedule epoch_decay(double eta, Horizon horizon);
    static StepSchedule const_over_sqrt_T(double eta, Horizon horizon);
    static StepSchedule inv_sqrt_t(double eta, Horizon horizon);
    static StepSchedule polyak(int m, double mu, Horizon horizon);
};

// eta_t for t in [1, T].
double step_at(const StepSchedule& schedule, Step t);

// gamma_1 = 1, gamma_{t+1} = (1 + mu * eta_t) * gamma_t, t in [1, T];
// index 0 of `gammas` holds gamma_1, so gammas.size() == T + 1.
struct GammaWeights {
    double mu = 0.0;
    std::vector<double> gammas;

    double at(Step t) const { return gammas[static_cast<std::size_t>(t - 1)]; }
};

GammaWeights gamma_weights(const StepSchedule& schedule, double mu);

// Checks the two summation inequalities satisfied by the epoch-proportional
// stepsize eta_t = eta_star * (q(T) - q(t) + 1):
//   sum_t eta_t                      >= eta_star * q(T) * T / 2
//   sum_t eta_t^2 / sum_{s>=t} eta_s <= 9 * eta_star * (q(T) + ln n) / 2
struct StepsizeLemmaReport {
    double lhs1 = 0.0, rhs1 = 0.0;
    double lhs2 = 0.0, rhs2 = 0.0;
    bool pass = false;
};

StepsizeLemmaReport verify_stepsize_lemma(double eta_star, Step n, Step T);

// Binomial coefficient C(top, k) by multiplicative recurrence in floating
// point; values past 1e300 saturate to +inf instead of erroring.
double binomial_coefficient(std::int64_t top, std::int64_t k);

// For PolyakStr(m, mu): gamma_t * eta_t = C(m+t-1, m-1) / mu pointwise, and
// sum_{t<=T} gamma_t eta_t = (C(m+T, m) - 1) / mu. Reports worst relative
// errors of both identities over t in [1, T]; horizons whose binomials pass
// 1e300 are flagged saturated and excluded from the error figures.
struct GammaEtaIdentityReport {
    double max_pointwise_rel_err = 0.0;
    double telescoped_rel_err = 0.0;
    bool saturated = false;
};

GammaEtaIdentityReport gamma_eta_identity_report(int m, double mu, Step T);

}  // namespace shufflegrad

#endif
