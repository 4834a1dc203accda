#ifndef SHUFFLEGRAD_CORE_HPP
#define SHUFFLEGRAD_CORE_HPP

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace shufflegrad {

// Absolute tolerance used by invariant checks unless an operation documents a
// tighter one.
inline constexpr double kDefaultTol = 1e-12;

// Steps t, component indices i, and epochs are 1-based everywhere in the
// public API; [n] = {1, ..., n}.
using Step = std::int64_t;

// Epoch index q(t) = ceil(t / n).
inline Step epoch_index(Step t, Step n) {
    if (t < 1 || n < 1) {
        throw std::invalid_argument("epoch_index: require t >= 1 and n >= 1, got t=" +
                                    std::to_string(t) + ", n=" + std::to_string(n));
    }
    return (t + n - 1) / n;
}

// Residual index r(t) in [1, n] with t = (q(t) - 1) * n + r(t); multiples of n
// map to n, not 0.
inline Step residual_index(Step t, Step n) {
    return t - (epoch_index(t, n) - 1) * n;
}

// Run horizon: T total steps over n components, split into K = q(T) epochs
// (the last one possibly partial).
struct Horizon {
    Step T = 1;
    Step n = 1;

    Horizon() = default;
    Horizon(Step total_steps, Step components) : T(total_steps), n(components) {
        if (T < 1 || n < 1) {
            throw std::invalid_argument("Horizon: require T >= 1 and n >= 1");
        }
    }

    Step epochs() const { return epoch_index(T, n); }
    Step epoch_of(Step t) const { return epoch_index(t, n); }
    Step residual_of(Step t) const { return residual_index(t, n); }
};

// Aggregates of the per-component Lipschitz constants: the arithmetic mean and
// the root mean square. mean <= rms < sqrt(n) * mean holds for any positive
// input, with equality on the left iff all constants coincide.
struct LipschitzStats {
    std::vector<double> G;
    double G_f1 = 0.0;  // arithmetic mean
    double G_f2 = 0.0;  // root mean square
};

LipschitzStats lipschitz_stats(const std::vector<double>& G);

}  // namespace shufflegrad

#endif
