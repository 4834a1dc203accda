#include "shufflegrad/core.hpp"

#include <cmath>

namespace shufflegrad {

LipschitzStats lipschitz_stats(const std::vector<double>& G) {
    if (G.empty()) {
        throw std::invalid_argument("lipschitz_stats: empty constant list");
    }
    double sum = 0.0;
    double sum_sq = 0.0;
    for (double g : G) {
        if (!(g > 0.0)) {
            throw std::invalid_argument("lipschitz_stats: all constants must be positive");
        }
        sum += g;
        sum_sq += g * g;
    }
    const double n = static_cast<double>(G.size());
    LipschitzStats stats;
    stats.G = G;
    stats.G_f1 = sum / n;
    stats.G_f2 = std::sqrt(sum_sq / n);
    return stats;
}

}  // namespace shufflegrad
