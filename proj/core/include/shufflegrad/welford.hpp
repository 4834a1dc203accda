#ifndef SHUFFLEGRAD_WELFORD_HPP
#define SHUFFLEGRAD_WELFORD_HPP

#include <cmath>
#include <cstdint>

namespace shufflegrad {

// Streaming mean/variance (Welford). merge() is exact in the same sense as
// sequential accumulation, so parallel reductions stay deterministic as long
// as partials merge in a fixed order.
struct Welford {
    std::int64_t count = 0;
    double mean = 0.0;
    double m2 = 0.0;

    void add(double v) {
        ++count;
        const double delta = v - mean;
        mean += delta / static_cast<double>(count);
        m2 += delta * (v - mean);
    }

    void merge(const Welford& other) {
        if (other.count == 0) return;
        if (count == 0) {
            *this = other;
            return;
        }
        const double delta = other.mean - mean;
        const std::int64_t total = count + other.count;
        m2 += other.m2 + delta * delta * static_cast<double>(count) *
                             static_cast<double>(other.count) / static_cast<double>(total);
        mean += delta * static_cast<double>(other.count) / static_cast<double>(total);
        count = total;
    }

    double variance() const {
        return count > 1 ? m2 / static_cast<double>(count - 1) : 0.0;
    }

    // Normal-approximation 95% confidence half-width.
    double half_width95() const {
        if (count < 2) return 0.0;
        return 1.959963984540054 * std::sqrt(variance() / static_cast<double>(count));
    }
};

}  // namespace shufflegrad

#endif
