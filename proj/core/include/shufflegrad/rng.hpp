#ifndef SHUFFLEGRAD_RNG_HPP
#define SHUFFLEGRAD_RNG_HPP

#include <cstdint>
#include <vector>

namespace shufflegrad {

inline std::uint64_t splitmix64(std::uint64_t& state) {
    std::uint64_t z = (state += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

// Derive a child seed from (base, stream). Counter-based so replication k of
// experiment cell c always sees the same stream regardless of execution order.
inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) {
    std::uint64_t s = base ^ (stream * 0xD1B54A32D192ED03ULL + 0x8CB92BA72F3D8DD7ULL);
    return splitmix64(s);
}

inline std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
    return derive_seed(derive_seed(base, a), b);
}

// xoshiro256** by Blackman & Vigna, seeded through splitmix64 as the authors
// recommend. Fixed algorithm so index streams are bit-reproducible across
// platforms and standard-library versions.
class Xoshiro256StarStar {
public:
    using result_type = std::uint64_t;

    explicit Xoshiro256StarStar(std::uint64_t seed = 0) {
        std::uint64_t sm = seed;
        for (auto& word : state_) word = splitmix64(sm);
    }

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return ~std::uint64_t{0}; }

    result_type operator()() {
        const std::uint64_t result = rotl(state_[1] * 5, 7) * 9;
        const std::uint64_t t = state_[1] << 17;
        state_[2] ^= state_[0];
        state_[3] ^= state_[1];
        state_[1] ^= state_[2];
        state_[0] ^= state_[3];
        state_[2] ^= t;
        state_[3] = rotl(state_[3], 45);
        return result;
    }

    // Uniform draw from {0, ..., bound-1} consuming exactly one raw output
    // (fixed-point multiply), so the stream position after k bounded draws is
    // always k. Bias is O(bound / 2^64), negligible for the bounds used here.
    std::uint64_t bounded(std::uint64_t bound) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>((*this)()) * bound) >> 64);
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

private:
    static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
    std::uint64_t state_[4];
};

using Rng = Xoshiro256StarStar;

// In-place Fisher-Yates, descending form: for i = n-1 .. 1, swap a[i] with
// a[bounded(i+1)]. Consumes exactly n-1 bounded draws per shuffle.
template <typename T>
void fisher_yates_shuffle(std::vector<T>& values, Rng& rng) {
    for (std::size_t i = values.size(); i > 1; --i) {
        const std::uint64_t j = rng.bounded(i);
        std::swap(values[i - 1], values[j]);
    }
}

}  // namespace shufflegrad

#endif
