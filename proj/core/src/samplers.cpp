#include "shufflegrad/samplers.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace shufflegrad {
namespace {

std::vector<int> identity_perm(Step n) {
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 1);
    return perm;
}

bool is_bijection(const std::vector<int>& perm, Step n) {
    if (perm.size() != static_cast<std::size_t>(n)) return false;
    std::vector<bool> seen(static_cast<std::size_t>(n), false);
    for (int v : perm) {
        if (v < 1 || v > n || seen[static_cast<std::size_t>(v - 1)]) return false;
        seen[static_cast<std::size_t>(v - 1)] = true;
    }
    return true;
}

std::int64_t gcd64(std::int64_t a, std::int64_t b) {
    while (b != 0) {
        const std::int64_t t = a % b;
        a = b;
        b = t;
    }
    return a < 0 ? -a : a;
}

std::int64_t factorial(int n) {
    std::int64_t f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
}

constexpr std::int64_t kMaxOutcomes = 1'000'000;

}  // namespace

std::string to_string(IndexScheme scheme) {
    switch (scheme) {
        case IndexScheme::RR: return "RR";
        case IndexScheme::SS: return "SS";
        case IndexScheme::IG: return "IG";
        case IndexScheme::IID: return "IID";
    }
    return "?";
}

SamplerState::SamplerState(SamplerScheme scheme, Step n, std::uint64_t seed)
    : scheme_(std::move(scheme)), n_(n), seed_(seed), rng_(seed) {
    if (n_ < 1) throw std::invalid_argument("SamplerState: n must be >= 1");
    switch (scheme_.kind) {
        case IndexScheme::IG:
            if (!is_bijection(scheme_.ig_perm, n_)) {
                throw std::invalid_argument("SamplerState: IG permutation is not a bijection on [n]");
            }
            perm_ = scheme_.ig_perm;
            break;
        case IndexScheme::SS:
            perm_ = identity_perm(n_);
            fisher_yates_shuffle(perm_, rng_);
            break;
        case IndexScheme::RR:
        case IndexScheme::IID:
            perm_ = identity_perm(n_);
            break;
    }
}

int SamplerState::next_index(Step t) {
    if (t != expected_t_) {
        throw std::invalid_argument("SamplerState::next_index: steps must be consumed in order, expected t=" +
                                    std::to_string(expected_t_) + ", got t=" + std::to_string(t));
    }
    ++expected_t_;
    epoch_ = epoch_index(t, n_);
    const Step r = residual_index(t, n_);
    switch (scheme_.kind) {
        case IndexScheme::RR:
            if (r == 1) fisher_yates_shuffle(perm_, rng_);
            return perm_[static_cast<std::size_t>(r - 1)];
        case IndexScheme::SS:
        case IndexScheme::IG:
            return perm_[static_cast<std::size_t>(r - 1)];
        case IndexScheme::IID:
            return static_cast<int>(rng_.bounded(static_cast<std::uint64_t>(n_))) + 1;
    }
    throw std::logic_error("SamplerState::next_index: unknown scheme");
}

SamplerState make_sampler(SamplerScheme scheme, Step n, std::uint64_t seed) {
    return SamplerState(std::move(scheme), n, seed);
}

Rational Rational::normalized() const {
    if (den == 0) throw std::logic_error("Rational: zero denominator");
    std::int64_t g = gcd64(num, den);
    if (g == 0) g = 1;
    std::int64_t n = num / g;
    std::int64_t d = den / g;
    if (d < 0) {
        n = -n;
        d = -d;
    }
    return {n, d};
}

Rational Rational::operator+(const Rational& other) const {
    return Rational{num * other.den + other.num * den, den * other.den}.normalized();
}

Rational Rational::operator-(const Rational& other) const {
    return Rational{num * other.den - other.num * den, den * other.den}.normalized();
}

bool Rational::operator==(const Rational& other) const {
    const Rational a = normalized();
    const Rational b = other.normalized();
    return a.num == b.num && a.den == b.den;
}

namespace {

ScheduleLaw law_from_map(std::map<std::vector<int>, Rational>&& acc) {
    ScheduleLaw law;
    law.sequences.reserve(acc.size());
    law.probabilities.reserve(acc.size());
    for (auto& [seq, p] : acc) {
        law.sequences.push_back(seq);
        law.probabilities.push_back(p.normalized());
    }
    return law;
}

}  // namespace

ScheduleLaw enumerate_schedules(const SamplerScheme& scheme, Step n, Step T) {
    if (n < 1 || T < 1) throw std::invalid_argument("enumerate_schedules: require n >= 1 and T >= 1");
    if (n > 6 || T > 2 * n) {
        throw std::invalid_argument("enumerate_schedules: bounds n <= 6 and T <= 2n exceeded (n=" +
                                    std::to_string(n) + ", T=" + std::to_string(T) + ")");
    }
    const int ni = static_cast<int>(n);
    const std::int64_t nfact = factorial(ni);
    std::map<std::vector<int>, Rational> acc;

    switch (scheme.kind) {
        case IndexScheme::IG: {
            if (!is_bijection(scheme.ig_perm, n)) {
                throw std::invalid_argument("enumerate_schedules: IG permutation is not a bijection on [n]");
            }
            std::vector<int> seq(static_cast<std::size_t>(T));
            for (Step t = 1; t <= T; ++t) {
                seq[static_cast<std::size_t>(t - 1)] =
                    scheme.ig_perm[static_cast<std::size_t>(residual_index(t, n) - 1)];
            }
            acc[seq] = Rational::one();
            break;
        }
        case IndexScheme::SS: {
            const Rational p{1, nfact};
            for (const auto& perm : all_permutations(ni)) {
                std::vector<int> seq(static_cast<std::size_t>(T));
                for (Step t = 1; t <= T; ++t) {
                    seq[static_cast<std::size_t>(t - 1)] = perm[static_cast<std::size_t>(residual_index(t, n) - 1)];
                }
                auto [it, inserted] = acc.emplace(std::move(seq), p);
                if (!inserted) it->second = it->second + p;
            }
            break;
        }
        case IndexScheme::RR: {
            const Step epochs = epoch_index(T, n);
            std::int64_t outcomes = 1;
            for (Step k = 0; k < epochs; ++k) {
                outcomes *= nfact;
                if (outcomes > kMaxOutcomes) {
                    throw std::invalid_argument("enumerate_schedules: RR outcome count exceeds enumeration cap");
                }
            }
            const auto perms = all_permutations(ni);
            Rational p{1, 1};
            for (Step k = 0; k < epochs; ++k) p = Rational{p.num, p.den * nfact}.normalized();
            // Odometer over one permutation choice per epoch.
            std::vector<std::size_t> choice(static_cast<std::size_t>(epochs), 0);
            while (true) {
                std::vector<int> seq(static_cast<std::size_t>(T));
                for (Step t = 1; t <= T; ++t) {
                    const auto& perm = perms[choice[static_cast<std::size_t>(epoch_index(t, n) - 1)]];
                    seq[static_cast<std::size_t>(t - 1)] = perm[static_cast<std::size_t>(residual_index(t, n) - 1)];
                }
                auto [it, inserted] = acc.emplace(std::move(seq), p);
                if (!inserted) it->second = it->second + p;
                std::size_t pos = 0;
                while (pos < choice.size()) {
                    if (++choice[pos] < perms.size()) break;
                    choice[pos] = 0;
                    ++pos;
                }
                if (pos == choice.size()) break;
            }
            break;
        }
        case IndexScheme::IID: {
            std::int64_t outcomes = 1;
            for (Step t = 0; t < T; ++t) {
                outcomes *= n;
                if (outcomes > kMaxOutcomes) {
                    throw std::invalid_argument("enumerate_schedules: IID outcome count exceeds enumeration cap");
                }
            }
            const Rational p{1, outcomes};
            std::vector<int> seq(static_cast<std::size_t>(T), 1);
            while (true) {
                acc.emplace(seq, p);
                std::size_t pos = 0;
                while (pos < seq.size()) {
                    if (++seq[pos] <= ni) break;
                    seq[pos] = 1;
                    ++pos;
                }
                if (pos == seq.size()) break;
            }
            break;
        }
    }

    ScheduleLaw law = law_from_map(std::move(acc));
    Rational total = Rational::zero();
    for (const auto& p : law.probabilities) total = total + p;
    if (!(total == Rational::one())) {
        throw std::logic_error("enumerate_schedules: probabilities do not sum to 1");
    }
    return law;
}

MarginalReport check_marginal_uniform(const SamplerScheme& scheme, Step n, Step T) {
    MarginalReport report;
    if (scheme.kind == IndexScheme::IG) {
        report.applicable = false;
        return report;
    }
    const ScheduleLaw law = enumerate_schedules(scheme, n, T);
    report.max_deviation.assign(static_cast<std::size_t>(T), 0.0);
    for (Step t = 1; t <= T; ++t) {
        double max_dev = 0.0;
        for (int i = 1; i <= n; ++i) {
            Rational p = Rational::zero();
            for (std::size_t k = 0; k < law.sequences.size(); ++k) {
                if (law.sequences[k][static_cast<std::size_t>(t - 1)] == i) p = p + law.probabilities[k];
            }
            // p - 1/n, exactly.
            const Rational dev = p - Rational{1, n};
            const double abs_dev = std::abs(dev.to_double());
            max_dev = std::max(max_dev, dev.num == 0 ? 0.0 : abs_dev);
        }
        report.max_deviation[static_cast<std::size_t>(t - 1)] = max_dev;
    }
    return report;
}

std::vector<std::vector<int>> all_permutations(int n) {
    if (n < 1 || n > 8) throw std::invalid_argument("all_permutations: require 1 <= n <= 8");
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 1);
    std::vector<std::vector<int>> out;
    out.reserve(static_cast<std::size_t>(factorial(n)));
    do {
        out.push_back(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return out;
}

std::vector<int> swap_transform(const std::vector<int>& perm, int a, int b) {
    const int n = static_cast<int>(perm.size());
    if (a < 1 || a > n || b < 1 || b > n) {
        throw std::invalid_argument("swap_transform: positions must lie in [1, n]");
    }
    std::vector<int> out = perm;
    std::swap(out[static_cast<std::size_t>(a - 1)], out[static_cast<std::size_t>(b - 1)]);
    return out;
}

std::size_t permutation_rank(const std::vector<int>& perm) {
    const std::size_t n = perm.size();
    std::size_t rank = 0;
    for (std::size_t i = 0; i < n; ++i) {
        std::size_t smaller_after = 0;
        for (std::size_t j = i + 1; j < n; ++j) {
            if (perm[j] < perm[i]) ++smaller_after;
        }
        std::size_t f = 1;
        for (std::size_t k = 2; k < n - i; ++k) f *= k;
        rank += smaller_after * f;
    }
    return rank;
}

bool check_swap_distribution(int n, const SwapFn& swap_fn) {
    const auto perms = all_permutations(n);
    for (int a = 1; a <= n; ++a) {
        for (int b = 1; b <= n; ++b) {
            std::vector<int> hits(perms.size(), 0);
            for (const auto& perm : perms) {
                const auto image = swap_fn(perm, a, b);
                if (image.size() != perm.size()) return false;
                ++hits[permutation_rank(image)];
            }
            for (int h : hits) {
                if (h != 1) return false;
            }
        }
    }
    return true;
}

bool check_conditioned_expectation(int n, const std::vector<std::int64_t>& phi_table,
                                   const SwapFn& swap_fn) {
    const auto perms = all_permutations(n);
    if (phi_table.size() != perms.size()) {
        throw std::invalid_argument("check_conditioned_expectation: table must have n! entries");
    }
    for (int r = 1; r <= n; ++r) {
        for (int i = 1; i <= n; ++i) {
            std::int64_t lhs = 0;  // sum over {pi : pi^r = i} of phi(pi)
            std::int64_t rhs = 0;  // sum over all pi of phi(swap(pi, r, pos_i))
            for (const auto& perm : perms) {
                if (perm[static_cast<std::size_t>(r - 1)] == i) lhs += phi_table[permutation_rank(perm)];
                int pos_i = 0;
                for (int k = 1; k <= n; ++k) {
                    if (perm[static_cast<std::size_t>(k - 1)] == i) {
                        pos_i = k;
                        break;
                    }
                }
                rhs += phi_table[permutation_rank(swap_fn(perm, r, pos_i))];
            }
            if (static_cast<std::int64_t>(n) * lhs != rhs) return false;
        }
    }
    return true;
}

bool check_conditioned_marginal(int n, const SwapFn& swap_fn) {
    if (n < 2) return true;  // [n]\{i} empty for n = 1, nothing to check
    const auto perms = all_permutations(n);
    const std::int64_t expected = factorial(n) / (n - 1);
    for (int r = 1; r <= n; ++r) {
        for (int i = 1; i <= n; ++i) {
            for (int k = 1; k <= n; ++k) {
                if (k == r) continue;
                std::vector<std::int64_t> counts(static_cast<std::size_t>(n) + 1, 0);
                for (const auto& perm : perms) {
                    int pos_i = 0;
                    for (int p = 1; p <= n; ++p) {
                        if (perm[static_cast<std::size_t>(p - 1)] == i) {
                            pos_i = p;
                            break;
                        }
                    }
                    const auto image = swap_fn(perm, r, pos_i);
                    ++counts[static_cast<std::size_t>(image[static_cast<std::size_t>(k - 1)])];
                }
                for (int v = 1; v <= n; ++v) {
                    const std::int64_t want = (v == i) ? 0 : expected;
                    if (counts[static_cast<std::size_t>(v)] != want) return false;
                }
            }
        }
    }
    return true;
}

}  // namespace shufflegrad
