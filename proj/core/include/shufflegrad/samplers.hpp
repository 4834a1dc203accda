#ifndef SHUFFLEGRAD_SAMPLERS_HPP
#define SHUFFLEGRAD_SAMPLERS_HPP

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <vector>

#include "shufflegrad/core.hpp"
#include "shufflegrad/rng.hpp"

namespace shufflegrad {

// Index-generation schemes for the step-t component pick I(t):
//   RR  - a fresh uniform permutation every epoch,
//   SS  - one uniform permutation drawn up front and reused every epoch,
//   IG  - a fixed, caller-supplied permutation every epoch,
//   IID - fresh uniform draw from [n] at every step.
enum class IndexScheme { RR, SS, IG, IID };

std::string to_string(IndexScheme scheme);

struct SamplerScheme {
    IndexScheme kind = IndexScheme::RR;
    // 1-based permutation values; only consulted for IG.
    std::vector<int> ig_perm;

    static SamplerScheme rr() { return {IndexScheme::RR, {}}; }
    static SamplerScheme ss() { return {IndexScheme::SS, {}}; }
    static SamplerScheme ig(std::vector<int> perm) { return {IndexScheme::IG, std::move(perm)}; }
    static SamplerScheme iid() { return {IndexScheme::IID, {}}; }
};

// Single-owner mutable stream of indices I(1), I(2), ... for one run.
// Deterministic given (scheme, n, seed): permutations come from Fisher-Yates
// on a seeded xoshiro256**, consuming exactly n-1 bounded draws per shuffle.
class SamplerState {
public:
    SamplerState(SamplerScheme scheme, Step n, std::uint64_t seed);

    // Returns I(t) in [1, n]. Must be called with t = 1, 2, 3, ... in order;
    // RR redraws its permutation whenever r(t) = 1.
    int next_index(Step t);

    Step n() const { return n_; }
    std::uint64_t seed() const { return seed_; }
    const SamplerScheme& scheme() const { return scheme_; }
    Step epoch() const { return epoch_; }
    const std::vector<int>& current_perm() const { return perm_; }

private:
    SamplerScheme scheme_;
    Step n_ = 1;
    std::uint64_t seed_ = 0;
    Rng rng_;
    std::vector<int> perm_;
    Step epoch_ = 1;
    Step expected_t_ = 1;
};

SamplerState make_sampler(SamplerScheme scheme, Step n, std::uint64_t seed);

// Exact probability with small integer numerator/denominator; enumeration
// oracles stay in rational arithmetic so distribution identities are checked
// without tolerances.
struct Rational {
    std::int64_t num = 0;
    std::int64_t den = 1;

    static Rational zero() { return {0, 1}; }
    static Rational one() { return {1, 1}; }
    Rational normalized() const;
    Rational operator+(const Rational& other) const;
    Rational operator-(const Rational& other) const;
    bool operator==(const Rational& other) const;
    double to_double() const { return static_cast<double>(num) / static_cast<double>(den); }
};

// Full law of the length-T index sequence, as (sequence, probability) pairs.
// Sequences that coincide after truncation to T steps are merged.
struct ScheduleLaw {
    std::vector<std::vector<int>> sequences;
    std::vector<Rational> probabilities;
};

// Exhaustively enumerates every index sequence the scheme can emit together
// with its exact probability. Requires n <= 6 and T <= 2n; refuses anything
// whose outcome count would blow past ~10^6.
ScheduleLaw enumerate_schedules(const SamplerScheme& scheme, Step n, Step T);

// Per-step marginal check: P[I(t) = i] must equal 1/n exactly for RR/SS/IID.
struct MarginalReport {
    bool applicable = true;             // false for IG (degenerate marginals)
    std::vector<double> max_deviation;  // entry t-1: max_i |P[I(t)=i] - 1/n|
};

MarginalReport check_marginal_uniform(const SamplerScheme& scheme, Step n, Step T);

// All n! permutations of [n] (1-based values), in lexicographic order. n <= 8.
std::vector<std::vector<int>> all_permutations(int n);

// Exchanges the entries at positions a and b (1-based); an involution.
std::vector<int> swap_transform(const std::vector<int>& perm, int a, int b);

using SwapFn = std::function<std::vector<int>(const std::vector<int>&, int, int)>;

// --- Enumeration checks for the three permutation-coupling identities. Each
// returns true iff the identity holds exactly over all of S_n. The swap
// function is injectable so a corrupted implementation can be fault-tested.

// Pushforward of a uniform permutation under a position swap is again uniform:
// for every position pair (a, b), pi -> swap(pi, a, b) permutes S_n.
bool check_swap_distribution(int n, const SwapFn& swap_fn = swap_transform);

// For any table phi : S_n -> Z and all (r, i):
//   n * sum_{pi : pi^r = i} phi(pi) == sum_{pi} phi(swap(pi, r, pos_i(pi)))
// where pos_i(pi) is the position holding value i. Exact over integer tables.
bool check_conditioned_expectation(int n, const std::vector<std::int64_t>& phi_table,
                                   const SwapFn& swap_fn = swap_transform);

// For k != r, the k-th entry of swap(pi, r, pos_i(pi)) is uniform on [n]\{i}:
// value i never appears and every other value appears exactly n!/(n-1) times.
bool check_conditioned_marginal(int n, const SwapFn& swap_fn = swap_transform);

// Lexicographic rank of a permutation of [n] (Lehmer code), for table lookups.
std::size_t permutation_rank(const std::vector<int>& perm);

}  // namespace shufflegrad

#endif
