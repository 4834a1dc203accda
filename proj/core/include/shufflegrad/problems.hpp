#ifndef SHUFFLEGRAD_PROBLEMS_HPP
#define SHUFFLEGRAD_PROBLEMS_HPP

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "shufflegrad/core.hpp"
#include "shufflegrad/prox.hpp"
#include "shufflegrad/vec.hpp"

namespace shufflegrad {

// Composite objective F = (1/n) sum_i f_i + psi with per-component subgradient
// oracles. Subgradient selection at kinks is deterministic per family (see the
// concrete instances below), so repeated evaluation at the same point always
// returns the same element.
struct FiniteSumProblem {
    struct Reference {
        vec x_star;
        double F_star = 0.0;
    };

    Step n = 1;
    Step d = 1;
    std::string family;
    std::function<double(int i, const vec& x)> value;             // f_i(x), i in [1, n]
    std::function<void(int i, const vec& x, vec& g)> subgradient; // writes an element of df_i(x)
    LipschitzStats lipschitz;
    Regularizer regularizer;
    std::optional<Reference> reference;

    // Joint oracle (value, subgradient) for component i at x.
    std::pair<double, vec> oracle(int i, const vec& x) const;

    // f(x) = (1/n) sum_i f_i(x).
    double average_value(const vec& x) const;
    // F(x) = f(x) + psi(x); +infinity outside dom psi.
    double objective(const vec& x) const;
};

// Worst-case construction for proximal methods: every component equals
//   f(x) = G * max_{j in [span+1]} x[j],  psi(x) = (mu/2) ||x||^2,
// with the min-index argmax subgradient G * e_{j_x}. Starting from 0, step t
// can only populate coordinates 1..t, so the first `span` post-update
// objective values stay >= 0 while
//   F_star = -G^2 / (2 mu (span+1))  at  x_star = -G/(mu (span+1)) on the
// first span+1 coordinates. Requires d >= span + 1. All n components share the
// same oracle so any index scheme can run on it.
FiniteSumProblem hard_instance(double G, double mu, Step span, Step d, Step n);

// Least absolute deviations: f_i(x) = |<a_i, x> - b_i| with the sign
// subgradient (0 at the kink); G_i = ||a_i||. Rows must be nonzero.
FiniteSumProblem lad_instance(std::vector<vec> A, vec b, Regularizer reg,
                              std::optional<FiniteSumProblem::Reference> reference = std::nullopt);

// Hinge loss: f_i(x) = max(0, 1 - y_i <a_i, x>), subgradient -y_i a_i when the
// margin is < 1 and 0 at or past the kink; labels must be +/-1.
FiniteSumProblem hinge_instance(std::vector<vec> A, std::vector<int> y, Regularizer reg);

// Seeded random LAD data with rows scaled to unit norm. When `planted` is set,
// b = A x_hat for an interior point x_hat with ||x_hat|| = 0.6, which pins the
// exact reference (x_hat, psi(x_hat)) whenever psi vanishes at x_hat (Zero, or
// an indicator whose set contains x_hat).
FiniteSumProblem random_lad_instance(Step n, Step d, std::uint64_t seed, Regularizer reg,
                                     bool planted = true);

// Seeded random hinge data from a planted separator with margin >= 1.
FiniteSumProblem random_hinge_instance(Step n, Step d, std::uint64_t seed, Regularizer reg);

// Estimated optimum for instances without an analytic reference: minimum
// objective seen over (a) a full-subgradient proximal descent run with
// eta_t = c/sqrt(t) for `budget` steps and (b) eight seeded single-component
// runs. Monotone non-increasing in `budget`; never certified.
struct ReferenceEstimate {
    double F_star_hat = 0.0;
    bool certified = false;
    vec x_hat;
};

ReferenceEstimate reference_optimum(const FiniteSumProblem& problem, const vec& x1,
                                    std::int64_t budget, std::uint64_t seed);

}  // namespace shufflegrad

#endif
