#include "shufflegrad/problems.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <stdexcept>

#include "shufflegrad/rng.hpp"
#include "shufflegrad/samplers.hpp"
#include "shufflegrad/stepsize.hpp"

namespace shufflegrad {

std::pair<double, vec> FiniteSumProblem::oracle(int i, const vec& x) const {
    vec g(static_cast<std::size_t>(d), 0.0);
    subgradient(i, x, g);
    return {value(i, x), std::move(g)};
}

double FiniteSumProblem::average_value(const vec& x) const {
    double sum = 0.0;
    for (int i = 1; i <= n; ++i) sum += value(i, x);
    return sum / static_cast<double>(n);
}

double FiniteSumProblem::objective(const vec& x) const {
    const double psi = regularizer.value(x);
    if (!std::isfinite(psi)) return psi;
    return average_value(x) + psi;
}

FiniteSumProblem hard_instance(double G, double mu, Step span, Step d, Step n) {
    if (!(G > 0.0) || !(mu > 0.0)) throw std::invalid_argument("hard_instance: require G > 0 and mu > 0");
    if (span < 1 || n < 1) throw std::invalid_argument("hard_instance: require span >= 1 and n >= 1");
    if (d < span + 1) {
        throw std::invalid_argument("hard_instance: require d >= span + 1 (d=" + std::to_string(d) +
                                    ", span=" + std::to_string(span) + ")");
    }
    const std::size_t active = static_cast<std::size_t>(span) + 1;

    FiniteSumProblem p;
    p.n = n;
    p.d = d;
    p.family = "hard";
    p.value = [G, active](int, const vec& x) {
        double m = x[0];
        for (std::size_t j = 1; j < active; ++j) m = std::max(m, x[j]);
        return G * m;
    };
    p.subgradient = [G, active](int, const vec& x, vec& g) {
        std::size_t jx = 0;
        for (std::size_t j = 1; j < active; ++j) {
            if (x[j] > x[jx]) jx = j;  // strict: ties keep the smallest index
        }
        std::fill(g.begin(), g.end(), 0.0);
        g[jx] = G;
    };
    p.lipschitz = lipschitz_stats(std::vector<double>(static_cast<std::size_t>(n), G));
    p.regularizer = Regularizer::sq_norm(mu, zeros(static_cast<std::size_t>(d)));

    FiniteSumProblem::Reference ref;
    ref.x_star = zeros(static_cast<std::size_t>(d));
    const double coord = -G / (mu * static_cast<double>(span + 1));
    for (std::size_t j = 0; j < active; ++j) ref.x_star[j] = coord;
    ref.F_star = -G * G / (2.0 * mu * static_cast<double>(span + 1));
    p.reference = ref;
    return p;
}

namespace {

std::vector<double> row_norms_checked(const std::vector<vec>& A, const char* who) {
    if (A.empty()) throw std::invalid_argument(std::string(who) + ": empty data matrix");
    std::vector<double> norms;
    norms.reserve(A.size());
    for (const vec& row : A) {
        if (row.size() != A.front().size()) {
            throw std::invalid_argument(std::string(who) + ": ragged data matrix");
        }
        const double r = norm2(row);
        if (!(r > 0.0)) throw std::invalid_argument(std::string(who) + ": zero row (Lipschitz constant would be 0)");
        norms.push_back(r);
    }
    return norms;
}

}  // namespace

FiniteSumProblem lad_instance(std::vector<vec> A, vec b, Regularizer reg,
                              std::optional<FiniteSumProblem::Reference> reference) {
    const auto norms = row_norms_checked(A, "lad_instance");
    if (b.size() != A.size()) throw std::invalid_argument("lad_instance: |b| must equal the row count");

    FiniteSumProblem p;
    p.n = static_cast<Step>(A.size());
    p.d = static_cast<Step>(A.front().size());
    p.family = "lad";
    auto data = std::make_shared<std::pair<std::vector<vec>, vec>>(std::move(A), std::move(b));
    p.value = [data](int i, const vec& x) {
        const std::size_t k = static_cast<std::size_t>(i - 1);
        return std::abs(dot(data->first[k], x) - data->second[k]);
    };
    p.subgradient = [data](int i, const vec& x, vec& g) {
        const std::size_t k = static_cast<std::size_t>(i - 1);
        const double r = dot(data->first[k], x) - data->second[k];
        std::fill(g.begin(), g.end(), 0.0);
        if (r > 0.0) {
            axpy(1.0, data->first[k], g);
        } else if (r < 0.0) {
            axpy(-1.0, data->first[k], g);
        }
        // r == 0: keep 0, the interior subgradient at the kink
    };
    p.lipschitz = lipschitz_stats(norms);
    p.regularizer = std::move(reg);
    p.reference = std::move(reference);
    return p;
}

FiniteSumProblem hinge_instance(std::vector<vec> A, std::vector<int> y, Regularizer reg) {
    const auto norms = row_norms_checked(A, "hinge_instance");
    if (y.size() != A.size()) throw std::invalid_argument("hinge_instance: |y| must equal the row count");
    for (int label : y) {
        if (label != 1 && label != -1) throw std::invalid_argument("hinge_instance: labels must be +/-1");
    }

    FiniteSumProblem p;
    p.n = static_cast<Step>(A.size());
    p.d = static_cast<Step>(A.front().size());
    p.family = "hinge";
    auto data = std::make_shared<std::pair<std::vector<vec>, std::vector<int>>>(std::move(A), std::move(y));
    p.value = [data](int i, const vec& x) {
        const std::size_t k = static_cast<std::size_t>(i - 1);
        return std::max(0.0, 1.0 - data->second[k] * dot(data->first[k], x));
    };
    p.subgradient = [data](int i, const vec& x, vec& g) {
        const std::size_t k = static_cast<std::size_t>(i - 1);
        const double margin = data->second[k] * dot(data->first[k], x);
        std::fill(g.begin(), g.end(), 0.0);
        if (margin < 1.0) axpy(-static_cast<double>(data->second[k]), data->first[k], g);
        // margin >= 1 (including the kink): 0
    };
    p.lipschitz = lipschitz_stats(norms);
    p.regularizer = std::move(reg);
    return p;
}

namespace {

vec random_row(Step d, Rng& rng) {
    vec row(static_cast<std::size_t>(d));
    do {
        for (double& v : row) v = rng.uniform(-1.0, 1.0);
    } while (!(norm2(row) > 1e-3));
    return row;
}

}  // namespace

FiniteSumProblem random_lad_instance(Step n, Step d, std::uint64_t seed, Regularizer reg, bool planted) {
    if (n < 1 || d < 1) throw std::invalid_argument("random_lad_instance: require n >= 1 and d >= 1");
    Rng rng(seed);
    std::vector<vec> A;
    A.reserve(static_cast<std::size_t>(n));
    for (Step i = 0; i < n; ++i) A.push_back(random_row(d, rng));

    vec b(static_cast<std::size_t>(n));
    std::optional<FiniteSumProblem::Reference> reference;
    if (planted) {
        vec x_hat = random_row(d, rng);
        scale(0.6 / norm2(x_hat), x_hat);
        for (Step i = 0; i < n; ++i) b[static_cast<std::size_t>(i)] = dot(A[static_cast<std::size_t>(i)], x_hat);
        // f(x_hat) = 0, so x_hat is optimal whenever psi is nonnegative and
        // vanishes there (Zero, or an indicator whose set contains x_hat).
        const bool psi_zero_at_hat =
            (reg.kind == Regularizer::Kind::Zero) ||
            ((reg.kind == Regularizer::Kind::Indicator) && reg.set.contains(x_hat));
        if (psi_zero_at_hat) reference = FiniteSumProblem::Reference{x_hat, 0.0};
    } else {
        for (double& v : b) v = rng.uniform(-1.0, 1.0);
    }
    return lad_instance(std::move(A), std::move(b), std::move(reg), std::move(reference));
}

FiniteSumProblem random_hinge_instance(Step n, Step d, std::uint64_t seed, Regularizer reg) {
    if (n < 1 || d < 1) throw std::invalid_argument("random_hinge_instance: require n >= 1 and d >= 1");
    Rng rng(seed);
    vec w = random_row(d, rng);
    scale(1.0 / norm2(w), w);

    std::vector<vec> A;
    std::vector<int> y;
    A.reserve(static_cast<std::size_t>(n));
    double min_abs_margin = std::numeric_limits<double>::infinity();
    for (Step i = 0; i < n; ++i) {
        vec row = random_row(d, rng);
        while (std::abs(dot(row, w)) < 0.2) row = random_row(d, rng);
        const double m = dot(row, w);
        y.push_back(m > 0.0 ? 1 : -1);
        min_abs_margin = std::min(min_abs_margin, std::abs(m));
        A.push_back(std::move(row));
    }
    FiniteSumProblem p = hinge_instance(std::move(A), std::move(y), std::move(reg));
    // Separator scaled so every margin is >= 1 => f vanishes there.
    vec w_hat = w;
    scale(1.0 / min_abs_margin, w_hat);
    const bool psi_zero_at_hat =
        (p.regularizer.kind == Regularizer::Kind::Zero) ||
        ((p.regularizer.kind == Regularizer::Kind::Indicator) && p.regularizer.set.contains(w_hat));
    if (psi_zero_at_hat) p.reference = FiniteSumProblem::Reference{std::move(w_hat), 0.0};
    return p;
}

namespace {

struct BestPoint {
    double F = std::numeric_limits<double>::infinity();
    vec x;

    void consider(const FiniteSumProblem& problem, const vec& candidate) {
        const double v = problem.objective(candidate);
        if (v < F) {
            F = v;
            x = candidate;
        }
    }
};

// Tail average over doubling windows (2^{k-1}, 2^k]: late-iterate oscillation
// cancels out far below the raw trajectory floor. Window edges are powers of
// two, so candidate sets stay nested across budgets.
struct TailWindow {
    vec sum;
    std::int64_t count = 0;

    explicit TailWindow(std::size_t d) : sum(zeros(d)) {}

    template <typename Consider>
    void push(const vec& x, std::int64_t t, const Consider& consider) {
        axpy(1.0, x, sum);
        ++count;
        if (t >= 4 && (t & (t - 1)) == 0) {
            vec avg = sum;
            scale(1.0 / static_cast<double>(count), avg);
            consider(avg);
            std::fill(sum.begin(), sum.end(), 0.0);
            count = 0;
        }
    }
};

void check_finite_iterate(const vec& x, std::int64_t t, const char* who) {
    if (!all_finite(x)) {
        throw std::runtime_error(std::string(who) + ": non-finite iterate at step " + std::to_string(t));
    }
}

}  // namespace

ReferenceEstimate reference_optimum(const FiniteSumProblem& problem, const vec& x1,
                                    std::int64_t budget, std::uint64_t seed) {
    if (budget < 1) throw std::invalid_argument("reference_optimum: budget must be >= 1");
    if (x1.size() != static_cast<std::size_t>(problem.d)) {
        throw std::invalid_argument("reference_optimum: x1 dimension mismatch");
    }
    if (!problem.regularizer.in_domain(x1, 1e-9)) {
        throw std::invalid_argument("reference_optimum: x1 must lie in dom psi");
    }
    BestPoint best;
    best.consider(problem, x1);

    const double c = (1.0 + norm2(x1)) / problem.lipschitz.G_f2;
    const double mu = problem.regularizer.modulus();

    // (a) full-subgradient proximal descent, eta_t = c / sqrt(t); the running
    // average of the iterates is probed as well since it smooths the
    // oscillation of the final digits.
    const auto consider_feasible = [&](const vec& candidate) {
        if (problem.regularizer.in_domain(candidate, 0.0)) best.consider(problem, candidate);
    };

    {
        vec x = x1;
        vec g(x.size()), gi(x.size());
        vec iterate_sum = zeros(x.size());
        TailWindow tail(x.size());
        for (std::int64_t t = 1; t <= budget; ++t) {
            std::fill(g.begin(), g.end(), 0.0);
            for (int i = 1; i <= problem.n; ++i) {
                problem.subgradient(i, x, gi);
                axpy(1.0 / static_cast<double>(problem.n), gi, g);
            }
            x = prox_step(problem.regularizer, x, g, c / std::sqrt(static_cast<double>(t)));
            check_finite_iterate(x, t, "reference_optimum");
            best.consider(problem, x);
            axpy(1.0, x, iterate_sum);
            tail.push(x, t, consider_feasible);
            // Averages probed on budget-independent strides so the candidate
            // set is nested across budgets and the estimate stays monotone.
            if (t % 16 == 0) {
                vec avg = iterate_sum;
                scale(1.0 / static_cast<double>(t), avg);
                consider_feasible(avg);
            }
        }
    }

    // (b) eight seeded single-component runs; probes the trajectory, its
    // running average, and the trailing-epoch average every n steps.
    const Horizon horizon(budget, problem.n);
    const StepSchedule schedule = (mu > 0.0)
                                      ? StepSchedule::polyak(2, mu, horizon)
                                      : StepSchedule::inv_sqrt_t(c, horizon);
    for (int k = 0; k < 8; ++k) {
        SamplerState sampler = make_sampler(SamplerScheme::rr(), problem.n, derive_seed(seed, static_cast<std::uint64_t>(k)));
        vec x = x1;
        vec g(x.size());
        vec iterate_sum = zeros(x.size());
        TailWindow tail(x.size());
        std::vector<vec> ring(static_cast<std::size_t>(problem.n));
        for (std::int64_t t = 1; t <= budget; ++t) {
            const int i = sampler.next_index(t);
            problem.subgradient(i, x, g);
            x = prox_step(problem.regularizer, x, g, step_at(schedule, t));
            check_finite_iterate(x, t, "reference_optimum");
            axpy(1.0, x, iterate_sum);
            tail.push(x, t, consider_feasible);
            ring[static_cast<std::size_t>((t - 1) % problem.n)] = x;
            if (t % problem.n == 0) {
                best.consider(problem, x);
                vec avg = iterate_sum;
                scale(1.0 / static_cast<double>(t), avg);
                consider_feasible(avg);
                vec suffix = zeros(x.size());
                for (const vec& p : ring) axpy(1.0 / static_cast<double>(problem.n), p, suffix);
                consider_feasible(suffix);
            }
        }
    }

    return ReferenceEstimate{best.F, false, std::move(best.x)};
}

}  // namespace shufflegrad
