#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <set>

#include "shufflegrad/optimizer.hpp"
#include "shufflegrad/problems.hpp"
#include "shufflegrad/rng.hpp"

using namespace shufflegrad;

namespace {

// 1-d |x| with the sign subgradient (0 at the kink).
FiniteSumProblem abs_problem(Regularizer reg = Regularizer::zero()) {
    return lad_instance({vec{1.0}}, vec{0.0}, std::move(reg),
                        FiniteSumProblem::Reference{vec{0.0}, 0.0});
}

// 1-d linear f(x) = x (as |x - b| is awkward here, build it directly).
FiniteSumProblem linear_problem(Regularizer reg) {
    FiniteSumProblem p;
    p.n = 1;
    p.d = 1;
    p.family = "linear";
    p.value = [](int, const vec& x) { return x[0]; };
    p.subgradient = [](int, const vec&, vec& g) { g[0] = 1.0; };
    p.lipschitz = lipschitz_stats({1.0});
    p.regularizer = std::move(reg);
    return p;
}

FiniteSumProblem zero_oracle_problem(Step n, Step d) {
    FiniteSumProblem p;
    p.n = n;
    p.d = d;
    p.family = "zero";
    p.value = [](int, const vec&) { return 0.0; };
    p.subgradient = [](int, const vec&, vec& g) { std::fill(g.begin(), g.end(), 0.0); };
    p.lipschitz = lipschitz_stats(std::vector<double>(static_cast<std::size_t>(n), 1.0));
    p.regularizer = Regularizer::zero();
    return p;
}

}  // namespace

TEST_CASE("starting at the kink of |x| stays put") {
    const FiniteSumProblem problem = abs_problem();
    RunConfig cfg;
    cfg.horizon = Horizon(16, 1);
    cfg.x1 = {0.0};
    cfg.schedule = StepSchedule::inv_sqrt_t(1.0, cfg.horizon);
    cfg.scheme = SamplerScheme::rr();
    cfg.trackers.gap_stride = 1;
    const Trace trace = run(problem, cfg);
    CHECK(trace.last == vec{0.0});
    for (const auto& [t, gap] : trace.gaps) CHECK(gap == 0.0);
}

TEST_CASE("one constrained step lands on the boundary") {
    const FiniteSumProblem problem =
        linear_problem(Regularizer::indicator(ConvexSet::box({-1.0}, {1.0})));
    RunConfig cfg;
    cfg.horizon = Horizon(1, 1);
    cfg.x1 = {0.0};
    cfg.schedule = StepSchedule::const_over_sqrt_T(1.0, cfg.horizon);  // eta_1 = 1
    cfg.scheme = SamplerScheme::ig({1});
    const Trace trace = run(problem, cfg);
    CHECK(trace.last == vec{-1.0});
}

TEST_CASE("zero oracle leaves every tracker at x1") {
    const FiniteSumProblem problem = zero_oracle_problem(3, 2);
    RunConfig cfg;
    cfg.horizon = Horizon(9, 3);
    cfg.x1 = {0.4, -0.7};
    cfg.schedule = StepSchedule::inv_sqrt_t(2.0, cfg.horizon);
    cfg.scheme = SamplerScheme::ss();
    cfg.seed = 5;
    cfg.trackers.average = true;
    cfg.trackers.suffix = true;
    const Trace trace = run(problem, cfg);
    CHECK(trace.last == cfg.x1);
    for (std::size_t i = 0; i < cfg.x1.size(); ++i) {
        CHECK((*trace.average)[i] == doctest::Approx(cfg.x1[i]).epsilon(1e-14));
        CHECK((*trace.suffix)[i] == doctest::Approx(cfg.x1[i]).epsilon(1e-14));
    }
}

TEST_CASE("suffix averaging") {
    Trace trace;
    trace.last_epoch = {vec{0.0, 0.0}, vec{2.0, 2.0}};
    const auto suf = suffix_average(trace, 2);
    REQUIRE(suf.has_value());
    CHECK(*suf == vec{1.0, 1.0});

    // constant iterates
    Trace flat;
    flat.last_epoch = {vec{0.5}, vec{0.5}, vec{0.5}};
    CHECK(*suffix_average(flat, 3) == vec{0.5});

    // standard basis iterates average to (1/n, ..., 1/n)
    Trace basis;
    const Step n = 4;
    for (Step i = 0; i < n; ++i) {
        vec e(static_cast<std::size_t>(n), 0.0);
        e[static_cast<std::size_t>(i)] = 1.0;
        basis.last_epoch.push_back(e);
    }
    const auto mean = suffix_average(basis, n);
    REQUIRE(mean.has_value());
    for (double v : *mean) CHECK(v == doctest::Approx(0.25).epsilon(1e-15));

    CHECK_FALSE(suffix_average(flat, 4).has_value());  // fewer than n recorded
}

TEST_CASE("evaluate_gap") {
    const FiniteSumProblem problem = abs_problem();
    CHECK(evaluate_gap(problem, {3.0}, 0.0) == doctest::Approx(3.0));

    const FiniteSumProblem constrained =
        abs_problem(Regularizer::indicator(ConvexSet::ball({0.0}, 1.0)));
    CHECK(std::isinf(evaluate_gap(constrained, {2.0}, 0.0)));

    const FiniteSumProblem hard = hard_instance(1.0, 1.0, 3, 4, 2);
    CHECK(evaluate_gap(hard, hard.reference->x_star, hard.reference->F_star) ==
          doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("iterates remain feasible and the index log covers epochs") {
    const FiniteSumProblem problem = random_lad_instance(
        4, 3, 11, Regularizer::indicator(ConvexSet::ball(zeros(3), 1.0)), true);
    RunConfig cfg;
    cfg.horizon = Horizon(24, 4);
    cfg.x1 = zeros(3);
    cfg.schedule = StepSchedule::inv_sqrt_t(0.8, cfg.horizon);
    cfg.scheme = SamplerScheme::rr();
    cfg.seed = 21;
    cfg.trackers.index_log = true;
    cfg.trackers.suffix = true;
    cfg.trackers.gap_stride = 4;
    const Trace trace = run(problem, cfg);

    REQUIRE(trace.index_log.size() == 24);
    for (int k = 0; k < 6; ++k) {
        const std::set<int> epoch(trace.index_log.begin() + 4 * k, trace.index_log.begin() + 4 * (k + 1));
        CHECK(epoch == std::set<int>{1, 2, 3, 4});
    }
    CHECK(problem.regularizer.in_domain(trace.last, 1e-9));
    for (const vec& x : trace.last_epoch) CHECK(problem.regularizer.in_domain(x, 1e-9));
    for (const auto& [t, gap] : trace.gaps) CHECK(std::isfinite(gap));
}

TEST_CASE("objective of averages obeys convexity") {
    const FiniteSumProblem problem = random_lad_instance(3, 2, 31, Regularizer::zero(), true);
    RunConfig cfg;
    cfg.horizon = Horizon(18, 3);
    cfg.x1 = zeros(2);
    cfg.schedule = StepSchedule::const_over_sqrt_T(1.0, cfg.horizon);
    cfg.scheme = SamplerScheme::rr();
    cfg.seed = 77;
    cfg.trackers.average = true;
    cfg.trackers.suffix = true;
    cfg.trackers.gap_stride = 1;  // F at every post-update iterate (F_ref = 0)
    const Trace trace = run(problem, cfg);

    double suffix_mean_F = 0.0;
    for (const vec& x : trace.last_epoch) suffix_mean_F += problem.objective(x) / 3.0;
    CHECK(problem.objective(*trace.suffix) <= suffix_mean_F + 1e-9);

    REQUIRE(trace.gaps.size() == 18);
    double mean_F = 0.0;
    for (const auto& [t, gap] : trace.gaps) mean_F += gap / 18.0;
    CHECK(problem.objective(*trace.average) <= mean_F + 1e-9);
}

TEST_CASE("a partial final epoch still fills every tracker") {
    // T = 10 with n = 4: the suffix window crosses the epoch boundary.
    const FiniteSumProblem problem = random_lad_instance(4, 3, 23, Regularizer::zero(), true);
    RunConfig cfg;
    cfg.horizon = Horizon(10, 4);
    cfg.x1 = zeros(3);
    cfg.schedule = StepSchedule::inv_sqrt_t(0.5, cfg.horizon);
    cfg.scheme = SamplerScheme::rr();
    cfg.seed = 3;
    cfg.trackers.average = true;
    cfg.trackers.suffix = true;
    cfg.trackers.index_log = true;
    const Trace trace = run(problem, cfg);
    REQUIRE(trace.suffix.has_value());
    REQUIRE(trace.last_epoch.size() == 4);
    const auto recomputed = suffix_average(trace, 4);
    REQUIRE(recomputed.has_value());
    for (std::size_t i = 0; i < 3; ++i) {
        CHECK((*trace.suffix)[i] == doctest::Approx((*recomputed)[i]).epsilon(1e-15));
    }
    // the truncated trailing epoch still draws from a full permutation
    const std::set<int> first(trace.index_log.begin(), trace.index_log.begin() + 4);
    CHECK(first == std::set<int>{1, 2, 3, 4});
    const std::set<int> tail(trace.index_log.begin() + 8, trace.index_log.end());
    CHECK(tail.size() == 2);
}

TEST_CASE("identical configs give bitwise-identical traces") {
    const FiniteSumProblem problem = random_lad_instance(5, 3, 13, Regularizer::sq_norm(0.3, zeros(3)), true);
    RunConfig cfg;
    cfg.horizon = Horizon(35, 5);
    cfg.x1 = zeros(3);
    cfg.schedule = StepSchedule::polyak(2, 0.3, cfg.horizon);
    cfg.scheme = SamplerScheme::rr();
    cfg.seed = 9;
    cfg.trackers.average = true;
    cfg.trackers.suffix = true;
    const Trace a = run(problem, cfg);
    const Trace b = run(problem, cfg);
    CHECK(a.last == b.last);
    CHECK(*a.average == *b.average);
    CHECK(*a.suffix == *b.suffix);
}

TEST_CASE("a blowing-up iterate aborts with the step in the message") {
    FiniteSumProblem p;
    p.n = 1;
    p.d = 1;
    p.family = "nan";
    p.value = [](int, const vec&) { return 0.0; };
    p.subgradient = [](int, const vec&, vec& g) { g[0] = std::nan(""); };
    p.lipschitz = lipschitz_stats({1.0});
    p.regularizer = Regularizer::zero();
    RunConfig cfg;
    cfg.horizon = Horizon(4, 1);
    cfg.x1 = {1.0};
    cfg.schedule = StepSchedule::inv_sqrt_t(1.0, cfg.horizon);
    cfg.scheme = SamplerScheme::ig({1});
    try {
        run(p, cfg);
        FAIL("expected abort");
    } catch (const std::runtime_error& err) {
        const std::string msg = err.what();
        CHECK(msg.find("t=1") != std::string::npos);
        CHECK(msg.find("||x_t||") != std::string::npos);
    }
}

TEST_CASE("mismatched setup is rejected") {
    const FiniteSumProblem problem = zero_oracle_problem(3, 2);
    RunConfig cfg;
    cfg.horizon = Horizon(6, 2);  // wrong n
    cfg.x1 = zeros(2);
    cfg.schedule = StepSchedule::inv_sqrt_t(1.0, cfg.horizon);
    cfg.scheme = SamplerScheme::rr();
    CHECK_THROWS_AS(run(problem, cfg), std::invalid_argument);

    RunConfig bad_x1;
    bad_x1.horizon = Horizon(6, 3);
    bad_x1.x1 = zeros(2);
    bad_x1.schedule = StepSchedule::inv_sqrt_t(1.0, bad_x1.horizon);
    bad_x1.scheme = SamplerScheme::rr();
    FiniteSumProblem constrained = zero_oracle_problem(3, 2);
    constrained.regularizer = Regularizer::indicator(ConvexSet::ball({3.0, 3.0}, 0.5));
    CHECK_THROWS_AS(run(constrained, bad_x1), std::invalid_argument);

    // gap series without any reference
    RunConfig no_ref;
    no_ref.horizon = Horizon(6, 3);
    no_ref.x1 = zeros(2);
    no_ref.schedule = StepSchedule::inv_sqrt_t(1.0, no_ref.horizon);
    no_ref.scheme = SamplerScheme::rr();
    no_ref.trackers.gap_stride = 1;
    CHECK_THROWS_AS(run(zero_oracle_problem(3, 2), no_ref), std::invalid_argument);
}
