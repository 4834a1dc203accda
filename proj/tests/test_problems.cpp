#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "shufflegrad/optimizer.hpp"
#include "shufflegrad/problems.hpp"
#include "shufflegrad/rng.hpp"

using namespace shufflegrad;

TEST_CASE("hard instance analytic reference") {
    const FiniteSumProblem one = hard_instance(1.0, 1.0, 1, 2, 1);
    REQUIRE(one.reference.has_value());
    CHECK(one.reference->x_star == vec{-0.5, -0.5});
    CHECK(one.reference->F_star == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(one.objective(one.reference->x_star) == doctest::Approx(-0.25).epsilon(1e-12));

    const FiniteSumProblem three = hard_instance(1.0, 1.0, 3, 4, 1);
    for (double v : three.reference->x_star) CHECK(v == doctest::Approx(-0.25).epsilon(1e-15));
    CHECK(three.reference->F_star == doctest::Approx(-0.125).epsilon(1e-15));

    // f(0) = 0 and the subgradient at 0 picks the first coordinate
    CHECK(three.value(1, zeros(4)) == 0.0);
    vec g(4);
    three.subgradient(1, zeros(4), g);
    CHECK(g == vec{1.0, 0.0, 0.0, 0.0});

    CHECK_THROWS_AS(hard_instance(1.0, 1.0, 3, 3, 1), std::invalid_argument);
}

TEST_CASE("hard instance components are identical across i") {
    const FiniteSumProblem p = hard_instance(2.0, 0.5, 2, 3, 4);
    Rng rng(2);
    for (int k = 0; k < 50; ++k) {
        vec x(3);
        for (double& v : x) v = rng.uniform(-1.0, 1.0);
        const double v1 = p.value(1, x);
        vec g1(3), gi(3);
        p.subgradient(1, x, g1);
        for (int i = 2; i <= 4; ++i) {
            CHECK(p.value(i, x) == v1);
            p.subgradient(i, x, gi);
            CHECK(gi == g1);
        }
    }
}

TEST_CASE("hard instance span property: step t only reaches coordinate t") {
    const FiniteSumProblem p = hard_instance(1.0, 1.0, 7, 8, 1);
    RunConfig cfg;
    cfg.horizon = Horizon(7, 1);
    cfg.x1 = zeros(8);
    cfg.schedule = StepSchedule::inv_sqrt_t(0.5, cfg.horizon);
    cfg.scheme = SamplerScheme::ig({1});
    cfg.trackers.gap_stride = 1;
    cfg.F_ref = p.reference->F_star;
    const Trace trace = run(p, cfg);
    // after 7 steps the 8th coordinate was never touched
    CHECK(trace.last[7] == 0.0);
    // gaps never undercut -F_star = G^2/(2 mu (span+1)) since F(x_{t+1}) >= 0
    for (const auto& [t, gap] : trace.gaps) CHECK(gap >= -p.reference->F_star - 1e-12);
}

TEST_CASE("LAD oracle on fixed data") {
    const FiniteSumProblem p = lad_instance({vec{1.0}}, vec{0.0}, Regularizer::zero());
    CHECK(p.value(1, {2.0}) == doctest::Approx(2.0));
    vec g(1);
    p.subgradient(1, {2.0}, g);
    CHECK(g == vec{1.0});
    p.subgradient(1, {0.0}, g);  // at the kink the rule picks 0
    CHECK(g == vec{0.0});

    const FiniteSumProblem id2 =
        lad_instance({vec{1.0, 0.0}, vec{0.0, 1.0}}, vec{0.0, 0.0}, Regularizer::zero());
    CHECK(id2.average_value({1.0, -1.0}) == doctest::Approx(1.0));

    CHECK_THROWS_AS(lad_instance({vec{0.0, 0.0}}, vec{0.0}, Regularizer::zero()), std::invalid_argument);
    CHECK_THROWS_AS(lad_instance({vec{1.0}}, vec{0.0, 1.0}, Regularizer::zero()), std::invalid_argument);
}

TEST_CASE("hinge oracle on fixed data") {
    const FiniteSumProblem active =
        hinge_instance({vec{1.0, 0.0}}, {1}, Regularizer::zero());
    CHECK(active.value(1, {2.0, 0.0}) == 0.0);
    vec g(2);
    active.subgradient(1, {2.0, 0.0}, g);
    CHECK(g == vec{0.0, 0.0});
    CHECK(active.value(1, {0.0, 0.0}) == doctest::Approx(1.0));
    active.subgradient(1, {0.0, 0.0}, g);
    CHECK(g == vec{-1.0, 0.0});

    const FiniteSumProblem neg = hinge_instance({vec{0.0, 1.0}}, {-1}, Regularizer::zero());
    CHECK(neg.value(1, {0.0, -3.0}) == 0.0);

    CHECK_THROWS_AS(hinge_instance({vec{1.0}}, {2}, Regularizer::zero()), std::invalid_argument);
}

TEST_CASE("oracle validity: subgradient inequality and norm bound") {
    Rng rng(41);
    const auto check_problem = [&](const FiniteSumProblem& p, double span) {
        for (int k = 0; k < 1000; ++k) {
            vec x(static_cast<std::size_t>(p.d)), y(static_cast<std::size_t>(p.d));
            for (double& v : x) v = rng.uniform(-span, span);
            for (double& v : y) v = rng.uniform(-span, span);
            const int i = 1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(p.n)));
            const auto [fx, g] = p.oracle(i, x);
            CHECK(norm2(g) <= p.lipschitz.G[static_cast<std::size_t>(i - 1)] + 1e-9);
            CHECK(p.value(i, y) >= fx + dot(g, sub(y, x)) - 1e-9);
        }
    };
    check_problem(random_lad_instance(5, 3, 7, Regularizer::zero(), true), 2.0);
    check_problem(random_lad_instance(4, 2, 8, Regularizer::zero(), false), 2.0);
    check_problem(random_hinge_instance(5, 3, 9, Regularizer::zero()), 2.0);
    check_problem(hard_instance(1.5, 0.7, 4, 6, 3), 1.5);
}

TEST_CASE("planted LAD pins an exact optimum") {
    const FiniteSumProblem free = random_lad_instance(6, 3, 12, Regularizer::zero(), true);
    REQUIRE(free.reference.has_value());
    CHECK(free.objective(free.reference->x_star) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(norm2(free.reference->x_star) == doctest::Approx(0.6).epsilon(1e-12));

    const FiniteSumProblem constrained = random_lad_instance(
        6, 3, 12, Regularizer::indicator(ConvexSet::ball(zeros(3), 1.0)), true);
    REQUIRE(constrained.reference.has_value());

    // no analytic reference when psi does not vanish at the planted point
    const FiniteSumProblem ridge =
        random_lad_instance(6, 3, 12, Regularizer::sq_norm(0.5, zeros(3)), true);
    CHECK_FALSE(ridge.reference.has_value());
}

TEST_CASE("reference_optimum recovers the hard-instance optimum") {
    const FiniteSumProblem p = hard_instance(1.0, 1.0, 3, 4, 1);
    const ReferenceEstimate est = reference_optimum(p, zeros(4), 100'000, 3);
    CHECK_FALSE(est.certified);
    CHECK(std::abs(est.F_star_hat - p.reference->F_star) <= 1e-6);
}

TEST_CASE("reference_optimum approaches the kink optimum of |x|") {
    const FiniteSumProblem p = lad_instance({vec{1.0}}, vec{0.0}, Regularizer::zero());
    const ReferenceEstimate est = reference_optimum(p, vec{1.0}, 20'000, 4);
    CHECK(est.F_star_hat >= 0.0);
    CHECK(est.F_star_hat <= 1e-4);
}

TEST_CASE("reference_optimum is monotone in the budget") {
    const FiniteSumProblem p =
        random_hinge_instance(4, 3, 15, Regularizer::sq_norm(0.2, zeros(3)));
    double prev = std::numeric_limits<double>::infinity();
    for (std::int64_t budget : {200, 800, 3'200, 12'800}) {
        const ReferenceEstimate est = reference_optimum(p, zeros(3), budget, 6);
        CHECK(est.F_star_hat <= prev + 1e-15);
        prev = est.F_star_hat;
    }
}
