#ifndef SHUFFLEGRAD_PROX_HPP
#define SHUFFLEGRAD_PROX_HPP

#include <string>
#include <utility>

#include "shufflegrad/vec.hpp"

namespace shufflegrad {

// Nonempty closed convex set with a closed-form Euclidean projection.
struct ConvexSet {
    enum class Kind { AllSpace, Ball, Box };

    Kind kind = Kind::AllSpace;
    vec center;         // Ball
    double radius = 0;  // Ball
    vec lower, upper;   // Box

    static ConvexSet all_space();
    static ConvexSet ball(vec center, double radius);
    static ConvexSet box(vec lower, vec upper);

    bool contains(const vec& x, double tol = 0.0) const;
};

vec project(const ConvexSet& set, const vec& x);

// Regularizer psi as a tagged variant. modulus() is the strong-convexity
// parameter: mu for the squared-norm variants, 0 otherwise.
struct Regularizer {
    enum class Kind { Zero, SqNorm, Indicator, SqNormPlusIndicator, L1 };

    Kind kind = Kind::Zero;
    double mu = 0.0;     // SqNorm / SqNormPlusIndicator
    vec center;          // SqNorm / SqNormPlusIndicator
    ConvexSet set;       // Indicator / SqNormPlusIndicator
    double lambda = 0.0;  // L1

    static Regularizer zero();
    static Regularizer sq_norm(double mu, vec center);
    static Regularizer indicator(ConvexSet set);
    // Shrink-toward-center then project; the constructor only accepts sets
    // whose symmetry center matches `center` (ball centered there, box
    // containing it, or all of space).
    static Regularizer sq_norm_plus_indicator(double mu, vec center, ConvexSet set);
    static Regularizer l1(double lambda);

    double modulus() const;
    // psi(x); +infinity outside the indicator set.
    double value(const vec& x) const;
    bool in_domain(const vec& x, double tol = 0.0) const;

    std::string name() const;
};

// Exact argmin of  psi(z) + <g, z> + ||z - x||^2 / (2 eta).
vec prox_step(const Regularizer& reg, const vec& x, const vec& g, double eta);

// Distance between two prox outputs (lhs) against the contraction envelope
// ||xbar - ybar - eta (gx - gy)|| / (1 + mu eta) (rhs); lhs <= rhs always.
std::pair<double, double> contraction_gap(const Regularizer& reg, const vec& xbar, const vec& ybar,
                                          const vec& gx, const vec& gy, double eta);

}  // namespace shufflegrad

#endif
