#include "shufflegrad/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace shufflegrad {

ConvexSet ConvexSet::all_space() {
    return {};
}

ConvexSet ConvexSet::ball(vec center, double radius) {
    if (!(radius > 0.0)) throw std::invalid_argument("ConvexSet::ball: radius must be positive");
    ConvexSet set;
    set.kind = Kind::Ball;
    set.center = std::move(center);
    set.radius = radius;
    return set;
}

ConvexSet ConvexSet::box(vec lower, vec upper) {
    check_same_dim(lower, upper, "ConvexSet::box");
    for (std::size_t i = 0; i < lower.size(); ++i) {
        if (lower[i] > upper[i]) throw std::invalid_argument("ConvexSet::box: lower > upper componentwise");
    }
    ConvexSet set;
    set.kind = Kind::Box;
    set.lower = std::move(lower);
    set.upper = std::move(upper);
    return set;
}

bool ConvexSet::contains(const vec& x, double tol) const {
    switch (kind) {
        case Kind::AllSpace:
            return true;
        case Kind::Ball:
            return dist(x, center) <= radius + tol;
        case Kind::Box:
            check_same_dim(x, lower, "ConvexSet::contains");
            for (std::size_t i = 0; i < x.size(); ++i) {
                if (x[i] < lower[i] - tol || x[i] > upper[i] + tol) return false;
            }
            return true;
    }
    return false;
}

vec project(const ConvexSet& set, const vec& x) {
    switch (set.kind) {
        case ConvexSet::Kind::AllSpace:
            return x;
        case ConvexSet::Kind::Ball: {
            check_same_dim(x, set.center, "project");
            const double r = dist(x, set.center);
            if (r <= set.radius) return x;
            vec out = set.center;
            axpy(set.radius / r, sub(x, set.center), out);
            return out;
        }
        case ConvexSet::Kind::Box: {
            check_same_dim(x, set.lower, "project");
            vec out(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                out[i] = std::clamp(x[i], set.lower[i], set.upper[i]);
            }
            return out;
        }
    }
    throw std::logic_error("project: unknown set kind");
}

Regularizer Regularizer::zero() {
    return {};
}

Regularizer Regularizer::sq_norm(double mu, vec center) {
    if (!(mu > 0.0)) throw std::invalid_argument("Regularizer::sq_norm: mu must be positive");
    Regularizer reg;
    reg.kind = Kind::SqNorm;
    reg.mu = mu;
    reg.center = std::move(center);
    return reg;
}

Regularizer Regularizer::indicator(ConvexSet set) {
    Regularizer reg;
    reg.kind = Kind::Indicator;
    reg.set = std::move(set);
    return reg;
}

Regularizer Regularizer::sq_norm_plus_indicator(double mu, vec center, ConvexSet set) {
    if (!(mu > 0.0)) throw std::invalid_argument("Regularizer::sq_norm_plus_indicator: mu must be positive");
    switch (set.kind) {
        case ConvexSet::Kind::AllSpace:
            break;
        case ConvexSet::Kind::Ball:
            check_same_dim(center, set.center, "sq_norm_plus_indicator");
            if (dist(center, set.center) > 1e-12) {
                throw std::invalid_argument(
                    "Regularizer::sq_norm_plus_indicator: ball must be centered at the quadratic's center");
            }
            break;
        case ConvexSet::Kind::Box:
            check_same_dim(center, set.lower, "sq_norm_plus_indicator");
            for (std::size_t i = 0; i < center.size(); ++i) {
                if (center[i] < set.lower[i] - 1e-12 || center[i] > set.upper[i] + 1e-12) {
                    throw std::invalid_argument(
                        "Regularizer::sq_norm_plus_indicator: box must contain the quadratic's center");
                }
            }
            break;
    }
    Regularizer reg;
    reg.kind = Kind::SqNormPlusIndicator;
    reg.mu = mu;
    reg.center = std::move(center);
    reg.set = std::move(set);
    return reg;
}

Regularizer Regularizer::l1(double lambda) {
    if (!(lambda > 0.0)) throw std::invalid_argument("Regularizer::l1: lambda must be positive");
    Regularizer reg;
    reg.kind = Kind::L1;
    reg.lambda = lambda;
    return reg;
}

double Regularizer::modulus() const {
    return (kind == Kind::SqNorm || kind == Kind::SqNormPlusIndicator) ? mu : 0.0;
}

double Regularizer::value(const vec& x) const {
    switch (kind) {
        case Kind::Zero:
            return 0.0;
        case Kind::SqNorm: {
            const double d = dist(x, center);
            return 0.5 * mu * d * d;
        }
        case Kind::Indicator:
            return set.contains(x, 1e-9) ? 0.0 : std::numeric_limits<double>::infinity();
        case Kind::SqNormPlusIndicator: {
            if (!set.contains(x, 1e-9)) return std::numeric_limits<double>::infinity();
            const double d = dist(x, center);
            return 0.5 * mu * d * d;
        }
        case Kind::L1: {
            double s = 0.0;
            for (double xi : x) s += std::abs(xi);
            return lambda * s;
        }
    }
    throw std::logic_error("Regularizer::value: unknown kind");
}

bool Regularizer::in_domain(const vec& x, double tol) const {
    if (kind == Kind::Indicator || kind == Kind::SqNormPlusIndicator) return set.contains(x, tol);
    return true;
}

std::string Regularizer::name() const {
    switch (kind) {
        case Kind::Zero: return "zero";
        case Kind::SqNorm: return "sq_norm";
        case Kind::Indicator: return "indicator";
        case Kind::SqNormPlusIndicator: return "sq_norm_plus_indicator";
        case Kind::L1: return "l1";
    }
    return "?";
}

namespace {

inline double soft_threshold(double v, double k) {
    if (v > k) return v - k;
    if (v < -k) return v + k;
    return 0.0;
}

}  // namespace

vec prox_step(const Regularizer& reg, const vec& x, const vec& g, double eta) {
    check_same_dim(x, g, "prox_step");
    if (!(eta > 0.0)) throw std::invalid_argument("prox_step: eta must be positive");
    vec y = x;
    axpy(-eta, g, y);  // forward point x - eta g
    switch (reg.kind) {
        case Regularizer::Kind::Zero:
            return y;
        case Regularizer::Kind::SqNorm: {
            check_same_dim(y, reg.center, "prox_step");
            vec out = reg.center;
            axpy(1.0 / (1.0 + reg.mu * eta), sub(y, reg.center), out);
            return out;
        }
        case Regularizer::Kind::Indicator:
            return project(reg.set, y);
        case Regularizer::Kind::SqNormPlusIndicator: {
            check_same_dim(y, reg.center, "prox_step");
            vec shrunk = reg.center;
            axpy(1.0 / (1.0 + reg.mu * eta), sub(y, reg.center), shrunk);
            return project(reg.set, shrunk);
        }
        case Regularizer::Kind::L1: {
            const double k = reg.lambda * eta;
            for (double& yi : y) yi = soft_threshold(yi, k);
            return y;
        }
    }
    throw std::logic_error("prox_step: unknown regularizer kind");
}

std::pair<double, double> contraction_gap(const Regularizer& reg, const vec& xbar, const vec& ybar,
                                          const vec& gx, const vec& gy, double eta) {
    const vec px = prox_step(reg, xbar, gx, eta);
    const vec py = prox_step(reg, ybar, gy, eta);
    const double lhs = dist(px, py);
    vec diff = sub(xbar, ybar);
    axpy(-eta, sub(gx, gy), diff);
    const double rhs = norm2(diff) / (1.0 + reg.modulus() * eta);
    return {lhs, rhs};
}

}  // namespace shufflegrad
