#ifndef SHUFFLEGRAD_VEC_HPP
#define SHUFFLEGRAD_VEC_HPP

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace shufflegrad {

// Dense point in R^d. Problems here are desk-scale, so a plain vector plus a
// handful of BLAS-1 helpers is all the linear algebra the library needs.
using vec = std::vector<double>;

inline void check_same_dim(const vec& a, const vec& b, const char* where) {
    if (a.size() != b.size()) {
        throw std::invalid_argument(std::string(where) + ": dimension mismatch (" +
                                    std::to_string(a.size()) + " vs " + std::to_string(b.size()) + ")");
    }
}

inline double dot(const vec& a, const vec& b) {
    check_same_dim(a, b, "dot");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm2(const vec& a) {
    return std::sqrt(dot(a, a));
}

// y += alpha * x
inline void axpy(double alpha, const vec& x, vec& y) {
    check_same_dim(x, y, "axpy");
    for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

inline void scale(double alpha, vec& x) {
    for (double& xi : x) xi *= alpha;
}

inline vec sub(const vec& a, const vec& b) {
    check_same_dim(a, b, "sub");
    vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] - b[i];
    return out;
}

inline vec add(const vec& a, const vec& b) {
    check_same_dim(a, b, "add");
    vec out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) out[i] = a[i] + b[i];
    return out;
}

inline double dist(const vec& a, const vec& b) {
    return norm2(sub(a, b));
}

inline bool all_finite(const vec& a) {
    for (double v : a) {
        if (!std::isfinite(v)) return false;
    }
    return true;
}

inline vec zeros(std::size_t d) {
    return vec(d, 0.0);
}

}  // namespace shufflegrad

#endif
