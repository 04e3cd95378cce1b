#ifndef KLREG_VEC_HPP_
#define KLREG_VEC_HPP_

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

namespace klreg {

using Vec = std::vector<double>;

inline double dot(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double vec_sum(const Vec& a) {
    double s = 0.0;
    for (double v : a) s += v;
    return s;
}

inline double linf_norm(const Vec& a) {
    double m = 0.0;
    for (double v : a) m = std::max(m, std::fabs(v));
    return m;
}

inline double linf_dist(const Vec& a, const Vec& b) {
    if (a.size() != b.size()) throw std::invalid_argument("linf_dist: length mismatch");
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::fabs(a[i] - b[i]));
    return m;
}

inline bool all_finite(const Vec& a) {
    for (double v : a)
        if (!std::isfinite(v)) return false;
    return true;
}

// w = (1-t)*a + t*b, used heavily by the accelerated three-sequence solvers
inline Vec convex_combination(const Vec& a, const Vec& b, double t) {
    Vec w(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) w[i] = (1.0 - t) * a[i] + t * b[i];
    return w;
}

}  // namespace klreg

#endif  // KLREG_VEC_HPP_
