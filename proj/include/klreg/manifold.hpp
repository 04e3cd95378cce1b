#ifndef KLREG_MANIFOLD_HPP_
#define KLREG_MANIFOLD_HPP_

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>

#include "klreg/vec.hpp"

// Closed-form Fisher-Rao geometry of the three constraint sets used by the
// solvers: the positive orthant, the open unit box and the relative interior
// of the probability simplex. Everything is expressed in ambient coordinates;
// the metric tensors are diagonal (orthant, box) or diagonal-minus-rank-one
// (simplex), so all operations below are O(n).

namespace klreg {

enum class ManifoldKind { Orthant, Box, Simplex };

struct numerical_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline const char* manifold_name(ManifoldKind k) {
    switch (k) {
        case ManifoldKind::Orthant: return "orthant";
        case ManifoldKind::Box: return "box";
        default: return "simplex";
    }
}

inline ManifoldKind manifold_from_name(const std::string& s) {
    if (s == "orthant") return ManifoldKind::Orthant;
    if (s == "box") return ManifoldKind::Box;
    if (s == "simplex") return ManifoldKind::Simplex;
    throw std::invalid_argument("unknown manifold: " + s);
}

// strict membership in the open domain
inline bool is_interior(ManifoldKind kind, const Vec& x) {
    if (!all_finite(x)) return false;
    for (double v : x)
        if (v <= 0.0) return false;
    if (kind == ManifoldKind::Box)
        for (double v : x)
            if (v >= 1.0) return false;
    return true;
}

// Point invariant: interior plus, on the simplex, unit mass to 1e-12
inline bool in_domain(ManifoldKind kind, const Vec& x, double mass_tol = 1e-12) {
    if (!is_interior(kind, x)) return false;
    if (kind == ManifoldKind::Simplex && std::fabs(vec_sum(x) - 1.0) > mass_tol) return false;
    return true;
}

inline Vec barycenter(ManifoldKind kind, std::size_t n) {
    switch (kind) {
        case ManifoldKind::Orthant: return Vec(n, 1.0);
        case ManifoldKind::Box: return Vec(n, 0.5);
        default: return Vec(n, 1.0 / static_cast<double>(n));
    }
}

// G(x)^{-1} w: Diag(x), Diag(x(1-x)) or Diag(p) - p p^T applied to w
inline Vec inverse_metric_apply(ManifoldKind kind, const Vec& x, const Vec& w) {
    Vec r(x.size());
    switch (kind) {
        case ManifoldKind::Orthant:
            for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] * w[i];
            break;
        case ManifoldKind::Box:
            for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] * (1.0 - x[i]) * w[i];
            break;
        default: {
            const double xw = dot(x, w);
            for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] * w[i] - x[i] * xw;
        }
    }
    return r;
}

inline Vec riemannian_gradient(ManifoldKind kind, const Vec& x, const Vec& euclid_grad) {
    return inverse_metric_apply(kind, x, euclid_grad);
}

// metric inner product <u, G(x) v>
inline double inner(ManifoldKind kind, const Vec& x, const Vec& u, const Vec& v) {
    double s = 0.0;
    if (kind == ManifoldKind::Box) {
        for (std::size_t i = 0; i < x.size(); ++i) s += u[i] * v[i] / (x[i] * (1.0 - x[i]));
    } else {
        // Diag(1/x) is the ambient form for orthant and simplex alike
        for (std::size_t i = 0; i < x.size(); ++i) s += u[i] * v[i] / x[i];
    }
    return s;
}

// Riemannian norm of grad f = G^{-1} df, computed without forming G
inline double grad_norm(ManifoldKind kind, const Vec& x, const Vec& euclid_grad) {
    return std::sqrt(dot(euclid_grad, inverse_metric_apply(kind, x, euclid_grad)));
}

namespace detail {

// Exponent discipline: the strict mode errors beyond +-700 (the box/simplex
// normalizers would hide the overflow as NaN); the saturating mode clamps
// instead, which line-search trial steps use so a wild trial stays evaluable
// in the closed domain and simply fails acceptance.
enum class Overflow { Error, Saturate };

inline double exp_guard(double q, std::size_t i, Overflow mode) {
    if (!(std::fabs(q) <= 700.0)) {
        if (mode == Overflow::Error)
            throw numerical_error("exponent overflow at coordinate " + std::to_string(i + 1) +
                                  " (value " + std::to_string(q) + ")");
        q = std::isnan(q) ? 700.0 : (q > 0.0 ? 700.0 : -700.0);
    }
    return std::exp(q);
}

// shared tail of the orthant/simplex exponential maps: x_i * e^{q_i}
inline Vec scaled_exp(const Vec& x, const Vec& q, Overflow mode) {
    Vec r(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) r[i] = x[i] * exp_guard(q[i], i, mode);
    return r;
}

inline Vec finish_box(const Vec& x, Vec num) {
    for (std::size_t i = 0; i < x.size(); ++i) num[i] = num[i] / (1.0 - x[i] + num[i]);
    return num;
}

inline Vec finish_simplex(Vec num, double* drift) {
    const double s = vec_sum(num);
    if (drift) *drift = std::fabs(s - 1.0);
    for (double& v : num) v /= s;
    return num;
}

}  // namespace detail

/**
 * e-geodesic retraction R_x(t v). Globally defined in t; an exponent beyond
 * 700 raises numerical_error carrying the offending coordinate, since the box
 * and simplex normalizers would otherwise turn the overflow into quiet NaNs.
 * For the simplex the result is renormalized and the pre-normalization drift
 * |sum - 1| is reported through `drift` when given.
 */
inline Vec retract(ManifoldKind kind, const Vec& x, const Vec& v, double t,
                   double* drift = nullptr,
                   detail::Overflow mode = detail::Overflow::Error) {
    Vec q(x.size());
    switch (kind) {
        case ManifoldKind::Orthant:
            for (std::size_t i = 0; i < x.size(); ++i) q[i] = t * v[i] / x[i];
            return detail::scaled_exp(x, q, mode);
        case ManifoldKind::Box:
            for (std::size_t i = 0; i < x.size(); ++i) q[i] = t * v[i] / (x[i] * (1.0 - x[i]));
            return detail::finish_box(x, detail::scaled_exp(x, q, mode));
        default:
            for (std::size_t i = 0; i < x.size(); ++i) q[i] = t * v[i] / x[i];
            return detail::finish_simplex(detail::scaled_exp(x, q, mode), drift);
    }
}

// Normalized multiplicative update x * e^g / Z(x); equals
// retract(x, inverse_metric_apply(x, g), 1). Callers pass g = -tau * df.
inline Vec exp_shorthand(ManifoldKind kind, const Vec& x, const Vec& g,
                         detail::Overflow mode = detail::Overflow::Error) {
    switch (kind) {
        case ManifoldKind::Orthant:
            return detail::scaled_exp(x, g, mode);
        case ManifoldKind::Box:
            return detail::finish_box(x, detail::scaled_exp(x, g, mode));
        default:
            return detail::finish_simplex(detail::scaled_exp(x, g, mode), nullptr);
    }
}

/**
 * Interior Bregman gradient step through dual coordinates,
 * dphi*(dphi(x) - tau g). Agrees with exp_shorthand(x, -tau g) to relative
 * 1e-10 but takes an independent floating-point route (log/logit first),
 * which is what makes the equivalence property test meaningful.
 */
inline Vec mirror_step(ManifoldKind kind, const Vec& x, const Vec& g, double tau,
                       detail::Overflow mode = detail::Overflow::Error) {
    Vec r(x.size());
    switch (kind) {
        case ManifoldKind::Orthant:
            for (std::size_t i = 0; i < x.size(); ++i)
                r[i] = detail::exp_guard(std::log(x[i]) - tau * g[i], i, mode);
            return r;
        case ManifoldKind::Box:
            for (std::size_t i = 0; i < x.size(); ++i) {
                const double th = std::log(x[i] / (1.0 - x[i])) - tau * g[i];
                r[i] = 1.0 / (1.0 + detail::exp_guard(-th, i, mode));
            }
            return r;
        default: {
            double s = 0.0;
            for (std::size_t i = 0; i < x.size(); ++i) {
                r[i] = detail::exp_guard(std::log(x[i]) - tau * g[i], i, mode);
                s += r[i];
            }
            for (double& v : r) v /= s;
            return r;
        }
    }
}

// vector transport along the retraction: T v = G(x')^{-1} G(x) v with
// x' = R_x(u); closed forms avoid assembling either metric
inline Vec transport(ManifoldKind kind, const Vec& x, const Vec& u, const Vec& v) {
    const Vec xp = retract(kind, x, u, 1.0);
    Vec r(x.size());
    switch (kind) {
        case ManifoldKind::Orthant:
            for (std::size_t i = 0; i < x.size(); ++i) r[i] = xp[i] / x[i] * v[i];
            return r;
        case ManifoldKind::Box:
            for (std::size_t i = 0; i < x.size(); ++i)
                r[i] = (xp[i] * (1.0 - xp[i])) / (x[i] * (1.0 - x[i])) * v[i];
            return r;
        default: {
            Vec w(x.size());
            for (std::size_t i = 0; i < x.size(); ++i) w[i] = v[i] / x[i];
            return inverse_metric_apply(ManifoldKind::Simplex, xp, w);
        }
    }
}

// transport of a Riemannian gradient; cheaper than transport() because the
// source metric cancels: x' df, x'(1-x') df, Pi_{x'} df
inline Vec transport_gradient(ManifoldKind kind, const Vec& x, const Vec& u,
                              const Vec& euclid_grad_at_x) {
    const Vec xp = retract(kind, x, u, 1.0);
    return inverse_metric_apply(kind, xp, euclid_grad_at_x);
}

// simplex tangents must sum to zero; tolerate round-off up to 1e-9
inline Vec project_tangent(ManifoldKind kind, Vec v) {
    if (kind != ManifoldKind::Simplex) return v;
    const double s = vec_sum(v);
    if (std::fabs(s) > 1e-9) throw std::invalid_argument("simplex tangent mass " + std::to_string(s));
    const double mean = s / static_cast<double>(v.size());
    for (double& c : v) c -= mean;
    return v;
}

namespace detail {

// sum_i a_i log(a_i / c_i) with the 0 log 0 = 0 convention
inline double xlogx_over(const Vec& a, const Vec& c) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i] > 0.0) s += a[i] * std::log(a[i] / c[i]);
    return s;
}

inline double d_orthant(const Vec& x, const Vec& y) {
    return xlogx_over(x, y) - (vec_sum(x) - vec_sum(y));
}

}  // namespace detail

/**
 * Bregman divergence of the kernel matching the kind. The first argument may
 * lie in the closed domain (0 log 0 = 0); the second must be interior.
 */
inline double bregman_divergence(ManifoldKind kind, const Vec& x, const Vec& y) {
    if (x.size() != y.size()) throw std::invalid_argument("bregman_divergence: length mismatch");
    if (!is_interior(kind, y)) throw std::invalid_argument("bregman_divergence: second argument not interior");
    switch (kind) {
        case ManifoldKind::Orthant:
            return detail::d_orthant(x, y);
        case ManifoldKind::Box: {
            Vec xc(x.size()), yc(y.size());
            for (std::size_t i = 0; i < x.size(); ++i) {
                xc[i] = 1.0 - x[i];
                yc[i] = 1.0 - y[i];
            }
            return detail::d_orthant(x, y) + detail::d_orthant(xc, yc);
        }
        default:
            return detail::xlogx_over(x, y);
    }
}

}  // namespace klreg

#endif  // KLREG_MANIFOLD_HPP_
