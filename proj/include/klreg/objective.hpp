#ifndef KLREG_OBJECTIVE_HPP_
#define KLREG_OBJECTIVE_HPP_

#include <cmath>
#include <stdexcept>
#include <utility>

#include "klreg/manifold.hpp"
#include "klreg/sparse.hpp"
#include "klreg/vec.hpp"

namespace klreg {

/**
 * Generalized Kullback-Leibler divergence
 *   kl(y, yp) = <y, log y - log yp> - <1, y - yp>,  0 log 0 = 0.
 *
 * y must be nonnegative; round-off slightly below zero (>= -1e-14) is
 * clamped to zero, anything lower is an error. yp must be strictly positive.
 * Nonnegative, zero iff y == yp.
 */
inline double kl(const Vec& y, const Vec& yp) {
    if (y.size() != yp.size()) throw std::invalid_argument("kl: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (!(yp[i] > 0.0)) throw numerical_error("kl: second argument not positive at " + std::to_string(i + 1));
        double yi = y[i];
        if (yi < 0.0) {
            if (yi < -1e-14) throw numerical_error("kl: negative component " + std::to_string(yi) +
                                                   " at " + std::to_string(i + 1));
            yi = 0.0;
        }
        if (yi > 0.0) s += yi * std::log(yi / yp[i]);
        s -= yi - yp[i];
    }
    return s;
}

// f(x) = KL(Ax, b) over the chosen domain; L = |A|_1 is the relative
// smoothness constant of f with respect to the matching Bregman kernel
struct KlProblem {
    SparseMatrix A;
    Vec b;
    ManifoldKind kind = ManifoldKind::Box;
    double L = 0.0;
};

inline KlProblem make_problem(SparseMatrix A, Vec b, ManifoldKind kind) {
    if (static_cast<int>(b.size()) != A.rows()) throw std::invalid_argument("b length must equal rows(A)");
    for (std::size_t i = 0; i < b.size(); ++i)
        if (!(b[i] > 0.0))
            throw std::invalid_argument("b must be strictly positive (component " + std::to_string(i + 1) + ")");
    KlProblem P;
    P.L = A.one_norm();
    P.A = std::move(A);
    P.b = std::move(b);
    P.kind = kind;
    return P;
}

inline double objective(const KlProblem& P, const Vec& x, OpCounter& ops) {
    return kl(matvec(P.A, x, ops), P.b);
}

// df(x) = A^T log(Ax / b)
inline Vec gradient(const KlProblem& P, const Vec& x, OpCounter& ops) {
    Vec y = matvec(P.A, x, ops);
    for (std::size_t i = 0; i < y.size(); ++i) {
        y[i] = std::log(y[i] / P.b[i]);
        if (!std::isfinite(y[i]))
            throw numerical_error("gradient: log(Ax/b) not finite at row " + std::to_string(i + 1));
    }
    return rmatvec(P.A, y, ops);
}

// gradient from an already computed forward product (one rmatvec);
// the fused form is what keeps the multiplicative solvers at exactly two
// matrix-vector operations per iteration
inline Vec gradient_from_forward(const KlProblem& P, const Vec& Ax, OpCounter& ops) {
    Vec u(Ax.size());
    for (std::size_t i = 0; i < Ax.size(); ++i) {
        u[i] = std::log(Ax[i] / P.b[i]);
        if (!std::isfinite(u[i]))
            throw numerical_error("gradient: log(Ax/b) not finite at row " + std::to_string(i + 1));
    }
    return rmatvec(P.A, u, ops);
}

// Bregman divergence generated by f itself: D_f(x, y) = KL(Ax, Ay); the
// quantity the local triangle-scaling certificate bounds
inline double bregman_gap(const KlProblem& P, const Vec& x, const Vec& y, OpCounter& ops) {
    return kl(matvec(P.A, x, ops), matvec(P.A, y, ops));
}

}  // namespace klreg

#endif  // KLREG_OBJECTIVE_HPP_
