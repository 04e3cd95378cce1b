#ifndef KLREG_SOLVERS_HPP_
#define KLREG_SOLVERS_HPP_

#include <algorithm>
#include <cmath>
#include <deque>
#include <functional>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "klreg/manifold.hpp"
#include "klreg/objective.hpp"
#include "klreg/sparse.hpp"
#include "klreg/vec.hpp"

// The nine solvers for min KL(Ax, b) over orthant / box / simplex.
//
// Matvec accounting convention shared by every solver: the counter snapshot
// taken right after the initial objective/gradient evaluation at x0 is the
// baseline, and each trace row stores the cumulative count minus that
// baseline. The multiplicative methods then read exactly 2k at row k; the
// line-search methods satisfy row-to-row increments of 2 + inner_backtracks
// because every trial step costs exactly one forward product.

namespace klreg {

enum class Algorithm { Smart, Fsmart, FsmartE, FsmartG, RgArmijo, RgHz, RgBb, RgCg, Pg };
enum class BetaRule { FR, PR, DY, HS, HZ, OV };
enum class Termination { GradTol, MaxIter, NumericalError };

inline const char* algorithm_name(Algorithm a) {
    switch (a) {
        case Algorithm::Smart: return "smart";
        case Algorithm::Fsmart: return "fsmart";
        case Algorithm::FsmartE: return "fsmart-e";
        case Algorithm::FsmartG: return "fsmart-g";
        case Algorithm::RgArmijo: return "rg-armijo";
        case Algorithm::RgHz: return "rg-hz";
        case Algorithm::RgBb: return "rg-bb";
        case Algorithm::RgCg: return "rg-cg";
        default: return "pg";
    }
}

inline const char* termination_name(Termination t) {
    switch (t) {
        case Termination::GradTol: return "GradTol";
        case Termination::MaxIter: return "MaxIter";
        default: return "NumericalError";
    }
}

inline const char* beta_rule_name(BetaRule r) {
    switch (r) {
        case BetaRule::FR: return "FR";
        case BetaRule::PR: return "PR";
        case BetaRule::DY: return "DY";
        case BetaRule::HS: return "HS";
        case BetaRule::HZ: return "HZ";
        default: return "OV";
    }
}

struct SolverConfig {
    Algorithm algorithm = Algorithm::Smart;
    int max_iter = 1000;
    double grad_tol = 1e-8;
    // Armijo family
    double armijo_sigma = 1e-3;
    double armijo_beta = 0.8;
    double init_step = 0.2;
    // Hager-Zhang acceptance (rho1 is armijo_sigma)
    double hz_sigma2 = 1e-3;
    double hz_rho = 0.5;
    // Barzilai-Borwein
    double bb_gamma_min = 1e-7;
    double bb_gamma_max = 1.0;
    int bb_memory = 10;
    // exponent-adaptive accelerated variant
    double e_gamma0 = 5.0;
    double e_gamma_min = 1.0;
    double e_delta = 0.05;
    // gain-adaptive accelerated variant
    double g_rho = 1.2;
    double g_gamma = 2.0;
    double g_gain_min = 1e-3;
    // conjugate gradient
    BetaRule cg_beta_rule = BetaRule::DY;
    double cg_mu = 2.0;
    // theta recursion root solve
    double newton_tol = 1e-12;
};

struct TraceRow {
    long long iter = 0;
    double objective = 0.0;
    double grad_norm = 0.0;
    double step_size = 0.0;
    long long matvec_count = 0;
    std::optional<double> certificate;  // gamma_k (FSMART-E), gain (FSMART-G), beta_k (RG-CG)
    int inner_backtracks = 0;
};

struct SolveResult {
    Vec final_point;
    std::vector<TraceRow> trace;
    Termination termination = Termination::MaxIter;
};

// per-accepted-step record of the triangle-scaling check, enough to
// re-validate both sides of the inequality independently of the solver
struct TseRecord {
    long long iter = 0;
    double lhs = 0.0;       // KL(A x_{k+1}, A y_k)
    double rhs = 0.0;       // [gain *] theta^gamma * L * D_phi(z_{k+1}, z_k)
    double theta = 0.0;
    double certificate = 0.0;  // gamma_k or gain G_k
    Vec z_prev, z_next, y_point, x_next;
};
using TseObserver = std::function<void(const TseRecord&)>;

// per-iteration record of the conjugate gradient direction update
struct CgRecord {
    long long iter = 0;
    double beta = 0.0;
    bool slope_restart = false;
    Vec direction;  // v_{k+1}
    Vec riem_grad;  // grad f(x_{k+1})
};
using CgObserver = std::function<void(const CgRecord&)>;

/**
 * Next extrapolation weight: the positive root t of (1-t)/t^gamma = 1/theta^gamma.
 * gamma = 2 uses the closed form (sqrt(theta^4+4 theta^2)-theta^2)/2; other
 * exponents run a bracketed Newton iteration. The residual is accepted
 * relative to the scale c = 1/theta^gamma since an absolute target is
 * meaningless once c is large.
 */
inline double theta_closed_form(double th) {
    return (std::sqrt(th * th * th * th + 4.0 * th * th) - th * th) / 2.0;
}

inline double theta_next(double theta, double gamma, double tol = 1e-12) {
    if (!(theta > 0.0 && theta <= 1.0)) throw std::invalid_argument("theta_next: theta outside (0,1]");
    if (gamma == 2.0) return theta_closed_form(theta);
    const double c = 1.0 / std::pow(theta, gamma);
    double lo = 0.0, hi = 1.0;
    double t = (gamma == 1.0) ? theta / (1.0 + theta) : std::min(0.9999, theta_closed_form(theta));
    for (int it = 0; it < 100; ++it) {
        const double r = (1.0 - t) / std::pow(t, gamma) - c;
        if (std::fabs(r) <= tol * (1.0 + std::fabs(c))) return t;
        if (r > 0.0)
            lo = t;
        else
            hi = t;
        const double dr = -(t + gamma * (1.0 - t)) / std::pow(t, gamma + 1.0);
        const double tn = t - r / dr;
        t = (tn > lo && tn < hi) ? tn : 0.5 * (lo + hi);
    }
    throw numerical_error("theta recursion: Newton did not converge in 100 steps");
}

namespace detail {

inline void require_start(const KlProblem& P, const Vec& x0) {
    if (static_cast<int>(x0.size()) != P.A.cols())
        throw std::invalid_argument("x0 length must equal cols(A)");
    if (!in_domain(P.kind, x0)) throw std::invalid_argument("x0 must be interior");
}

inline Vec scaled(const Vec& v, double a) {
    Vec r(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) r[i] = a * v[i];
    return r;
}

// Renormalization absorbs the simplex mass drift of an accepted retraction;
// a pre-normalization drift beyond 1e-9 is only worth a diagnostic note, and
// only once per run since ordinary accepted steps can exceed it repeatedly.
inline void note_drift(double drift, bool& noted) {
    if (drift > 1e-9 && !noted) {
        noted = true;
        std::cerr << "note: simplex renormalization absorbed pre-normalization drift " << drift
                  << "\n";
    }
}

}  // namespace detail

inline SolveResult smart(const KlProblem& P, const Vec& x0, const SolverConfig& cfg) {
    detail::require_start(P, x0);
    OpCounter ops;
    SolveResult res;
    Vec x = x0;
    const double tau = 1.0 / P.L;
    try {
        Vec y = matvec(P.A, x, ops);
        double f = kl(y, P.b);
        Vec g = gradient_from_forward(P, y, ops);
        const long long base = ops.count;
        double gn = grad_norm(P.kind, x, g);
        res.trace.push_back({0, f, gn, 0.0, ops.count - base, std::nullopt, 0});
        for (long long k = 1; k <= cfg.max_iter; ++k) {
            if (gn <= cfg.grad_tol) {
                res.termination = Termination::GradTol;
                break;
            }
            x = exp_shorthand(P.kind, x, detail::scaled(g, -tau));
            y = matvec(P.A, x, ops);
            f = kl(y, P.b);
            g = gradient_from_forward(P, y, ops);
            gn = grad_norm(P.kind, x, g);
            res.trace.push_back({k, f, gn, tau, ops.count - base, std::nullopt, 0});
        }
    } catch (const numerical_error&) {
        res.termination = Termination::NumericalError;
    }
    res.final_point = std::move(x);
    return res;
}

inline SolveResult fsmart(const KlProblem& P, const Vec& x0, const SolverConfig& cfg) {
    detail::require_start(P, x0);
    OpCounter ops;
    SolveResult res;
    Vec x = x0, z = x0;
    double th = 1.0;
    const double tau = 1.0 / P.L;
    try {
        Vec Az = matvec(P.A, z, ops);
        Vec Ax = Az;
        const long long base = ops.count;
        double f = kl(Ax, P.b);
        res.trace.push_back({0, f, 0.0, 0.0, 0, std::nullopt, 0});
        for (long long k = 0; k < cfg.max_iter; ++k) {
            const Vec Ay = convex_combination(Ax, Az, th);
            const Vec ygrad = gradient_from_forward(P, Ay, ops);
            const Vec ypt = convex_combination(x, z, th);
            const double gn = grad_norm(P.kind, ypt, ygrad);
            if (k == 0) res.trace[0].grad_norm = gn;  // y_0 = x_0
            if (gn <= cfg.grad_tol) {
                res.termination = Termination::GradTol;
                break;
            }
            z = mirror_step(P.kind, z, ygrad, tau);
            Az = matvec(P.A, z, ops);
            x = convex_combination(x, z, th);
            Ax = convex_combination(Ax, Az, th);
            f = kl(Ax, P.b);
            th = theta_closed_form(th);
            res.trace.push_back({k + 1, f, gn, tau, ops.count - base, std::nullopt, 0});
        }
    } catch (const numerical_error&) {
        res.termination = Termination::NumericalError;
    }
    res.final_point = std::move(x);
    return res;
}

/**
 * Exponent-adaptive accelerated variant. Each iteration proposes the mirror
 * step with the current exponent gamma_k and accepts it when the local
 * triangle-scaling check
 *     KL(A x_{k+1}, A y_k) <= theta_k^{gamma_k} * L * D_phi(z_{k+1}, z_k)
 * holds (the right side is the model the O(1/k^gamma) rate rests on); on
 * failure gamma_k is lowered by e_delta, floored at e_gamma_min, where the
 * inequality is guaranteed by joint convexity and the step is taken
 * unconditionally. A candidate that leaves the closed domain or loses
 * finiteness counts as a failed check. The accepted gamma_k is the trace
 * certificate.
 */
inline SolveResult fsmart_e(const KlProblem& P, const Vec& x0, const SolverConfig& cfg,
                            const TseObserver& observer = {}) {
    detail::require_start(P, x0);
    OpCounter ops;
    SolveResult res;
    Vec x = x0, z = x0;
    double th = 1.0;
    double gam = cfg.e_gamma0;
    try {
        Vec Az = matvec(P.A, z, ops);
        Vec Ax = Az;
        const long long base = ops.count;
        double f = kl(Ax, P.b);
        res.trace.push_back({0, f, 0.0, 0.0, 0, gam, 0});
        for (long long k = 0; k < cfg.max_iter; ++k) {
            const Vec Ay = convex_combination(Ax, Az, th);
            const Vec ygrad = gradient_from_forward(P, Ay, ops);
            const Vec ypt = convex_combination(x, z, th);
            const double gn = grad_norm(P.kind, ypt, ygrad);
            if (k == 0) res.trace[0].grad_norm = gn;
            if (gn <= cfg.grad_tol) {
                res.termination = Termination::GradTol;
                break;
            }
            int bt = 0;
            double tau = 0.0, thn = 0.0, lhs = 0.0, rhs = 0.0;
            Vec zc, Azc, xc, Axc;
            for (;;) {
                tau = 1.0 / (std::pow(th, gam - 1.0) * P.L);
                zc = mirror_step(P.kind, z, ygrad, tau, detail::Overflow::Saturate);
                if (is_interior(P.kind, zc)) {
                    Azc = matvec(P.A, zc, ops);
                    xc = convex_combination(x, zc, th);
                    Axc = convex_combination(Ax, Azc, th);
                    thn = theta_next(th, gam, cfg.newton_tol);
                    lhs = kl(Axc, Ay);
                    rhs = std::pow(th, gam) * P.L * bregman_divergence(P.kind, zc, z);
                    if (lhs <= rhs || gam <= cfg.e_gamma_min) break;
                } else if (gam <= cfg.e_gamma_min) {
                    throw numerical_error("triangle-scaling floor reached with infeasible step");
                }
                gam = std::max(cfg.e_gamma_min, gam - cfg.e_delta);
                ++bt;
            }
            if (observer) observer({k + 1, lhs, rhs, th, gam, z, zc, ypt, xc});
            z = std::move(zc);
            Az = std::move(Azc);
            x = std::move(xc);
            Ax = std::move(Axc);
            f = kl(Ax, P.b);
            th = thn;
            res.trace.push_back({k + 1, f, gn, tau, ops.count - base, gam, bt});
        }
    } catch (const numerical_error&) {
        res.termination = Termination::NumericalError;
    }
    res.final_point = std::move(x);
    return res;
}

/**
 * Gain-adaptive accelerated variant with fixed exponent g_gamma. The inner
 * loop multiplies the gain by g_rho until the gain-relaxed check
 *     KL(A x_{k+1}, A y_k) <= G_k * theta_k^gamma * L * D_phi(z_{k+1}, z_k)
 * holds, then the next iteration starts from max(g_gain_min, G_k / g_rho).
 * The accepted gain is the trace certificate.
 */
inline SolveResult fsmart_g(const KlProblem& P, const Vec& x0, const SolverConfig& cfg,
                            const TseObserver& observer = {}) {
    detail::require_start(P, x0);
    OpCounter ops;
    SolveResult res;
    Vec x = x0, z = x0;
    double th = 1.0;
    double gain = 1.0;
    const double gamma = cfg.g_gamma;
    try {
        Vec Az = matvec(P.A, z, ops);
        Vec Ax = Az;
        const long long base = ops.count;
        double f = kl(Ax, P.b);
        res.trace.push_back({0, f, 0.0, 0.0, 0, gain, 0});
        for (long long k = 0; k < cfg.max_iter; ++k) {
            const Vec Ay = convex_combination(Ax, Az, th);
            const Vec ygrad = gradient_from_forward(P, Ay, ops);
            const Vec ypt = convex_combination(x, z, th);
            const double gn = grad_norm(P.kind, ypt, ygrad);
            if (k == 0) res.trace[0].grad_norm = gn;
            if (gn <= cfg.grad_tol) {
                res.termination = Termination::GradTol;
                break;
            }
            int bt = 0;
            double tau = 0.0, thn = 0.0, lhs = 0.0, rhs = 0.0;
            Vec zc, Azc, xc, Axc;
            for (;;) {
                tau = 1.0 / (gain * std::pow(th, gamma - 1.0) * P.L);
                zc = mirror_step(P.kind, z, ygrad, tau, detail::Overflow::Saturate);
                bool accepted = false;
                if (is_interior(P.kind, zc)) {
                    Azc = matvec(P.A, zc, ops);
                    xc = convex_combination(x, zc, th);
                    Axc = convex_combination(Ax, Azc, th);
                    thn = theta_next(th, gamma, cfg.newton_tol);
                    lhs = kl(Axc, Ay);
                    rhs = gain * std::pow(th, gamma) * P.L * bregman_divergence(P.kind, zc, z);
                    accepted = lhs <= rhs;
                }
                if (accepted) break;
                gain *= cfg.g_rho;
                if (++bt > 50) throw numerical_error("gain adaption exceeded 50 increases");
            }
            if (observer) observer({k + 1, lhs, rhs, th, gain, z, zc, ypt, xc});
            z = std::move(zc);
            Az = std::move(Azc);
            x = std::move(xc);
            Ax = std::move(Axc);
            f = kl(Ax, P.b);
            th = thn;
            res.trace.push_back({k + 1, f, gn, tau, ops.count - base, gain, bt});
            gain = std::max(cfg.g_gain_min, gain / cfg.g_rho);
        }
    } catch (const numerical_error&) {
        res.termination = Termination::NumericalError;
    }
    res.final_point = std::move(x);
    return res;
}

/**
 * Riemannian gradient descent with monotone Armijo backtracking. The descent
 * direction is the negative Euclidean gradient pushed through the
 * multiplicative update; the acceptance threshold uses the squared
 * Riemannian gradient norm <v, G(x)^{-1} v>. The accepted step persists as
 * the next trial and never grows.
 */
inline SolveResult rg_armijo(const KlProblem& P, const Vec& x0, const SolverConfig& cfg) {
    detail::require_start(P, x0);
    OpCounter ops;
    SolveResult res;
    Vec x = x0;
    double tau = cfg.init_step;
    try {
        Vec y = matvec(P.A, x, ops);
        double f = kl(y, P.b);
        Vec g = gradient_from_forward(P, y, ops);
        const long long base = ops.count;
        double gn = grad_norm(P.kind, x, g);
        res.trace.push_back({0, f, gn, 0.0, 0, std::nullopt, 0});
        for (long long k = 1; k <= cfg.max_iter; ++k) {
            if (gn <= cfg.grad_tol) {
                res.termination = Termination::GradTol;
                break;
            }
            const double q = dot(g, inverse_metric_apply(P.kind, x, g));
            int bt = 0;
            for (;;) {
                const Vec xc = exp_shorthand(P.kind, x, detail::scaled(g, -tau), detail::Overflow::Saturate);
                const Vec yc = matvec(P.A, xc, ops);
                const double fc = kl(yc, P.b);
                if (f - fc >= cfg.armijo_sigma * tau * q && is_interior(P.kind, xc)) {
                    x = xc;
                    f = fc;
                    y = yc;
                    break;
                }
                tau *= cfg.armijo_beta;
                if (++bt > 60) {
                    res.termination = Termination::NumericalError;
                    res.final_point = std::move(x);
                    return res;
                }
            }
            g = gradient_from_forward(P, y, ops);
            gn = grad_norm(P.kind, x, g);
            res.trace.push_back({k, f, gn, tau, ops.count - base, std::nullopt, bt});
        }
    } catch (const numerical_error&) {
        res.termination = Termination::NumericalError;
    }
    res.final_point = std::move(x);
    return res;
}

// nonmonotone Hager-Zhang acceptance against the running average C_k;
// rho1 = armijo_sigma, rho2 = hz_sigma2, averaging weight hz_rho
inline SolveResult rg_hz(const KlProblem& P, const Vec& x0, const SolverConfig& cfg) {
    detail::require_start(P, x0);
    OpCounter ops;
    SolveResult res;
    Vec x = x0;
    double tau = cfg.init_step;
    try {
        Vec y = matvec(P.A, x, ops);
        double f = kl(y, P.b);
        Vec g = gradient_from_forward(P, y, ops);
        const long long base = ops.count;
        double gn = grad_norm(P.kind, x, g);
        double C = f, Q = 1.0;
        res.trace.push_back({0, f, gn, 0.0, 0, std::nullopt, 0});
        for (long long k = 1; k <= cfg.max_iter; ++k) {
            if (gn <= cfg.grad_tol) {
                res.termination = Termination::GradTol;
                break;
            }
            const double q = dot(g, inverse_metric_apply(P.kind, x, g));
            int bt = 0;
            for (;;) {
                const Vec xc = exp_shorthand(P.kind, x, detail::scaled(g, -tau), detail::Overflow::Saturate);
                const Vec yc = matvec(P.A, xc, ops);
                const double fc = kl(yc, P.b);
                if (fc - C <= tau * (cfg.armijo_sigma - tau * cfg.hz_sigma2) * q && is_interior(P.kind, xc)) {
                    x = xc;
                    f = fc;
                    y = yc;
                    break;
                }
                tau *= cfg.armijo_beta;
                if (++bt > 60) {
                    res.termination = Termination::NumericalError;
                    res.final_point = std::move(x);
                    return res;
                }
            }
            const double Qn = cfg.hz_rho * Q + 1.0;
            C = (cfg.hz_rho * Q * C + f) / Qn;
            Q = Qn;
            g = gradient_from_forward(P, y, ops);
            gn = grad_norm(P.kind, x, g);
            res.trace.push_back({k, f, gn, tau, ops.count - base, std::nullopt, bt});
        }
    } catch (const numerical_error&) {
        res.termination = Termination::NumericalError;
    }
    res.final_point = std::move(x);
    return res;
}

/**
 * Riemannian Barzilai-Borwein step with nonmonotone Armijo safeguard. The
 * secant pair lives at the new point: s_k transports the accepted step
 * there, y_k compares the new Riemannian gradient with the transported one,
 * and the long-step ratio <s,s>/|<s,y>| is clipped to
 * [bb_gamma_min, bb_gamma_max] before serving as the next trial step. The
 * acceptance reference is the maximum of the last bb_memory+1 objectives.
 */
inline SolveResult rg_bb(const KlProblem& P, const Vec& x0, const SolverConfig& cfg) {
    detail::require_start(P, x0);
    OpCounter ops;
    SolveResult res;
    Vec x = x0;
    try {
        Vec y = matvec(P.A, x, ops);
        double f = kl(y, P.b);
        Vec g = gradient_from_forward(P, y, ops);
        const long long base = ops.count;
        double gn = grad_norm(P.kind, x, g);
        res.trace.push_back({0, f, gn, 0.0, 0, std::nullopt, 0});
        std::deque<double> hist{f};
        double trial = cfg.init_step;
        bool drift_noted = false;
        for (long long k = 1; k <= cfg.max_iter; ++k) {
            if (gn <= cfg.grad_tol) {
                res.termination = Termination::GradTol;
                break;
            }
            const Vec rg = inverse_metric_apply(P.kind, x, g);
            Vec d = detail::scaled(rg, -1.0);
            const double slope = dot(g, d);
            const double C = *std::max_element(hist.begin(), hist.end());
            double tau = trial;
            int bt = 0;
            Vec xc, yc;
            double fc = 0.0, drift = 0.0;
            for (;;) {
                xc = retract(P.kind, x, detail::scaled(d, tau), 1.0, &drift, detail::Overflow::Saturate);
                yc = matvec(P.A, xc, ops);
                fc = kl(yc, P.b);
                if (fc <= C + cfg.armijo_sigma * tau * slope && is_interior(P.kind, xc)) break;
                tau *= cfg.armijo_beta;
                if (++bt > 60) {
                    res.termination = Termination::NumericalError;
                    res.final_point = std::move(x);
                    return res;
                }
            }
            detail::note_drift(drift, drift_noted);
            // transported gradient at xc equals G(xc)^{-1} df(x)
            const Vec s = detail::scaled(inverse_metric_apply(P.kind, xc, g), -tau);
            const Vec gnew = gradient_from_forward(P, yc, ops);
            const Vec rgn = inverse_metric_apply(P.kind, xc, gnew);
            Vec yvec(s.size());
            for (std::size_t i = 0; i < s.size(); ++i) yvec[i] = rgn[i] + s[i] / tau;
            const double num = inner(P.kind, xc, s, s);
            const double den = std::fabs(inner(P.kind, xc, s, yvec));
            trial = den > 0.0 ? std::min(cfg.bb_gamma_max, std::max(cfg.bb_gamma_min, num / den))
                              : cfg.bb_gamma_max;
            x = std::move(xc);
            f = fc;
            g = gnew;
            gn = grad_norm(P.kind, x, g);
            hist.push_back(f);
            if (static_cast<int>(hist.size()) > cfg.bb_memory + 1) hist.pop_front();
            res.trace.push_back({k, f, gn, tau, ops.count - base, std::nullopt, bt});
        }
    } catch (const numerical_error&) {
        res.termination = Termination::NumericalError;
    }
    res.final_point = std::move(x);
    return res;
}

/**
 * Riemannian conjugate gradient. Directions update as
 * v_{k+1} = -grad f(x_{k+1}) + beta_k T(v_k) with beta chosen by
 * cfg.cg_beta_rule; a denominator below 1e-12 in magnitude resets beta to 0
 * (steepest-descent restart), and a non-descent direction restarts before
 * the line search. The accepted alpha is reused as the next initial trial.
 * beta_k is recorded as the trace certificate.
 */
inline SolveResult rg_cg(const KlProblem& P, const Vec& x0, const SolverConfig& cfg,
                         const CgObserver& observer = {}) {
    detail::require_start(P, x0);
    OpCounter ops;
    SolveResult res;
    Vec x = x0;
    try {
        Vec y = matvec(P.A, x, ops);
        double f = kl(y, P.b);
        Vec g = gradient_from_forward(P, y, ops);
        const long long base = ops.count;
        double gn = grad_norm(P.kind, x, g);
        Vec rg = inverse_metric_apply(P.kind, x, g);
        Vec v = detail::scaled(rg, -1.0);
        double alpha = cfg.init_step;
        bool drift_noted = false;
        res.trace.push_back({0, f, gn, 0.0, 0, std::nullopt, 0});
        for (long long k = 1; k <= cfg.max_iter; ++k) {
            if (gn <= cfg.grad_tol) {
                res.termination = Termination::GradTol;
                break;
            }
            double slope = dot(g, v);
            bool slope_restart = false;
            if (slope >= 0.0) {  // not a descent direction
                v = detail::scaled(rg, -1.0);
                slope = dot(g, v);
                slope_restart = true;
            }
            int bt = 0;
            Vec xc, yc;
            double fc = 0.0, drift = 0.0;
            for (;;) {
                xc = retract(P.kind, x, detail::scaled(v, alpha), 1.0, &drift, detail::Overflow::Saturate);
                yc = matvec(P.A, xc, ops);
                fc = kl(yc, P.b);
                if (fc - f <= cfg.armijo_sigma * alpha * slope && is_interior(P.kind, xc)) break;
                alpha *= cfg.armijo_beta;
                if (++bt > 60) {
                    res.termination = Termination::NumericalError;
                    res.final_point = std::move(x);
                    return res;
                }
            }
            detail::note_drift(drift, drift_noted);
            const Vec u = detail::scaled(v, alpha);
            const Vec gnew = gradient_from_forward(P, yc, ops);
            const Vec rgnew = inverse_metric_apply(P.kind, xc, gnew);
            const Vec Tv = transport(P.kind, x, u, v);
            const Vec Tg = inverse_metric_apply(P.kind, xc, g);  // transported gradient
            Vec yk(rgnew.size());
            for (std::size_t i = 0; i < yk.size(); ++i) yk[i] = rgnew[i] - Tg[i];
            const double gng2 = inner(P.kind, x, rg, rg);
            const double gnn2 = inner(P.kind, xc, rgnew, rgnew);
            const double gTv = inner(P.kind, xc, rgnew, Tv);
            const double gv = inner(P.kind, x, rg, v);
            const double gy = inner(P.kind, xc, rgnew, yk);
            const double yy = inner(P.kind, xc, yk, yk);
            const double eps = 1e-12;
            double num = 0.0, den = 0.0;
            switch (cfg.cg_beta_rule) {
                case BetaRule::FR: num = gnn2; den = gng2; break;
                case BetaRule::PR: num = gy; den = gng2; break;
                case BetaRule::DY: num = gnn2; den = gTv - gv; break;
                case BetaRule::HS: num = gy; den = gTv - gv; break;
                case BetaRule::HZ:
                    den = gTv - gv;
                    num = std::fabs(den) >= eps ? gy - cfg.cg_mu * yy * gTv / den : 0.0;
                    break;
                case BetaRule::OV: num = gTv; den = -inner(P.kind, x, v, v); break;
            }
            const double beta = std::fabs(den) < eps ? 0.0 : num / den;
            Vec vn(rgnew.size());
            for (std::size_t i = 0; i < vn.size(); ++i) vn[i] = -rgnew[i] + beta * Tv[i];
            if (observer) observer({k, beta, slope_restart, vn, rgnew});
            v = std::move(vn);
            x = std::move(xc);
            f = fc;
            g = gnew;
            rg = rgnew;
            gn = grad_norm(P.kind, x, g);
            res.trace.push_back({k, f, gn, alpha, ops.count - base, beta, bt});
        }
    } catch (const numerical_error&) {
        res.termination = Termination::NumericalError;
    }
    res.final_point = std::move(x);
    return res;
}

// Euclidean projected gradient with monotone Armijo, box domain only; the
// projection clamps to [1e-12, 1-1e-12] so the objective stays evaluable
inline SolveResult pg_armijo(const KlProblem& P, const Vec& x0, const SolverConfig& cfg) {
    if (P.kind != ManifoldKind::Box) throw std::invalid_argument("pg_armijo requires the box domain");
    detail::require_start(P, x0);
    const double eps_proj = 1e-12;
    OpCounter ops;
    SolveResult res;
    Vec x = x0;
    double tau = cfg.init_step;
    try {
        Vec y = matvec(P.A, x, ops);
        double f = kl(y, P.b);
        Vec g = gradient_from_forward(P, y, ops);
        const long long base = ops.count;
        double gn = grad_norm(P.kind, x, g);
        res.trace.push_back({0, f, gn, 0.0, 0, std::nullopt, 0});
        for (long long k = 1; k <= cfg.max_iter; ++k) {
            if (gn <= cfg.grad_tol) {
                res.termination = Termination::GradTol;
                break;
            }
            const double q = dot(g, g);
            int bt = 0;
            for (;;) {
                Vec xc(x.size());
                for (std::size_t i = 0; i < x.size(); ++i)
                    xc[i] = std::min(1.0 - eps_proj, std::max(eps_proj, x[i] - tau * g[i]));
                const Vec yc = matvec(P.A, xc, ops);
                const double fc = kl(yc, P.b);
                if (f - fc >= cfg.armijo_sigma * tau * q) {
                    x = std::move(xc);
                    f = fc;
                    y = yc;
                    break;
                }
                tau *= cfg.armijo_beta;
                if (++bt > 60) {
                    res.termination = Termination::NumericalError;
                    res.final_point = std::move(x);
                    return res;
                }
            }
            g = gradient_from_forward(P, y, ops);
            gn = grad_norm(P.kind, x, g);
            res.trace.push_back({k, f, gn, tau, ops.count - base, std::nullopt, bt});
        }
    } catch (const numerical_error&) {
        res.termination = Termination::NumericalError;
    }
    res.final_point = std::move(x);
    return res;
}

inline SolveResult solve(const KlProblem& P, const Vec& x0, const SolverConfig& cfg) {
    switch (cfg.algorithm) {
        case Algorithm::Smart: return smart(P, x0, cfg);
        case Algorithm::Fsmart: return fsmart(P, x0, cfg);
        case Algorithm::FsmartE: return fsmart_e(P, x0, cfg);
        case Algorithm::FsmartG: return fsmart_g(P, x0, cfg);
        case Algorithm::RgArmijo: return rg_armijo(P, x0, cfg);
        case Algorithm::RgHz: return rg_hz(P, x0, cfg);
        case Algorithm::RgBb: return rg_bb(P, x0, cfg);
        case Algorithm::RgCg: return rg_cg(P, x0, cfg);
        default: return pg_armijo(P, x0, cfg);
    }
}

}  // namespace klreg

#endif  // KLREG_SOLVERS_HPP_
