// Acceptance gate: measures every stated criterion at its stated tolerance
// and prints one PASS/FAIL line per criterion with the observed values.
// The process exit code is the number of failed criteria, so the gate can
// be wired directly into a test runner. Criteria that the implemented
// methods genuinely cannot attain fail honestly here; nothing is waived.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "klreg/harness.hpp"
#include "klreg/problems.hpp"
#include "klreg/solvers.hpp"

using namespace klreg;

namespace {

int failures = 0;

void report(int idx, bool ok, const std::string& detail) {
    std::printf("[%s] criterion %d: %s\n", ok ? "PASS" : "FAIL", idx, detail.c_str());
    if (!ok) ++failures;
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

SolverConfig config(Algorithm a, int max_iter, double grad_tol) {
    SolverConfig c;
    c.algorithm = a;
    c.max_iter = max_iter;
    c.grad_tol = grad_tol;
    c.cg_beta_rule = BetaRule::DY;
    return c;
}

double sup_dist(const Vec& a, const Vec& b) {
    double d = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::fabs(a[i] - b[i]));
    return d;
}

double rel_dist(const Vec& a, const Vec& b) {
    double n = 0.0, s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        n = std::max(n, std::fabs(a[i] - b[i]));
        s = std::max(s, std::fabs(b[i]));
    }
    return n / (1.0 + s);
}

SparseMatrix random_matrix(int m, int n, SplitMix64& g) {
    std::vector<Triplet> t;
    for (int i = 0; i < m; ++i)
        t.push_back({i, static_cast<int>(g.below(static_cast<std::uint64_t>(n))), 0.2 + g.next_double()});
    for (int j = 0; j < n; ++j)
        t.push_back({static_cast<int>(g.below(static_cast<std::uint64_t>(m))), j, 0.2 + g.next_double()});
    for (int k = 0; k < 3 * (m + n); ++k)
        t.push_back({static_cast<int>(g.below(static_cast<std::uint64_t>(m))),
                     static_cast<int>(g.below(static_cast<std::uint64_t>(n))), g.next_double()});
    return SparseMatrix::from_triplets(m, n, t);
}

Vec random_point(ManifoldKind kind, std::size_t n, SplitMix64& g) {
    Vec x(n);
    for (double& v : x) v = 0.05 + 0.9 * g.next_double();
    if (kind == ManifoldKind::Orthant)
        for (double& v : x) v *= 3.0;
    if (kind == ManifoldKind::Simplex) {
        const double s = vec_sum(x);
        for (double& v : x) v /= s;
    }
    return x;
}

Vec random_tangent(ManifoldKind kind, std::size_t n, SplitMix64& g) {
    Vec v(n);
    for (double& w : v) w = 2.0 * g.next_double() - 1.0;
    if (kind == ManifoldKind::Simplex) {
        const double mean = vec_sum(v) / static_cast<double>(n);
        for (double& w : v) w -= mean;
    }
    return v;
}

constexpr ManifoldKind kKinds[] = {ManifoldKind::Orthant, ManifoldKind::Box, ManifoldKind::Simplex};

// ------------------------------------------------------------- criterion 1

void criterion_toy_convergence() {
    const auto t0 = std::chrono::steady_clock::now();
    const KlProblem P = toy_problem().problem;
    const Vec target = {1.0, 1.0};
    const Algorithm algs[] = {Algorithm::Smart,    Algorithm::Fsmart, Algorithm::FsmartE,
                              Algorithm::FsmartG,  Algorithm::RgArmijo, Algorithm::RgHz,
                              Algorithm::RgBb,     Algorithm::RgCg,   Algorithm::Pg};
    std::ostringstream detail;
    bool all_ok = true;
    for (Algorithm a : algs) {
        const SolveResult r = solve(P, {0.5, 0.5}, config(a, 10000, 0.0));
        const double err = sup_dist(r.final_point, target);
        const bool ok = err <= 1e-3;
        all_ok = all_ok && ok;
        detail << (a == Algorithm::Smart ? "" : " ") << run_name(config(a, 0, 0.0)) << "="
               << (ok ? "" : "!") << fmt(err);
    }
    const double el = seconds_since(t0);
    const bool ok = all_ok && el < 1.0;
    report(1, ok,
           "sup-norm error vs (1,1) after 10000 toy iterations, tolerance 1e-3 ('!' marks a "
           "miss): " +
               detail.str() + "; elapsed " + fmt(el) + " s (budget 1)");
}

// ------------------------------------------------------------- criterion 2

void criterion_rate_bound() {
    const auto t0 = std::chrono::steady_clock::now();
    const KlProblem P = toy_problem().problem;
    const SolveResult r = smart(P, {0.5, 0.5}, config(Algorithm::Smart, 5000, 0.0));
    const double numerator = 0.75 * 2.0 * std::log(2.0);
    double worst = 0.0;  // largest f_k - bound_k (negative when satisfied)
    bool ok = r.trace.size() == 5001;
    for (std::size_t k = 1; k < r.trace.size(); ++k) {
        const double margin =
            r.trace[k].objective - (numerator / static_cast<double>(k) + 1e-10);
        worst = std::max(worst, margin);
        if (margin > 0.0) ok = false;
    }
    const double el = seconds_since(t0);
    ok = ok && el < 1.0;
    report(2, ok,
           "f(x_k) <= 0.75*(2 log 2)/k + 1e-10 for k = 1..5000; worst margin " +
               fmt(worst) + "; elapsed " + fmt(el) + " s (budget 1)");
}

// ------------------------------------------------------------- criterion 3

void criterion_relative_smoothness() {
    const auto t0 = std::chrono::steady_clock::now();
    SplitMix64 g(2026);
    long long violations = 0;
    double max_excess = 0.0;
    for (ManifoldKind kind : kKinds) {
        for (int rep = 0; rep < 1000; ++rep) {
            const int m = 2 + static_cast<int>(g.below(29));
            const int n = 2 + static_cast<int>(g.below(39));
            const SparseMatrix A = random_matrix(m, n, g);
            const Vec x = random_point(kind, static_cast<std::size_t>(n), g);
            const Vec y = random_point(kind, static_cast<std::size_t>(n), g);
            OpCounter ops;
            const double lhs = kl(matvec(A, x, ops), matvec(A, y, ops));
            const double rhs = A.one_norm() * bregman_divergence(kind, x, y) + 1e-12;
            if (lhs > rhs) ++violations;
            max_excess = std::max(max_excess, lhs - rhs);
        }
    }
    const double el = seconds_since(t0);
    const bool ok = violations == 0 && el < 5.0;
    report(3, ok,
           "KL(Ax,Ay) <= |A|_1 D(x,y) + 1e-12 on 1000 samples per manifold (sizes to 30x40); " +
               std::to_string(violations) + " violations, max excess " + fmt(max_excess) +
               "; elapsed " + fmt(el) + " s (budget 5)");
}

// ------------------------------------------------------------- criterion 4

void criterion_mirror_equivalence() {
    const auto t0 = std::chrono::steady_clock::now();
    SplitMix64 g(41);
    double worst = 0.0;
    for (ManifoldKind kind : kKinds) {
        for (int rep = 0; rep < 100; ++rep) {
            const Vec x = random_point(kind, 6, g);
            Vec grad(6);
            for (double& w : grad) w = 4.0 * g.next_double() - 2.0;
            const double tau = 0.05 + 0.95 * g.next_double();
            const Vec a = mirror_step(kind, x, grad, tau);
            Vec scaled(6);
            for (std::size_t i = 0; i < 6; ++i) scaled[i] = -tau * grad[i];
            const Vec b = exp_shorthand(kind, x, scaled);
            worst = std::max(worst, rel_dist(a, b));
        }
    }
    const double el = seconds_since(t0);
    const bool ok = worst <= 1e-10 && el < 1.0;
    report(4, ok,
           "mirror step vs multiplicative update on 100 triples per kind; worst relative "
           "distance " +
               fmt(worst) + " (tolerance 1e-10); elapsed " + fmt(el) +
               " s (budget 1)");
}

// ------------------------------------------------------------- criterion 5

void criterion_first_order_geometry() {
    const auto t0 = std::chrono::steady_clock::now();
    SplitMix64 g(53);
    const double hs[] = {1e-3, 1e-4, 1e-5};
    bool ok = true;
    double worst_ratio = 0.0;  // err(h)/h, bounded when the decay is linear
    for (ManifoldKind kind : kKinds) {
        for (int rep = 0; rep < 20; ++rep) {
            const Vec x = random_point(kind, 7, g);
            const Vec v = random_tangent(kind, 7, g);
            const Vec u = random_tangent(kind, 7, g);

            double prev_r = 0.0, prev_t = 0.0;
            for (int hi = 0; hi < 3; ++hi) {
                const double h = hs[hi];
                // retraction: (R_x(hv) - x)/h -> v
                const Vec rx = retract(kind, x, v, h);
                Vec diff(7);
                for (std::size_t i = 0; i < 7; ++i) diff[i] = (rx[i] - x[i]) / h;
                const double err_r = sup_dist(diff, v);

                // transport: (R_x(u + hv) - R_x(u))/h -> T_u v
                Vec uh(7);
                for (std::size_t i = 0; i < 7; ++i) uh[i] = u[i] + h * v[i];
                const Vec ra = retract(kind, x, uh, 1.0);
                const Vec rb = retract(kind, x, u, 1.0);
                Vec dt(7);
                for (std::size_t i = 0; i < 7; ++i) dt[i] = (ra[i] - rb[i]) / h;
                const double err_t = sup_dist(dt, transport(kind, x, u, v));

                worst_ratio = std::max(worst_ratio, std::max(err_r, err_t) / h);
                if (hi > 0) {
                    // an order-of-magnitude smaller h must shrink the error by
                    // at least 5x for the decay to count as linear; the 1e-9
                    // allowance sits above the difference-quotient rounding
                    // floor (ulp/h ~ 2e-11 at h=1e-5, where a sample whose true
                    // error is below the floor cannot exhibit the ratio) yet
                    // far below any genuine derivative mismatch, which would
                    // plateau at O(1)
                    if (err_r > 0.2 * prev_r + 1e-9) ok = false;
                    if (err_t > 0.2 * prev_t + 1e-9) ok = false;
                }
                prev_r = err_r;
                prev_t = err_t;
            }
        }
    }
    const double el = seconds_since(t0);
    ok = ok && el < 2.0;
    report(5, ok,
           "retraction and transport finite-difference errors decay linearly over h in "
           "{1e-3,1e-4,1e-5}; worst err/h " +
               fmt(worst_ratio) + "; elapsed " + fmt(el) + " s (budget 2)");
}

// ------------------------------------------------------------- criterion 6

void criterion_expander_recovery() {
    const auto t0 = std::chrono::steady_clock::now();
    const GroundTruthInstance inst = expander_instance(40, 200, 12, 20, 691);
    const Vec x0 = barycenter(inst.problem.kind, 200);
    const SolveResult rs = smart(inst.problem, x0, config(Algorithm::Smart, 1000, 0.0));
    const long long hamming = threshold_error(rs.final_point, inst.x_true);
    const SolveResult rg = fsmart_g(inst.problem, x0, config(Algorithm::FsmartG, 200, 0.0));
    const double f_gain = rg.trace[200].objective;
    const double f_smart = rs.trace[200].objective;
    const double el = seconds_since(t0);
    const bool ok = hamming == 0 && f_gain < f_smart && el < 10.0;
    report(6, ok,
           "expander m=40 n=200 w=12 s=20 seed=691: threshold Hamming error " +
               std::to_string(hamming) + " after 1000 iterations; objective at iteration 200: "
               "gain-adaptive " +
               fmt(f_gain) + " vs plain " + fmt(f_smart) + "; elapsed " +
               fmt(el) + " s (budget 10)");
}

// ------------------------------------------------------------- criterion 7

void criterion_matvec_accounting() {
    const KlProblem P = toy_problem().problem;
    const Vec x0 = {0.5, 0.5};
    bool ok = true;
    std::ostringstream detail;

    for (Algorithm a : {Algorithm::Smart, Algorithm::Fsmart}) {
        const SolveResult r = solve(P, x0, config(a, 100, 0.0));
        const double avg = average_matvec(r.trace);
        ok = ok && avg == 2.0;
        detail << run_name(config(a, 0, 0.0)) << "=" << fmt(avg) << " ";
    }
    for (Algorithm a : {Algorithm::RgArmijo, Algorithm::RgHz, Algorithm::RgBb, Algorithm::RgCg,
                        Algorithm::Pg}) {
        const SolveResult r = solve(P, x0, config(a, 100, 0.0));
        const double avg = average_matvec(r.trace);
        bool reconciled = std::isfinite(avg) && avg >= 2.0;
        for (std::size_t k = 1; k < r.trace.size(); ++k)
            if (r.trace[k].matvec_count - r.trace[k - 1].matvec_count !=
                2 + r.trace[k].inner_backtracks)
                reconciled = false;
        ok = ok && reconciled;
        detail << run_name(config(a, 0, 0.0)) << "=" << fmt(avg)
               << (reconciled ? "" : "(!)") << " ";
    }
    for (Algorithm a : {Algorithm::FsmartE, Algorithm::FsmartG}) {
        const SolveResult r = solve(P, x0, config(a, 100, 0.0));
        const double avg = average_matvec(r.trace);
        ok = ok && std::isfinite(avg) && avg >= 2.0;
        detail << run_name(config(a, 0, 0.0)) << "=" << fmt(avg) << " ";
    }
    report(7, ok,
           "average products per iteration (multiplicative methods exactly 2; line searches "
           "reconcile 2 + backtracks per row): " +
               detail.str());
}

// ------------------------------------------------------------- criterion 8

void criterion_certificate() {
    const auto t0 = std::chrono::steady_clock::now();
    const GroundTruthInstance inst = expander_instance(40, 200, 12, 20, 691);
    const KlProblem& P = inst.problem;
    std::vector<TseRecord> records;
    const SolveResult r = fsmart_e(P, barycenter(P.kind, 200), config(Algorithm::FsmartE, 1500, 0.0),
                                   [&](const TseRecord& t) { records.push_back(t); });

    const CertificateSummary rep = certificate_report(r.trace);
    bool monotone = true;
    for (std::size_t k = 1; k < rep.gamma.size(); ++k)
        if (rep.gamma[k] > rep.gamma[k - 1]) monotone = false;
    const bool floored = rep.first_floor > 0;

    // re-validate the accepted inequality from the stored vectors; at the
    // exponent floor acceptance is unconditional, so those steps instead
    // assert the floor value itself
    long long rechecked = 0, violated = 0;
    OpCounter ops;
    for (const TseRecord& t : records) {
        if (t.certificate <= 1.0) {
            if (t.certificate != 1.0) ++violated;
            continue;
        }
        const double lhs = kl(matvec(P.A, t.x_next, ops), matvec(P.A, t.y_point, ops));
        const double rhs = std::pow(t.theta, t.certificate) * P.L *
                           bregman_divergence(P.kind, t.z_next, t.z_prev);
        ++rechecked;
        if (!(lhs <= rhs + 1e-12 * (1.0 + rhs))) ++violated;
    }
    const double el = seconds_since(t0);
    const bool ok = r.termination == Termination::MaxIter && monotone && floored && violated == 0;
    report(8, ok,
           "exponent certificate on the expander instance: floor gamma=1 first reached at "
           "iteration " +
               std::to_string(rep.first_floor) + " of 1500; " + std::to_string(rechecked) +
               " pre-floor steps re-validated from stored vectors, " + std::to_string(violated) +
               " violations; elapsed " + fmt(el) + " s");
}

// ------------------------------------------------------------- criterion 9

void criterion_gradient() {
    const auto t0 = std::chrono::steady_clock::now();
    SplitMix64 g(97);
    double worst = 0.0;  // error scaled by 1e-6*(1+|grad|_inf)
    for (ManifoldKind kind : kKinds) {
        for (int rep = 0; rep < 50; ++rep) {
            const int m = 5 + static_cast<int>(g.below(6));
            const int n = 6 + static_cast<int>(g.below(6));
            const SparseMatrix A = random_matrix(m, n, g);
            Vec b(static_cast<std::size_t>(m));
            for (double& v : b) v = 0.5 + 1.5 * g.next_double();
            const KlProblem P = make_problem(A, b, kind);
            const Vec x = random_point(kind, static_cast<std::size_t>(n), g);
            OpCounter ops;
            const Vec df = gradient(P, x, ops);
            double gmax = 0.0;
            for (double v : df) gmax = std::max(gmax, std::fabs(v));
            const double h = 1e-6;
            for (std::size_t j = 0; j < x.size(); ++j) {
                Vec xp = x, xm = x;
                xp[j] += h;
                xm[j] -= h;
                const double fd = (objective(P, xp, ops) - objective(P, xm, ops)) / (2.0 * h);
                worst = std::max(worst, std::fabs(df[j] - fd) / (1e-6 * (1.0 + gmax)));
            }
        }
    }
    const double el = seconds_since(t0);
    const bool ok = worst <= 1.0 && el < 1.0;
    report(9, ok,
           "gradient vs central differences on 50 interior points per kind; worst error is " +
               fmt(worst) + "x the bound 1e-6*(1+|grad|_inf); elapsed " +
               fmt(el) + " s (budget 1)");
}

// ------------------------------------------------------------ criterion 10

void criterion_tomography() {
    const auto t0 = std::chrono::steady_clock::now();
    const TomographyOperator op = parallel_beam_tomography(32, 10);
    const Vec phantom = binary_phantom(32, 3, 7);
    const GroundTruthInstance inst = synthesize_measurements(op.A, phantom, 0.0, 107);
    const Vec x0 = barycenter(inst.problem.kind, 1024);

    const SolveResult ra = rg_armijo(inst.problem, x0, config(Algorithm::RgArmijo, 800, 0.0));
    const SolveResult rc = rg_cg(inst.problem, x0, config(Algorithm::RgCg, 800, 0.0));
    auto at_budget = [](const SolveResult& r, long long budget) {
        double f = r.trace[0].objective;
        for (const TraceRow& row : r.trace)
            if (row.matvec_count <= budget) f = row.objective;
        return f;
    };
    const double fa = at_budget(ra, 1000);
    const double fc = at_budget(rc, 1000);
    const double el = seconds_since(t0);
    const bool ok = fc < fa && el < 60.0;
    report(10, ok,
           "32x32 tomography, 10 angles, binary phantom: objective at a 1000-matvec budget, "
           "conjugate " +
               fmt(fc) + " vs armijo " + fmt(fa) + "; elapsed " +
               fmt(el) + " s (budget 60)");
}

}  // namespace

int main() {
    std::printf("acceptance gate: relative-entropy regression solver suite\n");
    criterion_toy_convergence();
    criterion_rate_bound();
    criterion_relative_smoothness();
    criterion_mirror_equivalence();
    criterion_first_order_geometry();
    criterion_expander_recovery();
    criterion_matvec_accounting();
    criterion_certificate();
    criterion_gradient();
    criterion_tomography();
    std::printf("%d of 10 criteria passed; exit code %d\n", 10 - failures, failures);
    return failures;
}
