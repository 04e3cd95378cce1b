// Command-line harness: generate instances, run single solves, compare the
// full algorithm set, and emit exponent-certificate reports.

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "klreg/harness.hpp"

namespace {

using klreg::Algorithm;
using klreg::BetaRule;
using klreg::GroundTruthInstance;
using klreg::ManifoldKind;
using klreg::SolverConfig;
using klreg::Vec;

struct Options {
    std::string problem = "toy";
    std::vector<std::string> algorithms;
    std::string manifold = "box";
    int max_iter = 1000;
    double tol = 1e-8;
    std::uint64_t seed = 1;
    std::string out;
    std::vector<std::string> config;
};

std::map<std::string, std::string> parse_config(const std::vector<std::string>& entries) {
    std::map<std::string, std::string> kv;
    auto add_line = [&kv](const std::string& line) {
        if (line.empty() || line[0] == '#') return;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw CLI::ValidationError("--config", "expected key=value, got '" + line + "'");
        kv[line.substr(0, eq)] = line.substr(eq + 1);
    };
    for (const std::string& entry : entries) {
        if (std::filesystem::exists(entry) && entry.find('=') == std::string::npos) {
            std::ifstream in(entry);
            std::string line;
            while (std::getline(in, line)) add_line(line);
        } else {
            add_line(entry);
        }
    }
    return kv;
}

template <typename T>
T lookup(const std::map<std::string, std::string>& kv, const std::string& key, T fallback) {
    const auto it = kv.find(key);
    if (it == kv.end()) return fallback;
    if constexpr (std::is_same_v<T, std::string>) {
        return it->second;
    } else if constexpr (std::is_same_v<T, std::uint64_t>) {
        return std::stoull(it->second);
    } else if constexpr (std::is_integral_v<T>) {
        return static_cast<T>(std::stoll(it->second));
    } else {
        return static_cast<T>(std::stod(it->second));
    }
}

BetaRule beta_rule_from_name(std::string name) {
    for (char& c : name) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (name == "FR") return BetaRule::FR;
    if (name == "PR") return BetaRule::PR;
    if (name == "DY") return BetaRule::DY;
    if (name == "HS") return BetaRule::HS;
    if (name == "HZ") return BetaRule::HZ;
    if (name == "OV") return BetaRule::OV;
    throw CLI::ValidationError("algorithm", "unknown conjugate gradient rule '" + name + "'");
}

SolverConfig make_config(const std::string& algorithm, const Options& opt,
                         const std::map<std::string, std::string>& kv) {
    SolverConfig cfg;
    cfg.max_iter = opt.max_iter;
    cfg.grad_tol = opt.tol;
    if (algorithm == "smart") cfg.algorithm = Algorithm::Smart;
    else if (algorithm == "fsmart") cfg.algorithm = Algorithm::Fsmart;
    else if (algorithm == "fsmart-e") cfg.algorithm = Algorithm::FsmartE;
    else if (algorithm == "fsmart-g") cfg.algorithm = Algorithm::FsmartG;
    else if (algorithm == "rg-armijo") cfg.algorithm = Algorithm::RgArmijo;
    else if (algorithm == "rg-hz") cfg.algorithm = Algorithm::RgHz;
    else if (algorithm == "rg-bb") cfg.algorithm = Algorithm::RgBb;
    else if (algorithm == "pg") cfg.algorithm = Algorithm::Pg;
    else if (algorithm.rfind("rg-cg", 0) == 0) {
        cfg.algorithm = Algorithm::RgCg;
        if (algorithm.size() > 6 && algorithm[5] == '-')
            cfg.cg_beta_rule = beta_rule_from_name(algorithm.substr(6));
    } else {
        throw CLI::ValidationError("--algorithm", "unknown algorithm '" + algorithm + "'");
    }
    cfg.armijo_sigma = lookup(kv, "armijo_sigma", cfg.armijo_sigma);
    cfg.armijo_beta = lookup(kv, "armijo_beta", cfg.armijo_beta);
    cfg.init_step = lookup(kv, "init_step", cfg.init_step);
    cfg.hz_sigma2 = lookup(kv, "hz_sigma2", cfg.hz_sigma2);
    cfg.hz_rho = lookup(kv, "hz_rho", cfg.hz_rho);
    cfg.bb_gamma_min = lookup(kv, "bb_gamma_min", cfg.bb_gamma_min);
    cfg.bb_gamma_max = lookup(kv, "bb_gamma_max", cfg.bb_gamma_max);
    cfg.bb_memory = lookup(kv, "bb_memory", cfg.bb_memory);
    cfg.e_gamma0 = lookup(kv, "e_gamma0", cfg.e_gamma0);
    cfg.e_gamma_min = lookup(kv, "e_gamma_min", cfg.e_gamma_min);
    cfg.e_delta = lookup(kv, "e_delta", cfg.e_delta);
    cfg.g_rho = lookup(kv, "g_rho", cfg.g_rho);
    cfg.g_gamma = lookup(kv, "g_gamma", cfg.g_gamma);
    cfg.g_gain_min = lookup(kv, "g_gain_min", cfg.g_gain_min);
    cfg.cg_mu = lookup(kv, "cg_mu", cfg.cg_mu);
    cfg.newton_tol = lookup(kv, "newton_tol", cfg.newton_tol);
    if (kv.count("cg_beta_rule")) cfg.cg_beta_rule = beta_rule_from_name(kv.at("cg_beta_rule"));
    return cfg;
}

GroundTruthInstance build_instance(const Options& opt,
                                   const std::map<std::string, std::string>& kv) {
    const ManifoldKind kind = klreg::manifold_from_name(opt.manifold);
    if (opt.problem == "toy") {
        GroundTruthInstance inst = klreg::toy_problem();
        if (kind != ManifoldKind::Box) inst.problem = klreg::make_problem(inst.problem.A, inst.problem.b, kind);
        return inst;
    }
    if (opt.problem == "expander") {
        GroundTruthInstance inst = klreg::expander_instance(
            lookup(kv, "m", 40), lookup(kv, "n", 200), lookup(kv, "col_weight", 12),
            lookup(kv, "sparsity", 20), opt.seed);
        if (kind != ManifoldKind::Box) inst.problem = klreg::make_problem(inst.problem.A, inst.problem.b, kind);
        return inst;
    }
    if (opt.problem == "tomo" || opt.problem == "blur") {
        const int size = lookup(kv, "image_size", 32);
        klreg::SparseMatrix A =
            opt.problem == "tomo"
                ? klreg::parallel_beam_tomography(size, lookup(kv, "n_angles", 10)).A
                : klreg::gaussian_blur_operator(size, size, lookup(kv, "mask", 9),
                                                lookup(kv, "sigma", 2.0));
        const Vec phantom = klreg::binary_phantom(size, lookup(kv, "n_rects", 3), opt.seed);
        GroundTruthInstance inst = klreg::synthesize_measurements(
            A, phantom, lookup(kv, "noise_level", 0.0), lookup<std::uint64_t>(kv, "noise_seed", opt.seed + 100),
            kind);
        inst.seed = opt.seed;
        return inst;
    }
    if (opt.problem == "from-files") {
        if (!kv.count("dir"))
            throw CLI::ValidationError("--problem", "from-files needs --config dir=<path>");
        GroundTruthInstance inst = klreg::load_instance(kv.at("dir"));
        if (kind != inst.problem.kind) inst.problem = klreg::make_problem(inst.problem.A, inst.problem.b, kind);
        return inst;
    }
    throw CLI::ValidationError("--problem", "unknown problem '" + opt.problem + "'");
}

std::vector<std::string> default_algorithms() {
    return {"smart",  "fsmart", "fsmart-e", "fsmart-g", "rg-armijo",
            "rg-hz",  "rg-bb",  "rg-cg-dy", "pg"};
}

void add_common(CLI::App* cmd, Options& opt) {
    cmd->add_option("--problem", opt.problem, "toy | expander | tomo | blur | from-files");
    cmd->add_option("--manifold", opt.manifold, "orthant | box | simplex")
        ->check(CLI::IsMember({"orthant", "box", "simplex"}));
    cmd->add_option("--max-iter", opt.max_iter, "iteration budget");
    cmd->add_option("--tol", opt.tol, "gradient-norm stopping tolerance");
    cmd->add_option("--seed", opt.seed, "instance seed");
    cmd->add_option("--out", opt.out, "output file or directory");
    cmd->add_option("--config", opt.config, "key=value pair or file of key=value lines")
        ->take_all();
}

int run_generate(const Options& opt) {
    const auto kv = parse_config(opt.config);
    const GroundTruthInstance inst = build_instance(opt, kv);
    const std::string dir = opt.out.empty() ? "instance" : opt.out;
    klreg::save_instance(dir, inst);
    if ((opt.problem == "tomo" || opt.problem == "blur") && !inst.x_true.empty()) {
        const int size = lookup(kv, "image_size", 32);
        klreg::atomic_write_text(std::filesystem::path(dir) / "phantom.pgm",
                                 klreg::pgm_encode(inst.x_true, size, size));
    }
    std::cout << "wrote " << dir << " (" << inst.problem.A.rows() << "x" << inst.problem.A.cols()
              << ", " << inst.problem.A.nnz() << " entries)\n";
    return 0;
}

int run_solve(const Options& opt) {
    const auto kv = parse_config(opt.config);
    const GroundTruthInstance inst = build_instance(opt, kv);
    const std::string algo = opt.algorithms.empty() ? "smart" : opt.algorithms.front();
    const SolverConfig cfg = make_config(algo, opt, kv);
    const Vec x0 = klreg::barycenter(inst.problem.kind, static_cast<std::size_t>(inst.problem.A.cols()));
    const klreg::SolveResult res = klreg::solve(inst.problem, x0, cfg);
    double f_ref = res.trace.empty() ? 0.0 : res.trace.front().objective;
    for (const klreg::TraceRow& row : res.trace) f_ref = std::min(f_ref, row.objective);
    const std::string csv = klreg::trace_csv(res.trace, klreg::relative_history(res.trace, f_ref));
    if (opt.out.empty())
        std::cout << csv;
    else
        klreg::atomic_write_text(opt.out, csv);
    std::cerr << algo << ": " << klreg::termination_name(res.termination) << " after "
              << (res.trace.empty() ? 0 : res.trace.back().iter) << " iterations, objective "
              << (res.trace.empty() ? 0.0 : res.trace.back().objective) << "\n";
    return res.termination == klreg::Termination::NumericalError ? 1 : 0;
}

int run_compare(const Options& opt) {
    const auto kv = parse_config(opt.config);
    const GroundTruthInstance inst = build_instance(opt, kv);
    const std::vector<std::string> names =
        opt.algorithms.empty() ? default_algorithms() : opt.algorithms;
    std::vector<SolverConfig> cfgs;
    for (const std::string& name : names) {
        if (name == "pg" && inst.problem.kind != ManifoldKind::Box) continue;
        cfgs.push_back(make_config(name, opt, kv));
    }
    const klreg::ComparisonReport rep =
        klreg::run_experiment(inst, cfgs, opt.out.empty() ? "compare_out" : opt.out);
    for (std::size_t i = 0; i < rep.runs.size(); ++i) {
        const auto& out = rep.runs[i];
        std::cout << out.name << ": " << klreg::termination_name(out.result.termination);
        if (!out.result.trace.empty())
            std::cout << ", objective " << out.result.trace.back().objective << ", avg matvec "
                      << rep.avg_matvec[i];
        if (rep.hamming[i] >= 0) std::cout << ", threshold error " << rep.hamming[i];
        if (!out.error.empty()) std::cout << ", error: " << out.error;
        std::cout << "\n";
    }
    return 0;
}

int run_certify(const Options& opt) {
    const auto kv = parse_config(opt.config);
    const GroundTruthInstance inst = build_instance(opt, kv);
    SolverConfig cfg = make_config("fsmart-e", opt, kv);
    const Vec x0 = klreg::barycenter(inst.problem.kind, static_cast<std::size_t>(inst.problem.A.cols()));
    const klreg::SolveResult res = klreg::fsmart_e(inst.problem, x0, cfg);
    const klreg::CertificateSummary rep = klreg::certificate_report(res.trace, cfg.e_gamma_min);
    const std::string csv = klreg::certificate_csv({{opt.problem, rep}});
    if (opt.out.empty())
        std::cout << csv;
    else
        klreg::atomic_write_text(opt.out, csv);
    std::cerr << "certificate floor " << cfg.e_gamma_min << " first reached at iteration "
              << rep.first_floor << " (" << klreg::termination_name(res.termination) << ")\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"relative-entropy regression benchmark harness"};
    app.require_subcommand(1);
    Options opt;

    CLI::App* generate = app.add_subcommand("generate", "write a seeded instance to a directory");
    add_common(generate, opt);

    CLI::App* solve = app.add_subcommand("solve", "run a single algorithm and emit its trace CSV");
    add_common(solve, opt);
    solve->add_option("--algorithm", opt.algorithms, "algorithm name")->take_all();

    CLI::App* compare = app.add_subcommand("compare", "run an algorithm set and emit trace CSVs");
    add_common(compare, opt);
    compare->add_option("--algorithm", opt.algorithms, "algorithm names")->take_all();

    CLI::App* certify = app.add_subcommand("certify", "exponent certificate report");
    add_common(certify, opt);

    try {
        app.parse(argc, argv);
        if (generate->parsed()) return run_generate(opt);
        if (solve->parsed()) return run_solve(opt);
        if (compare->parsed()) return run_compare(opt);
        if (certify->parsed()) return run_certify(opt);
    } catch (const CLI::ParseError& e) {
        return app.exit(e);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
