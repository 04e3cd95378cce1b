#ifndef KLREG_HARNESS_HPP_
#define KLREG_HARNESS_HPP_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "klreg/manifold.hpp"
#include "klreg/problems.hpp"
#include "klreg/solvers.hpp"

// Experiment front end: run algorithm comparisons from the uninformative
// barycenter, normalize objective histories, and serialize traces, instances
// and images in diff-friendly text formats. All file writes go through a
// write-temp-then-rename so readers never observe partial files.

namespace klreg {

namespace detail {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline void atomic_write_text(const std::filesystem::path& path, const std::string& content) {
    namespace fs = std::filesystem;
    if (path.has_parent_path()) fs::create_directories(path.parent_path());
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open " + tmp.string() + " for writing");
        out << content;
        if (!out.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

// r_k = (f_k - f_ref)/(f_0 - f_ref) clamped to [0,1]; a trace that starts at
// f_ref has nothing to normalize and reads as all zero
inline std::vector<double> relative_history(const std::vector<TraceRow>& trace, double f_ref) {
    std::vector<double> r(trace.size(), 0.0);
    if (trace.empty()) return r;
    const double denom = trace.front().objective - f_ref;
    if (denom == 0.0) return r;
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const double v = (trace[i].objective - f_ref) / denom;
        r[i] = std::min(1.0, std::max(0.0, v));
    }
    return r;
}

// Hamming distance between the entrywise threshold of x at 0.5 (ties count
// as one) and a binary reference
inline long long threshold_error(const Vec& x, const Vec& x_true) {
    if (x.size() != x_true.size()) throw std::invalid_argument("threshold_error: length mismatch");
    long long h = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const bool bit = x[i] >= 0.5;
        const bool ref = x_true[i] != 0.0;
        if (bit != ref) ++h;
    }
    return h;
}

inline double average_matvec(const std::vector<TraceRow>& trace) {
    if (trace.empty()) throw std::invalid_argument("average_matvec: empty trace");
    const long long iters = trace.back().iter;
    if (iters == 0) return 0.0;
    return static_cast<double>(trace.back().matvec_count) / static_cast<double>(iters);
}

struct CertificateSummary {
    std::vector<double> gamma;    // certificate per trace row, row 0 first
    long long first_floor = -1;   // first iteration with gamma at the floor
};

inline CertificateSummary certificate_report(const std::vector<TraceRow>& trace,
                                             double gamma_min = 1.0) {
    CertificateSummary rep;
    for (const TraceRow& row : trace) {
        if (!row.certificate)
            throw std::invalid_argument("certificate_report: trace row without certificate");
        rep.gamma.push_back(*row.certificate);
        if (rep.first_floor < 0 && *row.certificate <= gamma_min) rep.first_floor = row.iter;
    }
    return rep;
}

inline std::string certificate_csv(const std::vector<std::pair<std::string, CertificateSummary>>& table) {
    std::ostringstream out;
    out << "instance,iter,gamma,is_first_floor\n";
    for (const auto& [name, rep] : table)
        for (std::size_t k = 0; k < rep.gamma.size(); ++k)
            out << name << ',' << k << ',' << detail::format_double(rep.gamma[k]) << ','
                << (rep.first_floor == static_cast<long long>(k) ? 1 : 0) << '\n';
    return out.str();
}

inline std::string trace_csv(const std::vector<TraceRow>& trace, const std::vector<double>& rel) {
    if (rel.size() != trace.size()) throw std::invalid_argument("trace_csv: history length mismatch");
    std::ostringstream out;
    out << "iter,objective,rel_objective,grad_norm,step_size,matvec_count,certificate,inner_backtracks\n";
    for (std::size_t i = 0; i < trace.size(); ++i) {
        const TraceRow& r = trace[i];
        out << r.iter << ',' << detail::format_double(r.objective) << ','
            << detail::format_double(rel[i]) << ',' << detail::format_double(r.grad_norm) << ','
            << detail::format_double(r.step_size) << ',' << r.matvec_count << ',';
        if (r.certificate) out << detail::format_double(*r.certificate);
        out << ',' << r.inner_backtracks << '\n';
    }
    return out.str();
}

// ---------------------------------------------------------------- images --

inline std::string pgm_encode(const Vec& img, int width, int height) {
    if (static_cast<std::size_t>(width) * static_cast<std::size_t>(height) != img.size())
        throw std::invalid_argument("pgm_encode: dimensions do not match vector length");
    std::ostringstream out;
    out << "P2\n" << width << ' ' << height << "\n255\n";
    for (int r = 0; r < height; ++r) {
        for (int c = 0; c < width; ++c) {
            const double v = std::min(1.0, std::max(0.0, img[static_cast<std::size_t>(r * width + c)]));
            out << static_cast<int>(std::lround(v * 255.0));
            out << (c + 1 == width ? '\n' : ' ');
        }
    }
    return out.str();
}

inline Vec pgm_decode(std::istream& in, int& width, int& height) {
    std::string magic;
    in >> magic;
    if (magic != "P2") throw std::runtime_error("pgm_decode: not an ASCII graymap");
    int maxval = 0;
    if (!(in >> width >> height >> maxval)) throw std::runtime_error("pgm_decode: bad header");
    if (width <= 0 || height <= 0 || maxval <= 0) throw std::runtime_error("pgm_decode: bad header");
    Vec img(static_cast<std::size_t>(width) * static_cast<std::size_t>(height));
    for (double& v : img) {
        long pix = 0;
        if (!(in >> pix)) throw std::runtime_error("pgm_decode: truncated pixel data");
        if (pix < 0 || pix > maxval) throw std::runtime_error("pgm_decode: pixel out of range");
        v = static_cast<double>(pix) / static_cast<double>(maxval);
    }
    return img;
}

// ----------------------------------------------------- instance directory --

inline std::string vector_text(const Vec& v) {
    std::ostringstream out;
    for (double x : v) out << detail::format_double(x) << '\n';
    return out.str();
}

inline Vec read_vector_text(std::istream& in) {
    Vec v;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        v.push_back(std::stod(line));
    }
    return v;
}

inline void save_instance(const std::filesystem::path& dir, const GroundTruthInstance& inst) {
    std::filesystem::create_directories(dir);
    std::ostringstream mat;
    to_coordinate_text(mat, inst.problem.A);
    atomic_write_text(dir / "A.mtx", mat.str());
    atomic_write_text(dir / "b.txt", vector_text(inst.problem.b));
    if (!inst.b_clean.empty()) atomic_write_text(dir / "b_clean.txt", vector_text(inst.b_clean));
    if (!inst.x_true.empty()) atomic_write_text(dir / "x_true.txt", vector_text(inst.x_true));
    std::ostringstream meta;
    meta << "manifold=" << manifold_name(inst.problem.kind) << '\n'
         << "noise_level=" << detail::format_double(inst.noise_level) << '\n'
         << "seed=" << inst.seed << '\n';
    atomic_write_text(dir / "meta.txt", meta.str());
}

inline GroundTruthInstance load_instance(const std::filesystem::path& dir) {
    auto read_file = [&dir](const char* name, bool required) -> Vec {
        std::ifstream in(dir / name);
        if (!in) {
            if (required) throw std::runtime_error("missing " + (dir / name).string());
            return {};
        }
        return read_vector_text(in);
    };
    std::ifstream mat(dir / "A.mtx");
    if (!mat) throw std::runtime_error("missing " + (dir / "A.mtx").string());
    const SparseMatrix A = from_coordinate_text(mat);
    GroundTruthInstance inst;
    ManifoldKind kind = ManifoldKind::Box;
    std::ifstream meta(dir / "meta.txt");
    std::string line;
    while (meta && std::getline(meta, line)) {
        const auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        const std::string key = line.substr(0, eq), val = line.substr(eq + 1);
        if (key == "manifold") kind = manifold_from_name(val);
        else if (key == "noise_level") inst.noise_level = std::stod(val);
        else if (key == "seed") inst.seed = std::stoull(val);
    }
    inst.problem = make_problem(A, read_file("b.txt", true), kind);
    inst.b_clean = read_file("b_clean.txt", false);
    inst.x_true = read_file("x_true.txt", false);
    return inst;
}

// ------------------------------------------------------------ experiments --

struct AlgorithmOutcome {
    std::string name;
    SolveResult result;
    std::string error;  // nonempty when the run aborted outside the solver loop
};

struct ComparisonReport {
    std::vector<AlgorithmOutcome> runs;
    double f_best = 0.0;
    std::vector<std::vector<double>> relative;   // aligned with runs
    std::vector<double> avg_matvec;              // aligned with runs
    std::vector<long long> hamming;              // -1 when no binary truth
};

inline std::string run_name(const SolverConfig& cfg) {
    std::string name = algorithm_name(cfg.algorithm);
    if (cfg.algorithm == Algorithm::RgCg) {
        std::string rule = beta_rule_name(cfg.cg_beta_rule);
        for (char& c : rule) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
        name += "-" + rule;
    }
    return name;
}

/**
 * Run every configured algorithm on the instance from the manifold
 * barycenter, normalize all histories against the best objective seen by
 * any of them, and (when output_dir is nonempty) write one trace CSV per
 * algorithm plus a summary CSV. A solver failure is recorded in its
 * outcome, never fatal to the other runs.
 */
inline ComparisonReport run_experiment(const GroundTruthInstance& inst,
                                       const std::vector<SolverConfig>& algorithms,
                                       const std::string& output_dir = {}) {
    if (algorithms.empty()) throw std::invalid_argument("run_experiment: no algorithms configured");
    const KlProblem& P = inst.problem;
    const Vec x0 = barycenter(P.kind, static_cast<std::size_t>(P.A.cols()));
    ComparisonReport rep;
    for (const SolverConfig& cfg : algorithms) {
        AlgorithmOutcome out;
        out.name = run_name(cfg);
        try {
            out.result = solve(P, x0, cfg);
        } catch (const std::exception& e) {
            out.result.termination = Termination::NumericalError;
            out.error = e.what();
        }
        rep.runs.push_back(std::move(out));
    }
    bool seen = false;
    for (const AlgorithmOutcome& out : rep.runs)
        for (const TraceRow& row : out.result.trace) {
            if (!seen || row.objective < rep.f_best) rep.f_best = row.objective;
            seen = true;
        }
    const bool binary_truth =
        !inst.x_true.empty() &&
        std::all_of(inst.x_true.begin(), inst.x_true.end(),
                    [](double v) { return v == 0.0 || v == 1.0; });
    for (const AlgorithmOutcome& out : rep.runs) {
        rep.relative.push_back(relative_history(out.result.trace, rep.f_best));
        rep.avg_matvec.push_back(out.result.trace.empty() ? 0.0 : average_matvec(out.result.trace));
        rep.hamming.push_back(binary_truth && !out.result.final_point.empty()
                                  ? threshold_error(out.result.final_point, inst.x_true)
                                  : -1);
    }
    if (!output_dir.empty()) {
        const std::filesystem::path dir(output_dir);
        std::ostringstream summary;
        summary << "algorithm,iterations,final_objective,final_grad_norm,avg_matvec,"
                   "threshold_error,termination,error\n";
        for (std::size_t i = 0; i < rep.runs.size(); ++i) {
            const AlgorithmOutcome& out = rep.runs[i];
            atomic_write_text(dir / (out.name + ".csv"),
                              trace_csv(out.result.trace, rep.relative[i]));
            summary << out.name << ',';
            if (!out.result.trace.empty()) {
                const TraceRow& last = out.result.trace.back();
                summary << last.iter << ',' << detail::format_double(last.objective) << ','
                        << detail::format_double(last.grad_norm) << ','
                        << detail::format_double(rep.avg_matvec[i]) << ',';
            } else {
                summary << "0,,,,";
            }
            if (rep.hamming[i] >= 0) summary << rep.hamming[i];
            summary << ',' << termination_name(out.result.termination) << ',' << out.error << '\n';
        }
        atomic_write_text(dir / "summary.csv", summary.str());
    }
    return rep;
}

}  // namespace klreg

#endif  // KLREG_HARNESS_HPP_
