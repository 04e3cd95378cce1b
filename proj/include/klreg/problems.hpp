#ifndef KLREG_PROBLEMS_HPP_
#define KLREG_PROBLEMS_HPP_

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <utility>
#include <vector>

#include "klreg/objective.hpp"
#include "klreg/rng.hpp"
#include "klreg/sparse.hpp"
#include "klreg/vec.hpp"

// Seeded desk-scale experiment generators. All randomness flows through
// SplitMix64 so instances are reproducible bit-for-bit across platforms.

namespace klreg {

struct GroundTruthInstance {
    KlProblem problem;
    Vec x_true;
    Vec b_clean;
    double noise_level = 0.0;
    std::uint64_t seed = 0;
};

// measurements equal to zero are lifted to 1e-6 * max(b_clean) so the
// objective's positivity requirement on b holds
inline Vec positivity_floor(const Vec& b, const Vec& b_clean) {
    const double bf = 1e-6 * *std::max_element(b_clean.begin(), b_clean.end());
    Vec out = b;
    for (double& v : out)
        if (v <= 0.0) v = bf;
    return out;
}

inline GroundTruthInstance toy_problem() {
    const SparseMatrix A = SparseMatrix::from_triplets(1, 2, {{0, 0, 0.25}, {0, 1, 0.75}});
    GroundTruthInstance inst;
    inst.problem = make_problem(A, Vec{1.0}, ManifoldKind::Box);
    inst.x_true = {1.0, 1.0};
    inst.b_clean = {1.0};
    return inst;
}

// K distinct values from {0,...,N-1} via partial Fisher-Yates, returned sorted
inline std::vector<int> sample_distinct(SplitMix64& g, int N, int K) {
    std::vector<int> pool(N);
    std::iota(pool.begin(), pool.end(), 0);
    for (int i = 0; i < K; ++i) {
        const int j = i + static_cast<int>(g.below(static_cast<std::uint64_t>(N - i)));
        std::swap(pool[i], pool[j]);
    }
    pool.resize(K);
    std::sort(pool.begin(), pool.end());
    return pool;
}

/**
 * Random bipartite-expander adjacency matrix: n columns with exactly
 * col_weight distinct ones each, redrawn wholesale until every row is
 * covered, plus a binary ground truth supported on `sparsity` seeded
 * columns. The clean measurement A x_true is integer-valued; zero entries
 * get the positivity floor.
 */
inline GroundTruthInstance expander_instance(int m, int n, int col_weight, int sparsity,
                                             std::uint64_t seed) {
    if (col_weight > m) throw std::invalid_argument("expander_instance: col_weight > m");
    if (sparsity > n) throw std::invalid_argument("expander_instance: sparsity > n");
    if (m <= 0 || n <= 0 || col_weight <= 0 || sparsity <= 0)
        throw std::invalid_argument("expander_instance: parameters must be positive");
    SplitMix64 g(seed);
    std::vector<std::vector<int>> cols;
    for (;;) {
        cols.assign(static_cast<std::size_t>(n), {});
        std::vector<char> covered(static_cast<std::size_t>(m), 0);
        for (int j = 0; j < n; ++j) {
            cols[static_cast<std::size_t>(j)] = sample_distinct(g, m, col_weight);
            for (int r : cols[static_cast<std::size_t>(j)]) covered[static_cast<std::size_t>(r)] = 1;
        }
        if (std::find(covered.begin(), covered.end(), 0) == covered.end()) break;
    }
    std::vector<Triplet> trips;
    trips.reserve(static_cast<std::size_t>(n) * static_cast<std::size_t>(col_weight));
    for (int j = 0; j < n; ++j)
        for (int r : cols[static_cast<std::size_t>(j)]) trips.push_back({r, j, 1.0});
    const SparseMatrix A = SparseMatrix::from_triplets(m, n, trips);

    const std::vector<int> support = sample_distinct(g, n, sparsity);
    Vec x_true(static_cast<std::size_t>(n), 0.0);
    for (int j : support) x_true[static_cast<std::size_t>(j)] = 1.0;
    OpCounter scratch;
    const Vec b_clean = matvec(A, x_true, scratch);

    GroundTruthInstance inst;
    inst.problem = make_problem(A, positivity_floor(b_clean, b_clean), ManifoldKind::Box);
    inst.x_true = std::move(x_true);
    inst.b_clean = b_clean;
    inst.seed = seed;
    return inst;
}

struct TomographyOperator {
    SparseMatrix A;
    // (angle index, detector index) of each retained row; rays that miss the
    // image entirely are dropped
    std::vector<std::pair<int, int>> ray_map;
};

/**
 * Parallel-beam system matrix on an image_size x image_size grid of unit
 * pixels centered at the origin. Angles are equidistant in [0,pi); each
 * angle carries image_size rays offset along the detector axis; the entry
 * for (ray, pixel) is the exact chord length from slab clipping.
 */
inline TomographyOperator parallel_beam_tomography(int image_size, int n_angles) {
    if (image_size < 2) throw std::invalid_argument("parallel_beam_tomography: image_size < 2");
    if (n_angles < 1) throw std::invalid_argument("parallel_beam_tomography: n_angles < 1");
    const int s = image_size;
    const double pi = std::acos(-1.0);
    std::vector<Triplet> trips;
    std::vector<std::pair<int, int>> ray_map;
    int row = 0;
    for (int a = 0; a < n_angles; ++a) {
        const double phi = pi * a / n_angles;
        const double dx = std::cos(phi), dy = std::sin(phi);
        const double ex = -std::sin(phi), ey = std::cos(phi);
        for (int j = 0; j < s; ++j) {
            const double t = j - (s - 1) / 2.0;
            const double px = t * ex, py = t * ey;
            bool hit = false;
            for (int r = 0; r < s; ++r) {
                for (int c = 0; c < s; ++c) {
                    const double bounds[2][3] = {{px, dx, c - s / 2.0}, {py, dy, r - s / 2.0}};
                    double umin = -std::numeric_limits<double>::infinity();
                    double umax = std::numeric_limits<double>::infinity();
                    bool ok = true;
                    for (const auto& sl : bounds) {
                        const double p0 = sl[0], dd = sl[1], lo = sl[2], hi = sl[2] + 1.0;
                        if (std::fabs(dd) < 1e-14) {
                            if (p0 < lo || p0 > hi) {
                                ok = false;
                                break;
                            }
                        } else {
                            double u0 = (lo - p0) / dd, u1 = (hi - p0) / dd;
                            if (u0 > u1) std::swap(u0, u1);
                            umin = std::max(umin, u0);
                            umax = std::min(umax, u1);
                        }
                    }
                    if (ok && umax - umin > 1e-12) {
                        trips.push_back({row, r * s + c, umax - umin});
                        hit = true;
                    }
                }
            }
            if (hit) {
                ray_map.emplace_back(a, j);
                ++row;
            }
        }
    }
    return {SparseMatrix::from_triplets(row, s * s, trips), std::move(ray_map)};
}

/**
 * Truncated, sum-normalized Gaussian convolution on an h x w image with
 * zero-padding at the borders: row i of the (hw) x (hw) matrix gathers the
 * kernel weights of pixel i's in-bounds neighbors.
 */
inline SparseMatrix gaussian_blur_operator(int height, int width, int mask, double sigma) {
    if (mask % 2 == 0 || mask <= 0) throw std::invalid_argument("gaussian_blur_operator: mask must be odd");
    if (mask > std::min(height, width))
        throw std::invalid_argument("gaussian_blur_operator: mask exceeds image extent");
    if (!(sigma > 0.0)) throw std::invalid_argument("gaussian_blur_operator: sigma must be positive");
    const int rad = (mask - 1) / 2;
    std::vector<double> ker(static_cast<std::size_t>(mask) * static_cast<std::size_t>(mask));
    double sum = 0.0;
    for (int dy = -rad; dy <= rad; ++dy)
        for (int dx = -rad; dx <= rad; ++dx) {
            const double v = std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
            ker[static_cast<std::size_t>((dy + rad) * mask + (dx + rad))] = v;
            sum += v;
        }
    for (double& v : ker) v /= sum;
    std::vector<Triplet> trips;
    for (int r = 0; r < height; ++r)
        for (int c = 0; c < width; ++c) {
            const int i = r * width + c;
            for (int dy = -rad; dy <= rad; ++dy)
                for (int dx = -rad; dx <= rad; ++dx) {
                    const int rr = r + dy, cc = c + dx;
                    if (rr >= 0 && rr < height && cc >= 0 && cc < width)
                        trips.push_back({i, rr * width + cc,
                                         ker[static_cast<std::size_t>((dy + rad) * mask + (dx + rad))]});
                }
        }
    return SparseMatrix::from_triplets(height * width, height * width, trips);
}

// union of n_rects seeded axis-aligned rectangles, returned as a row-major
// binary image vector of length size*size
inline Vec binary_phantom(int size, int n_rects, std::uint64_t seed) {
    if (size < 2) throw std::invalid_argument("binary_phantom: size < 2");
    SplitMix64 g(seed);
    Vec img(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), 0.0);
    for (int k = 0; k < n_rects; ++k) {
        const int w = 1 + static_cast<int>(g.below(static_cast<std::uint64_t>(size / 2)));
        const int h = 1 + static_cast<int>(g.below(static_cast<std::uint64_t>(size / 2)));
        const int x0 = static_cast<int>(g.below(static_cast<std::uint64_t>(size - w + 1)));
        const int y0 = static_cast<int>(g.below(static_cast<std::uint64_t>(size - h + 1)));
        for (int y = y0; y < y0 + h; ++y)
            for (int x = x0; x < x0 + w; ++x) img[static_cast<std::size_t>(y * size + x)] = 1.0;
    }
    return img;
}

/**
 * b = A x_true + e with e drawn componentwise uniform in
 * [-noise_level, noise_level] * mean(b_clean); nonpositive results are
 * lifted to the positivity floor.
 */
inline GroundTruthInstance synthesize_measurements(const SparseMatrix& A, const Vec& x_true,
                                                   double noise_level, std::uint64_t seed,
                                                   ManifoldKind kind = ManifoldKind::Box) {
    if (noise_level < 0.0) throw std::invalid_argument("synthesize_measurements: negative noise_level");
    for (double v : x_true)
        if (v < 0.0 || v > 1.0) throw std::invalid_argument("synthesize_measurements: x_true outside [0,1]");
    OpCounter scratch;
    const Vec b_clean = matvec(A, x_true, scratch);
    SplitMix64 g(seed);
    const double scale = noise_level * vec_sum(b_clean) / static_cast<double>(b_clean.size());
    Vec b(b_clean.size());
    for (std::size_t i = 0; i < b.size(); ++i)
        b[i] = b_clean[i] + (2.0 * g.next_double() - 1.0) * scale;
    GroundTruthInstance inst;
    inst.problem = make_problem(A, positivity_floor(b, b_clean), kind);
    inst.x_true = x_true;
    inst.b_clean = b_clean;
    inst.noise_level = noise_level;
    inst.seed = seed;
    return inst;
}

}  // namespace klreg

#endif  // KLREG_PROBLEMS_HPP_
