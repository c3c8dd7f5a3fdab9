#pragma once

// Independent reference computations used by the unit and acceptance tests. None of these call
// into the code paths they check.

#include <moplot/moplot.hpp>

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

namespace oracle {

using moplot::Vec;

/// Shortest vector over sampled convex combinations of `units` (k = 2 or 3). A barycentric
/// lattice over the whole simplex, then three rounds of lattice sampling in a window shrinking
/// around the best sample, 2500 samples per round.
inline double sampled_min_norm(const std::vector<Vec>& units, int rounds = 4) {
    const std::size_t k = units.size();
    auto norm_at = [&](const std::array<double, 3>& w) {
        Vec v = Vec::Zero(units[0].size());
        for (std::size_t i = 0; i < k; ++i) v += w[i] * units[i];
        return v.norm();
    };
    std::array<double, 3> best_w{1.0, 0.0, 0.0};
    double best = norm_at(best_w);
    double radius = 1.0;
    std::array<double, 3> center{1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0};
    if (k == 2) center = {0.5, 0.5, 0.0};
    for (int round = 0; round < rounds; ++round) {
        if (k == 2) {
            const int m = 2499;
            for (int i = 0; i <= m; ++i) {
                const double s = center[0] + radius * (2.0 * i / m - 1.0);
                if (s < 0.0 || s > 1.0) continue;
                const std::array<double, 3> w{s, 1.0 - s, 0.0};
                if (const double n = norm_at(w); n < best) {
                    best = n;
                    best_w = w;
                }
            }
        } else {
            const int m = 69;  // (m+1)(m+2)/2 = 2485 lattice points
            for (int i = 0; i <= m; ++i) {
                for (int j = 0; i + j <= m; ++j) {
                    // Lattice on the simplex scaled by `radius` around `center`.
                    const double a = double(i) / m, b = double(j) / m, c = 1.0 - a - b;
                    std::array<double, 3> w{center[0] + radius * (a - 1.0 / 3.0), center[1] + radius * (b - 1.0 / 3.0),
                                            center[2] + radius * (c - 1.0 / 3.0)};
                    if (round == 0) w = {a, b, c};
                    if (w[0] < 0.0 || w[1] < 0.0 || w[2] < 0.0) continue;
                    if (const double n = norm_at(w); n < best) {
                        best = n;
                        best_w = w;
                    }
                }
            }
        }
        center = best_w;
        radius = round == 0 ? 4.0 / 69.0 : radius / 20.0;
        if (k == 2 && round == 0) radius = 4.0 / 2499.0;
    }
    return best;
}

inline Vec random_unit(std::mt19937_64& rng, int p) {
    std::normal_distribution<double> normal;
    Vec v(p);
    do {
        for (int i = 0; i < p; ++i) v[i] = normal(rng);
    } while (v.norm() < 1e-6);
    return v / v.norm();
}

inline bool dominates(std::span<const double> a, std::span<const double> b) {
    bool strict = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        strict = strict || a[i] < b[i];
    }
    return strict;
}

/// O(n^2) dominance counting.
inline std::vector<std::uint64_t> brute_force_counts(const std::vector<double>& flat, std::size_t k) {
    const std::size_t n = flat.size() / k;
    std::vector<std::uint64_t> counts(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (dominates({flat.data() + j * k, k}, {flat.data() + i * k, k})) ++counts[i];
        }
    }
    return counts;
}

/// DTLZ2 with n = 3 variables and M = 3 objectives, written out from the textbook definition:
/// g = sum_{i >= M} (x_i - 0.5)^2, f_1 = (1+g) cos(x_1 pi/2) cos(x_2 pi/2),
/// f_2 = (1+g) cos(x_1 pi/2) sin(x_2 pi/2), f_3 = (1+g) sin(x_1 pi/2).
inline std::array<double, 3> dtlz2(double x1, double x2, double x3) {
    const double g = (x3 - 0.5) * (x3 - 0.5);
    const double h = std::numbers::pi / 2.0;
    return {(1 + g) * std::cos(x1 * h) * std::cos(x2 * h), (1 + g) * std::cos(x1 * h) * std::sin(x2 * h),
            (1 + g) * std::sin(x1 * h)};
}

/// Heights by following each path from its start cell to the end, without memoization. Cycles
/// are found from the visited sequence and cut at their lowest-index cell.
inline std::vector<std::int64_t> path_following_ticks(const moplot::VectorField& mog,
                                                      double terminal = moplot::kTerminalLength) {
    const auto& grid = mog.grid();
    const std::size_t n = grid.size();
    std::vector<std::int64_t> next(n, -1), q(n);
    for (std::size_t c = 0; c < n; ++c) {
        const Vec v = mog.at(c);
        q[c] = moplot::quantize_length(v.norm());
        if (auto s = moplot::descent_step(grid, v, c, terminal)) next[c] = static_cast<std::int64_t>(*s);
    }
    // A cell is cut when it is the lowest-index member of a cycle of `next`.
    std::vector<char> cut(n, 0), on_path(n, 0);
    std::vector<std::size_t> path;
    for (std::size_t start = 0; start < n; ++start) {
        path.clear();
        std::size_t c = start;
        while (!on_path[c] && next[c] >= 0) {
            on_path[c] = 1;
            path.push_back(c);
            c = static_cast<std::size_t>(next[c]);
        }
        if (on_path[c]) {
            std::size_t low = c;
            for (std::size_t d = static_cast<std::size_t>(next[c]); d != c; d = static_cast<std::size_t>(next[d])) low = std::min(low, d);
            cut[low] = 1;
        }
        for (std::size_t d : path) on_path[d] = 0;
    }
    std::vector<std::int64_t> h(n, 0);
    for (std::size_t start = 0; start < n; ++start) {
        std::int64_t sum = 0;
        std::size_t c = start;
        std::size_t steps = 0;
        while (next[c] >= 0 && !cut[c] && steps <= n) {
            sum += q[c];
            c = static_cast<std::size_t>(next[c]);
            ++steps;
        }
        h[start] = sum;
    }
    return h;
}

/// Real parts of the eigenvalues of J, sorted descending.
inline std::vector<double> eigen_real_parts(const moplot::SquareMatrix& j) {
    const Eigen::MatrixXd m = j;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m);
    std::vector<double> re;
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) re.push_back(solver.eigenvalues()[i].real());
    std::sort(re.rbegin(), re.rend());
    return re;
}

/// Distance from x to the segment [a, b].
inline double distance_to_segment(const Vec& x, const Vec& a, const Vec& b) {
    const Vec d = b - a;
    const double t = std::clamp((x - a).dot(d) / d.squaredNorm(), 0.0, 1.0);
    return (x - (a + t * d)).norm();
}

/// Distance from x to the filled triangle conv{a, b, c} in 3D, by projecting onto the plane and
/// falling back to the edges.
inline double distance_to_triangle(const Eigen::Vector3d& x, const Eigen::Vector3d& a, const Eigen::Vector3d& b,
                                   const Eigen::Vector3d& c) {
    const Eigen::Vector3d n = (b - a).cross(c - a).normalized();
    const Eigen::Vector3d y = x - n * n.dot(x - a);
    const double area = (b - a).cross(c - a).dot(n);
    const double wa = (b - y).cross(c - y).dot(n) / area, wb = (c - y).cross(a - y).dot(n) / area;
    const double wc = 1.0 - wa - wb;
    if (wa >= 0 && wb >= 0 && wc >= 0) return (x - y).norm();
    auto seg = [&](const Eigen::Vector3d& p, const Eigen::Vector3d& q) {
        const Eigen::Vector3d d = q - p;
        const double t = std::clamp((x - p).dot(d) / d.squaredNorm(), 0.0, 1.0);
        return (x - (p + t * d)).norm();
    };
    return std::min({seg(a, b), seg(b, c), seg(c, a)});
}

} // namespace oracle
