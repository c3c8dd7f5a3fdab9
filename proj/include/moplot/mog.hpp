#pragma once

// Multi-objective gradient: the minimum-norm point of the convex hull of the normalized
// single-objective gradients, for k in {2, 3} objectives and p in {2, 3} variables.

#include "problems.hpp"
#include "types.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <utility>

namespace moplot {

/// Gradient norms below this count as zero; the point is then a single-objective critical point.
inline constexpr double kZeroGradient = 1e-8;

/// Barycentric slack for hull-membership decisions.
inline constexpr double kHullTolerance = 1e-9;

struct MOGResult {
    Vec vector;
    double length = 0.0;
    bool degenerate = false;
};

struct NormalizedGradients {
    GradientMatrix units;  // row i = u_i, or zero when objective i is degenerate
    bool degenerate = false;
};

inline NormalizedGradients normalize_gradients(const GradientMatrix& gradients, double zero = kZeroGradient) {
    NormalizedGradients out{gradients, false};
    for (Eigen::Index i = 0; i < gradients.rows(); ++i) {
        const double norm = gradients.row(i).norm();
        if (!(norm >= zero)) {
            out.degenerate = true;
            out.units.row(i).setZero();
        } else {
            out.units.row(i) /= norm;
        }
    }
    return out;
}

namespace detail {

inline MOGResult make_result(Vec v, bool degenerate = false) {
    const double length = v.norm();
    return {std::move(v), length, degenerate};
}

/// Lexicographic order on coordinates, used to make the hull routines order-free.
inline bool lex_less(const Vec& a, const Vec& b) {
    return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

inline std::array<Vec, 3> sorted(const Vec& a, const Vec& b, const Vec& c) {
    std::array<Vec, 3> u{a, b, c};
    std::sort(u.begin(), u.end(), lex_less);
    return u;
}

inline double cross2(const Vec& a, const Vec& b) { return a[0] * b[1] - a[1] * b[0]; }

constexpr std::array<std::pair<int, int>, 3> kPairs{{{0, 1}, {0, 2}, {1, 2}}};

} // namespace detail

inline MOGResult mog_2(const Vec& u1, const Vec& u2) { return detail::make_result((u1 + u2) / 2.0); }

/// k = 3, p = 2: zero if the origin lies in the triangle, otherwise the bi-objective MOG of the
/// pair with the largest angle (smallest dot product; ties go to the lexicographically first pair).
inline MOGResult mog_3_2d(const Vec& a, const Vec& b, const Vec& c) {
    const auto u = detail::sorted(a, b, c);
    const Vec e1 = u[1] - u[0], e2 = u[2] - u[0];
    const double det = detail::cross2(e1, e2);
    if (std::abs(det) > 1e-12) {
        const double l1 = detail::cross2(-u[0], e2) / det;
        const double l2 = detail::cross2(e1, -u[0]) / det;
        const double l0 = 1.0 - l1 - l2;
        if (l0 >= -kHullTolerance && l1 >= -kHullTolerance && l2 >= -kHullTolerance) {
            return detail::make_result(Vec::Zero(a.size()));
        }
    }
    auto best = detail::kPairs[0];
    double best_dot = u[best.first].dot(u[best.second]);
    for (std::size_t i = 1; i < detail::kPairs.size(); ++i) {
        const auto pair = detail::kPairs[i];
        const double d = u[pair.first].dot(u[pair.second]);
        if (d < best_dot) {
            best_dot = d;
            best = pair;
        }
    }
    return mog_2(u[best.first], u[best.second]);
}

/// k = 3, p = 3: orthogonal projection of the origin onto the plane through the three unit gradients
/// when it lies in their hull, else the shortest pairwise bi-objective MOG.
inline MOGResult mog_3_3d(const Vec& a, const Vec& b, const Vec& c) {
    const auto u = detail::sorted(a, b, c);
    const Vec e1 = u[1] - u[0], e2 = u[2] - u[0];
    const double g11 = e1.dot(e1), g12 = e1.dot(e2), g22 = e2.dot(e2);
    const double det = g11 * g22 - g12 * g12;
    if (det > 1e-12 * g11 * g22) {
        const double r1 = -e1.dot(u[0]), r2 = -e2.dot(u[0]);
        const double s = (g22 * r1 - g12 * r2) / det;
        const double t = (g11 * r2 - g12 * r1) / det;
        if (s >= -kHullTolerance && t >= -kHullTolerance && 1.0 - s - t >= -kHullTolerance) {
            return detail::make_result(u[0] + s * e1 + t * e2);
        }
    }
    MOGResult best = mog_2(u[0], u[1]);
    for (std::size_t i = 1; i < detail::kPairs.size(); ++i) {
        MOGResult candidate = mog_2(u[detail::kPairs[i].first], u[detail::kPairs[i].second]);
        if (candidate.length < best.length) best = std::move(candidate);
    }
    return best;
}

/// Dispatch on k and p for already-normalized gradients.
inline MOGResult mog_from_units(const NormalizedGradients& n) {
    const auto p = n.units.cols();
    if (n.degenerate) return detail::make_result(Vec::Zero(p), true);
    const Vec u0 = n.units.row(0).transpose();
    const Vec u1 = n.units.row(1).transpose();
    if (n.units.rows() == 2) return mog_2(u0, u1);
    const Vec u2 = n.units.row(2).transpose();
    return p == 2 ? mog_3_2d(u0, u1, u2) : mog_3_3d(u0, u1, u2);
}

/// On an active bound, drop the component that would move the descent direction (-MOG) out of the box.
inline MOGResult project_onto_box(MOGResult r, const Vec& x, const Vec& lower, const Vec& upper) {
    bool changed = false;
    for (Eigen::Index i = 0; i < x.size(); ++i) {
        if ((x[i] <= lower[i] && r.vector[i] > 0.0) || (x[i] >= upper[i] && r.vector[i] < 0.0)) {
            r.vector[i] = 0.0;
            changed = true;
        }
    }
    if (changed) r.length = r.vector.norm();
    return r;
}

inline MOGResult mog(const Problem& problem, const Vec& x) {
    const auto normalized = normalize_gradients(problem.gradients(x));
    return project_onto_box(mog_from_units(normalized), x, problem.lower(), problem.upper());
}

} // namespace moplot
