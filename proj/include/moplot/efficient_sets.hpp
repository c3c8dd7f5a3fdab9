#pragma once

// PLOT: first-order detection of locally efficient cells on simplex neighborhoods, a second-order
// stability filter on the descent field's Jacobian, and Pareto ranks among the survivors.

#include "dominance.hpp"
#include "fields.hpp"
#include "heatmap.hpp"
#include "mog.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <array>
#include <cstdint>
#include <span>
#include <vector>

namespace moplot {

/// True iff the origin lies in the interior of conv(vectors). Uses the alternative: the origin is
/// not interior exactly when some unit w has w.v >= -tolerance for every v. Candidate directions are
/// the extreme rays of that cone: perpendiculars of single vectors in 2D, normalized cross
/// products of pairs in 3D.
inline bool origin_in_hull(std::span<const Vec> vectors, double tolerance = kHullTolerance) {
    if (vectors.empty()) return false;
    const auto p = vectors.front().size();
    if (vectors.size() < static_cast<std::size_t>(p) + 1) return false;

    auto certifies = [&](const Vec& w) {
        for (const Vec& v : vectors) {
            if (w.dot(v) < -tolerance) return false;
        }
        return true;
    };

    Vec mean = Vec::Zero(p);
    for (const Vec& v : vectors) mean += v;
    if (const double norm = mean.norm(); norm > 1e-12 && certifies(mean / norm)) return false;

    if (p == 2) {
        for (const Vec& v : vectors) {
            const double norm = v.norm();
            if (norm <= 1e-12) continue;
            Vec w(2);
            w << -v[1] / norm, v[0] / norm;
            if (certifies(w) || certifies(-w)) return false;
        }
        return true;
    }

    bool spanning = false;
    for (std::size_t i = 0; i < vectors.size(); ++i) {
        for (std::size_t j = i + 1; j < vectors.size(); ++j) {
            const Eigen::Vector3d a = vectors[i], b = vectors[j];
            const Eigen::Vector3d cross = a.cross(b);
            const double norm = cross.norm();
            if (norm <= 1e-12) continue;
            spanning = true;
            const Vec w = cross / norm;
            if (certifies(w) || certifies(-w)) return false;
        }
    }
    return spanning;
}

namespace detail {

/// Two triangles per grid square, split along the lower-left to upper-right diagonal.
inline constexpr std::array<std::array<int, 3>, 2> kTriangles{{{0, 1, 3}, {0, 3, 2}}};

/// Kuhn decomposition of the unit cube into 6 tetrahedra; vertices as bit masks (bit i = +1 on axis i).
inline constexpr std::array<std::array<int, 4>, 6> kTetrahedra{{
    {0, 1, 3, 7}, {0, 1, 5, 7}, {0, 2, 3, 7}, {0, 2, 6, 7}, {0, 4, 5, 7}, {0, 4, 6, 7},
}};

inline void collect_units(const Landscape& landscape, CellIndex c, std::vector<Vec>& out) {
    const int k = landscape.objective_count(), p = landscape.dim();
    const double* base = landscape.unit_gradients.data() + c * static_cast<std::size_t>(k * p);
    for (int i = 0; i < k; ++i) {
        Vec u(p);
        for (int j = 0; j < p; ++j) u[j] = base[i * p + j];
        if (u.squaredNorm() > 0.0) out.push_back(u);
    }
}

} // namespace detail

/// Cells of every simplex whose unit gradients contain the origin in their hull's interior,
/// plus single-objective critical (degenerate) cells. Sorted by linear index.
inline std::vector<CellIndex> first_order_cells(const Landscape& landscape, unsigned threads = 0) {
    const Grid& grid = landscape.grid();
    const int p = grid.dim();
    const std::size_t n = grid.size();
    const std::size_t n0 = grid.resolution(0), n1 = grid.resolution(1), n2 = p == 3 ? grid.resolution(2) : 1;
    const std::size_t cubes = (n0 - 1) * (n1 - 1) * (p == 3 ? n2 - 1 : 1);

    if (threads == 0) threads = default_threads();
    std::vector<std::vector<std::uint8_t>> marks(threads);
    parallel_chunks(cubes, threads, [&](unsigned t, std::size_t begin, std::size_t end) {
        auto& mark = marks[t];
        mark.assign(n, 0);
        std::vector<Vec> units;
        std::array<CellIndex, 8> corner{};
        for (std::size_t q = begin; q < end; ++q) {
            const std::size_t i = q % (n0 - 1), j = (q / (n0 - 1)) % (n1 - 1), l = q / ((n0 - 1) * (n1 - 1));
            const int corners = p == 3 ? 8 : 4;
            for (int b = 0; b < corners; ++b) {
                corner[static_cast<std::size_t>(b)] = grid.index({i + (b & 1), j + ((b >> 1) & 1), l + ((b >> 2) & 1)});
            }
            auto test = [&](std::span<const int> simplex) {
                units.clear();
                for (int v : simplex) detail::collect_units(landscape, corner[static_cast<std::size_t>(v)], units);
                if (origin_in_hull(units)) {
                    for (int v : simplex) mark[corner[static_cast<std::size_t>(v)]] = 1;
                }
            };
            if (p == 2) {
                for (const auto& tri : detail::kTriangles) test(tri);
            } else {
                for (const auto& tet : detail::kTetrahedra) test(tet);
            }
        }
    });

    std::vector<CellIndex> cells;
    for (CellIndex c = 0; c < n; ++c) {
        bool hit = landscape.degenerate[c] != 0;
        for (const auto& mark : marks) hit = hit || (!mark.empty() && mark[c]);
        if (hit) cells.push_back(c);
    }
    return cells;
}

/// Jacobian of the descent field -MOG at a cell: central differences over axis neighbors,
/// one-sided on the grid boundary. Entry (i, j) = d(-mog_i)/dx_j.
inline SquareMatrix mog_jacobian(const VectorField& mog, CellIndex cell) {
    const Grid& grid = mog.grid();
    const int p = grid.dim();
    const auto m = grid.multi_index(cell);
    SquareMatrix jacobian(p, p);
    for (int j = 0; j < p; ++j) {
        auto lo = m, hi = m;
        const auto axis = static_cast<std::size_t>(j);
        double span = 0.0;
        if (m[axis] > 0) {
            --lo[axis];
            span += grid.width(j);
        }
        if (m[axis] + 1 < grid.resolution(j)) {
            ++hi[axis];
            span += grid.width(j);
        }
        const Vec diff = -(mog.at(grid.index(hi)) - mog.at(grid.index(lo))) / span;
        jacobian.col(j) = diff;
    }
    return jacobian;
}

/// Slack for the stability test: 1e-3 * max |MOG| / smallest cell width.
inline double stability_slack(const VectorField& mog) {
    double max_length = 0.0;
    for (CellIndex c = 0; c < mog.size(); ++c) max_length = std::max(max_length, mog.at(c).norm());
    double width = mog.grid().width(0);
    for (int i = 1; i < mog.grid().dim(); ++i) width = std::min(width, mog.grid().width(i));
    return 1e-3 * max_length / width;
}

/// Second invariant: sum of the 2x2 principal minors.
inline double second_invariant(const SquareMatrix& j) {
    if (j.rows() == 2) return j.determinant();
    return j(0, 0) * j(1, 1) - j(0, 1) * j(1, 0) + j(0, 0) * j(2, 2) - j(0, 2) * j(2, 0) + j(1, 1) * j(2, 2) -
           j(1, 2) * j(2, 1);
}

/// Stability of a Jacobian with one structurally zero eigenvalue: the remaining eigenvalues have real
/// parts <= slack. In 2D that is the divergence test trace <= slack. In 3D the remaining pair is
/// tested through the invariants of the spectrum shifted by the slack: trace - 2 slack <= 0 and
/// Q - slack * trace + slack^2 >= 0.
inline bool is_stable(const SquareMatrix& jacobian, double slack) {
    const double trace = jacobian.trace();
    if (jacobian.rows() == 2) return trace <= slack;
    const double q = second_invariant(jacobian);
    return trace - 2.0 * slack <= 0.0 && q - slack * trace + slack * slack >= 0.0;
}

inline std::vector<CellIndex> second_order_filter(std::span<const CellIndex> cells, const VectorField& mog,
                                                  double slack) {
    std::vector<CellIndex> kept;
    for (CellIndex c : cells) {
        if (is_stable(mog_jacobian(mog, c), slack)) kept.push_back(c);
    }
    return kept;
}

inline std::vector<CellIndex> second_order_filter(std::span<const CellIndex> cells, const VectorField& mog) {
    return second_order_filter(cells, mog, stability_slack(mog));
}

namespace detail {

/// Calls f(d) for every full-adjacency (8 or 26) neighbor d of c inside the grid.
template <class F>
void for_each_neighbor(const Grid& grid, CellIndex c, F&& f) {
    const int p = grid.dim();
    const auto m = grid.multi_index(c);
    const int dz_max = p == 3 ? 1 : 0;
    for (int dz = -dz_max; dz <= dz_max; ++dz) {
        for (int dy = -1; dy <= 1; ++dy) {
            for (int dx = -1; dx <= 1; ++dx) {
                if (dx == 0 && dy == 0 && dz == 0) continue;
                const std::array<long long, 3> t{static_cast<long long>(m[0]) + dx, static_cast<long long>(m[1]) + dy,
                                                 static_cast<long long>(m[2]) + dz};
                bool inside = true;
                for (int a = 0; a < p; ++a) {
                    inside = inside && t[static_cast<std::size_t>(a)] >= 0 &&
                             t[static_cast<std::size_t>(a)] < static_cast<long long>(grid.resolution(a));
                }
                if (!inside) continue;
                f(grid.index({static_cast<std::size_t>(t[0]), static_cast<std::size_t>(t[1]), static_cast<std::size_t>(t[2])}));
            }
        }
    }
}

} // namespace detail

/// Drops cells whose objective vector is dominated by one of their grid neighbors: such a cell is
/// not locally efficient at a radius of one cell. Simplices that straddle an end of an efficient set
/// mark cells just beyond it; this removes them.
inline std::vector<CellIndex> local_dominance_filter(std::span<const CellIndex> cells, const ObjectiveField& objectives) {
    const Grid& grid = objectives.grid();
    std::vector<CellIndex> kept;
    for (CellIndex c : cells) {
        bool dominated = false;
        detail::for_each_neighbor(grid, c, [&](CellIndex d) {
            dominated = dominated || dominates(objectives.row(d), objectives.row(c));
        });
        if (!dominated) kept.push_back(c);
    }
    return kept;
}

struct PlotData {
    ScalarField background;               // heatmap heights, rendered in gray
    std::vector<CellIndex> efficient;     // sorted by linear index
    std::vector<std::uint64_t> ranks;     // per efficient cell, >= 1
};

/// Ranks are dominance counts among the efficient cells' objective images, plus one.
inline PlotData plot_data(const HeatmapResult& heatmap, std::span<const CellIndex> efficient,
                          const ObjectiveField& objectives) {
    const auto k = static_cast<std::size_t>(objectives.objectives());
    std::vector<double> images;
    images.reserve(efficient.size() * k);
    for (CellIndex c : efficient) {
        const auto row = objectives.row(c);
        images.insert(images.end(), row.begin(), row.end());
    }
    auto counts = dominance_counts(images, k, 1);
    for (auto& c : counts) c += 1;
    return {heatmap.heights, {efficient.begin(), efficient.end()}, std::move(counts)};
}

/// Full PLOT pipeline on an evaluated landscape.
inline PlotData compute_plot(const Landscape& landscape, const HeatmapResult& heatmap, unsigned threads = 0) {
    const auto first = first_order_cells(landscape, threads);
    const auto stable = second_order_filter(first, landscape.mog);
    const auto kept = local_dominance_filter(stable, landscape.objectives);
    return plot_data(heatmap, kept, landscape.objectives);
}

/// Connected components of a cell set under full (8- or 26-) adjacency, each sorted, ordered by first cell.
inline std::vector<std::vector<CellIndex>> connected_components(const Grid& grid, std::span<const CellIndex> cells) {
    constexpr std::int64_t outside = -1, unlabeled = -2;
    std::vector<std::int64_t> label(grid.size(), outside);
    for (CellIndex c : cells) label[c] = unlabeled;
    std::vector<std::vector<CellIndex>> components;
    for (CellIndex seed : cells) {
        if (label[seed] != unlabeled) continue;
        const auto id = static_cast<std::int64_t>(components.size());
        auto& component = components.emplace_back();
        std::vector<CellIndex> stack{seed};
        label[seed] = id;
        while (!stack.empty()) {
            const CellIndex c = stack.back();
            stack.pop_back();
            component.push_back(c);
            detail::for_each_neighbor(grid, c, [&](CellIndex d) {
                if (label[d] == unlabeled) {
                    label[d] = id;
                    stack.push_back(d);
                }
            });
        }
        std::sort(component.begin(), component.end());
    }
    return components;
}

} // namespace moplot
