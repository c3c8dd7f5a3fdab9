#pragma once

// Views of 3D height fields: axis-aligned slices ("MRI scan") and voxel shells ("onion layers").

#include "efficient_sets.hpp"
#include "fields.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace moplot {

struct OverlayPoint {
    CellIndex cell;
    Vec position;
    std::uint64_t rank;
};

struct SliceView {
    int axis;              // 1-based, the axis held fixed
    std::size_t index;     // cell index along that axis
    double plane;          // coordinate of the slice plane
    ScalarField field2d;   // over the remaining two axes in ascending order
    std::vector<OverlayPoint> overlay;
};

namespace detail {

inline std::array<int, 2> remaining_axes(int axis) {
    switch (axis) {
    case 1: return {1, 2};
    case 2: return {0, 2};
    default: return {0, 1};
    }
}

inline void check_slice(const Grid& grid, int axis, std::size_t index) {
    if (grid.dim() != 3) throw std::invalid_argument("slicing needs a 3D field");
    if (axis < 1 || axis > 3) throw std::out_of_range("slice axis must be 1, 2 or 3");
    if (index >= grid.resolution(axis - 1)) {
        throw std::out_of_range("slice index " + std::to_string(index) + " outside [0, " +
                                std::to_string(grid.resolution(axis - 1)) + ")");
    }
}

} // namespace detail

/// Grid over the two axes that remain when `axis` (1-based) is held fixed, in ascending axis order.
inline Grid plane_grid(const Grid& grid, int axis) {
    const auto keep = detail::remaining_axes(axis);
    Vec lower(2), upper(2);
    for (std::size_t i = 0; i < 2; ++i) {
        lower[static_cast<Eigen::Index>(i)] = grid.lower()[keep[i]];
        upper[static_cast<Eigen::Index>(i)] = grid.upper()[keep[i]];
    }
    return Grid(lower, upper, {grid.resolution(keep[0]), grid.resolution(keep[1])});
}

/// Cells of the plane `index` perpendicular to `axis`, in the plane grid's linear order.
inline std::vector<CellIndex> plane_cells(const Grid& grid, int axis, std::size_t index) {
    detail::check_slice(grid, axis, index);
    const auto keep = detail::remaining_axes(axis);
    const std::size_t na = grid.resolution(keep[0]), nb = grid.resolution(keep[1]);
    std::vector<CellIndex> cells;
    cells.reserve(na * nb);
    for (std::size_t b = 0; b < nb; ++b) {
        for (std::size_t a = 0; a < na; ++a) {
            MultiIndex m{0, 0, 0};
            m[static_cast<std::size_t>(keep[0])] = a;
            m[static_cast<std::size_t>(keep[1])] = b;
            m[static_cast<std::size_t>(axis - 1)] = index;
            cells.push_back(grid.index(m));
        }
    }
    return cells;
}

/// Exact extraction of the plane `index` perpendicular to `axis`; no interpolation.
inline SliceView slice(const ScalarField& field, int axis, std::size_t index) {
    const Grid& grid = field.grid();
    const auto cells = plane_cells(grid, axis, index);
    ScalarField out(plane_grid(grid, axis), field.objectives());
    for (std::size_t i = 0; i < cells.size(); ++i) out[i] = field[cells[i]];
    return {axis, index, grid.coordinate(axis - 1, index), std::move(out), {}};
}

/// Slice of the PLOT background; every efficient point is carried along regardless of the plane.
inline SliceView slice(const PlotData& plot, int axis, std::size_t index) {
    SliceView view = slice(plot.background, axis, index);
    const Grid& grid = plot.background.grid();
    view.overlay.reserve(plot.efficient.size());
    for (std::size_t i = 0; i < plot.efficient.size(); ++i) {
        view.overlay.push_back({plot.efficient[i], grid.center(plot.efficient[i]), plot.ranks[i]});
    }
    return view;
}

struct OnionShell {
    double threshold;
    std::vector<CellIndex> cells;  // sorted by linear index
};

/// Cells of {h <= c} that touch a cell with h > c through a face, or lie on the box boundary.
inline OnionShell onion_shell(const ScalarField& field, double threshold) {
    const Grid& grid = field.grid();
    if (grid.dim() != 3) throw std::invalid_argument("onion layers need a 3D field");
    OnionShell shell{threshold, {}};
    for (CellIndex c = 0; c < grid.size(); ++c) {
        if (!(field[c] <= threshold)) continue;
        const auto m = grid.multi_index(c);
        bool boundary = false;
        for (int axis = 0; axis < 3 && !boundary; ++axis) {
            const auto a = static_cast<std::size_t>(axis);
            if (m[a] == 0 || m[a] + 1 == grid.resolution(axis)) {
                boundary = true;
                break;
            }
            for (int step : {-1, 1}) {
                auto nb = m;
                nb[a] = static_cast<std::size_t>(static_cast<long long>(m[a]) + step);
                if (field[grid.index(nb)] > threshold) {
                    boundary = true;
                    break;
                }
            }
        }
        if (boundary) shell.cells.push_back(c);
    }
    return shell;
}

/// Sublevel set {h <= c}, sorted.
inline std::vector<CellIndex> sublevel_region(const ScalarField& field, double threshold) {
    std::vector<CellIndex> cells;
    for (CellIndex c = 0; c < field.size(); ++c) {
        if (field[c] <= threshold) cells.push_back(c);
    }
    return cells;
}

struct ThresholdRange {
    double lo;
    double hi;
};

/// Nearest-rank quantiles of the height distribution (equivalently of log(1 + h), which is monotone).
/// Default slider range for onion thresholds.
inline ThresholdRange threshold_range(const ScalarField& field, double lo_q = 0.01, double hi_q = 0.99) {
    std::vector<double> values = field.values();
    if (values.empty()) return {0.0, 0.0};
    std::sort(values.begin(), values.end());
    auto at = [&](double q) {
        const auto i = static_cast<std::size_t>(std::llround(q * static_cast<double>(values.size() - 1)));
        return values[std::min(i, values.size() - 1)];
    };
    return {at(lo_q), at(hi_q)};
}

} // namespace moplot
