#pragma once

// Uniform cell-centered discretization of the feasible box and per-cell fields over it.

#include "mog.hpp"
#include "parallel.hpp"
#include "problems.hpp"
#include "types.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace moplot {

/// Requested grid exceeds the configured cell budget.
class ResolutionError : public std::length_error {
public:
    using std::length_error::length_error;
};

inline constexpr std::size_t kDefaultMaxCells = 20'000'000;

using MultiIndex = std::array<std::size_t, 3>;

/// Cell centers x_i(j) = l_i + (j + 0.5) (u_i - l_i) / n_i; linear index j_1 + n_1 (j_2 + n_2 j_3).
/// Centers are evaluated from the box midpoint so that mirrored cells of a symmetric box get exactly
/// mirrored coordinates.
class Grid {
public:
    Grid(Vec lower, Vec upper, std::vector<std::size_t> resolution)
        : lower_(std::move(lower)), upper_(std::move(upper)) {
        const auto p = static_cast<std::size_t>(lower_.size());
        if (p < 2 || p > 3 || upper_.size() != lower_.size() || resolution.size() != p) {
            throw SpecError("grid needs 2 or 3 axes with matching bounds and resolution");
        }
        for (std::size_t i = 0; i < p; ++i) {
            if (resolution[i] < 2) throw SpecError("each grid axis needs at least 2 cells");
            if (!(lower_[static_cast<Eigen::Index>(i)] < upper_[static_cast<Eigen::Index>(i)])) {
                throw SpecError("grid bounds must satisfy lower < upper");
            }
            n_[i] = resolution[i];
        }
        size_ = 1;
        for (std::size_t i = 0; i < p; ++i) {
            if (n_[i] > SIZE_MAX / size_) throw ResolutionError("grid cell count overflows");
            size_ *= n_[i];
        }
    }

    int dim() const { return static_cast<int>(lower_.size()); }
    const Vec& lower() const { return lower_; }
    const Vec& upper() const { return upper_; }
    std::size_t size() const { return size_; }
    std::size_t resolution(int axis) const { return n_[static_cast<std::size_t>(axis)]; }
    std::vector<std::size_t> resolution() const { return {n_.begin(), n_.begin() + dim()}; }
    double width(int axis) const { return (upper_[axis] - lower_[axis]) / static_cast<double>(n_[static_cast<std::size_t>(axis)]); }

    double coordinate(int axis, std::size_t j) const {
        const double n = static_cast<double>(n_[static_cast<std::size_t>(axis)]);
        const double mid = 0.5 * (lower_[axis] + upper_[axis]), half = 0.5 * (upper_[axis] - lower_[axis]);
        return mid + half * ((2.0 * static_cast<double>(j) + 1.0 - n) / n);
    }

    CellIndex index(const MultiIndex& m) const {
        return m[0] + n_[0] * (m[1] + n_[1] * (dim() == 3 ? m[2] : 0));
    }

    MultiIndex multi_index(CellIndex c) const {
        MultiIndex m{c % n_[0], (c / n_[0]) % n_[1], 0};
        if (dim() == 3) m[2] = c / (n_[0] * n_[1]);
        return m;
    }

    Vec center(CellIndex c) const {
        const auto m = multi_index(c);
        Vec x(dim());
        for (int i = 0; i < dim(); ++i) x[i] = coordinate(i, m[static_cast<std::size_t>(i)]);
        return x;
    }

    /// Cell containing x (upper faces belong to the last cell), or nullopt outside the box.
    std::optional<CellIndex> locate(const Vec& x) const {
        if (x.size() != lower_.size()) return std::nullopt;
        MultiIndex m{0, 0, 0};
        for (int i = 0; i < dim(); ++i) {
            if (!(x[i] >= lower_[i] && x[i] <= upper_[i])) return std::nullopt;
            const auto j = static_cast<std::size_t>(std::floor((x[i] - lower_[i]) / width(i)));
            m[static_cast<std::size_t>(i)] = std::min(j, n_[static_cast<std::size_t>(i)] - 1);
        }
        return index(m);
    }

    friend bool operator==(const Grid& a, const Grid& b) {
        return a.lower_ == b.lower_ && a.upper_ == b.upper_ && a.n_ == b.n_;
    }

private:
    Vec lower_;
    Vec upper_;
    MultiIndex n_{1, 1, 1};
    std::size_t size_ = 0;
};

inline std::vector<std::size_t> default_resolution(int p) {
    return p == 2 ? std::vector<std::size_t>{1000, 1000} : std::vector<std::size_t>{100, 100, 100};
}

inline Grid make_grid(const Problem& problem, std::vector<std::size_t> resolution = {},
                      std::size_t max_cells = kDefaultMaxCells) {
    if (resolution.empty()) resolution = default_resolution(problem.dim());
    if (resolution.size() != static_cast<std::size_t>(problem.dim())) {
        throw SpecError("resolution needs " + std::to_string(problem.dim()) + " entries");
    }
    Grid grid(problem.lower(), problem.upper(), std::move(resolution));
    if (grid.size() > max_cells) {
        throw ResolutionError("grid has " + std::to_string(grid.size()) + " cells, limit is " + std::to_string(max_cells));
    }
    return grid;
}

enum class FieldKind : std::uint8_t { scalar = 1, vector = 2, objective = 3 };

/// Per-cell values over a grid, stored cell-major in linear-index order.
/// Components: 1 for scalar fields, p for vector fields, k for objective fields.
template <FieldKind Kind>
class Field {
public:
    static constexpr FieldKind kind = Kind;

    Field(Grid grid, int objectives) : grid_(std::move(grid)), objectives_(objectives) {
        values_.assign(grid_.size() * static_cast<std::size_t>(components()), 0.0);
    }

    Field(Grid grid, int objectives, std::vector<double> values)
        : grid_(std::move(grid)), objectives_(objectives), values_(std::move(values)) {
        if (values_.size() != grid_.size() * static_cast<std::size_t>(components())) {
            throw std::invalid_argument("field payload size does not match its grid");
        }
    }

    const Grid& grid() const { return grid_; }
    int objectives() const { return objectives_; }
    std::size_t size() const { return grid_.size(); }

    int components() const {
        if constexpr (Kind == FieldKind::scalar) return 1;
        else if constexpr (Kind == FieldKind::vector) return grid_.dim();
        else return objectives_;
    }

    const std::vector<double>& values() const { return values_; }
    std::vector<double>& values() { return values_; }

    double& operator[](CellIndex c) requires(Kind == FieldKind::scalar) { return values_[c]; }
    double operator[](CellIndex c) const requires(Kind == FieldKind::scalar) { return values_[c]; }

    Vec at(CellIndex c) const requires(Kind != FieldKind::scalar) {
        const auto n = components();
        Vec v(n);
        for (int i = 0; i < n; ++i) v[i] = values_[c * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)];
        return v;
    }

    std::span<const double> row(CellIndex c) const {
        const auto n = static_cast<std::size_t>(components());
        return {values_.data() + c * n, n};
    }

    void set(CellIndex c, const Vec& v) requires(Kind != FieldKind::scalar) {
        const auto n = components();
        for (int i = 0; i < n; ++i) values_[c * static_cast<std::size_t>(n) + static_cast<std::size_t>(i)] = v[i];
    }

    friend bool operator==(const Field& a, const Field& b) {
        return a.grid_ == b.grid_ && a.objectives_ == b.objectives_ && a.values_ == b.values_;
    }

private:
    Grid grid_;
    int objectives_;
    std::vector<double> values_;
};

using ScalarField = Field<FieldKind::scalar>;
using VectorField = Field<FieldKind::vector>;
using ObjectiveField = Field<FieldKind::objective>;

/// Everything the visualizations need from one pass over the grid.
struct Landscape {
    ObjectiveField objectives;
    VectorField mog;
    ScalarField mog_length;
    std::vector<double> unit_gradients;  // cell-major, k rows of p entries per cell
    std::vector<std::uint8_t> degenerate;

    const Grid& grid() const { return objectives.grid(); }
    int dim() const { return grid().dim(); }
    int objective_count() const { return objectives.objectives(); }

    GradientMatrix units(CellIndex c) const {
        const int k = objective_count(), p = dim();
        GradientMatrix u(k, p);
        const double* base = unit_gradients.data() + c * static_cast<std::size_t>(k * p);
        for (int i = 0; i < k; ++i) {
            for (int j = 0; j < p; ++j) u(i, j) = base[i * p + j];
        }
        return u;
    }
};

/// Evaluates objectives, normalized gradients and the MOG at every cell center.
/// Cells are independent; any thread count gives bitwise-identical output.
inline Landscape evaluate_field(const Problem& problem, const Grid& grid, unsigned threads = 0) {
    if (grid.dim() != problem.dim()) throw SpecError("grid and problem dimensions differ");
    const int k = problem.objectives(), p = problem.dim();
    const std::size_t n = grid.size();
    Landscape out{ObjectiveField(grid, k), VectorField(grid, k), ScalarField(grid, k),
                  std::vector<double>(n * static_cast<std::size_t>(k * p)), std::vector<std::uint8_t>(n)};
    parallel_chunks(n, threads, [&](unsigned, std::size_t begin, std::size_t end) {
        for (CellIndex c = begin; c < end; ++c) {
            try {
                const Vec x = grid.center(c);
                const Vec f = problem.evaluate(x);
                if (!f.allFinite()) throw EvaluationError(c, "non-finite objective value");
                const GradientMatrix g = problem.gradients(x);
                if (!g.allFinite()) throw EvaluationError(c, "non-finite gradient");
                const auto normalized = normalize_gradients(g);
                const auto m = project_onto_box(mog_from_units(normalized), x, problem.lower(), problem.upper());
                out.objectives.set(c, f);
                out.mog.set(c, m.vector);
                out.mog_length[c] = m.length;
                out.degenerate[c] = normalized.degenerate ? 1 : 0;
                double* base = out.unit_gradients.data() + c * static_cast<std::size_t>(k * p);
                for (int i = 0; i < k; ++i) {
                    for (int j = 0; j < p; ++j) base[i * p + j] = normalized.units(i, j);
                }
            } catch (const EvaluationError&) {
                throw;
            } catch (const std::exception& e) {
                throw EvaluationError(c, e.what());
            }
        }
    });
    return out;
}

} // namespace moplot
