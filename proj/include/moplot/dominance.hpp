#pragma once

// Pareto dominance (minimization), dominance counting and the cost landscape.

#include "fields.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <numeric>
#include <span>
#include <stdexcept>
#include <vector>

namespace moplot {

/// a dominates b: a <= b componentwise with at least one strict component.
inline bool dominates(std::span<const double> a, std::span<const double> b) {
    if (a.size() != b.size()) throw std::invalid_argument("objective vectors differ in length");
    bool strict = false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        if (a[i] > b[i]) return false;
        if (a[i] < b[i]) strict = true;
    }
    return strict;
}

using DominanceCounts = std::vector<std::uint64_t>;

/// Above this many points the k = 3 quadratic count logs a warning.
inline constexpr std::size_t kQuadraticWarnCells = 100'000;

namespace detail {

class Fenwick {
public:
    explicit Fenwick(std::size_t n) : tree_(n + 1, 0) {}

    void add(std::size_t i) {
        for (++i; i < tree_.size(); i += i & (~i + 1)) ++tree_[i];
    }

    /// Number of inserted ranks <= i.
    std::uint64_t prefix(std::size_t i) const {
        std::uint64_t s = 0;
        for (++i; i > 0; i -= i & (~i + 1)) s += tree_[i];
        return s;
    }

private:
    std::vector<std::uint64_t> tree_;
};

/// k = 2: sweep in f1 order with a Fenwick tree over f2 ranks. Equal-f1 groups are queried before
/// they are inserted, so only strictly smaller f1 contributes via the tree; inside a group only a
/// strictly smaller f2 dominates.
inline DominanceCounts counts_2(std::span<const double> flat, std::size_t n) {
    auto f1 = [&](std::size_t i) { return flat[2 * i]; };
    auto f2 = [&](std::size_t i) { return flat[2 * i + 1]; };
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        return f1(a) != f1(b) ? f1(a) < f1(b) : f2(a) < f2(b);
    });

    std::vector<double> f2_sorted(n);
    for (std::size_t i = 0; i < n; ++i) f2_sorted[i] = f2(i);
    std::sort(f2_sorted.begin(), f2_sorted.end());
    f2_sorted.erase(std::unique(f2_sorted.begin(), f2_sorted.end()), f2_sorted.end());
    auto rank = [&](double v) {
        return static_cast<std::size_t>(std::lower_bound(f2_sorted.begin(), f2_sorted.end(), v) - f2_sorted.begin());
    };

    DominanceCounts counts(n, 0);
    Fenwick tree(f2_sorted.size());
    std::size_t group = 0;
    while (group < n) {
        std::size_t end = group;
        while (end < n && f1(order[end]) == f1(order[group])) ++end;
        // order[group:end] is sorted by f2; count strictly smaller f2 within the group.
        std::size_t smaller = group;
        for (std::size_t i = group; i < end; ++i) {
            const std::size_t cell = order[i];
            while (f2(order[smaller]) < f2(cell)) ++smaller;
            counts[cell] = tree.prefix(rank(f2(cell))) + (smaller - group);
        }
        for (std::size_t i = group; i < end; ++i) tree.add(rank(f2(order[i])));
        group = end;
    }
    return counts;
}

/// Any k: pairwise count. Rows split across threads, columns visited in cache-sized blocks.
inline DominanceCounts counts_pairwise(std::span<const double> flat, std::size_t n, std::size_t k, unsigned threads) {
    DominanceCounts counts(n, 0);
    constexpr std::size_t block = 4096;
    parallel_chunks(n, threads, [&](unsigned, std::size_t begin, std::size_t end) {
        for (std::size_t jb = 0; jb < n; jb += block) {
            const std::size_t je = std::min(n, jb + block);
            for (std::size_t i = begin; i < end; ++i) {
                const auto fi = flat.subspan(i * k, k);
                std::uint64_t c = 0;
                for (std::size_t j = jb; j < je; ++j) c += dominates(flat.subspan(j * k, k), fi) ? 1 : 0;
                counts[i] += c;
            }
        }
    });
    return counts;
}

} // namespace detail

/// counts[i] = number of points whose objective vector dominates point i.
/// `flat` holds n vectors of length k back to back.
inline DominanceCounts dominance_counts(std::span<const double> flat, std::size_t k, unsigned threads = 0) {
    if (k == 0 || flat.size() % k != 0) throw std::invalid_argument("objective payload is not a multiple of k");
    const std::size_t n = flat.size() / k;
    if (n == 0) return {};
    if (k == 2) return detail::counts_2(flat, n);
    if (n > kQuadraticWarnCells) {
        std::clog << "moplot: warning: quadratic dominance count over " << n << " points\n";
    }
    return detail::counts_pairwise(flat, n, k, threads);
}

inline DominanceCounts dominance_counts(const ObjectiveField& objectives, unsigned threads = 0) {
    return dominance_counts(objectives.values(), static_cast<std::size_t>(objectives.objectives()), threads);
}

/// Height = number of dominating grid points + 1.
inline ScalarField cost_landscape(const ObjectiveField& objectives, unsigned threads = 0) {
    const auto counts = dominance_counts(objectives, threads);
    ScalarField heights(objectives.grid(), objectives.objectives());
    for (std::size_t i = 0; i < counts.size(); ++i) heights[i] = static_cast<double>(counts[i]) + 1.0;
    return heights;
}

} // namespace moplot
