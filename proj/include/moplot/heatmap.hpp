#pragma once

// Gradient field heatmap: follow discrete descent steps from every cell and accumulate MOG lengths.

#include "fields.hpp"
#include "parallel.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <vector>

namespace moplot {

/// MOG lengths below this stop a path (the cell is treated as locally efficient).
inline constexpr double kTerminalLength = 1e-6;

/// Heights are accumulated as integer multiples of this quantum so that sums are exact and
/// independent of evaluation order. 2^-28 keeps every height of a 2e7-cell grid below 2^53 quanta.
inline constexpr double kHeightQuantum = 0x1p-28;

inline std::int64_t quantize_length(double length) { return std::llround(length / kHeightQuantum); }

/// Best of the 8 neighbors for descent direction -mog (largest cosine; near-ties within 1e-12 go to
/// the lower linear index). Offsets leaving the box are clamped per axis.
inline std::optional<CellIndex> descent_step_2d(const Grid& grid, const Vec& mog, CellIndex cell,
                                                double terminal = kTerminalLength) {
    const double norm = mog.norm();
    if (!(norm >= terminal)) return std::nullopt;
    int best_dx = 0, best_dy = 0;
    double best_cos = -2.0;
    for (int dy = -1; dy <= 1; ++dy) {
        for (int dx = -1; dx <= 1; ++dx) {
            if (dx == 0 && dy == 0) continue;
            const double cosine = -(mog[0] * dx + mog[1] * dy) / (norm * std::sqrt(double(dx * dx + dy * dy)));
            if (cosine > best_cos + 1e-12) {
                best_cos = cosine;
                best_dx = dx;
                best_dy = dy;
            }
        }
    }
    auto m = grid.multi_index(cell);
    const std::array<int, 2> offset{best_dx, best_dy};
    bool moved = false;
    for (std::size_t i = 0; i < 2; ++i) {
        const auto target = static_cast<long long>(m[i]) + offset[i];
        if (offset[i] == 0 || target < 0 || target >= static_cast<long long>(grid.resolution(static_cast<int>(i)))) continue;
        m[i] = static_cast<std::size_t>(target);
        moved = true;
    }
    if (!moved) return std::nullopt;
    return grid.index(m);
}

/// Per axis: step +1 when the angle between -mog and the plane of the other two axes exceeds
/// 22.5 degrees, -1 when it is below -22.5 degrees, else stay. Offsets leaving the box are clamped.
inline std::optional<CellIndex> descent_step_3d(const Grid& grid, const Vec& mog, CellIndex cell,
                                                double terminal = kTerminalLength) {
    const double norm = mog.norm();
    if (!(norm >= terminal)) return std::nullopt;
    constexpr double limit = std::numbers::pi / 8.0;
    auto m = grid.multi_index(cell);
    bool moved = false;
    for (int i = 0; i < 3; ++i) {
        const double angle = std::asin(std::clamp(-mog[i] / norm, -1.0, 1.0));
        const int step = angle > limit ? 1 : (angle < -limit ? -1 : 0);
        const auto target = static_cast<long long>(m[static_cast<std::size_t>(i)]) + step;
        if (step == 0 || target < 0 || target >= static_cast<long long>(grid.resolution(i))) continue;
        m[static_cast<std::size_t>(i)] = static_cast<std::size_t>(target);
        moved = true;
    }
    if (!moved) return std::nullopt;
    return grid.index(m);
}

inline std::optional<CellIndex> descent_step(const Grid& grid, const Vec& mog, CellIndex cell,
                                             double terminal = kTerminalLength) {
    return grid.dim() == 2 ? descent_step_2d(grid, mog, cell, terminal) : descent_step_3d(grid, mog, cell, terminal);
}

inline constexpr std::int64_t kNoSuccessor = -1;

struct HeatmapResult {
    ScalarField heights;
    std::vector<std::uint8_t> terminal;
    std::vector<std::int64_t> successor;      // kNoSuccessor for terminal cells
    std::vector<std::int64_t> contribution;   // quantized MOG length of each cell, in kHeightQuantum units
};

/// Heights of the gradient field heatmap. For a non-terminal cell c with successor s,
/// height(c) = q(c) + height(s) exactly, where q is the quantized MOG length; terminal cells have
/// height 0. A path that closes a cycle is cut at the cycle's lowest-index cell, which becomes terminal.
inline HeatmapResult gradient_field_heatmap(const VectorField& mog, unsigned threads = 0,
                                            double terminal_length = kTerminalLength) {
    const Grid& grid = mog.grid();
    const std::size_t n = grid.size();
    HeatmapResult out{ScalarField(grid, mog.objectives()), std::vector<std::uint8_t>(n, 0),
                      std::vector<std::int64_t>(n, kNoSuccessor), std::vector<std::int64_t>(n, 0)};

    parallel_chunks(n, threads, [&](unsigned, std::size_t begin, std::size_t end) {
        for (CellIndex c = begin; c < end; ++c) {
            const Vec v = mog.at(c);
            out.contribution[c] = quantize_length(v.norm());
            if (auto s = descent_step(grid, v, c, terminal_length)) out.successor[c] = static_cast<std::int64_t>(*s);
        }
    });

    // Cut cycles of the successor graph at their lowest-index cell.
    {
        enum : std::uint8_t { unseen, on_walk, settled };
        std::vector<std::uint8_t> state(n, unseen);
        std::vector<CellIndex> walk;
        for (CellIndex start = 0; start < n; ++start) {
            walk.clear();
            CellIndex c = start;
            while (state[c] == unseen) {
                state[c] = on_walk;
                walk.push_back(c);
                if (out.successor[c] == kNoSuccessor) break;
                c = static_cast<CellIndex>(out.successor[c]);
            }
            if (state[c] == on_walk && out.successor[c] != kNoSuccessor) {
                // c is on the current walk and was reached again: the walk's tail from c is a cycle.
                CellIndex representative = c;
                for (CellIndex d = static_cast<CellIndex>(out.successor[c]); d != c;
                     d = static_cast<CellIndex>(out.successor[d])) {
                    representative = std::min(representative, d);
                }
                out.successor[representative] = kNoSuccessor;
            }
            for (CellIndex w : walk) state[w] = settled;
        }
    }
    for (CellIndex c = 0; c < n; ++c) out.terminal[c] = out.successor[c] == kNoSuccessor ? 1 : 0;

    // Memoized accumulation; memo entries are either absent (-1) or final.
    std::vector<std::atomic<std::int64_t>> memo(n);
    for (auto& m : memo) m.store(-1, std::memory_order_relaxed);
    parallel_chunks(n, threads, [&](unsigned, std::size_t begin, std::size_t end) {
        std::vector<CellIndex> path;
        for (CellIndex start = begin; start < end; ++start) {
            if (memo[start].load(std::memory_order_acquire) >= 0) continue;
            path.clear();
            CellIndex c = start;
            std::int64_t base = 0;
            while (true) {
                const std::int64_t known = memo[c].load(std::memory_order_acquire);
                if (known >= 0) {
                    base = known;
                    break;
                }
                if (out.successor[c] == kNoSuccessor) {
                    memo[c].store(0, std::memory_order_release);
                    base = 0;
                    break;
                }
                path.push_back(c);
                c = static_cast<CellIndex>(out.successor[c]);
            }
            for (auto it = path.rbegin(); it != path.rend(); ++it) {
                base += out.contribution[*it];
                memo[*it].store(base, std::memory_order_release);
            }
        }
    });
    for (CellIndex c = 0; c < n; ++c) {
        out.heights[c] = static_cast<double>(memo[c].load(std::memory_order_relaxed)) * kHeightQuantum;
    }
    return out;
}

} // namespace moplot
