#pragma once

// Compute requests and the datasets they produce; shared by the CLI and the HTTP service.

#include "dominance.hpp"
#include "efficient_sets.hpp"
#include "export.hpp"
#include "fields.hpp"
#include "heatmap.hpp"
#include "problems.hpp"
#include "volume.hpp"

#include <json.hpp>
#include <openssl/evp.h>

#include <array>
#include <filesystem>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace moplot {

enum class Method { heatmap, plot, cost };

inline std::string to_string(Method m) {
    switch (m) {
    case Method::heatmap: return "heatmap";
    case Method::plot: return "plot";
    case Method::cost: return "cost";
    }
    return "unknown";
}

inline std::optional<Method> method_from_string(const std::string& name) {
    for (Method m : {Method::heatmap, Method::plot, Method::cost}) {
        if (to_string(m) == name) return m;
    }
    return std::nullopt;
}

/// Cost landscapes with three objectives above this many cells need an explicit force flag.
inline constexpr std::size_t kCostForceCells = 100'000;

/// Rejected request, carrying the HTTP status the service answers with.
class RequestError : public std::runtime_error {
public:
    RequestError(int status, const std::string& what) : std::runtime_error(what), status_(status) {}
    int status() const noexcept { return status_; }

private:
    int status_;
};

struct ComputeRequest {
    ProblemSpec spec;
    std::vector<std::size_t> resolution;
    std::set<Method> methods{Method::heatmap, Method::plot};
    bool force = false;
};

/// Canonical form used for dataset ids. The force flag does not change results and is left out.
inline nlohmann::json to_json(const ComputeRequest& r) {
    nlohmann::json methods = nlohmann::json::array();
    for (Method m : r.methods) methods.push_back(to_string(m));
    return {{"methods", methods}, {"resolution", r.resolution}, {"spec", to_json(canonicalize(r.spec))}};
}

inline std::string canonical_json(const ComputeRequest& r) { return to_json(r).dump(); }

inline std::string sha256_hex(std::string_view data) {
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    if (EVP_Digest(data.data(), data.size(), digest.data(), &length, EVP_sha256(), nullptr) != 1) {
        throw std::runtime_error("sha256 failed");
    }
    static constexpr char hex[] = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < length; ++i) {
        out.push_back(hex[digest[i] >> 4]);
        out.push_back(hex[digest[i] & 0xf]);
    }
    return out;
}

/// Content hash of the canonical request serialization.
inline std::string dataset_id(const ComputeRequest& r) { return sha256_hex(canonical_json(r)); }

/// Parses {"spec": {...}} or {"problem": id, "params": {...}}, plus "resolution", "methods", "force".
inline ComputeRequest request_from_json(const nlohmann::json& j) {
    try {
        ComputeRequest r;
        if (!j.is_object()) throw RequestError(400, "request must be a JSON object");
        if (j.contains("spec")) {
            r.spec = spec_from_json(j.at("spec"));
        } else if (j.contains("problem")) {
            const ParamMap overrides = j.contains("params") ? params_from_json(j.at("params")) : ParamMap{};
            r.spec = spec_for(j.at("problem").get<std::string>(), overrides);
        } else {
            throw RequestError(400, "request needs \"spec\" or \"problem\"");
        }
        r.spec = canonicalize(r.spec);
        if (j.contains("resolution")) {
            r.resolution = j.at("resolution").get<std::vector<std::size_t>>();
        } else {
            r.resolution = default_resolution(r.spec.p);
        }
        if (j.contains("methods")) {
            r.methods.clear();
            for (const auto& m : j.at("methods")) {
                auto method = method_from_string(m.get<std::string>());
                if (!method) throw RequestError(400, "unknown method " + m.dump());
                r.methods.insert(*method);
            }
            if (r.methods.empty()) throw RequestError(400, "no methods requested");
        }
        r.force = j.value("force", false);
        return r;
    } catch (const SpecError& e) {
        throw RequestError(400, e.what());
    } catch (const nlohmann::json::exception& e) {
        throw RequestError(400, std::string("malformed request: ") + e.what());
    }
}

/// Throws RequestError with 400 (invalid), 413 (too many cells) or 409 (expensive cost without force).
inline void validate(const ComputeRequest& r, std::size_t max_cells = kDefaultMaxCells) {
    try {
        const ProblemSpec spec = canonicalize(r.spec);
        if (r.resolution.size() != static_cast<std::size_t>(spec.p)) {
            throw RequestError(400, "resolution needs " + std::to_string(spec.p) + " entries");
        }
        std::size_t cells = 1;
        for (std::size_t n : r.resolution) {
            if (n < 2) throw RequestError(400, "each resolution entry must be at least 2");
            if (n > max_cells || cells > max_cells / n) throw RequestError(413, "resolution exceeds the cell limit");
            cells *= n;
        }
        if (r.methods.empty()) throw RequestError(400, "no methods requested");
        if (r.methods.contains(Method::cost) && spec.k == 3 && cells > kCostForceCells && !r.force) {
            throw RequestError(409, "cost landscape with 3 objectives over " + std::to_string(cells) +
                                        " cells is quadratic; resend with \"force\": true");
        }
    } catch (const SpecError& e) {
        throw RequestError(400, e.what());
    }
}

struct Dataset {
    ComputeRequest request;
    ObjectiveField objectives;
    VectorField mog;
    std::optional<ScalarField> heatmap;
    std::optional<PlotData> plot;
    std::optional<ScalarField> cost;

    const Grid& grid() const { return objectives.grid(); }

    bool has(Method m) const {
        switch (m) {
        case Method::heatmap: return heatmap.has_value();
        case Method::plot: return plot.has_value();
        case Method::cost: return cost.has_value();
        }
        return false;
    }

    std::size_t bytes() const {
        std::size_t total = 8 * (objectives.values().size() + mog.values().size());
        if (heatmap) total += 8 * heatmap->values().size();
        if (plot) total += 8 * plot->background.values().size() + 16 * plot->efficient.size();
        if (cost) total += 8 * cost->values().size();
        return total;
    }
};

/// Deterministic: the same request always produces bitwise-identical fields.
inline Dataset compute_dataset(const ComputeRequest& request, unsigned threads = 0,
                               std::size_t max_cells = kDefaultMaxCells) {
    const Problem problem = instantiate(request.spec);
    const Grid grid = make_grid(problem, request.resolution, max_cells);
    Landscape landscape = evaluate_field(problem, grid, threads);
    std::optional<ScalarField> heights;
    std::optional<PlotData> plot;
    if (request.methods.contains(Method::heatmap) || request.methods.contains(Method::plot)) {
        const auto heat = gradient_field_heatmap(landscape.mog, threads);
        if (request.methods.contains(Method::plot)) plot = compute_plot(landscape, heat, threads);
        heights = heat.heights;
    }
    Dataset out{request, std::move(landscape.objectives), std::move(landscape.mog), std::move(heights), std::move(plot),
                std::nullopt};
    if (request.methods.contains(Method::cost)) out.cost = cost_landscape(out.objectives, threads);
    return out;
}

/// Ranks as a scalar field: the rank of each efficient cell, 0 elsewhere.
inline ScalarField rank_field(const PlotData& plot) {
    ScalarField ranks(plot.background.grid(), plot.background.objectives());
    for (std::size_t i = 0; i < plot.efficient.size(); ++i) ranks[plot.efficient[i]] = static_cast<double>(plot.ranks[i]);
    return ranks;
}

inline PlotData plot_from_fields(ScalarField background, const ScalarField& ranks) {
    if (!(background.grid() == ranks.grid())) throw std::invalid_argument("plot fields are on different grids");
    PlotData plot{std::move(background), {}, {}};
    for (CellIndex c = 0; c < ranks.size(); ++c) {
        if (ranks[c] > 0.0) {
            plot.efficient.push_back(c);
            plot.ranks.push_back(static_cast<std::uint64_t>(ranks[c]));
        }
    }
    return plot;
}

/// File names used for a dataset on disk.
namespace files {
inline constexpr const char* request = "request.json";
inline constexpr const char* objectives = "objectives.mopf";
inline constexpr const char* mog = "mog.mopf";
inline constexpr const char* heatmap = "heatmap.mopf";
inline constexpr const char* ranks = "plot-ranks.mopf";
inline constexpr const char* cost = "cost.mopf";
} // namespace files

inline void save_dataset(const Dataset& d, const std::filesystem::path& dir) {
    std::filesystem::create_directories(dir);
    write_bytes(dir / files::request, to_json(d.request).dump(2) + "\n");
    write_field(d.objectives, dir / files::objectives);
    write_field(d.mog, dir / files::mog);
    if (d.heatmap) write_field(*d.heatmap, dir / files::heatmap);
    if (d.plot) write_field(rank_field(*d.plot), dir / files::ranks);
    if (d.cost) write_field(*d.cost, dir / files::cost);
}

inline Dataset load_dataset(const std::filesystem::path& dir) {
    const auto j = nlohmann::json::parse(read_bytes(dir / files::request));
    ComputeRequest request = request_from_json(j);
    Dataset d{request, read_field_as<FieldKind::objective>(dir / files::objectives),
              read_field_as<FieldKind::vector>(dir / files::mog), std::nullopt, std::nullopt, std::nullopt};
    if (std::filesystem::exists(dir / files::heatmap)) d.heatmap = read_field_as<FieldKind::scalar>(dir / files::heatmap);
    if (std::filesystem::exists(dir / files::ranks) && d.heatmap) {
        d.plot = plot_from_fields(*d.heatmap, read_field_as<FieldKind::scalar>(dir / files::ranks));
    }
    if (std::filesystem::exists(dir / files::cost)) d.cost = read_field_as<FieldKind::scalar>(dir / files::cost);
    return d;
}

/// Axis-aligned plane of a 3D dataset; `axis` is 1-based.
struct SliceSpec {
    int axis = 3;
    std::size_t index = 0;
};

/// Default plane: perpendicular to x3 through the middle of the grid.
inline SliceSpec default_slice(const Grid& grid) { return {3, grid.resolution(2) / 2}; }

inline const ScalarField& height_field(const Dataset& d, Method m) {
    switch (m) {
    case Method::heatmap:
        if (d.heatmap) return *d.heatmap;
        break;
    case Method::plot:
        if (d.plot) return d.plot->background;
        break;
    case Method::cost:
        if (d.cost) return *d.cost;
        break;
    }
    throw std::invalid_argument(to_string(m) + " was not computed for this dataset");
}

/// Per-cell colors of a decision-space view over the whole grid, so that every slice of a 3D
/// dataset shares one color normalization.
inline std::vector<Rgb> dataset_colors(const Dataset& d, Method m) {
    if (m == Method::plot) {
        (void)height_field(d, m);
        return plot_cell_colors(*d.plot);
    }
    return cell_colors(height_field(d, m), ColorScale::heat);
}

/// Decision-space image; 3D datasets are shown through one plane (the default plane if none is given).
inline Image decision_view(const Dataset& d, Method m, std::optional<SliceSpec> plane = std::nullopt) {
    const auto colors = dataset_colors(d, m);
    const Grid& grid = d.grid();
    if (grid.dim() == 2) return decision_image(grid, colors);
    const SliceSpec s = plane.value_or(default_slice(grid));
    const auto cells = plane_cells(grid, s.axis, s.index);
    std::vector<Rgb> plane_colors(cells.size());
    for (std::size_t i = 0; i < cells.size(); ++i) plane_colors[i] = colors[cells[i]];
    return decision_image(plane_grid(grid, s.axis), plane_colors);
}

/// Objective-space points colored like the decision-space view, with their draw order.
inline std::pair<std::vector<ObjectivePoint>, std::vector<std::size_t>> objective_points(const Dataset& d, Method m) {
    const auto colors = dataset_colors(d, m);
    auto points = objective_space_view(d.objectives, colors);
    std::vector<std::size_t> order;
    if (m == Method::plot) {
        order = draw_order(plot_draw_keys(*d.plot));
    } else {
        order = draw_order(normalize_log(height_field(d, m)));
    }
    return {std::move(points), std::move(order)};
}

inline Image objective_view(const Dataset& d, Method m) {
    const auto [points, order] = objective_points(d, m);
    return render_objective_space(points, order);
}

} // namespace moplot
