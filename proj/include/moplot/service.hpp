#pragma once

// HTTP API over the compute pipeline: catalog, asynchronous compute jobs keyed by dataset id, and
// data views. Handlers are plain member functions returning a Response; mount() wires them to an
// httplib server.

#include "pipeline.hpp"

#include <httplib.h>
#include <json.hpp>

#include <atomic>
#include <chrono>
#include <condition_variable>
#include <cstdlib>
#include <filesystem>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <numeric>
#include <optional>
#include <shared_mutex>
#include <string>
#include <thread>

namespace moplot {

struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

using Query = std::map<std::string, std::string>;

enum class JobState { pending, ready, failed };

inline std::string to_string(JobState s) {
    switch (s) {
    case JobState::pending: return "pending";
    case JobState::ready: return "ready";
    case JobState::failed: return "failed";
    }
    return "unknown";
}

class Service {
public:
    struct Options {
        std::size_t max_cells = kDefaultMaxCells;
        std::size_t cache_bytes = std::size_t{2} << 30;
        std::optional<std::filesystem::path> cache_dir;  // disk spill; also reused across restarts
        unsigned threads = 0;

        /// Defaults, with cache_dir taken from MOPLOT_CACHE_DIR when set.
        static Options from_env() {
            Options o;
            if (const char* dir = std::getenv("MOPLOT_CACHE_DIR"); dir && *dir) o.cache_dir = dir;
            return o;
        }
    };

    Service() : Service(Options::from_env()) {}
    explicit Service(Options options) : options_(std::move(options)) {}

    ~Service() {
        std::list<std::jthread> workers;
        {
            std::lock_guard lock(workers_mutex_);
            workers.swap(workers_);
        }
        workers.clear();
    }

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    const Options& options() const { return options_; }

    // GET /api/problems
    Response problems() const { return json_response(200, catalog_json()); }

    // POST /api/compute
    Response compute(const std::string& body) {
        ComputeRequest request;
        try {
            request = request_from_json(nlohmann::json::parse(body));
            validate(request, options_.max_cells);
        } catch (const nlohmann::json::parse_error& e) {
            return error(400, std::string("request body is not JSON: ") + e.what());
        } catch (const RequestError& e) {
            return error(e.status(), e.what());
        }
        const std::string id = dataset_id(request);

        std::shared_ptr<Entry> entry;
        {
            std::unique_lock lock(mutex_);
            auto it = entries_.find(id);
            if (it != entries_.end() && it->second->state != JobState::failed) {
                const auto& e = *it->second;
                return json_response(e.state == JobState::ready ? 200 : 202,
                                     {{"id", id}, {"status", to_string(e.state)}});
            }
            entry = std::make_shared<Entry>();
            entry->request = request;
            entries_[id] = entry;
        }
        launch(id, entry);
        return json_response(202, {{"id", id}, {"status", to_string(JobState::pending)}});
    }

    // GET /api/status/{id}
    Response status(const std::string& id) const {
        std::shared_lock lock(mutex_);
        auto it = entries_.find(id);
        if (it == entries_.end()) return error(404, "unknown dataset id " + id);
        return json_response(200, describe(id, *it->second));
    }

    // GET /api/data/{id}/{view}
    Response data(const std::string& id, const std::string& view, const Query& query = {}) {
        std::shared_ptr<const Dataset> dataset;
        if (auto r = acquire(id, dataset)) return *r;
        try {
            if (view == "heatmap") return field_view(id, *dataset, Method::heatmap, query);
            if (view == "cost") return field_view(id, *dataset, Method::cost, query);
            if (view == "plot") return field_view(id, *dataset, Method::plot, query);
            if (view == "onion") return onion_view(*dataset, query);
            if (view == "objective-space") return objective_space(*dataset, query);
        } catch (const RequestError& e) {
            return error(e.status(), e.what());
        }
        return error(404, "unknown view " + view);
    }

    /// Blocks until the job for id is no longer pending; false on timeout or unknown id.
    bool wait(const std::string& id, std::chrono::milliseconds timeout = std::chrono::minutes(10)) {
        std::unique_lock lock(wait_mutex_);
        return done_.wait_for(lock, timeout, [&] {
            std::shared_lock entries_lock(mutex_);
            auto it = entries_.find(id);
            return it != entries_.end() && it->second->state != JobState::pending;
        });
    }

    /// Number of datasets computed from scratch (excluding loads from the disk cache).
    std::size_t compute_count() const { return computed_.load(); }

    /// The in-memory dataset for a ready id, loading it back from disk if it was spilled.
    std::shared_ptr<const Dataset> dataset(const std::string& id) {
        std::shared_ptr<const Dataset> d;
        return acquire(id, d) ? nullptr : d;
    }

    /// Total bytes of datasets currently held in memory.
    std::size_t resident_bytes() const {
        std::shared_lock lock(mutex_);
        std::size_t total = 0;
        for (const auto& [id, e] : entries_) total += e->data ? e->bytes : 0;
        return total;
    }

    void mount(httplib::Server& server) {
        server.set_default_headers({{"Access-Control-Allow-Origin", "*"}});
        auto reply = [](httplib::Response& res, const Response& r) {
            res.status = r.status;
            res.set_content(r.body, r.content_type);
        };
        server.Get("/api/problems", [this, reply](const httplib::Request&, httplib::Response& res) { reply(res, problems()); });
        server.Post("/api/compute", [this, reply](const httplib::Request& req, httplib::Response& res) {
            reply(res, compute(req.body));
        });
        server.Get(R"(/api/status/([0-9a-f]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
            reply(res, status(req.matches[1]));
        });
        server.Get(R"(/api/data/([0-9a-f]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
            reply(res, status(req.matches[1]));
        });
        server.Get(R"(/api/data/([0-9a-f]+)/([a-z-]+))", [this, reply](const httplib::Request& req, httplib::Response& res) {
            Query query;
            for (const auto& [key, value] : req.params) query.emplace(key, value);
            reply(res, data(req.matches[1], req.matches[2], query));
        });
    }

private:
    struct Entry {
        ComputeRequest request;
        JobState state = JobState::pending;
        std::string error;
        std::shared_ptr<const Dataset> data;  // null while pending, failed or spilled
        bool on_disk = false;
        std::size_t bytes = 0;
        std::atomic<std::uint64_t> last_used{0};
        nlohmann::json thresholds = nlohmann::json::object();
    };

    static Response json_response(int status, const nlohmann::json& body) { return {status, "application/json", body.dump()}; }

    static Response error(int status, const std::string& message) { return json_response(status, {{"error", message}}); }

    std::optional<std::filesystem::path> disk_path(const std::string& id) const {
        if (!options_.cache_dir) return std::nullopt;
        return *options_.cache_dir / id;
    }

    nlohmann::json describe(const std::string& id, const Entry& e) const {
        nlohmann::json j{{"id", id}, {"status", to_string(e.state)}, {"request", to_json(e.request)}};
        j["p"] = e.request.spec.p;
        j["k"] = e.request.spec.k;
        if (e.state == JobState::failed) j["error"] = e.error;
        if (e.state == JobState::ready) {
            nlohmann::json methods = nlohmann::json::array();
            for (Method m : {Method::heatmap, Method::plot, Method::cost}) {
                if (e.request.methods.contains(m) || (m == Method::heatmap && e.request.methods.contains(Method::plot))) {
                    methods.push_back(to_string(m));
                }
            }
            j["available"] = methods;
            j["thresholds"] = e.thresholds;
        }
        return j;
    }

    void launch(const std::string& id, std::shared_ptr<Entry> entry) {
        std::lock_guard lock(workers_mutex_);
        workers_.emplace_back([this, id, entry] { run_job(id, entry); });
    }

    void run_job(const std::string& id, const std::shared_ptr<Entry>& entry) {
        std::shared_ptr<const Dataset> result;
        std::string failure;
        try {
            const auto dir = disk_path(id);
            if (dir && std::filesystem::exists(*dir / files::request)) {
                try {
                    result = std::make_shared<const Dataset>(load_dataset(*dir));
                } catch (const std::exception&) {
                    result = nullptr;  // unreadable spill; recompute
                }
            }
            if (!result) {
                // A dataset that cannot be written through counts as failed, since eviction relies on the copy.
                auto computed = std::make_shared<const Dataset>(compute_dataset(entry->request, options_.threads, options_.max_cells));
                ++computed_;
                if (dir) save_dataset(*computed, *dir);
                result = std::move(computed);
            }
        } catch (const std::exception& e) {
            failure = e.what();
        }

        nlohmann::json thresholds = nlohmann::json::object();
        if (result && result->grid().dim() == 3) {
            for (Method m : {Method::heatmap, Method::cost}) {
                if (!result->has(m)) continue;
                const auto range = threshold_range(height_field(*result, m));
                thresholds[to_string(m)] = {{"lo", range.lo}, {"hi", range.hi}};
            }
        }
        {
            std::unique_lock lock(mutex_);
            if (result) {
                entry->data = result;
                entry->bytes = result->bytes();
                entry->on_disk = disk_path(id).has_value();
                entry->thresholds = std::move(thresholds);
                entry->last_used = ++clock_;
                entry->state = JobState::ready;
            } else {
                entry->error = failure;
                entry->state = JobState::failed;
            }
            evict_locked(entry.get());
        }
        {
            std::lock_guard lock(wait_mutex_);
        }
        done_.notify_all();
    }

    /// Least recently used datasets leave memory until the total fits the cap. With a cache
    /// directory they stay reachable on disk; without one their entries are dropped.
    void evict_locked(const Entry* keep) {
        std::size_t total = 0;
        for (const auto& [id, e] : entries_) total += e->data ? e->bytes : 0;
        while (total > options_.cache_bytes) {
            auto victim = entries_.end();
            for (auto it = entries_.begin(); it != entries_.end(); ++it) {
                const auto& e = *it->second;
                if (!e.data || &e == keep) continue;
                if (victim == entries_.end() || e.last_used < victim->second->last_used) victim = it;
            }
            if (victim == entries_.end()) break;
            total -= victim->second->bytes;
            if (victim->second->on_disk) {
                victim->second->data.reset();
            } else {
                entries_.erase(victim);
            }
        }
    }

    /// Looks up a ready dataset; returns an error response when it is unknown, pending or failed.
    std::optional<Response> acquire(const std::string& id, std::shared_ptr<const Dataset>& out) {
        std::shared_ptr<Entry> entry;
        {
            std::shared_lock lock(mutex_);
            auto it = entries_.find(id);
            if (it == entries_.end()) return error(404, "unknown dataset id " + id);
            entry = it->second;
            if (entry->state == JobState::pending) {
                return json_response(409, {{"error", "dataset is not ready"}, {"status", "pending"}});
            }
            if (entry->state == JobState::failed) {
                return json_response(409, {{"error", "computation failed: " + entry->error}, {"status", "failed"}});
            }
            entry->last_used = ++clock_;
            out = entry->data;
        }
        if (out) return std::nullopt;

        // Spilled to disk: load outside the lock, then publish.
        try {
            out = std::make_shared<const Dataset>(load_dataset(*disk_path(id)));
        } catch (const std::exception& e) {
            return error(500, std::string("cannot reload spilled dataset: ") + e.what());
        }
        std::unique_lock lock(mutex_);
        if (!entry->data) entry->data = out;
        out = entry->data;
        evict_locked(entry.get());
        return std::nullopt;
    }

    static std::optional<std::string> param(const Query& q, const std::string& key) {
        auto it = q.find(key);
        if (it == q.end() || it->second.empty()) return std::nullopt;
        return it->second;
    }

    static long long integer_param(const std::string& key, const std::string& value) {
        std::size_t used = 0;
        long long v = 0;
        try {
            v = std::stoll(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != value.size()) throw RequestError(400, key + " must be an integer");
        return v;
    }

    static double real_param(const std::string& key, const std::string& value) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(value, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != value.size() || !std::isfinite(v)) throw RequestError(400, key + " must be a finite number");
        return v;
    }

    static std::string format_param(const Query& q, std::initializer_list<const char*> allowed) {
        const std::string format = param(q, "format").value_or("json");
        for (const char* a : allowed) {
            if (format == a) return format;
        }
        throw RequestError(400, "unsupported format " + format);
    }

    /// Slice parameters; required for 3D unless `optional_slice`, ignored for 2D.
    static std::optional<SliceSpec> slice_param(const Grid& grid, const Query& q, bool optional_slice) {
        if (grid.dim() == 2) return std::nullopt;
        const auto axis = param(q, "axis"), index = param(q, "index");
        if (!axis && !index && optional_slice) return std::nullopt;
        if (!axis || !index) throw RequestError(400, "3D datasets need axis and index");
        const long long a = integer_param("axis", *axis), i = integer_param("index", *index);
        if (a < 1 || a > 3) throw RequestError(400, "axis must be 1, 2 or 3");
        if (i < 0 || static_cast<std::size_t>(i) >= grid.resolution(static_cast<int>(a - 1))) {
            throw RequestError(400, "index outside [0, " + std::to_string(grid.resolution(static_cast<int>(a - 1))) + ")");
        }
        return SliceSpec{static_cast<int>(a), static_cast<std::size_t>(i)};
    }

    static void require(const Dataset& d, Method m) {
        if (!d.has(m)) throw RequestError(404, to_string(m) + " was not computed for this dataset");
    }

    static nlohmann::json grid_json(const Grid& g) {
        return {{"lower", detail::to_std(g.lower())}, {"upper", detail::to_std(g.upper())}, {"resolution", g.resolution()}};
    }

    Response field_view(const std::string& id, const Dataset& d, Method m, const Query& q) const {
        require(d, m);
        const std::string format = format_param(q, {"json", "ppm", "field"});
        const Grid& grid = d.grid();
        const auto plane = slice_param(grid, q, format == "field");

        if (format == "ppm") return {200, "image/x-portable-pixmap", encode_ppm(decision_view(d, m, plane))};

        const ScalarField& heights = height_field(d, m);
        if (format == "field") {
            const ScalarField full = m == Method::plot ? rank_field(*d.plot) : heights;
            const std::string bytes = plane ? encode_field(slice(full, plane->axis, plane->index).field2d) : encode_field(full);
            return {200, "application/octet-stream", bytes};
        }

        std::vector<CellIndex> cells;
        Grid view_grid = grid;
        if (plane) {
            cells = plane_cells(grid, plane->axis, plane->index);
            view_grid = plane_grid(grid, plane->axis);
        } else {
            cells.resize(grid.size());
            std::iota(cells.begin(), cells.end(), CellIndex{0});
        }
        const auto t = normalize_log(heights);
        const auto colors = dataset_colors(d, m);
        nlohmann::json values = nlohmann::json::array(), tv = nlohmann::json::array(), rgb = nlohmann::json::array();
        for (CellIndex c : cells) {
            values.push_back(heights[c]);
            tv.push_back(t[c]);
            rgb.push_back(colors[c].r);
            rgb.push_back(colors[c].g);
            rgb.push_back(colors[c].b);
        }
        nlohmann::json j{{"id", id}, {"view", to_string(m)}, {"grid", grid_json(view_grid)}, {"values", values}, {"t", tv}, {"rgb", rgb}};
        if (plane) {
            j["slice"] = {{"axis", plane->axis}, {"index", plane->index}, {"plane", grid.coordinate(plane->axis - 1, plane->index)}};
        }
        if (m == Method::plot) {
            nlohmann::json efficient = nlohmann::json::array();
            std::uint64_t max_rank = 0;
            for (std::size_t i = 0; i < d.plot->efficient.size(); ++i) {
                const CellIndex c = d.plot->efficient[i];
                efficient.push_back({{"cell", c}, {"x", detail::to_std(grid.center(c))}, {"rank", d.plot->ranks[i]}});
                max_rank = std::max(max_rank, d.plot->ranks[i]);
            }
            j["efficient"] = efficient;
            j["max_rank"] = max_rank;
        }
        return json_response(200, j);
    }

    static Method source_param(const Dataset& d, const Query& q, Method fallback) {
        const auto name = param(q, "source");
        if (!name) return fallback;
        const auto m = method_from_string(*name);
        if (!m) throw RequestError(400, "unknown source " + *name);
        require(d, *m);
        return *m;
    }

    Response onion_view(const Dataset& d, const Query& q) const {
        if (d.grid().dim() != 3) throw RequestError(400, "onion layers need a 3D dataset");
        const Method source = source_param(d, q, d.has(Method::cost) && !d.has(Method::heatmap) ? Method::cost : Method::heatmap);
        if (source == Method::plot) throw RequestError(400, "onion source must be heatmap or cost");
        require(d, source);
        const auto threshold = param(q, "threshold");
        if (!threshold) throw RequestError(400, "threshold is required");
        const double c = real_param("threshold", *threshold);
        const ScalarField& heights = height_field(d, source);
        const auto shell = onion_shell(heights, c);
        const auto range = threshold_range(heights);
        return json_response(200, {{"source", to_string(source)},
                                   {"threshold", c},
                                   {"grid", grid_json(d.grid())},
                                   {"count", shell.cells.size()},
                                   {"cells", shell.cells},
                                   {"range", {{"lo", range.lo}, {"hi", range.hi}}}});
    }

    Response objective_space(const Dataset& d, const Query& q) const {
        const Method source = source_param(d, q, d.has(Method::plot) ? Method::plot : (d.has(Method::heatmap) ? Method::heatmap : Method::cost));
        const std::string format = format_param(q, {"json", "ppm"});
        if (format == "ppm") return {200, "image/x-portable-pixmap", encode_ppm(objective_view(d, source))};
        const auto [points, order] = objective_points(d, source);
        const int k = d.objectives.objectives();
        nlohmann::json f = nlohmann::json::array(), rgb = nlohmann::json::array();
        for (int i = 0; i < k; ++i) {
            nlohmann::json column = nlohmann::json::array();
            for (const auto& pt : points) column.push_back(pt.f[i]);
            f.push_back(std::move(column));
        }
        for (const auto& pt : points) {
            rgb.push_back(pt.color.r);
            rgb.push_back(pt.color.g);
            rgb.push_back(pt.color.b);
        }
        return json_response(200, {{"source", to_string(source)}, {"k", k}, {"count", points.size()}, {"f", f}, {"rgb", rgb}, {"order", order}});
    }

    Options options_;
    mutable std::shared_mutex mutex_;
    std::map<std::string, std::shared_ptr<Entry>> entries_;
    mutable std::atomic<std::uint64_t> clock_{0};
    std::atomic<std::size_t> computed_{0};

    std::mutex wait_mutex_;
    std::condition_variable done_;

    std::mutex workers_mutex_;
    std::list<std::jthread> workers_;
};

/// Serves the API on host:port until the server is stopped.
inline bool serve(Service& service, int port, const std::string& host = "0.0.0.0") {
    httplib::Server server;
    service.mount(server);
    return server.listen(host, port);
}

} // namespace moplot
