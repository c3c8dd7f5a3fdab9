// Batch front end: compute visualizations, export images and field files, import pre-computed
// fields, or serve the HTTP API.
//
// Exit codes: 0 success, 1 usage error, 2 compute error, 3 I/O error.

#include <moplot/moplot.hpp>

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using namespace moplot;

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> parts;
    std::stringstream in(s);
    for (std::string part; std::getline(in, part, sep);) parts.push_back(part);
    return parts;
}

double parse_number(const std::string& s, const std::string& what) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(s, &used);
    } catch (const std::exception&) {
        used = 0;
    }
    if (used == 0 || used != s.size()) throw UsageError("invalid number '" + s + "' in " + what);
    return v;
}

std::size_t parse_count(const std::string& s, const std::string& what) {
    const double v = parse_number(s, what);
    if (v < 0 || v != std::floor(v)) throw UsageError("expected a non-negative integer in " + what + ", got '" + s + "'");
    return static_cast<std::size_t>(v);
}

/// name=value, where value is a number or a comma-separated list of numbers.
std::pair<std::string, ParamValue> parse_param(const std::string& arg) {
    const auto eq = arg.find('=');
    if (eq == std::string::npos || eq == 0) throw UsageError("--param expects name=value, got '" + arg + "'");
    const std::string name = arg.substr(0, eq), value = arg.substr(eq + 1);
    const auto parts = split(value, ',');
    if (parts.empty()) throw UsageError("--param " + name + " has no value");
    if (parts.size() == 1 && value.find(',') == std::string::npos) return {name, parse_number(value, "--param " + name)};
    std::vector<double> list;
    for (const auto& part : parts) list.push_back(parse_number(part, "--param " + name));
    return {name, list};
}

std::set<Method> parse_methods(const std::vector<std::string>& names) {
    std::set<Method> methods;
    for (const auto& name : names) {
        for (const auto& part : split(name, ',')) {
            const auto m = method_from_string(part);
            if (!m) throw UsageError("unknown method '" + part + "' (expected heatmap, plot or cost)");
            methods.insert(*m);
        }
    }
    return methods;
}

std::optional<SliceSpec> parse_slice(const std::string& arg, const Grid& grid) {
    if (arg.empty() || grid.dim() != 3) return std::nullopt;
    const auto parts = split(arg, ',');
    if (parts.size() != 2) throw UsageError("--slice expects axis,index");
    const SliceSpec s{static_cast<int>(parse_count(parts[0], "--slice")), parse_count(parts[1], "--slice")};
    if (s.axis < 1 || s.axis > 3) throw UsageError("--slice axis must be 1, 2 or 3");
    if (s.index >= grid.resolution(s.axis - 1)) {
        throw UsageError("--slice index must be below " + std::to_string(grid.resolution(s.axis - 1)));
    }
    return s;
}

void write_views(const Dataset& d, const std::set<Method>& methods, const fs::path& out, std::optional<SliceSpec> plane,
                 bool objective_images) {
    for (Method m : methods) {
        write_image(decision_view(d, m, plane), out / (to_string(m) + ".ppm"));
        if (objective_images) write_image(objective_view(d, m), out / (to_string(m) + "-objective.ppm"));
    }
}

void write_onion(const ScalarField& heights, double threshold, const fs::path& out) {
    if (heights.grid().dim() != 3) throw UsageError("--onion needs a 3D problem");
    const auto shell = onion_shell(heights, threshold);
    const auto range = threshold_range(heights);
    const nlohmann::json j{{"threshold", threshold},
                           {"resolution", heights.grid().resolution()},
                           {"count", shell.cells.size()},
                           {"cells", shell.cells},
                           {"range", {{"lo", range.lo}, {"hi", range.hi}}}};
    write_bytes(out / "onion.json", j.dump() + "\n");
}

struct Options {
    std::string problem;
    std::vector<std::string> params;
    std::string resolution;
    std::vector<std::string> methods;
    std::string out;
    std::string slice;
    std::optional<double> onion;
    std::optional<int> serve;
    std::string import;
    unsigned threads = 0;
    bool force = false;
    bool list = false;
};

int run_compute(const Options& o) {
    if (o.out.empty()) throw UsageError("--out is required");
    ParamMap overrides;
    for (const auto& p : o.params) {
        auto [name, value] = parse_param(p);
        overrides[name] = value;
    }
    ComputeRequest request;
    try {
        request.spec = spec_for(o.problem, overrides);
    } catch (const SpecError& e) {
        throw UsageError(e.what());
    }
    request.resolution = default_resolution(request.spec.p);
    if (!o.resolution.empty()) {
        request.resolution.clear();
        for (const auto& part : split(o.resolution, ',')) request.resolution.push_back(parse_count(part, "--resolution"));
    }
    if (!o.methods.empty()) request.methods = parse_methods(o.methods);
    request.force = o.force;
    try {
        validate(request);
    } catch (const RequestError& e) {
        throw UsageError(e.what());
    }

    const Dataset d = compute_dataset(request, o.threads);
    const auto plane = parse_slice(o.slice, d.grid());
    const fs::path out(o.out);
    fs::create_directories(out);
    save_dataset(d, out);
    write_views(d, request.methods, out, plane, true);
    if (o.onion) write_onion(d.heatmap ? *d.heatmap : *d.cost, *o.onion, out);
    return 0;
}

/// Renders from field files only. Companion files (heatmap background, ranks, objectives) are
/// looked up next to the imported file under their standard names.
int run_import(const Options& o) {
    if (o.out.empty()) throw UsageError("--out is required");
    const fs::path path(o.import), dir = path.parent_path();
    const ScalarField imported = read_field_as<FieldKind::scalar>(path);
    const Grid& grid = imported.grid();

    std::set<Method> methods;
    if (!o.methods.empty()) {
        methods = parse_methods(o.methods);
    } else {
        const std::string stem = path.stem().string();
        if (stem == "plot-ranks") methods = {Method::plot};
        else if (const auto m = method_from_string(stem)) methods = {*m};
        else throw UsageError("cannot infer the method from '" + path.filename().string() + "'; pass --method");
    }

    const fs::path objectives_path = dir / files::objectives;
    const bool have_objectives = fs::exists(objectives_path);
    Dataset d{ComputeRequest{},
              have_objectives ? read_field_as<FieldKind::objective>(objectives_path) : ObjectiveField(grid, imported.objectives()),
              VectorField(grid, imported.objectives()), std::nullopt, std::nullopt, std::nullopt};
    if (have_objectives && !(d.objectives.grid() == grid)) throw UsageError("objectives.mopf is on a different grid");

    auto companion = [&](const char* name) {
        if (path.filename() == name) return imported;
        return read_field_as<FieldKind::scalar>(dir / name);
    };
    for (Method m : methods) {
        switch (m) {
        case Method::heatmap: d.heatmap = path.stem() == "plot-ranks" ? companion(files::heatmap) : imported; break;
        case Method::cost: d.cost = imported; break;
        case Method::plot: d.plot = plot_from_fields(companion(files::heatmap), companion(files::ranks)); break;
        }
    }
    const auto plane = parse_slice(o.slice, grid);
    const fs::path out(o.out);
    fs::create_directories(out);
    write_views(d, methods, out, plane, have_objectives);
    if (o.onion) write_onion(d.heatmap ? *d.heatmap : imported, *o.onion, out);
    return 0;
}

int run(const Options& o) {
    if (o.list) {
        for (const auto& entry : list_problems()) std::cout << entry.id << "\n";
        return 0;
    }
    if (o.serve) {
        Service service;
        std::cerr << "serving on port " << *o.serve << "\n";
        if (!serve(service, *o.serve)) throw IoError("cannot listen on port " + std::to_string(*o.serve));
        return 0;
    }
    if (!o.import.empty()) return run_import(o);
    if (o.problem.empty()) throw UsageError("one of --problem, --import, --serve or --list is required");
    return run_compute(o);
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Multi-objective landscape visualizations"};
    Options o;
    app.add_option("--problem", o.problem, "Problem id (see --list)");
    app.add_option("--param", o.params, "Parameter override name=value (lists comma-separated); repeatable");
    app.add_option("--resolution", o.resolution, "Cells per axis, n1,n2[,n3]");
    app.add_option("--method", o.methods, "heatmap, plot or cost; repeatable (default heatmap and plot)");
    app.add_option("--out", o.out, "Output directory");
    app.add_option("--slice", o.slice, "Plane axis,index shown in images of 3D problems (default 3,n3/2)");
    app.add_option("--onion", o.onion, "Write the onion shell at this height threshold (3D only)");
    app.add_option("--serve", o.serve, "Serve the HTTP API on this port");
    app.add_option("--import", o.import, "Render from a field file instead of computing");
    app.add_option("--threads", o.threads, "Worker threads (0 = hardware concurrency)");
    app.add_flag("--force", o.force, "Allow expensive cost landscapes with three objectives");
    app.add_flag("--list", o.list, "List problem ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        return run(o);
    } catch (const UsageError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const IoError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 3;
    } catch (const FieldFormatError& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 3;
    } catch (const fs::filesystem_error& e) {
        std::cerr << "I/O error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "compute error: " << e.what() << "\n";
        return 2;
    }
}
