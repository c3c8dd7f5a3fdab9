#pragma once

// Benchmark catalog: analytic objectives, analytic gradients where available, box constraints.

#include "types.hpp"

#include <Eigen/Geometry>
#include <json.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace moplot {

enum class Family { bisphere, trisphere, peaks, zdt, dtlz2 };

inline std::string to_string(Family family) {
    switch (family) {
    case Family::bisphere: return "bisphere";
    case Family::trisphere: return "trisphere";
    case Family::peaks: return "peaks";
    case Family::zdt: return "zdt";
    case Family::dtlz2: return "dtlz2";
    }
    return "unknown";
}

inline Family family_from_string(const std::string& name) {
    for (Family f : {Family::bisphere, Family::trisphere, Family::peaks, Family::zdt, Family::dtlz2}) {
        if (to_string(f) == name) return f;
    }
    throw SpecError("unknown problem family '" + name + "'");
}

using ParamValue = std::variant<double, std::vector<double>>;
using ParamMap = std::map<std::string, ParamValue>;

enum class ParamType { real, integer, real_vector, integer_vector };

inline std::string to_string(ParamType type) {
    switch (type) {
    case ParamType::real: return "real";
    case ParamType::integer: return "integer";
    case ParamType::real_vector: return "real-vector";
    case ParamType::integer_vector: return "integer-vector";
    }
    return "unknown";
}

struct ParamSchema {
    std::string name;
    ParamType type;
    int length;  // 1 for scalars
    double min;
    double max;
    ParamValue default_value;
    std::string description;

    bool is_vector() const { return type == ParamType::real_vector || type == ParamType::integer_vector; }
    bool is_integer() const { return type == ParamType::integer || type == ParamType::integer_vector; }
};

struct ProblemSpec {
    Family family = Family::bisphere;
    int p = 2;
    int k = 2;
    ParamMap params;

    friend bool operator==(const ProblemSpec&, const ProblemSpec&) = default;
};

namespace detail {

inline Vec make_vec(std::initializer_list<double> values) {
    Vec v(static_cast<Eigen::Index>(values.size()));
    Eigen::Index i = 0;
    for (double x : values) v[i++] = x;
    return v;
}

inline Vec to_vec(const std::vector<double>& values) {
    Vec v(static_cast<Eigen::Index>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
    return v;
}

inline std::vector<double> to_std(const Vec& v) { return {v.data(), v.data() + v.size()}; }

/// Box used by each family. Spheres live in [-2,2]^p, the rest in the unit cube.
inline std::pair<Vec, Vec> family_bounds(Family family, int p) {
    const double lo = (family == Family::bisphere || family == Family::trisphere) ? -2.0 : 0.0;
    const double hi = (family == Family::bisphere || family == Family::trisphere) ? 2.0 : 1.0;
    return {Vec::Constant(p, lo), Vec::Constant(p, hi)};
}

inline void check_supported(Family family, int p, int k) {
    auto fail = [&] {
        throw SpecError(to_string(family) + " does not support p=" + std::to_string(p) + ", k=" + std::to_string(k));
    };
    if (p < 2 || p > 3 || k < 2 || k > 3) fail();
    switch (family) {
    case Family::bisphere:
        if (k != 2) fail();
        break;
    case Family::trisphere:
        if (k != 3) fail();
        break;
    case Family::peaks: break;
    case Family::zdt:
        if (p != 2 || k != 2) fail();
        break;
    case Family::dtlz2:
        if (p != 3 || k != 3) fail();
        break;
    }
}

} // namespace detail

/// Parameter schema for a family at the given dimensions, in a fixed order.
inline std::vector<ParamSchema> family_schema(Family family, int p, int k) {
    detail::check_supported(family, p, k);
    std::vector<ParamSchema> schema;
    auto center = [&](std::string name, std::vector<double> value2, std::vector<double> value3) {
        schema.push_back({std::move(name), ParamType::real_vector, p, -2.0, 2.0, p == 2 ? value2 : value3,
                          "sphere center"});
    };
    switch (family) {
    case Family::bisphere:
        center("a", {-1.0, 0.0}, {-1.0, 0.0, 0.0});
        center("b", {1.0, 0.0}, {1.0, 0.0, 0.0});
        break;
    case Family::trisphere:
        center("a", {-1.0, -1.0}, {-1.0, -0.5, -0.5});
        center("b", {1.0, -1.0}, {1.0, -1.0, 0.5});
        center("c", {0.0, 1.0}, {0.0, 1.0, 0.0});
        break;
    case Family::peaks: {
        schema.push_back({"n_peaks", ParamType::integer, 1, 1.0, 10.0, 3.0, "peaks per objective"});
        std::vector<double> seeds{4.0, 8.0, 15.0};
        seeds.resize(static_cast<std::size_t>(k));
        schema.push_back({"seeds", ParamType::integer_vector, k, 0.0, 4294967295.0, seeds,
                          "generator seed per objective"});
        break;
    }
    case Family::zdt:
        schema.push_back({"variant", ParamType::integer, 1, 1.0, 3.0, 1.0, "ZDT variant (1, 2 or 3)"});
        break;
    case Family::dtlz2: break;
    }
    return schema;
}

/// Fills defaults and validates every parameter against the family schema.
inline ProblemSpec canonicalize(const ProblemSpec& spec) {
    const auto schema = family_schema(spec.family, spec.p, spec.k);
    for (const auto& [name, value] : spec.params) {
        const bool known = std::any_of(schema.begin(), schema.end(), [&](const ParamSchema& s) { return s.name == name; });
        if (!known) throw SpecError("unknown parameter '" + name + "' for family " + to_string(spec.family));
    }
    ProblemSpec out{spec.family, spec.p, spec.k, {}};
    for (const auto& s : schema) {
        auto it = spec.params.find(s.name);
        ParamValue value = it == spec.params.end() ? s.default_value : it->second;
        std::vector<double> numbers;
        if (const auto* scalar = std::get_if<double>(&value)) {
            if (s.is_vector()) throw SpecError("parameter '" + s.name + "' must be a vector");
            numbers = {*scalar};
        } else {
            if (!s.is_vector()) throw SpecError("parameter '" + s.name + "' must be a scalar");
            numbers = std::get<std::vector<double>>(value);
            if (static_cast<int>(numbers.size()) != s.length) {
                throw SpecError("parameter '" + s.name + "' needs " + std::to_string(s.length) + " entries");
            }
        }
        for (double x : numbers) {
            if (!std::isfinite(x) || x < s.min || x > s.max) {
                throw SpecError("parameter '" + s.name + "' out of range [" + std::to_string(s.min) + ", " +
                                std::to_string(s.max) + "]");
            }
            if (s.is_integer() && x != std::floor(x)) throw SpecError("parameter '" + s.name + "' must be integral");
        }
        out.params.emplace(s.name, std::move(value));
    }
    return out;
}

inline nlohmann::json to_json(const ProblemSpec& spec) {
    const auto schema = family_schema(spec.family, spec.p, spec.k);
    nlohmann::json params = nlohmann::json::object();
    for (const auto& [name, value] : spec.params) {
        auto s = std::find_if(schema.begin(), schema.end(), [&](const ParamSchema& e) { return e.name == name; });
        const bool integral = s != schema.end() && s->is_integer();
        auto number = [&](double x) -> nlohmann::json {
            if (integral) return static_cast<std::int64_t>(x);
            return x;
        };
        if (const auto* scalar = std::get_if<double>(&value)) {
            params[name] = number(*scalar);
        } else {
            nlohmann::json arr = nlohmann::json::array();
            for (double x : std::get<std::vector<double>>(value)) arr.push_back(number(x));
            params[name] = std::move(arr);
        }
    }
    return {{"family", to_string(spec.family)}, {"k", spec.k}, {"p", spec.p}, {"params", std::move(params)}};
}

inline ParamMap params_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw SpecError("params must be a JSON object");
    ParamMap params;
    for (const auto& [name, value] : j.items()) {
        if (value.is_number()) {
            params[name] = value.get<double>();
        } else if (value.is_array() && std::all_of(value.begin(), value.end(), [](const auto& v) { return v.is_number(); })) {
            params[name] = value.get<std::vector<double>>();
        } else {
            throw SpecError("parameter '" + name + "' must be a number or an array of numbers");
        }
    }
    return params;
}

inline ProblemSpec spec_from_json(const nlohmann::json& j) {
    if (!j.is_object()) throw SpecError("problem spec must be a JSON object");
    try {
        ProblemSpec spec;
        spec.family = family_from_string(j.at("family").get<std::string>());
        spec.p = j.at("p").get<int>();
        spec.k = j.at("k").get<int>();
        if (j.contains("params")) spec.params = params_from_json(j.at("params"));
        return spec;
    } catch (const nlohmann::json::exception& e) {
        throw SpecError(std::string("malformed problem spec: ") + e.what());
    }
}

/// Sorted keys, no whitespace, defaults filled in. Used as cache and dataset key material.
inline std::string canonical_json(const ProblemSpec& spec) { return to_json(canonicalize(spec)).dump(); }

/// Deterministic 64-bit generator used by the peaks family (Steele, Lea & Flood's splitmix64).
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t state_;
};

/// One convex bowl of the peaks family: value (x-c)^T D (x-c) / height.
struct Peak {
    Vec center;
    SquareMatrix shape;  // symmetric positive definite
    double height;

    double value(const Vec& x) const {
        const Vec d = x - center;
        return d.dot(shape * d) / height;
    }
    Vec gradient(const Vec& x) const { return 2.0 * (shape * (x - center)) / height; }
};

/// Peaks of one objective. Per peak, draws in this order: the center (uniform in [0.1, 0.9]^p),
/// the rotation (an angle in [0, pi) for p=2, a Shoemake unit quaternion for p=3), the p axis
/// scales exp(U(-1, 1)), and the height U(0.5, 1.5). D = R diag(scales) R^T.
inline std::vector<Peak> generate_peaks(std::uint64_t seed, int n_peaks, int p) {
    SplitMix64 rng(seed);
    std::vector<Peak> peaks;
    peaks.reserve(static_cast<std::size_t>(n_peaks));
    for (int m = 0; m < n_peaks; ++m) {
        Peak peak;
        peak.center = Vec(p);
        for (int i = 0; i < p; ++i) peak.center[i] = rng.uniform(0.1, 0.9);
        SquareMatrix rotation(p, p);
        if (p == 2) {
            const double theta = rng.uniform(0.0, std::numbers::pi);
            rotation << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);
        } else {
            const double u1 = rng.uniform(), u2 = rng.uniform(), u3 = rng.uniform();
            const double two_pi = 2.0 * std::numbers::pi;
            const Eigen::Quaterniond q(std::sqrt(u1) * std::cos(two_pi * u3), std::sqrt(1 - u1) * std::sin(two_pi * u2),
                                       std::sqrt(1 - u1) * std::cos(two_pi * u2), std::sqrt(u1) * std::sin(two_pi * u3));
            rotation = q.toRotationMatrix();
        }
        Vec scales(p);
        for (int i = 0; i < p; ++i) scales[i] = std::exp(rng.uniform(-1.0, 1.0));
        peak.shape = rotation * scales.asDiagonal() * rotation.transpose();
        peak.height = rng.uniform(0.5, 1.5);
        peaks.push_back(std::move(peak));
    }
    return peaks;
}

using Evaluator = std::function<Vec(const Vec&)>;
using GradientEvaluator = std::function<GradientMatrix(const Vec&)>;

/// Central differences with step 1e-6 * (u_i - l_i); one-sided where the step would leave the box.
inline GradientMatrix finite_difference_gradients(const Evaluator& f, const Vec& lower, const Vec& upper, int k,
                                                  const Vec& x) {
    const auto p = x.size();
    GradientMatrix g(k, p);
    for (Eigen::Index i = 0; i < p; ++i) {
        const double h = 1e-6 * (upper[i] - lower[i]);
        Vec forward = x, backward = x;
        double span = 0.0;
        if (x[i] + h <= upper[i]) {
            forward[i] += h;
            span += h;
        }
        if (x[i] - h >= lower[i]) {
            backward[i] -= h;
            span += h;
        }
        const Vec diff = (f(forward) - f(backward)) / span;
        for (int j = 0; j < k; ++j) g(j, i) = diff[j];
    }
    return g;
}

/// A box-constrained MOP with p decision variables and k objectives. Immutable and thread-safe.
class Problem {
public:

    Problem(std::string id, Vec lower, Vec upper, int k, Evaluator evaluator, GradientEvaluator gradients = {},
            std::optional<ProblemSpec> spec = std::nullopt)
        : id_(std::move(id)), lower_(std::move(lower)), upper_(std::move(upper)), k_(k),
          evaluator_(std::move(evaluator)), gradients_(std::move(gradients)), spec_(std::move(spec)) {
        if (lower_.size() != upper_.size() || lower_.size() < 2 || lower_.size() > 3) {
            throw SpecError("decision dimension must be 2 or 3");
        }
        if (k_ < 2 || k_ > 3) throw SpecError("objective count must be 2 or 3");
        for (Eigen::Index i = 0; i < lower_.size(); ++i) {
            if (!(lower_[i] < upper_[i])) throw SpecError("lower bound must be below upper bound");
        }
    }

    const std::string& id() const { return id_; }
    int dim() const { return static_cast<int>(lower_.size()); }
    int objectives() const { return k_; }
    const Vec& lower() const { return lower_; }
    const Vec& upper() const { return upper_; }
    const std::optional<ProblemSpec>& spec() const { return spec_; }
    bool has_analytic_gradients() const { return static_cast<bool>(gradients_); }

    bool contains(const Vec& x) const {
        if (x.size() != lower_.size()) return false;
        for (Eigen::Index i = 0; i < x.size(); ++i) {
            if (!(x[i] >= lower_[i] && x[i] <= upper_[i])) return false;
        }
        return true;
    }

    Vec evaluate(const Vec& x) const {
        check_domain(x);
        return evaluator_(x);
    }

    /// Analytic gradients when the problem provides them, finite differences otherwise.
    GradientMatrix gradients(const Vec& x) const {
        check_domain(x);
        if (gradients_) return gradients_(x);
        return finite_difference_gradients(x);
    }

    GradientMatrix finite_difference_gradients(const Vec& x) const {
        check_domain(x);
        return moplot::finite_difference_gradients(evaluator_, lower_, upper_, k_, x);
    }

private:
    void check_domain(const Vec& x) const {
        if (!contains(x)) throw DomainError("point outside the feasible box of " + id_);
    }

    std::string id_;
    Vec lower_;
    Vec upper_;
    int k_;
    Evaluator evaluator_;
    GradientEvaluator gradients_;
    std::optional<ProblemSpec> spec_;
};

namespace detail {

inline Vec param_vec(const ProblemSpec& spec, const std::string& name) {
    return to_vec(std::get<std::vector<double>>(spec.params.at(name)));
}

inline double param_scalar(const ProblemSpec& spec, const std::string& name) {
    return std::get<double>(spec.params.at(name));
}

inline std::string derived_id(const ProblemSpec& spec) {
    const std::string d = std::to_string(spec.p) + "d";
    switch (spec.family) {
    case Family::bisphere: return "bisphere-" + d;
    case Family::trisphere: return "trisphere-" + d;
    case Family::peaks: return spec.k == (spec.p == 2 ? 2 : 3) ? "peaks-" + d : "peaks-" + d + "-" + std::to_string(spec.k) + "obj";
    case Family::zdt: return "zdt" + std::to_string(static_cast<int>(param_scalar(spec, "variant")));
    case Family::dtlz2: return "dtlz2";
    }
    return "unknown";
}

inline Problem make_spheres(const ProblemSpec& spec, std::vector<Vec> centers, Vec lower, Vec upper) {
    for (const auto& c : centers) {
        for (Eigen::Index i = 0; i < c.size(); ++i) {
            if (c[i] < lower[i] || c[i] > upper[i]) throw SpecError("sphere centers must lie inside the box");
        }
    }
    const int k = static_cast<int>(centers.size());
    auto eval = [centers](const Vec& x) {
        Vec f(static_cast<Eigen::Index>(centers.size()));
        for (std::size_t i = 0; i < centers.size(); ++i) f[static_cast<Eigen::Index>(i)] = (x - centers[i]).squaredNorm();
        return f;
    };
    auto grad = [centers](const Vec& x) {
        GradientMatrix g(static_cast<Eigen::Index>(centers.size()), x.size());
        for (std::size_t i = 0; i < centers.size(); ++i) g.row(static_cast<Eigen::Index>(i)) = 2.0 * (x - centers[i]).transpose();
        return g;
    };
    return Problem(derived_id(spec), std::move(lower), std::move(upper), k, eval, grad, spec);
}

inline Problem make_peaks(const ProblemSpec& spec, Vec lower, Vec upper) {
    const int n_peaks = static_cast<int>(param_scalar(spec, "n_peaks"));
    const auto seeds = std::get<std::vector<double>>(spec.params.at("seeds"));
    std::vector<std::vector<Peak>> landscape;
    for (double seed : seeds) landscape.push_back(generate_peaks(static_cast<std::uint64_t>(seed), n_peaks, spec.p));

    // Active peak: smallest value, ties to the lower index.
    auto active = [](const std::vector<Peak>& peaks, const Vec& x) {
        std::size_t best = 0;
        double best_value = peaks[0].value(x);
        for (std::size_t m = 1; m < peaks.size(); ++m) {
            const double v = peaks[m].value(x);
            if (v < best_value) {
                best_value = v;
                best = m;
            }
        }
        return std::pair{best, best_value};
    };
    auto eval = [landscape, active](const Vec& x) {
        Vec f(static_cast<Eigen::Index>(landscape.size()));
        for (std::size_t j = 0; j < landscape.size(); ++j) f[static_cast<Eigen::Index>(j)] = active(landscape[j], x).second;
        return f;
    };
    auto grad = [landscape, active](const Vec& x) {
        GradientMatrix g(static_cast<Eigen::Index>(landscape.size()), x.size());
        for (std::size_t j = 0; j < landscape.size(); ++j) {
            const auto m = active(landscape[j], x).first;
            g.row(static_cast<Eigen::Index>(j)) = landscape[j][m].gradient(x).transpose();
        }
        return g;
    };
    return Problem(derived_id(spec), std::move(lower), std::move(upper), spec.k, eval, grad, spec);
}

inline Problem make_zdt(const ProblemSpec& spec, Vec lower, Vec upper) {
    const int variant = static_cast<int>(param_scalar(spec, "variant"));
    auto eval = [variant](const Vec& x) {
        const double f1 = x[0];
        const double g = 1.0 + 9.0 * x[1];
        const double r = f1 / g;
        double h = 0.0;
        switch (variant) {
        case 1: h = 1.0 - std::sqrt(r); break;
        case 2: h = 1.0 - r * r; break;
        default: h = 1.0 - std::sqrt(r) - r * std::sin(10.0 * std::numbers::pi * f1); break;
        }
        return make_vec({f1, g * h});
    };
    // x1 = 0 falls back to finite differences: the square root has an infinite slope there.
    auto grad = [variant, eval, lower, upper](const Vec& x) {
        const double x1 = x[0];
        const double g = 1.0 + 9.0 * x[1];
        GradientMatrix out(2, 2);
        out(0, 0) = 1.0;
        out(0, 1) = 0.0;
        if (variant != 2 && x1 <= 0.0) return finite_difference_gradients(eval, lower, upper, 2, x);
        switch (variant) {
        case 1:
            out(1, 0) = -0.5 * std::sqrt(g / x1);
            out(1, 1) = 9.0 * (1.0 - 0.5 * std::sqrt(x1 / g));
            break;
        case 2:
            out(1, 0) = -2.0 * x1 / g;
            out(1, 1) = 9.0 * (1.0 + x1 * x1 / (g * g));
            break;
        default: {
            const double w = 10.0 * std::numbers::pi;
            out(1, 0) = -0.5 * std::sqrt(g / x1) - std::sin(w * x1) - w * x1 * std::cos(w * x1);
            out(1, 1) = 9.0 * (1.0 - 0.5 * std::sqrt(x1 / g));
            break;
        }
        }
        return out;
    };
    return Problem(derived_id(spec), std::move(lower), std::move(upper), 2, eval, grad, spec);
}

inline Problem make_dtlz2(const ProblemSpec& spec, Vec lower, Vec upper) {
    constexpr double half_pi = std::numbers::pi / 2.0;
    auto eval = [](const Vec& x) {
        const double g = (x[2] - 0.5) * (x[2] - 0.5);
        const double a = x[0] * half_pi, b = x[1] * half_pi;
        return make_vec({(1 + g) * std::cos(a) * std::cos(b), (1 + g) * std::cos(a) * std::sin(b), (1 + g) * std::sin(a)});
    };
    auto grad = [](const Vec& x) {
        const double g = (x[2] - 0.5) * (x[2] - 0.5);
        const double dg = 2.0 * (x[2] - 0.5);
        const double a = x[0] * half_pi, b = x[1] * half_pi;
        const double ca = std::cos(a), sa = std::sin(a), cb = std::cos(b), sb = std::sin(b);
        GradientMatrix out(3, 3);
        out << -(1 + g) * sa * half_pi * cb, -(1 + g) * ca * sb * half_pi, dg * ca * cb,
               -(1 + g) * sa * half_pi * sb, (1 + g) * ca * cb * half_pi, dg * ca * sb,
               (1 + g) * ca * half_pi, 0.0, dg * sa;
        return out;
    };
    return Problem(derived_id(spec), std::move(lower), std::move(upper), 3, eval, grad, spec);
}

} // namespace detail

/// Builds the problem a spec describes. Same spec, bitwise-identical evaluations.
inline Problem instantiate(const ProblemSpec& input) {
    const ProblemSpec spec = canonicalize(input);
    auto [lower, upper] = detail::family_bounds(spec.family, spec.p);
    switch (spec.family) {
    case Family::bisphere:
        return detail::make_spheres(spec, {detail::param_vec(spec, "a"), detail::param_vec(spec, "b")}, lower, upper);
    case Family::trisphere:
        return detail::make_spheres(
            spec, {detail::param_vec(spec, "a"), detail::param_vec(spec, "b"), detail::param_vec(spec, "c")}, lower, upper);
    case Family::peaks: return detail::make_peaks(spec, lower, upper);
    case Family::zdt: return detail::make_zdt(spec, lower, upper);
    case Family::dtlz2: return detail::make_dtlz2(spec, lower, upper);
    }
    throw SpecError("unknown family");
}

struct CatalogEntry {
    std::string id;
    Family family;
    int p;
    int k;
    std::vector<ParamSchema> schema;
    ProblemSpec defaults;
    std::string description;
};

/// The benchmark catalog, sorted by id.
inline const std::vector<CatalogEntry>& list_problems() {
    static const std::vector<CatalogEntry> catalog = [] {
        struct Row {
            const char* id;
            Family family;
            int p, k;
            ParamMap overrides;
            const char* description;
        };
        const std::vector<Row> rows = {
            {"bisphere-2d", Family::bisphere, 2, 2, {}, "two spheres; Pareto set is the segment between the centers"},
            {"bisphere-3d", Family::bisphere, 3, 2, {}, "two spheres in 3D"},
            {"dtlz2", Family::dtlz2, 3, 3, {}, "DTLZ2 with three variables and three objectives"},
            {"peaks-2d", Family::peaks, 2, 2, {}, "seeded multimodal peaks landscape, two objectives"},
            {"peaks-3d", Family::peaks, 3, 3, {}, "seeded multimodal peaks landscape, three objectives"},
            {"trisphere-2d", Family::trisphere, 2, 3, {}, "three spheres in the plane; Pareto set is the filled triangle"},
            {"trisphere-3d", Family::trisphere, 3, 3, {}, "three spheres in 3D; Pareto set is the filled triangle"},
            {"zdt1", Family::zdt, 2, 2, {{"variant", 1.0}}, "ZDT1 with two variables (convex front)"},
            {"zdt2", Family::zdt, 2, 2, {{"variant", 2.0}}, "ZDT2 with two variables (concave front)"},
            {"zdt3", Family::zdt, 2, 2, {{"variant", 3.0}}, "ZDT3 with two variables (disconnected front)"},
        };
        std::vector<CatalogEntry> out;
        for (const auto& row : rows) {
            auto schema = family_schema(row.family, row.p, row.k);
            for (auto& s : schema) {
                if (auto it = row.overrides.find(s.name); it != row.overrides.end()) s.default_value = it->second;
            }
            const ProblemSpec defaults = canonicalize({row.family, row.p, row.k, row.overrides});
            out.push_back({row.id, row.family, row.p, row.k, std::move(schema), defaults, row.description});
        }
        std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
        return out;
    }();
    return catalog;
}

inline std::vector<std::string> problem_ids() {
    std::vector<std::string> ids;
    for (const auto& e : list_problems()) ids.push_back(e.id);
    return ids;
}

inline const CatalogEntry* find_problem(const std::string& id) {
    for (const auto& e : list_problems()) {
        if (e.id == id) return &e;
    }
    return nullptr;
}

/// Catalog defaults for `id` with the given parameters replaced.
inline ProblemSpec spec_for(const std::string& id, const ParamMap& overrides = {}) {
    const auto* entry = find_problem(id);
    if (!entry) {
        std::string ids;
        for (const auto& e : list_problems()) ids += (ids.empty() ? "" : ", ") + e.id;
        throw SpecError("unknown problem '" + id + "' (valid: " + ids + ")");
    }
    ProblemSpec spec = entry->defaults;
    for (const auto& [name, value] : overrides) spec.params[name] = value;
    return canonicalize(spec);
}

inline nlohmann::json to_json(const ParamSchema& s) {
    nlohmann::json j{{"name", s.name}, {"type", to_string(s.type)}, {"length", s.length},
                     {"min", s.min},   {"max", s.max},              {"description", s.description}};
    if (const auto* scalar = std::get_if<double>(&s.default_value)) {
        j["default"] = s.is_integer() ? nlohmann::json(static_cast<std::int64_t>(*scalar)) : nlohmann::json(*scalar);
    } else {
        nlohmann::json arr = nlohmann::json::array();
        for (double x : std::get<std::vector<double>>(s.default_value)) {
            arr.push_back(s.is_integer() ? nlohmann::json(static_cast<std::int64_t>(x)) : nlohmann::json(x));
        }
        j["default"] = std::move(arr);
    }
    return j;
}

inline nlohmann::json catalog_json() {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& e : list_problems()) {
        nlohmann::json params = nlohmann::json::array();
        for (const auto& s : e.schema) params.push_back(to_json(s));
        const auto [lower, upper] = detail::family_bounds(e.family, e.p);
        out.push_back({{"id", e.id},
                       {"family", to_string(e.family)},
                       {"p", e.p},
                       {"k", e.k},
                       {"lower", detail::to_std(lower)},
                       {"upper", detail::to_std(upper)},
                       {"description", e.description},
                       {"params", std::move(params)},
                       {"spec", to_json(e.defaults)}});
    }
    return out;
}

} // namespace moplot
