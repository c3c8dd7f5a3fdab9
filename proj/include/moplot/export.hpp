#pragma once

// Color mapping, PPM images, the binary field file format and objective-space point lists.

#include "efficient_sets.hpp"
#include "fields.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <compare>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace moplot {

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class ColorScale { heat, gray };

struct Rgb {
    std::uint8_t r = 0, g = 0, b = 0;
    friend auto operator<=>(const Rgb&, const Rgb&) = default;
};

/// t = (log(1+h) - log(1+h_min)) / (log(1+h_max) - log(1+h_min)); all zeros for a constant field.
inline std::vector<double> normalize_log(std::span<const double> heights) {
    std::vector<double> t(heights.size(), 0.0);
    if (heights.empty()) return t;
    const auto [lo_it, hi_it] = std::minmax_element(heights.begin(), heights.end());
    const double lo = std::log1p(*lo_it), hi = std::log1p(*hi_it);
    if (!(hi > lo)) return t;
    for (std::size_t i = 0; i < heights.size(); ++i) {
        t[i] = std::clamp((std::log1p(heights[i]) - lo) / (hi - lo), 0.0, 1.0);
    }
    return t;
}

inline std::vector<double> normalize_log(const ScalarField& heights) { return normalize_log(heights.values()); }

/// heat: blue (0,0,255) -> yellow (255,255,0) -> red (255,0,0), piecewise linear; gray: black -> white.
/// Channels round half up. t is clamped to [0, 1].
inline Rgb apply_colorscale(double t, ColorScale scale) {
    t = std::isnan(t) ? 0.0 : std::clamp(t, 0.0, 1.0);
    auto byte = [](double v) { return static_cast<std::uint8_t>(std::floor(255.0 * v + 0.5)); };
    if (scale == ColorScale::gray) {
        const auto v = byte(t);
        return {v, v, v};
    }
    if (t <= 0.5) {
        const double s = 2.0 * t;
        return {byte(s), byte(s), byte(1.0 - s)};
    }
    const double s = 2.0 * t - 1.0;
    return {255, byte(1.0 - s), 0};
}

inline std::vector<Rgb> cell_colors(const ScalarField& heights, ColorScale scale) {
    const auto t = normalize_log(heights);
    std::vector<Rgb> colors(t.size());
    std::transform(t.begin(), t.end(), colors.begin(), [&](double v) { return apply_colorscale(v, scale); });
    return colors;
}

/// Gray heatmap background with efficient cells colored by rank on the heat scale (log-normalized).
inline std::vector<Rgb> plot_cell_colors(const PlotData& plot) {
    auto colors = cell_colors(plot.background, ColorScale::gray);
    std::vector<double> ranks(plot.ranks.begin(), plot.ranks.end());
    const auto t = normalize_log(ranks);
    for (std::size_t i = 0; i < plot.efficient.size(); ++i) colors[plot.efficient[i]] = apply_colorscale(t[i], ColorScale::heat);
    return colors;
}

struct Image {
    std::size_t width = 0;
    std::size_t height = 0;
    std::vector<std::uint8_t> rgb;  // row-major from the top row, 3 bytes per pixel

    void set(std::size_t x, std::size_t y, Rgb c) {
        auto* px = rgb.data() + 3 * (y * width + x);
        px[0] = c.r;
        px[1] = c.g;
        px[2] = c.b;
    }

    friend bool operator==(const Image&, const Image&) = default;
};

/// One pixel per cell of a 2D grid; column j1, and the top row is the largest x2.
inline Image decision_image(const Grid& grid, std::span<const Rgb> colors) {
    if (grid.dim() != 2) throw std::invalid_argument("decision-space images need a 2D grid");
    if (colors.size() != grid.size()) throw std::invalid_argument("one color per cell required");
    Image img{grid.resolution(0), grid.resolution(1), {}};
    img.rgb.resize(3 * img.width * img.height);
    for (std::size_t j2 = 0; j2 < img.height; ++j2) {
        for (std::size_t j1 = 0; j1 < img.width; ++j1) img.set(j1, img.height - 1 - j2, colors[grid.index({j1, j2, 0})]);
    }
    return img;
}

inline Image render(const ScalarField& heights, ColorScale scale) {
    return decision_image(heights.grid(), cell_colors(heights, scale));
}

inline Image render_plot(const PlotData& plot) { return decision_image(plot.background.grid(), plot_cell_colors(plot)); }

/// Binary PPM (P6, maxval 255).
inline std::string encode_ppm(const Image& img) {
    std::string out = "P6\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    out.append(reinterpret_cast<const char*>(img.rgb.data()), img.rgb.size());
    return out;
}

inline void write_bytes(const std::filesystem::path& path, std::string_view bytes) {
    std::ofstream file(path, std::ios::binary | std::ios::trunc);
    if (!file) throw IoError("cannot open " + path.string() + " for writing");
    file.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!file) throw IoError("failed writing " + path.string());
}

inline std::string read_bytes(const std::filesystem::path& path) {
    std::ifstream file(path, std::ios::binary);
    if (!file) throw IoError("cannot open " + path.string());
    std::string bytes((std::istreambuf_iterator<char>(file)), std::istreambuf_iterator<char>());
    if (file.bad()) throw IoError("failed reading " + path.string());
    return bytes;
}

inline void write_image(const Image& img, const std::filesystem::path& path) { write_bytes(path, encode_ppm(img)); }

// Field file: "MOPF", version u8 = 1, p u8, k u8, resolution p x u32, bounds l_1..l_p then
// u_1..u_p as f64, payload kind u8, then the values as f64 in linear-index order (cell-major).
// All integers and floats little-endian.

class FieldFormatError : public std::runtime_error {
public:
    enum class Reason { bad_magic, unsupported_version, truncated, invalid_header, wrong_kind };

    FieldFormatError(Reason reason, const std::string& what) : std::runtime_error(what), reason_(reason) {}
    Reason reason() const noexcept { return reason_; }

private:
    Reason reason_;
};

inline constexpr std::uint8_t kFieldFormatVersion = 1;

namespace detail {

inline void put_u32(std::string& out, std::uint32_t v) {
    for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

inline void put_f64(std::string& out, double d) {
    const auto v = std::bit_cast<std::uint64_t>(d);
    for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xff));
}

class Reader {
public:
    explicit Reader(std::string_view bytes) : bytes_(bytes) {}

    std::uint8_t u8() { return static_cast<std::uint8_t>(take(1)[0]); }

    std::uint32_t u32() {
        const auto s = take(4);
        std::uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(static_cast<std::uint8_t>(s[static_cast<std::size_t>(i)])) << (8 * i);
        return v;
    }

    double f64() {
        const auto s = take(8);
        std::uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(static_cast<std::uint8_t>(s[static_cast<std::size_t>(i)])) << (8 * i);
        return std::bit_cast<double>(v);
    }

    std::string_view take(std::size_t n) {
        if (bytes_.size() - pos_ < n) {
            throw FieldFormatError(FieldFormatError::Reason::truncated, "field file truncated at byte " + std::to_string(bytes_.size()));
        }
        auto s = bytes_.substr(pos_, n);
        pos_ += n;
        return s;
    }

    std::size_t remaining() const { return bytes_.size() - pos_; }

private:
    std::string_view bytes_;
    std::size_t pos_ = 0;
};

} // namespace detail

template <FieldKind Kind>
std::string encode_field(const Field<Kind>& field) {
    const Grid& grid = field.grid();
    std::string out = "MOPF";
    out.push_back(static_cast<char>(kFieldFormatVersion));
    out.push_back(static_cast<char>(grid.dim()));
    out.push_back(static_cast<char>(field.objectives()));
    for (int i = 0; i < grid.dim(); ++i) detail::put_u32(out, static_cast<std::uint32_t>(grid.resolution(i)));
    for (int i = 0; i < grid.dim(); ++i) detail::put_f64(out, grid.lower()[i]);
    for (int i = 0; i < grid.dim(); ++i) detail::put_f64(out, grid.upper()[i]);
    out.push_back(static_cast<char>(Kind));
    out.reserve(out.size() + 8 * field.values().size());
    for (double v : field.values()) detail::put_f64(out, v);
    return out;
}

using AnyField = std::variant<ScalarField, VectorField, ObjectiveField>;

inline AnyField decode_field(std::string_view bytes) {
    using Reason = FieldFormatError::Reason;
    detail::Reader in(bytes);
    if (bytes.size() < 4 || bytes.substr(0, 4) != "MOPF") throw FieldFormatError(Reason::bad_magic, "not a field file (bad magic)");
    in.take(4);
    const auto version = in.u8();
    if (version != kFieldFormatVersion) {
        throw FieldFormatError(Reason::unsupported_version, "unsupported field file version " + std::to_string(version));
    }
    const int p = in.u8();
    const int k = in.u8();
    if (p < 2 || p > 3 || k < 1 || k > 3) throw FieldFormatError(Reason::invalid_header, "invalid field dimensions");
    std::vector<std::size_t> resolution;
    for (int i = 0; i < p; ++i) resolution.push_back(in.u32());
    Vec lower(p), upper(p);
    for (int i = 0; i < p; ++i) lower[i] = in.f64();
    for (int i = 0; i < p; ++i) upper[i] = in.f64();
    const auto kind = in.u8();
    try {
        Grid grid(lower, upper, resolution);
        const std::size_t components = kind == 1 ? 1 : (kind == 2 ? static_cast<std::size_t>(p) : static_cast<std::size_t>(k));
        if (kind < 1 || kind > 3) throw FieldFormatError(Reason::invalid_header, "unknown payload kind " + std::to_string(kind));
        const std::size_t count = grid.size() * components;
        if (in.remaining() / 8 < count) throw FieldFormatError(Reason::truncated, "field payload truncated");
        if (in.remaining() != 8 * count) throw FieldFormatError(Reason::invalid_header, "trailing bytes after field payload");
        std::vector<double> values(count);
        for (auto& v : values) v = in.f64();
        switch (kind) {
        case 1: return ScalarField(grid, k, std::move(values));
        case 2: return VectorField(grid, k, std::move(values));
        default: return ObjectiveField(grid, k, std::move(values));
        }
    } catch (const SpecError& e) {
        throw FieldFormatError(Reason::invalid_header, std::string("invalid field grid: ") + e.what());
    }
}

template <FieldKind Kind>
Field<Kind> decode_field_as(std::string_view bytes) {
    auto any = decode_field(bytes);
    if (auto* f = std::get_if<Field<Kind>>(&any)) return std::move(*f);
    throw FieldFormatError(FieldFormatError::Reason::wrong_kind, "field file holds a different payload kind");
}

template <FieldKind Kind>
void write_field(const Field<Kind>& field, const std::filesystem::path& path) {
    write_bytes(path, encode_field(field));
}

inline AnyField read_field(const std::filesystem::path& path) { return decode_field(read_bytes(path)); }

template <FieldKind Kind>
Field<Kind> read_field_as(const std::filesystem::path& path) {
    return decode_field_as<Kind>(read_bytes(path));
}

struct ObjectivePoint {
    Vec f;
    Rgb color;
};

/// One point per cell: its objective vector with the color the decision-space view gives that cell.
inline std::vector<ObjectivePoint> objective_space_view(const ObjectiveField& objectives, std::span<const Rgb> colors) {
    if (colors.size() != objectives.size()) throw std::invalid_argument("one color per cell required");
    std::vector<ObjectivePoint> points;
    points.reserve(objectives.size());
    for (CellIndex c = 0; c < objectives.size(); ++c) points.push_back({objectives.at(c), colors[c]});
    return points;
}

/// Draw order for objective-space scatter plots: larger key first, ties by cell index.
inline std::vector<std::size_t> draw_order(std::span<const double> key) {
    std::vector<std::size_t> order(key.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return key[a] > key[b]; });
    return order;
}

/// Keys that put gray background cells underneath and the best-ranked efficient cells on top.
inline std::vector<double> plot_draw_keys(const PlotData& plot) {
    const auto t = normalize_log(plot.background);
    std::vector<double> key(t.size());
    std::transform(t.begin(), t.end(), key.begin(), [](double v) { return 2.0 + v; });
    std::vector<double> ranks(plot.ranks.begin(), plot.ranks.end());
    const auto tr = normalize_log(ranks);
    for (std::size_t i = 0; i < plot.efficient.size(); ++i) key[plot.efficient[i]] = tr[i];
    return key;
}

/// Scatter of (f1, f2) on a white square canvas, f2 increasing upwards.
inline Image render_objective_space(std::span<const ObjectivePoint> points, std::span<const std::size_t> order,
                                    std::size_t size = 512) {
    Image img{size, size, std::vector<std::uint8_t>(3 * size * size, 255)};
    if (points.empty()) return img;
    double lo0 = points[0].f[0], hi0 = lo0, lo1 = points[0].f[1], hi1 = lo1;
    for (const auto& pt : points) {
        lo0 = std::min(lo0, pt.f[0]);
        hi0 = std::max(hi0, pt.f[0]);
        lo1 = std::min(lo1, pt.f[1]);
        hi1 = std::max(hi1, pt.f[1]);
    }
    const double s0 = hi0 > lo0 ? hi0 - lo0 : 1.0, s1 = hi1 > lo1 ? hi1 - lo1 : 1.0;
    const auto last = static_cast<double>(size - 1);
    for (std::size_t i : order) {
        const auto& pt = points[i];
        const auto x = static_cast<std::size_t>(std::llround((pt.f[0] - lo0) / s0 * last));
        const auto y = static_cast<std::size_t>(std::llround((1.0 - (pt.f[1] - lo1) / s1) * last));
        img.set(x, y, pt.color);
    }
    return img;
}

} // namespace moplot
