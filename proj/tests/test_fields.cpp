#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace moplot;
using detail::make_vec;

TEST(Grid, CentersOfTwoByTwo) {
    const Grid g(make_vec({0, 0}), make_vec({1, 1}), {2, 2});
    EXPECT_EQ(g.size(), 4u);
    EXPECT_EQ(g.center(0), make_vec({0.25, 0.25}));
    EXPECT_EQ(g.center(1), make_vec({0.75, 0.25}));
    EXPECT_EQ(g.center(2), make_vec({0.25, 0.75}));
    EXPECT_EQ(g.center(3), make_vec({0.75, 0.75}));
}

TEST(Grid, LinearIndexIsFirstAxisFastest) {
    const Grid g(make_vec({0, 0}), make_vec({1, 1}), {2, 2});
    EXPECT_EQ(g.index({1, 0, 0}), 1u);
    EXPECT_EQ(g.index({0, 1, 0}), 2u);
    const Grid h(make_vec({0, 0, 0}), make_vec({1, 1, 1}), {3, 4, 5});
    EXPECT_EQ(h.index({2, 3, 4}), 2u + 3u * (3u + 4u * 4u));
    for (CellIndex c = 0; c < h.size(); ++c) EXPECT_EQ(h.index(h.multi_index(c)), c);
}

TEST(Grid, CenterFormulaAndLocateRoundTrip) {
    const Grid g(make_vec({-2, 0, 1}), make_vec({2, 1, 4}), {7, 5, 3});
    for (CellIndex c = 0; c < g.size(); ++c) {
        const Vec x = g.center(c);
        const auto m = g.multi_index(c);
        for (int i = 0; i < 3; ++i) {
            const double expected = g.lower()[i] + (m[static_cast<std::size_t>(i)] + 0.5) * (g.upper()[i] - g.lower()[i]) /
                                                       static_cast<double>(g.resolution(i));
            EXPECT_NEAR(x[i], expected, 1e-15);
        }
        EXPECT_EQ(g.locate(x), c);
    }
    EXPECT_EQ(g.locate(make_vec({2, 1, 4})), g.size() - 1);
    EXPECT_FALSE(g.locate(make_vec({2.1, 0.5, 2})).has_value());
}

TEST(Grid, SymmetricBoxesGetMirroredCenters) {
    const Grid g(make_vec({-2, -2}), make_vec({2, 2}), {200, 200});
    for (std::size_t j = 0; j < 200; ++j) EXPECT_EQ(g.coordinate(1, j), -g.coordinate(1, 199 - j));
}

TEST(Grid, Validation) {
    EXPECT_THROW(Grid(make_vec({0, 0}), make_vec({1, 1}), {1, 5}), SpecError);
    EXPECT_THROW(Grid(make_vec({0, 0}), make_vec({1, 1}), {5, 5, 5}), SpecError);
    EXPECT_THROW(Grid(make_vec({1, 0}), make_vec({0, 1}), {5, 5}), SpecError);
}

TEST(MakeGrid, DefaultsAndLimit) {
    const Problem p2 = instantiate(spec_for("bisphere-2d"));
    const Problem p3 = instantiate(spec_for("trisphere-3d"));
    EXPECT_EQ(make_grid(p2).resolution(), (std::vector<std::size_t>{1000, 1000}));
    EXPECT_EQ(make_grid(p3).resolution(), (std::vector<std::size_t>{100, 100, 100}));
    EXPECT_THROW(make_grid(p2, {5000, 5000}), ResolutionError);
    EXPECT_THROW(make_grid(p2, {100, 100}, 9999), ResolutionError);
    EXPECT_NO_THROW(make_grid(p2, {100, 100}, 10000));
    EXPECT_THROW(make_grid(p2, {100, 100, 100}), SpecError);
}

TEST(EvaluateField, BisphereMogNearTheSegment) {
    const Problem p = instantiate(spec_for("bisphere-2d"));
    const Grid g = make_grid(p, {100, 100});
    const auto land = evaluate_field(p, g);
    const Vec a = make_vec({-1, 0}), b = make_vec({1, 0});
    const double half_diag = 0.5 * std::hypot(g.width(0), g.width(1));
    int interior = 0;
    for (CellIndex c = 0; c < g.size(); ++c) {
        const Vec x = g.center(c);
        if (oracle::distance_to_segment(x, a, b) > half_diag) continue;
        // |MOG| = cos(theta / 2) with theta the angle between x - a and x - b.
        const Vec ua = (x - a).normalized(), ub = (x - b).normalized();
        EXPECT_NEAR(land.mog_length[c], std::cos(std::acos(std::clamp(ua.dot(ub), -1.0, 1.0)) / 2), 1e-9);
        // Next to the endpoints the two gradients are far from opposed, so the small-MOG
        // bound only holds over the middle 70% of the segment.
        if (std::abs(x[0]) <= 0.7) {
            ++interior;
            EXPECT_LT(land.mog_length[c], 0.05) << x.transpose();
        }
    }
    EXPECT_GT(interior, 50);
}

TEST(EvaluateField, ConstantShiftLeavesMogUnchanged) {
    const Problem base = instantiate(spec_for("peaks-2d"));
    const Problem shifted("shifted", base.lower(), base.upper(), 2,
                          [&](const Vec& x) { return Vec(base.evaluate(x) + make_vec({5.0, 0.0})); },
                          [&](const Vec& x) { return base.gradients(x); });
    const Grid g = make_grid(base, {40, 40});
    EXPECT_EQ(evaluate_field(base, g).mog, evaluate_field(shifted, g).mog);
}

TEST(EvaluateField, ParallelEqualsSequential) {
    for (const char* id : {"peaks-2d", "trisphere-3d"}) {
        const Problem p = instantiate(spec_for(id));
        const Grid g = make_grid(p, p.dim() == 2 ? std::vector<std::size_t>{64, 64} : std::vector<std::size_t>{16, 16, 16});
        const auto a = evaluate_field(p, g, 1), b = evaluate_field(p, g, 7);
        EXPECT_EQ(a.objectives, b.objectives);
        EXPECT_EQ(a.mog, b.mog);
        EXPECT_EQ(a.mog_length, b.mog_length);
        EXPECT_EQ(a.unit_gradients, b.unit_gradients);
        EXPECT_EQ(a.degenerate, b.degenerate);
    }
}

TEST(EvaluateField, MatchesPointwiseMog) {
    const Problem p = instantiate(spec_for("dtlz2"));
    const Grid g = make_grid(p, {8, 9, 10});
    const auto land = evaluate_field(p, g);
    for (CellIndex c = 0; c < g.size(); ++c) {
        const auto r = mog(p, g.center(c));
        EXPECT_EQ(land.mog.at(c), r.vector);
        EXPECT_EQ(land.mog_length[c], r.length);
        EXPECT_EQ(land.objectives.at(c), p.evaluate(g.center(c)));
    }
}

TEST(EvaluateField, ErrorsCarryTheCell) {
    const Problem p = instantiate(spec_for("bisphere-2d"));
    const Problem bad("bad", p.lower(), p.upper(), 2, [&](const Vec& x) {
        if (x[0] > 1.5 && x[1] > 1.5) throw std::runtime_error("boom");
        return p.evaluate(x);
    });
    const Grid g = make_grid(bad, {10, 10});
    try {
        evaluate_field(bad, g, 1);
        FAIL();
    } catch (const EvaluationError& e) {
        EXPECT_EQ(e.cell(), g.index({9, 9, 0}));
    }
    const Problem nan("nan", p.lower(), p.upper(), 2, [](const Vec&) { return make_vec({0.0, std::nan("")}); });
    EXPECT_THROW(evaluate_field(nan, g), EvaluationError);
}

TEST(Field, PayloadSizeChecked) {
    const Grid g(make_vec({0, 0}), make_vec({1, 1}), {3, 3});
    EXPECT_THROW(ScalarField(g, 2, std::vector<double>(8)), std::invalid_argument);
    EXPECT_NO_THROW(VectorField(g, 2, std::vector<double>(18)));
    EXPECT_NO_THROW(ObjectiveField(g, 3, std::vector<double>(27)));
}
