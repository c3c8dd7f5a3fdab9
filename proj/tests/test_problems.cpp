#include "oracles.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace moplot;
using detail::make_vec;

TEST(Instantiate, BisphereDefaults) {
    const Problem p = instantiate(spec_for("bisphere-2d"));
    EXPECT_EQ(p.dim(), 2);
    EXPECT_EQ(p.objectives(), 2);
    EXPECT_EQ(p.lower(), make_vec({-2, -2}));
    EXPECT_EQ(p.upper(), make_vec({2, 2}));
}

TEST(Instantiate, Dtlz2OverUnitCube) {
    const Problem p = instantiate({Family::dtlz2, 3, 3, {}});
    EXPECT_EQ(p.objectives(), 3);
    EXPECT_EQ(p.lower(), Vec::Zero(3));
    EXPECT_EQ(p.upper(), Vec::Ones(3));
}

TEST(Instantiate, PeaksIsDeterministic) {
    const ProblemSpec spec{Family::peaks, 2, 2, {{"n_peaks", 3.0}, {"seeds", std::vector<double>{4, 8}}}};
    const Problem a = instantiate(spec), b = instantiate(spec);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(0, 1);
    for (int i = 0; i < 200; ++i) {
        const Vec x = make_vec({u(rng), u(rng)});
        EXPECT_EQ(a.evaluate(x), b.evaluate(x));
        EXPECT_EQ(a.gradients(x), b.gradients(x));
    }
}

TEST(Instantiate, RejectsUnsupportedCombinations) {
    EXPECT_THROW(instantiate({Family::bisphere, 2, 3, {}}), SpecError);
    EXPECT_THROW(instantiate({Family::dtlz2, 2, 3, {}}), SpecError);
    EXPECT_THROW(instantiate({Family::zdt, 3, 2, {}}), SpecError);
    EXPECT_THROW(instantiate({Family::peaks, 4, 2, {}}), SpecError);
}

TEST(Instantiate, RejectsBadParameters) {
    EXPECT_THROW(instantiate({Family::bisphere, 2, 2, {{"a", std::vector<double>{3, 0}}}}), SpecError);
    EXPECT_THROW(instantiate({Family::bisphere, 2, 2, {{"a", std::vector<double>{0, 0, 0}}}}), SpecError);
    EXPECT_THROW(instantiate({Family::bisphere, 2, 2, {{"a", 1.0}}}), SpecError);
    EXPECT_THROW(instantiate({Family::bisphere, 2, 2, {{"radius", 1.0}}}), SpecError);
    EXPECT_THROW(instantiate({Family::zdt, 2, 2, {{"variant", 4.0}}}), SpecError);
    EXPECT_THROW(instantiate({Family::zdt, 2, 2, {{"variant", 1.5}}}), SpecError);
    EXPECT_THROW(instantiate({Family::peaks, 2, 2, {{"seeds", std::vector<double>{1, 2, 3}}}}), SpecError);
}

TEST(Evaluate, BisphereExamples) {
    const Problem p = instantiate(spec_for("bisphere-2d"));
    EXPECT_EQ(p.evaluate(make_vec({-1, 0})), make_vec({0, 4}));
    EXPECT_EQ(p.evaluate(make_vec({0, 0})), make_vec({1, 1}));
}

TEST(Evaluate, Dtlz2MatchesTextbookDefinition) {
    const Problem p = instantiate(spec_for("dtlz2"));
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(0, 1);
    std::vector<Vec> points{make_vec({0.5, 0.5, 0.5})};
    for (int i = 0; i < 100; ++i) points.push_back(make_vec({u(rng), u(rng), u(rng)}));
    for (const Vec& x : points) {
        const auto expected = oracle::dtlz2(x[0], x[1], x[2]);
        const Vec f = p.evaluate(x);
        for (int i = 0; i < 3; ++i) EXPECT_NEAR(f[i], expected[static_cast<std::size_t>(i)], 1e-14);
    }
    const Vec mid = p.evaluate(make_vec({0.5, 0.5, 0.5}));
    EXPECT_NEAR(mid[0], 0.5, 1e-15);
    EXPECT_NEAR(mid[1], 0.5, 1e-15);
    EXPECT_NEAR(mid[2], std::sqrt(0.5), 1e-15);
}

TEST(Evaluate, OutsideBoxIsDomainError) {
    const Problem p = instantiate(spec_for("bisphere-2d"));
    EXPECT_THROW(p.evaluate(make_vec({2.5, 0})), DomainError);
    EXPECT_THROW(p.gradients(make_vec({0, -3})), DomainError);
    EXPECT_THROW(p.evaluate(make_vec({0, 0, 0})), DomainError);
    EXPECT_NO_THROW(p.evaluate(make_vec({2, -2})));
}

TEST(Gradients, BisphereIsTwiceOffset) {
    const Problem p = instantiate(spec_for("bisphere-2d"));
    const GradientMatrix g = p.gradients(make_vec({0, 0}));
    EXPECT_EQ(Vec(g.row(0).transpose()), make_vec({2, 0}));
    EXPECT_EQ(Vec(g.row(1).transpose()), make_vec({-2, 0}));
}

TEST(Gradients, Zdt1FirstObjective) {
    const Problem p = instantiate(spec_for("zdt1"));
    const GradientMatrix g = p.gradients(make_vec({0.25, 0}));
    EXPECT_EQ(g(0, 0), 1.0);
    EXPECT_EQ(g(0, 1), 0.0);
}

TEST(Gradients, ZdtAtZeroIsFiniteFallback) {
    for (const char* id : {"zdt1", "zdt3"}) {
        const Problem p = instantiate(spec_for(id));
        const GradientMatrix g = p.gradients(make_vec({0.0, 0.5}));
        EXPECT_TRUE(g.allFinite()) << id;
    }
}

TEST(Gradients, FiniteDifferencesAgreeWithAnalytic) {
    std::mt19937_64 rng(11);
    for (const auto& entry : list_problems()) {
        const Problem p = instantiate(entry.defaults);
        ASSERT_TRUE(p.has_analytic_gradients());
        int checked = 0;
        for (int i = 0; i < 100; ++i) {
            Vec x(p.dim());
            for (int j = 0; j < p.dim(); ++j) {
                std::uniform_real_distribution<double> u(p.lower()[j], p.upper()[j]);
                x[j] = u(rng);
            }
            const GradientMatrix analytic = p.gradients(x), fd = p.finite_difference_gradients(x);
            // The peaks family switches branches on ridges; skip points within a step of one.
            if (entry.family == Family::peaks) {
                const Vec h = 1e-4 * (p.upper() - p.lower());
                bool ridge = false;
                for (int j = 0; j < p.dim() && !ridge; ++j) {
                    Vec lo = x, hi = x;
                    lo[j] = std::max(p.lower()[j], x[j] - h[j]);
                    hi[j] = std::min(p.upper()[j], x[j] + h[j]);
                    const GradientMatrix a = p.gradients(lo), b = p.gradients(hi);
                    ridge = (a - b).norm() > 1e-2 * (1.0 + analytic.norm());
                }
                if (ridge) continue;
            }
            for (Eigen::Index r = 0; r < analytic.rows(); ++r) {
                const double scale = std::max(1.0, analytic.row(r).norm());
                EXPECT_LE((analytic.row(r) - fd.row(r)).norm() / scale, 1e-4) << entry.id << " at " << x.transpose();
            }
            ++checked;
        }
        EXPECT_GT(checked, 50) << entry.id;
    }
}

TEST(Gradients, FiniteDifferencesOneSidedAtBoundary) {
    const Problem p = instantiate(spec_for("bisphere-2d"));
    const GradientMatrix fd = p.finite_difference_gradients(make_vec({2, -2}));
    EXPECT_NEAR(fd(0, 0), 6.0, 1e-4);
    EXPECT_NEAR(fd(0, 1), -4.0, 1e-4);
}

TEST(Catalog, ContainsRequiredEntries) {
    const auto ids = problem_ids();
    for (const char* id : {"bisphere-2d", "trisphere-3d", "peaks-2d", "zdt1", "zdt2", "zdt3", "dtlz2"}) {
        EXPECT_NE(std::find(ids.begin(), ids.end(), id), ids.end()) << id;
    }
}

TEST(Catalog, SortedAndStable) {
    const auto ids = problem_ids();
    EXPECT_TRUE(std::is_sorted(ids.begin(), ids.end()));
    EXPECT_EQ(ids, problem_ids());
    EXPECT_EQ(catalog_json().dump(), catalog_json().dump());
}

TEST(Catalog, EveryEntryInstantiatesAtDefaults) {
    for (const auto& entry : list_problems()) {
        const Problem p = instantiate(entry.defaults);
        EXPECT_EQ(p.id(), entry.id);
        EXPECT_EQ(p.dim(), entry.p);
        EXPECT_EQ(p.objectives(), entry.k);
        const Vec mid = (p.lower() + p.upper()) / 2;
        EXPECT_TRUE(p.evaluate(mid).allFinite()) << entry.id;
    }
}

TEST(Catalog, SchemaHasTypesBoundsAndDefaults) {
    const auto catalog = catalog_json();
    const auto bisphere = std::find_if(catalog.begin(), catalog.end(), [](const auto& e) { return e["id"] == "bisphere-2d"; });
    ASSERT_NE(bisphere, catalog.end());
    const auto& params = (*bisphere)["params"];
    ASSERT_EQ(params.size(), 2u);
    EXPECT_EQ(params[0]["name"], "a");
    EXPECT_EQ(params[0]["type"], "real-vector");
    EXPECT_EQ(params[0]["min"], -2.0);
    EXPECT_EQ(params[0]["max"], 2.0);
    EXPECT_EQ(params[0]["default"], nlohmann::json({-1.0, 0.0}));
    EXPECT_EQ(params[1]["default"], nlohmann::json({1.0, 0.0}));
}

TEST(Spec, CanonicalJsonIsSortedAndCompact) {
    const std::string s = canonical_json(spec_for("peaks-2d"));
    EXPECT_EQ(s, R"({"family":"peaks","k":2,"p":2,"params":{"n_peaks":3,"seeds":[4,8]}})");
}

TEST(Spec, JsonRoundTrip) {
    for (const auto& entry : list_problems()) {
        const auto j = to_json(entry.defaults);
        EXPECT_EQ(canonicalize(spec_from_json(j)), entry.defaults) << entry.id;
    }
}

TEST(Spec, UnknownIdListsValidIds) {
    try {
        spec_for("nope");
        FAIL();
    } catch (const SpecError& e) {
        EXPECT_NE(std::string(e.what()).find("bisphere-2d"), std::string::npos);
    }
}

TEST(Analytic, BisphereSegmentHasOpposingUnits) {
    const Problem p = instantiate(spec_for("bisphere-2d"));
    for (double t = 0.05; t < 1.0; t += 0.05) {
        const Vec x = make_vec({-1 + 2 * t, 0});
        const auto n = normalize_gradients(p.gradients(x));
        EXPECT_LT((n.units.row(0) + n.units.row(1)).norm(), 1e-15);
    }
}

TEST(Peaks, GeneratorIsSeedStable) {
    const auto a = generate_peaks(4, 3, 2), b = generate_peaks(4, 3, 2), c = generate_peaks(8, 3, 2);
    ASSERT_EQ(a.size(), 3u);
    for (std::size_t i = 0; i < 3; ++i) {
        EXPECT_EQ(a[i].center, b[i].center);
        EXPECT_EQ(a[i].shape, b[i].shape);
        EXPECT_EQ(a[i].height, b[i].height);
        EXPECT_NE(a[i].center, c[i].center);
        for (int j = 0; j < 2; ++j) {
            EXPECT_GE(a[i].center[j], 0.1);
            EXPECT_LE(a[i].center[j], 0.9);
        }
        // Shapes are symmetric positive definite.
        EXPECT_LT((a[i].shape - a[i].shape.transpose()).norm(), 1e-15);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Eigen::MatrixXd(a[i].shape));
        EXPECT_GT(es.eigenvalues().minCoeff(), 0.0);
    }
}

TEST(Peaks, ValueIsMinimumOverPeaks) {
    const Problem p = instantiate(spec_for("peaks-2d"));
    const auto peaks = generate_peaks(4, 3, 2);
    for (const auto& peak : peaks) {
        EXPECT_EQ(p.evaluate(peak.center)[0], 0.0);
    }
    const Vec x = make_vec({0.3, 0.7});
    double expected = peaks[0].value(x);
    for (const auto& peak : peaks) expected = std::min(expected, peak.value(x));
    EXPECT_EQ(p.evaluate(x)[0], expected);
}
