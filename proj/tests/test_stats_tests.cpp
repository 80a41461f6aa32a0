#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "discrim/stats_tests.hpp"
#include "test_helpers.hpp"

using namespace discrim;

// Reference values below were frozen from an independent implementation
// of the same distributions.

TEST_CASE("chi-square survival function on a fixed grid", "[stats]") {
    struct Row { double df, x, sf; };
    const Row rows[] = {
        {1, 0.5, 4.7950012218695337e-01},
        {1, 3.84, 5.0043521248705189e-02},
        {2, 5.99, 5.0036627086586287e-02},
        {4, 1.0, 9.0979598956895014e-01},
        {4, 9.49, 4.9953131223294894e-02},
        {10, 3.0, 9.8142406377785929e-01},
        {10, 18.31, 4.9954166343696781e-02},
        {21, 32.67, 5.0006814778493114e-02},
        {55, 73.0, 5.2587456098509740e-02},
    };
    for (const auto& row : rows)
        CHECK(special::chi2_sf(row.x, row.df) == Catch::Approx(row.sf).epsilon(1e-8));
    CHECK(special::chi2_sf(0.0, 4) == 1.0);
    CHECK(special::chi2_sf(1e6, 4) < 1e-12);
}

TEST_CASE("F survival function on a fixed grid", "[stats]") {
    struct Row { double df1, df2, x, sf; };
    const Row rows[] = {
        {1, 10, 4.96, 5.0087650566468203e-02},
        {2, 20, 3.49, 5.0104935024662609e-02},
        {3, 57, 2.77, 4.9789639100379535e-02},
        {5, 100, 1.0, 4.2182989437197044e-01},
        {4, 40, 5.0, 2.3055863919664971e-03},
    };
    for (const auto& row : rows)
        CHECK(special::f_sf(row.x, row.df1, row.df2) == Catch::Approx(row.sf).epsilon(1e-8));
    CHECK(special::f_sf(0.0, 3, 30) == 1.0);
}

TEST_CASE("incomplete gamma halves sum to one", "[stats]") {
    for (double a : {0.5, 1.0, 2.5, 10.0, 27.5})
        for (double x : {0.1, 1.0, 3.0, 12.0, 40.0})
            CHECK(special::gamma_p(a, x) + special::gamma_q(a, x) ==
                  Catch::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("box m statistic is zero for identical class covariances", "[stats]") {
    // mirrored pairs in both classes: S_0 = S_1 = S_p exactly
    const auto ds = make_dataset(
        DenseMatrix(8, 2, {0, 0, 2, 1, 0, 1, 2, 0, 10, 10, 12, 11, 10, 11, 12, 10}),
        {0, 0, 0, 0, 1, 1, 1, 1});
    const auto report = box_m_test(ds);
    CHECK(report.statistic == Catch::Approx(0.0).margin(1e-9));
    CHECK(report.p_value == Catch::Approx(1.0).margin(1e-9));
    CHECK_FALSE(report.rejected_at_05);
    CHECK_FALSE(report.fallback_used);
}

TEST_CASE("box m on a fixed two-class dataset matches frozen values", "[stats]") {
    const auto ds = make_dataset(
        DenseMatrix(13, 2,
                    {0, 0, 1, 0, 0, 1, 1, 1, 0.5, 0.5, 2, 1,
                     3, 3, 5, 3, 3, 7, 5, 7, 4, 5, 6, 4, 2, 6}),
        {0, 0, 0, 0, 0, 0, 1, 1, 1, 1, 1, 1, 1});
    const auto report = box_m_test(ds);
    CHECK(report.statistic == Catch::Approx(7.3514223698833794).epsilon(1e-10));
    CHECK(report.df1 == Catch::Approx(3.0));
    CHECK(report.p_value == Catch::Approx(6.1501490113040055e-02).epsilon(1e-8));
    CHECK_FALSE(report.rejected_at_05);
}

TEST_CASE("box m rejects strongly unequal covariances", "[stats]") {
    std::mt19937 rng(211);
    std::normal_distribution<double> unit(0.0, 1.0);
    DenseMatrix x(200, 3);
    std::vector<int> labels;
    for (int i = 0; i < 200; ++i) {
        const double scale = i < 100 ? 1.0 : 4.0;
        for (int j = 0; j < 3; ++j) x(i, j) = scale * unit(rng);
        labels.push_back(i < 100 ? 0 : 1);
    }
    const auto report = box_m_test(make_dataset(x, labels));
    CHECK(report.rejected_at_05);
    CHECK(report.p_value < 1e-6);
}

TEST_CASE("box m accepts matched Gaussians most of the time", "[stats]") {
    std::mt19937 rng(223);
    std::normal_distribution<double> unit(0.0, 1.0);
    int rejections = 0;
    for (int rep = 0; rep < 40; ++rep) {
        DenseMatrix x(120, 2);
        std::vector<int> labels;
        for (int i = 0; i < 120; ++i) {
            x(i, 0) = unit(rng) + (i < 60 ? 0.0 : 3.0);
            x(i, 1) = unit(rng);
            labels.push_back(i < 60 ? 0 : 1);
        }
        if (box_m_test(make_dataset(x, labels)).rejected_at_05) ++rejections;
    }
    // nominal level 0.05; allow slack for the chi-square approximation
    CHECK(rejections <= 8);
}

TEST_CASE("box m throws LogZero on a singular class covariance", "[stats]") {
    // class 0 is rank deficient (second column constant)
    const auto ds = make_dataset(
        DenseMatrix(8, 2, {0, 5, 1, 5, 2, 5, 3, 5, 0, 0, 1, 1, 0, 1, 1, 0}),
        {0, 0, 0, 0, 1, 1, 1, 1});
    CHECK_THROWS_AS(box_m_test(ds), LogZero);
}

TEST_CASE("levene on a fixed three-group split matches frozen values", "[stats]") {
    const std::vector<Vector> groups = {
        {1, 2, 3, 4, 5}, {2, 4, 6, 8, 10, 12}, {0.5, 0.6, 0.7, 0.8}};
    const auto report = levene_test(groups);
    CHECK(report.test_name == TestReport::Kind::Levene);
    CHECK(report.statistic == Catch::Approx(6.8737905369484302).epsilon(1e-10));
    CHECK(report.df1 == 2.0);
    CHECK(report.df2 == 12.0);
    CHECK(report.p_value == Catch::Approx(1.0248702116572016e-02).epsilon(1e-8));
    CHECK(report.rejected_at_05);
}

TEST_CASE("levene is invariant to group location shifts", "[stats]") {
    std::mt19937 rng(227);
    std::normal_distribution<double> unit(0.0, 1.0);
    Vector g0(30), g1(30);
    for (double& v : g0) v = unit(rng);
    for (double& v : g1) v = unit(rng);
    const auto base = levene_test({g0, g1});
    for (double& v : g1) v += 1000.0;
    const auto shifted = levene_test({g0, g1});
    CHECK(shifted.statistic == Catch::Approx(base.statistic).epsilon(1e-9));
    CHECK(shifted.p_value == Catch::Approx(base.p_value).epsilon(1e-9));
}

TEST_CASE("levene throws ZeroSpread when every deviation is equal", "[stats]") {
    CHECK_THROWS_AS(levene_test({Vector{1, 1, 1}, Vector{2, 2, 2}}), ZeroSpread);
    CHECK_THROWS_AS(levene_test({Vector{0, 2}, Vector{5, 7}}), ZeroSpread);
}

TEST_CASE("assumption check falls back to levene on singular covariances", "[stats]") {
    // second feature constant within class 0 forces LogZero; first
    // feature has wildly different spreads, so the fallback rejects
    DenseMatrix x(40, 2);
    std::vector<int> labels;
    std::mt19937 rng(229);
    std::normal_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 40; ++i) {
        const bool second = i >= 20;
        x(i, 0) = (second ? 20.0 : 0.1) * unit(rng);
        x(i, 1) = second ? unit(rng) : 5.0;
        labels.push_back(second ? 1 : 0);
    }
    const auto report = check_assumptions(make_dataset(x, labels));
    CHECK(report.fallback_used);
    CHECK(report.test_name == TestReport::Kind::Levene);
    CHECK(report.rejected_at_05);
    REQUIRE(report.per_feature.size() == 2);
}

TEST_CASE("fallback skips features constant in every class", "[stats]") {
    DenseMatrix x(12, 2);
    std::vector<int> labels;
    std::mt19937 rng(233);
    std::normal_distribution<double> unit(0.0, 1.0);
    for (int i = 0; i < 12; ++i) {
        x(i, 0) = unit(rng);
        x(i, 1) = 7.0;  // constant everywhere: LogZero then ZeroSpread
        labels.push_back(i < 6 ? 0 : 1);
    }
    const auto report = check_assumptions(make_dataset(x, labels));
    CHECK(report.fallback_used);
    CHECK(report.per_feature.size() == 1);
}

TEST_CASE("single-class input is rejected", "[stats]") {
    const auto ds = make_dataset(DenseMatrix(4, 2, {0, 0, 1, 1, 2, 0, 0, 2}), {0, 0, 0, 0});
    CHECK_THROWS_AS(box_m_test(ds), SingleClass);
}
