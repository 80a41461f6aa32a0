#include <catch_amalgamated.hpp>

#include <random>

#include "discrim/covariance.hpp"
#include "discrim/scatter.hpp"
#include "test_helpers.hpp"

using namespace discrim;

namespace {

double fisher_ratio(const Vector& v, const DenseMatrix& b, const DenseMatrix& w) {
    return dot(v, b * v) / dot(v, w * v);
}

}  // namespace

TEST_CASE("between scatter vanishes when all class means coincide", "[scatter]") {
    // both classes are symmetric around (1, 1)
    const auto ds = make_dataset(
        DenseMatrix(4, 2, {0, 0, 2, 2, 0, 2, 2, 0}), {0, 0, 1, 1});
    const auto b = between_scatter(compute_population_stats(ds));
    CHECK(b.frobenius_norm() < 1e-12);
}

TEST_CASE("between scatter hand sum", "[scatter]") {
    // 2 classes of 5 samples at their means (0,0) and (2,0):
    // overall mean (1,0), B = 5*(-1,0)(-1,0)^T + 5*(1,0)(1,0)^T
    DenseMatrix x(10, 2);
    std::vector<int> labels;
    for (int i = 0; i < 10; ++i) {
        x(i, 0) = i < 5 ? 0.0 : 2.0;
        labels.push_back(i < 5 ? 0 : 1);
    }
    const auto b = between_scatter(compute_population_stats(make_dataset(x, labels)));
    CHECK(b(0, 0) == Catch::Approx(10.0));
    CHECK(b(0, 1) == Catch::Approx(0.0).margin(1e-12));
    CHECK(b(1, 1) == Catch::Approx(0.0).margin(1e-12));
}

TEST_CASE("between scatter requires two classes", "[scatter]") {
    const auto ds = make_dataset(DenseMatrix(2, 2, {0, 0, 1, 1}), {0, 0});
    CHECK_THROWS_AS(between_scatter(compute_population_stats(ds)), SingleClass);
}

TEST_CASE("within scatter basics", "[scatter]") {
    // every sample sits at its class mean
    const auto at_means = make_dataset(
        DenseMatrix(4, 2, {1, 1, 1, 1, 5, 5, 5, 5}), {0, 0, 1, 1});
    CHECK(within_scatter(at_means).frobenius_norm() < 1e-12);

    const auto pair = make_dataset(DenseMatrix(2, 2, {0, 0, 2, 0}), {0, 0});
    const auto w = within_scatter(pair);
    CHECK(w(0, 0) == Catch::Approx(2.0));
    CHECK(w(0, 1) == 0.0);
    CHECK(w(1, 1) == 0.0);
}

TEST_CASE("wine within scatter equals the covariance route", "[scatter]") {
    const auto wine = load_csv(std::string(DISCRIM_DATA_DIR) + "/wine.csv", "class");
    const auto stats = compute_population_stats(wine);
    const auto w = within_scatter(wine, stats);
    DenseMatrix via_cov(w.rows(), w.cols());
    for (const auto& cs : stats.per_class)
        via_cov = via_cov + (static_cast<double>(cs.n - 1) * cs.cov);
    CHECK((w - via_cov).frobenius_norm() <= 1e-10 * w.frobenius_norm());
}

TEST_CASE("balance between scatter has rank C - 1", "[scatter]") {
    const auto balance = load_csv(std::string(DISCRIM_DATA_DIR) + "/balance.csv", "class");
    const auto b = between_scatter(compute_population_stats(balance));
    const auto pairs = sym_eig(b);
    std::size_t rank = 0;
    for (double v : pairs.values)
        if (v > 1e-9 * pairs.values.front()) ++rank;
    CHECK(rank == 2);
}

TEST_CASE("shrinkage within scatter weights by n_i with identity-like classes", "[scatter]") {
    // each class's sample covariance equals (2/3) I exactly, so shrinkage
    // leaves it unchanged and the sum is exactly sum n_i * (2/3) I
    DenseMatrix x(8, 2,
                  {1, 0, -1, 0, 0, 1, 0, -1,
                   11, 10, 9, 10, 10, 11, 10, 9});
    const auto ds = make_dataset(x, {0, 0, 0, 0, 1, 1, 1, 1});
    const auto w = shrinkage_within_scatter(ds);
    const DenseMatrix expected = (8.0 * 2.0 / 3.0) * DenseMatrix::identity(2);
    CHECK((w - expected).frobenius_norm() < 1e-12);
}

TEST_CASE("shrinkage within scatter is PD when the raw scatter is singular", "[scatter]") {
    // second feature duplicates the first, so raw W is rank 1
    std::mt19937 rng(53);
    DenseMatrix x(20, 2);
    std::vector<int> labels;
    std::normal_distribution<double> noise(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        const double v = noise(rng) + (i < 10 ? 0.0 : 4.0);
        x(i, 0) = v;
        x(i, 1) = 2.0 * v;
        labels.push_back(i < 10 ? 0 : 1);
    }
    const auto ds = make_dataset(x, labels);
    const auto raw_values = sym_eig(within_scatter(ds)).values;
    CHECK(raw_values.back() < 1e-12 * raw_values.front());
    const auto shrunk_values = sym_eig(shrinkage_within_scatter(ds)).values;
    CHECK(shrunk_values.back() > 1e-6 * shrunk_values.front());
}

TEST_CASE("fisher direction recovers the known separating axis", "[scatter]") {
    std::mt19937 rng(59);
    std::normal_distribution<double> noise(0.0, 1.0);
    DenseMatrix x(200, 3);
    std::vector<int> labels;
    for (int i = 0; i < 200; ++i) {
        x(i, 0) = noise(rng) + (i < 100 ? 0.0 : 20.0);
        x(i, 1) = noise(rng);
        x(i, 2) = noise(rng);
        labels.push_back(i < 100 ? 0 : 1);
    }
    const auto basis = fisher_directions(make_dataset(x, labels), 1, Normalization::UnitNorm);
    REQUIRE(basis.size() == 1);
    CHECK(std::abs(basis.directions[0][0]) > 0.99);
}

TEST_CASE("zero between scatter yields a rank-deficient empty basis", "[scatter]") {
    const DenseMatrix b(3, 3);
    const auto basis =
        fisher_directions(b, DenseMatrix::identity(3), 2, Normalization::UnitNorm, 10);
    CHECK(basis.rank_deficient);
    CHECK(basis.size() == 0);
}

TEST_CASE("top fisher direction beats random directions", "[scatter]") {
    std::mt19937 rng(61);
    const auto ds = testutil::random_gaussian_dataset(rng, 3, 5, 30);
    const auto stats = compute_population_stats(ds);
    const auto b = between_scatter(stats);
    const auto w = within_scatter(ds, stats);
    const auto basis =
        fisher_directions(b, w, 1, Normalization::UnitNorm, stats.total_n - stats.class_count);
    REQUIRE(basis.size() == 1);
    const double best = fisher_ratio(basis.directions[0], b, w);
    for (int trial = 0; trial < 1000; ++trial)
        CHECK(best >= fisher_ratio(testutil::random_unit_vector(rng, 5), b, w));
}

TEST_CASE("within-sphered directions satisfy v' S_p v = 1", "[scatter]") {
    std::mt19937 rng(67);
    const auto ds = testutil::random_gaussian_dataset(rng, 3, 4, 25);
    const auto stats = compute_population_stats(ds);
    const auto pooled = pooled_covariance(stats);
    const auto basis = fisher_directions(ds, 2, Normalization::WithinSphered);
    for (const auto& v : basis.directions)
        CHECK(dot(v, pooled * v) == Catch::Approx(1.0).epsilon(1e-8));
}

TEST_CASE("projected stats flag degenerate directions", "[scatter]") {
    // class 0 is constant along the first axis
    const auto ds = make_dataset(
        DenseMatrix(4, 2, {1, 0, 1, 2, 5, 0, 6, 2}), {0, 0, 1, 1});
    ProjectionBasis basis;
    basis.directions.push_back({1.0, 0.0});
    basis.eigenvalues.push_back(1.0);
    const auto stats = project_stats(ds, basis);
    CHECK(stats.degenerate);
    CHECK(stats.variances[0][0] == Catch::Approx(0.0).margin(1e-15));
}

TEST_CASE("identity projection reproduces class mean and variance", "[scatter]") {
    const auto ds = make_dataset(DenseMatrix(3, 1, {1, 2, 3}), {0, 0, 0});
    ProjectionBasis basis;
    basis.directions.push_back({1.0});
    basis.eigenvalues.push_back(1.0);
    const auto stats = project_stats(ds, basis);
    CHECK(stats.means[0][0] == Catch::Approx(2.0));
    CHECK(stats.variances[0][0] == Catch::Approx(1.0));
}

TEST_CASE("projected variances agree with v' S_i v on balance", "[scatter]") {
    const auto balance = load_csv(std::string(DISCRIM_DATA_DIR) + "/balance.csv", "class");
    const auto basis = fisher_directions(balance, 2, Normalization::UnitNorm);
    REQUIRE(basis.size() == 2);
    const auto projected = project_stats(balance, basis);
    const auto stats = compute_population_stats(balance);
    for (std::size_t i = 0; i < projected.class_ids.size(); ++i)
        for (std::size_t j = 0; j < basis.size(); ++j) {
            const double via_cov =
                dot(basis.directions[j], stats.per_class[i].cov * basis.directions[j]);
            CHECK(projected.variances[i][j] ==
                  Catch::Approx(via_cov).epsilon(1e-8));
        }
}

TEST_CASE("full sphered basis reproduces the pooled Mahalanobis distance", "[scatter]") {
    std::mt19937 rng(71);
    const auto ds = testutil::random_gaussian_dataset(rng, 3, 4, 30);
    const auto stats = compute_population_stats(ds);
    const auto b = between_scatter(stats);
    const auto w = within_scatter(ds, stats);
    const auto pooled = pooled_covariance(stats);
    const auto basis = sphered_full_basis(b, w, stats.total_n - stats.class_count);
    REQUIRE(basis.size() == 4);

    for (int trial = 0; trial < 50; ++trial) {
        const auto x = testutil::random_vector(rng, 4, 3.0);
        for (const auto& cs : stats.per_class) {
            Vector d(4);
            for (std::size_t j = 0; j < 4; ++j) d[j] = x[j] - cs.mean[j];
            double projected_sum = 0.0;
            for (const auto& v : basis.directions) {
                const double t = dot(v, d);
                projected_sum += t * t;
            }
            const double mahalanobis = dot(d, solve_spd(pooled, d));
            CHECK(projected_sum == Catch::Approx(mahalanobis).epsilon(1e-6));
        }
    }
}

TEST_CASE("rescaling a direction scales means linearly and variances quadratically",
          "[scatter]") {
    std::mt19937 rng(73);
    const auto ds = testutil::random_gaussian_dataset(rng, 2, 3, 15);
    auto basis = fisher_directions(ds, 1, Normalization::UnitNorm);
    REQUIRE(basis.size() == 1);
    const auto before = project_stats(ds, basis);

    const double c = -2.5;
    for (double& x : basis.directions[0]) x *= c;
    const auto after = project_stats(ds, basis);
    for (std::size_t i = 0; i < before.class_ids.size(); ++i) {
        CHECK(after.means[i][0] == Catch::Approx(c * before.means[i][0]).epsilon(1e-12));
        CHECK(after.variances[i][0] ==
              Catch::Approx(c * c * before.variances[i][0]).epsilon(1e-12));
    }
}

TEST_CASE("standardized projected distance obeys the Mahalanobis bound", "[scatter]") {
    std::mt19937 rng(79);
    const auto ds = testutil::random_gaussian_dataset(rng, 3, 5, 30);
    const auto stats = compute_population_stats(ds);
    const auto basis = fisher_directions(ds, 2, Normalization::UnitNorm);
    const auto projected = project_stats(ds, basis);
    const double r = static_cast<double>(basis.size());

    for (int trial = 0; trial < 200; ++trial) {
        const auto x = testutil::random_vector(rng, 5, 3.0);
        const Vector y = basis.project(x);
        for (std::size_t i = 0; i < stats.per_class.size(); ++i) {
            Vector d(5);
            for (std::size_t j = 0; j < 5; ++j) d[j] = x[j] - stats.per_class[i].mean[j];
            double standardized = 0.0;
            for (std::size_t j = 0; j < basis.size(); ++j) {
                const double t = y[j] - projected.means[i][j];
                standardized += t * t / projected.variances[i][j];
            }
            const double bound = r * dot(d, solve_spd(stats.per_class[i].cov, d));
            CHECK(standardized <= bound + 1e-8);
        }
    }
}
