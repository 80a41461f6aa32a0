#pragma once

// Per-class and pooled sample statistics, plus the oracle-approximating
// shrinkage (OAS) covariance estimator used by the shrinkage variants.

#include <cmath>
#include <cstddef>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include "discrim/dataset.hpp"
#include "discrim/linalg.hpp"

namespace discrim {

class ClassTooSmall : public std::runtime_error {
public:
    explicit ClassTooSmall(int class_id)
        : std::runtime_error("class " + std::to_string(class_id) + " has fewer than 2 samples"),
          class_id(class_id) {}
    int class_id;
};

class EmptyDataset : public std::runtime_error {
public:
    EmptyDataset() : std::runtime_error("dataset has no samples or no features") {}
};

class ZeroVariance : public std::runtime_error {
public:
    ZeroVariance() : std::runtime_error("all samples of the class are identical") {}
};

struct ClassStats {
    int class_id = 0;
    std::size_t n = 0;
    Vector mean;
    DenseMatrix cov;  // sample covariance, n-1 denominator
};

struct PopulationStats {
    std::vector<ClassStats> per_class;  // sorted by class_id
    Vector overall_mean;
    std::size_t total_n = 0;
    std::size_t class_count = 0;
};

// Class means, class covariances (n-1 denominator) and the sample-size
// weighted overall mean.
inline PopulationStats compute_population_stats(const LabeledDataset& data) {
    const std::size_t n = data.sample_count();
    const std::size_t p = data.feature_count();
    if (n == 0 || p == 0) throw EmptyDataset();

    std::map<int, std::vector<std::size_t>> by_class;
    for (std::size_t i = 0; i < n; ++i) by_class[data.labels[i]].push_back(i);

    PopulationStats stats;
    stats.total_n = n;
    stats.class_count = by_class.size();
    stats.overall_mean.assign(p, 0.0);

    for (const auto& [label, rows] : by_class) {
        if (rows.size() < 2) throw ClassTooSmall(label);
        ClassStats cs;
        cs.class_id = label;
        cs.n = rows.size();
        cs.mean.assign(p, 0.0);
        for (std::size_t r : rows)
            for (std::size_t j = 0; j < p; ++j) cs.mean[j] += data.features(r, j);
        for (std::size_t j = 0; j < p; ++j) cs.mean[j] /= static_cast<double>(cs.n);

        cs.cov = DenseMatrix(p, p);
        for (std::size_t r : rows)
            for (std::size_t j = 0; j < p; ++j) {
                const double dj = data.features(r, j) - cs.mean[j];
                for (std::size_t k = j; k < p; ++k)
                    cs.cov(j, k) += dj * (data.features(r, k) - cs.mean[k]);
            }
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = j; k < p; ++k) {
                cs.cov(j, k) /= static_cast<double>(cs.n - 1);
                cs.cov(k, j) = cs.cov(j, k);
            }

        for (std::size_t j = 0; j < p; ++j)
            stats.overall_mean[j] += static_cast<double>(cs.n) * cs.mean[j];
        stats.per_class.push_back(std::move(cs));
    }
    for (std::size_t j = 0; j < p; ++j)
        stats.overall_mean[j] /= static_cast<double>(n);
    return stats;
}

// S_p = sum (n_i - 1) S_i / (sum n_i - C).
inline DenseMatrix pooled_covariance(const PopulationStats& stats) {
    if (stats.total_n <= stats.class_count)
        throw std::invalid_argument("pooled_covariance: degenerate denominator (n == C)");
    const std::size_t p = stats.per_class.front().mean.size();
    DenseMatrix pooled(p, p);
    for (const auto& cs : stats.per_class)
        pooled = pooled + (static_cast<double>(cs.n - 1) * cs.cov);
    const double denom = static_cast<double>(stats.total_n - stats.class_count);
    return (1.0 / denom) * pooled;
}

struct ShrinkageResult {
    DenseMatrix cov;
    double rho = 0.0;  // shrinkage intensity in [0, 1]
};

// OAS shrinkage toward (tr S / p) * I for a single class's samples.
inline ShrinkageResult shrinkage_covariance(const ClassStats& cs) {
    const std::size_t p = cs.mean.size();
    const double n = static_cast<double>(cs.n);
    const DenseMatrix& s = cs.cov;

    double trace = 0.0;
    for (std::size_t i = 0; i < p; ++i) trace += s(i, i);
    if (trace <= 0.0) throw ZeroVariance();

    double trace_sq = 0.0;  // tr(S^2) for symmetric S
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j) trace_sq += s(i, j) * s(j, i);

    const double pd = static_cast<double>(p);
    const double numer = (1.0 - 2.0 / pd) * trace_sq + trace * trace;
    const double denom = (n + 1.0 - 2.0 / pd) * (trace_sq - trace * trace / pd);
    double rho = (denom <= 0.0) ? 1.0 : numer / denom;
    rho = std::clamp(rho, 0.0, 1.0);

    const double mu = trace / pd;
    DenseMatrix shrunk(p, p);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = 0; j < p; ++j)
            shrunk(i, j) = (1.0 - rho) * s(i, j) + (i == j ? rho * mu : 0.0);
    return {std::move(shrunk), rho};
}

inline ShrinkageResult shrinkage_covariance(const LabeledDataset& single_class_data) {
    auto stats = compute_population_stats(single_class_data);
    if (stats.class_count != 1)
        throw std::invalid_argument("shrinkage_covariance: expected a single class");
    return shrinkage_covariance(stats.per_class.front());
}

}  // namespace discrim
