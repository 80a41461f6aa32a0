#pragma once

// Between/within scatter assembly, Fisher direction extraction and
// projected per-class statistics.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

#include "discrim/covariance.hpp"
#include "discrim/dataset.hpp"
#include "discrim/linalg.hpp"

namespace discrim {

class SingleClass : public std::runtime_error {
public:
    SingleClass() : std::runtime_error("operation needs at least two classes") {}
};

enum class Normalization {
    UnitNorm,       // ||v||_2 = 1
    WithinSphered,  // v^T S_p v = 1
};

// Relative eigenvalue cutoff below which a generalized eigenvalue is
// treated as zero.
inline constexpr double kRankCutoff = 1e-9;

struct ProjectionBasis {
    std::vector<Vector> directions;  // v_1 .. v_r
    Vector eigenvalues;              // matching, non-increasing
    Normalization normalization = Normalization::WithinSphered;
    bool rank_deficient = false;  // fewer directions available than requested

    std::size_t size() const { return directions.size(); }

    Vector project(const Vector& x) const {
        Vector y(directions.size());
        for (std::size_t j = 0; j < directions.size(); ++j) y[j] = dot(directions[j], x);
        return y;
    }
};

struct ProjectedClassStats {
    std::vector<int> class_ids;
    std::vector<Vector> means;      // means[i][j] = v_j . xbar_i
    std::vector<Vector> variances;  // variances[i][j] = s_ij^2
    bool degenerate = false;        // any s_ij^2 below the degeneracy floor

    std::size_t class_index(int class_id) const {
        for (std::size_t i = 0; i < class_ids.size(); ++i)
            if (class_ids[i] == class_id) return i;
        throw std::invalid_argument("unknown class id " + std::to_string(class_id));
    }
};

// B = sum n_i (xbar_i - xbar)(xbar_i - xbar)^T.
inline DenseMatrix between_scatter(const PopulationStats& stats) {
    if (stats.class_count < 2) throw SingleClass();
    const std::size_t p = stats.overall_mean.size();
    DenseMatrix b(p, p);
    for (const auto& cs : stats.per_class) {
        Vector d(p);
        for (std::size_t j = 0; j < p; ++j) d[j] = cs.mean[j] - stats.overall_mean[j];
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = 0; k < p; ++k)
                b(j, k) += static_cast<double>(cs.n) * d[j] * d[k];
    }
    return b;
}

// W = sum_i sum_j (x_ij - xbar_i)(x_ij - xbar_i)^T, accumulated directly
// from the centered samples (not through the per-class covariances).
inline DenseMatrix within_scatter(const LabeledDataset& data, const PopulationStats& stats) {
    const std::size_t p = stats.overall_mean.size();
    DenseMatrix w(p, p);
    Vector d(p);
    for (std::size_t i = 0; i < data.sample_count(); ++i) {
        const ClassStats* cs = nullptr;
        for (const auto& c : stats.per_class)
            if (c.class_id == data.labels[i]) { cs = &c; break; }
        if (!cs) throw std::invalid_argument("within_scatter: label absent from stats");
        for (std::size_t j = 0; j < p; ++j) d[j] = data.features(i, j) - cs->mean[j];
        for (std::size_t j = 0; j < p; ++j)
            for (std::size_t k = j; k < p; ++k)
                w(j, k) += d[j] * d[k];
    }
    for (std::size_t j = 0; j < p; ++j)
        for (std::size_t k = j; k < p; ++k) w(k, j) = w(j, k);
    return w;
}

inline DenseMatrix within_scatter(const LabeledDataset& data) {
    return within_scatter(data, compute_population_stats(data));
}

// Shrinkage within scatter: sum n_i * S_i_shrink. Note the n_i weight
// (not n_i - 1); that is the weighting of the shrinkage variant.
inline DenseMatrix shrinkage_within_scatter(const PopulationStats& stats) {
    const std::size_t p = stats.overall_mean.size();
    DenseMatrix w(p, p);
    for (const auto& cs : stats.per_class)
        w = w + (static_cast<double>(cs.n) * shrinkage_covariance(cs).cov);
    return w;
}

inline DenseMatrix shrinkage_within_scatter(const LabeledDataset& data) {
    return shrinkage_within_scatter(compute_population_stats(data));
}

// Top-r generalized eigenvectors of (B, W). When W is not positive
// definite a small ridge (1e-8 * tr(W)/p on the diagonal) is retried
// once before the failure propagates. If fewer than r eigenvalues clear
// the rank cutoff, all available directions are returned and the basis
// is flagged rank-deficient.
//
// pooled_dof = n - C is only used for within-sphered scaling
// (S_p = W / (n - C)).
inline ProjectionBasis fisher_directions(const DenseMatrix& b, const DenseMatrix& w,
                                         std::size_t r, Normalization normalization,
                                         std::size_t pooled_dof) {
    EigenPairs pairs;
    try {
        pairs = generalized_sym_eig(b, w);
    } catch (const NotPositiveDefinite&) {
        const std::size_t p = w.rows();
        double trace = 0.0;
        for (std::size_t i = 0; i < p; ++i) trace += w(i, i);
        DenseMatrix ridged = w;
        const double ridge = 1e-8 * trace / static_cast<double>(p);
        for (std::size_t i = 0; i < p; ++i) ridged(i, i) += ridge;
        pairs = generalized_sym_eig(b, ridged);
    }

    const double lambda_max = pairs.values.empty() ? 0.0 : pairs.values.front();
    std::size_t available = 0;
    while (available < pairs.values.size() &&
           pairs.values[available] > kRankCutoff * lambda_max && lambda_max > 0.0)
        ++available;

    ProjectionBasis basis;
    basis.normalization = normalization;
    const std::size_t keep = std::min(r, available);
    basis.rank_deficient = keep < r;
    for (std::size_t j = 0; j < keep; ++j) {
        Vector v = pairs.vectors[j];
        if (normalization == Normalization::WithinSphered) {
            // generalized vectors come back unit-norm; rescale so that
            // v^T S_p v = 1, i.e. v^T W v = pooled_dof.
            const double q = dot(v, w * v);
            if (q <= 0.0)
                throw NotPositiveDefinite("fisher_directions: v^T W v <= 0");
            const double c = std::sqrt(static_cast<double>(pooled_dof) / q);
            for (double& x : v) x *= c;
        }
        basis.directions.push_back(std::move(v));
        basis.eigenvalues.push_back(pairs.values[j]);
    }
    return basis;
}

// All p generalized eigenvectors of (B, W), zero eigenvalues included,
// rescaled so that v^T S_p v = 1. Such a basis diagonalizes S_p, which
// turns the plain FDA distance over the full basis into the pooled
// Mahalanobis distance.
inline ProjectionBasis sphered_full_basis(const DenseMatrix& b, const DenseMatrix& w,
                                          std::size_t pooled_dof) {
    EigenPairs pairs = generalized_sym_eig(b, w);
    ProjectionBasis basis;
    basis.normalization = Normalization::WithinSphered;
    for (std::size_t j = 0; j < pairs.vectors.size(); ++j) {
        Vector v = pairs.vectors[j];
        const double q = dot(v, w * v);
        if (q <= 0.0) throw NotPositiveDefinite("sphered_full_basis: v^T W v <= 0");
        const double c = std::sqrt(static_cast<double>(pooled_dof) / q);
        for (double& x : v) x *= c;
        basis.directions.push_back(std::move(v));
        basis.eigenvalues.push_back(pairs.values[j]);
    }
    return basis;
}

inline ProjectionBasis fisher_directions(const LabeledDataset& data, std::size_t r,
                                         Normalization normalization) {
    const auto stats = compute_population_stats(data);
    return fisher_directions(between_scatter(stats), within_scatter(data, stats), r, normalization,
                             stats.total_n - stats.class_count);
}

// Projected class means and variances. The variance of record is the
// direct sum over projected samples; v^T S_i v serves as a runtime
// cross-check and a mismatch is a hard internal error.
inline ProjectedClassStats project_stats(const LabeledDataset& data, const ProjectionBasis& basis) {
    if (basis.size() == 0)
        throw std::invalid_argument("project_stats: empty basis");
    const auto stats = compute_population_stats(data);
    const std::size_t r = basis.size();

    ProjectedClassStats out;
    for (const auto& cs : stats.per_class) {
        Vector m(r), s2(r, 0.0);
        for (std::size_t j = 0; j < r; ++j) m[j] = dot(basis.directions[j], cs.mean);

        for (std::size_t i = 0; i < data.sample_count(); ++i) {
            if (data.labels[i] != cs.class_id) continue;
            const Vector x = data.features.row(i);
            for (std::size_t j = 0; j < r; ++j) {
                const double d = dot(basis.directions[j], x) - m[j];
                s2[j] += d * d;
            }
        }
        for (std::size_t j = 0; j < r; ++j) {
            s2[j] /= static_cast<double>(cs.n - 1);
            const double check = dot(basis.directions[j], cs.cov * basis.directions[j]);
            const double scale = std::max({std::abs(s2[j]), std::abs(check), 1e-300});
            if (std::abs(s2[j] - check) > 1e-8 * scale)
                throw std::logic_error("project_stats: projected variance disagrees with v^T S v");
            if (s2[j] < 1e-12) out.degenerate = true;
        }
        out.class_ids.push_back(cs.class_id);
        out.means.push_back(std::move(m));
        out.variances.push_back(std::move(s2));
    }
    return out;
}

}  // namespace discrim
