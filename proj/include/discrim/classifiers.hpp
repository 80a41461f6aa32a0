#pragma once

// Fit/predict for the eight methods behind one contract:
// FDA, UC-FDA, LDA, QDA, SDA, UC-SDA, LDA-Lp, UC-LDA-Lp.
//
// The UC rules replace the squared projected distance (y_j - m_ij)^2
// with the variance-standardized (y_j - m_ij)^2 / s_ij^2, which uses
// the per-class covariances implicitly without ever inverting them.

#include <cmath>
#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "discrim/covariance.hpp"
#include "discrim/dataset.hpp"
#include "discrim/linalg.hpp"
#include "discrim/scatter.hpp"

namespace discrim {

enum class Method { Fda, UcFda, Lda, Qda, Sda, UcSda, LdaLp, UcLdaLp };

inline const char* method_name(Method m) {
    switch (m) {
        case Method::Fda: return "fda";
        case Method::UcFda: return "uc-fda";
        case Method::Lda: return "lda";
        case Method::Qda: return "qda";
        case Method::Sda: return "sda";
        case Method::UcSda: return "uc-sda";
        case Method::LdaLp: return "lda-lp";
        case Method::UcLdaLp: return "uc-lda-lp";
    }
    return "?";
}

inline std::optional<Method> parse_method(const std::string& name) {
    for (Method m : {Method::Fda, Method::UcFda, Method::Lda, Method::Qda, Method::Sda,
                     Method::UcSda, Method::LdaLp, Method::UcLdaLp})
        if (name == method_name(m)) return m;
    return std::nullopt;
}

class DimensionMismatch : public std::runtime_error {
public:
    DimensionMismatch() : std::runtime_error("input dimension does not match the model") {}
};

// Raised when a per-class (or pooled, class_id = -1) covariance cannot
// be factorized. Deliberately never regularized away for QDA/LDA: the
// benchmark layer records these cells as NA.
class SingularCovariance : public std::runtime_error {
public:
    explicit SingularCovariance(int class_id)
        : std::runtime_error("singular covariance for class " + std::to_string(class_id)),
          class_id(class_id) {}
    int class_id;
};

class DegenerateVariance : public std::runtime_error {
public:
    DegenerateVariance(int class_id, std::size_t direction)
        : std::runtime_error("projected variance below floor for class " +
                             std::to_string(class_id) + ", direction " +
                             std::to_string(direction)),
          class_id(class_id), direction(direction) {}
    int class_id;
    std::size_t direction;
};

class ZeroDenominator : public std::runtime_error {
public:
    ZeroDenominator() : std::runtime_error("all within-class projections vanish") {}
};

class RankDeficient : public std::runtime_error {
public:
    RankDeficient() : std::runtime_error("no usable discriminant directions") {}
};

struct FitConfig {
    std::size_t r = 0;  // 0 => min(C - 1, p), further capped by rank
    Normalization normalization = Normalization::WithinSphered;
    double lp_exponent = 1.5;
    double lp_epsilon = 1e-5;
    std::size_t lp_max_iters = 500;
    bool lp_literal_numerator = false;  // keep the numerator constant in w
    double variance_floor = 0.0;        // 0 => off: degenerate s^2 is an error
};

// Single Lp-norm projection found by gradient ascent on the unit sphere.
struct LpProjection {
    Vector w;
    double p = 1.5;
    Vector objective_trace;  // accepted F(w) values, non-decreasing
    bool converged = false;
};

struct DiscriminantScores {
    enum class Convention { Maximize, Minimize };
    Vector scores;  // aligned with FittedModel::class_labels
    Convention convention = Convention::Minimize;
};

struct ProjectionPayload {
    ProjectionBasis basis;
    ProjectedClassStats projected;
};

struct LdaPayload {
    DenseMatrix pooled_chol;
    std::vector<Vector> means;
    Vector log_priors;
};

struct QdaPayload {
    std::vector<Vector> means;
    std::vector<DenseMatrix> chols;
    Vector log_dets;
    Vector log_priors;
};

struct LpPayload {
    LpProjection projection;
    ProjectedClassStats projected;  // single direction
};

struct FittedModel {
    Method method = Method::Fda;
    std::vector<int> class_labels;  // ascending
    std::size_t feature_count = 0;
    double variance_floor = 0.0;
    std::variant<ProjectionPayload, LdaPayload, QdaPayload, LpPayload> payload;
};

namespace detail {

inline std::size_t argbest(const DiscriminantScores& s) {
    // strict comparison keeps the lowest class label on exact ties
    std::size_t best = 0;
    for (std::size_t i = 1; i < s.scores.size(); ++i) {
        const bool better = s.convention == DiscriminantScores::Convention::Minimize
                                ? s.scores[i] < s.scores[best]
                                : s.scores[i] > s.scores[best];
        if (better) best = i;
    }
    return best;
}

inline double standardized_distance(const Vector& y, const Vector& m, const Vector& s2,
                                    double floor, int class_id) {
    double d = 0.0;
    for (std::size_t j = 0; j < y.size(); ++j) {
        double v = s2[j];
        if (v < 1e-12) {
            if (floor <= 0.0) throw DegenerateVariance(class_id, j);
            v = std::max(v, floor);
        }
        const double t = y[j] - m[j];
        d += t * t / v;
    }
    return d;
}

}  // namespace detail

// F(w) = sum_i n_i |w^T(xbar_i - xbar)|^p / sum_ij |w^T(x_ij - xbar_i)|^p
// together with its analytic gradient. The literal variant drops w from
// the numerator (making it constant), mirroring the objective exactly as
// some references print it.
struct LpObjective {
    std::vector<Vector> mean_offsets;   // xbar_i - xbar
    Vector class_weights;               // n_i
    std::vector<Vector> centered;       // x_ij - xbar_i, all samples
    double p = 1.5;
    bool literal_numerator = false;

    static LpObjective build(const LabeledDataset& data, double p, bool literal) {
        const auto stats = compute_population_stats(data);
        if (stats.class_count < 2) throw SingleClass();
        LpObjective obj;
        obj.p = p;
        obj.literal_numerator = literal;
        const std::size_t dim = stats.overall_mean.size();
        for (const auto& cs : stats.per_class) {
            Vector d(dim);
            for (std::size_t j = 0; j < dim; ++j) d[j] = cs.mean[j] - stats.overall_mean[j];
            obj.mean_offsets.push_back(std::move(d));
            obj.class_weights.push_back(static_cast<double>(cs.n));
        }
        for (std::size_t i = 0; i < data.sample_count(); ++i) {
            const ClassStats* cs = nullptr;
            for (const auto& c : stats.per_class)
                if (c.class_id == data.labels[i]) { cs = &c; break; }
            Vector z(dim);
            for (std::size_t j = 0; j < dim; ++j) z[j] = data.features(i, j) - cs->mean[j];
            obj.centered.push_back(std::move(z));
        }
        return obj;
    }

    double value(const Vector& w) const {
        double numer = 0.0, denom = 0.0;
        for (std::size_t i = 0; i < mean_offsets.size(); ++i) {
            const double t = literal_numerator ? norm2(mean_offsets[i]) : dot(w, mean_offsets[i]);
            numer += class_weights[i] * std::pow(std::abs(t), p);
        }
        for (const auto& z : centered) denom += std::pow(std::abs(dot(w, z)), p);
        if (denom <= 0.0) throw ZeroDenominator();
        return numer / denom;
    }

    Vector gradient(const Vector& w) const {
        const std::size_t dim = w.size();
        double numer = 0.0, denom = 0.0;
        Vector dn(dim, 0.0), dd(dim, 0.0);
        for (std::size_t i = 0; i < mean_offsets.size(); ++i) {
            if (literal_numerator) {
                numer += class_weights[i] * std::pow(norm2(mean_offsets[i]), p);
                continue;
            }
            const double t = dot(w, mean_offsets[i]);
            numer += class_weights[i] * std::pow(std::abs(t), p);
            const double g = class_weights[i] * p * std::pow(std::abs(t), p - 1.0) *
                             (t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0));
            for (std::size_t j = 0; j < dim; ++j) dn[j] += g * mean_offsets[i][j];
        }
        for (const auto& z : centered) {
            const double t = dot(w, z);
            denom += std::pow(std::abs(t), p);
            const double g =
                p * std::pow(std::abs(t), p - 1.0) * (t > 0.0 ? 1.0 : (t < 0.0 ? -1.0 : 0.0));
            for (std::size_t j = 0; j < dim; ++j) dd[j] += g * z[j];
        }
        if (denom <= 0.0) throw ZeroDenominator();
        Vector grad(dim);
        for (std::size_t j = 0; j < dim; ++j)
            grad[j] = (dn[j] * denom - numer * dd[j]) / (denom * denom);
        return grad;
    }
};

// Steepest ascent on the unit sphere with an adaptive step: start at
// eta = 0.1, halve and reject any step that decreases F, stop once an
// accepted step improves by less than epsilon (or eta underflows).
// Warm-started at the p = 2 optimum (top Fisher direction).
inline LpProjection fit_lp_projection(const LabeledDataset& data, double p, double epsilon,
                                      std::size_t max_iters, bool literal_numerator = false) {
    if (p <= 1.0)
        throw std::invalid_argument("fit_lp_projection: requires p > 1");
    const auto obj = LpObjective::build(data, p, literal_numerator);
    const auto stats = compute_population_stats(data);
    const DenseMatrix b = between_scatter(stats);

    Vector w;
    try {
        auto basis = fisher_directions(b, within_scatter(data, stats), 1,
                                       Normalization::UnitNorm,
                                       stats.total_n - stats.class_count);
        if (basis.size() > 0) w = basis.directions.front();
    } catch (const NotPositiveDefinite&) {
    }
    if (w.empty()) {
        auto pairs = sym_eig(b);
        w = pairs.vectors.front();
    }
    if (norm2(w) == 0.0) w.front() = 1.0;

    LpProjection proj;
    proj.p = p;
    proj.w = w;
    double f = obj.value(w);
    proj.objective_trace.push_back(f);

    double eta = 0.1;
    for (std::size_t it = 0; it < max_iters; ++it) {
        const Vector grad = obj.gradient(proj.w);
        Vector cand(proj.w.size());
        bool accepted = false;
        while (eta >= 1e-10) {
            for (std::size_t j = 0; j < cand.size(); ++j) cand[j] = proj.w[j] + eta * grad[j];
            const double n = norm2(cand);
            if (n > 0.0) {
                for (double& x : cand) x /= n;
                const double fc = obj.value(cand);
                if (fc > f) {
                    accepted = true;
                    proj.w = cand;
                    proj.objective_trace.push_back(fc);
                    if (fc - f < epsilon) {
                        proj.converged = true;
                        return proj;
                    }
                    f = fc;
                    break;
                }
            }
            eta *= 0.5;
        }
        if (!accepted) {
            // no uphill step exists at the smallest step size: stationary
            proj.converged = true;
            return proj;
        }
    }
    proj.converged = false;
    return proj;
}

inline std::size_t default_projection_count(std::size_t class_count, std::size_t feature_count) {
    return std::min(class_count - 1, feature_count);
}

// Incremental parameter count relative to plain FDA.
inline std::size_t parameter_count(Method method, std::size_t classes, std::size_t features,
                                   std::size_t r) {
    switch (method) {
        case Method::UcFda:
        case Method::UcSda:
            return r * classes;
        case Method::UcLdaLp:
            return classes;  // r = 1 by construction
        case Method::Qda:
            return (classes - 1) * features * features + features;
        default:
            return 0;
    }
}

inline FittedModel fit(Method method, const LabeledDataset& train, const FitConfig& config = {}) {
    const auto stats = compute_population_stats(train);
    if (stats.class_count < 2) throw SingleClass();
    const std::size_t p = stats.overall_mean.size();

    FittedModel model;
    model.method = method;
    model.feature_count = p;
    model.variance_floor = config.variance_floor;
    for (const auto& cs : stats.per_class) model.class_labels.push_back(cs.class_id);

    switch (method) {
        case Method::Fda:
        case Method::UcFda:
        case Method::Sda:
        case Method::UcSda: {
            const bool shrink = method == Method::Sda || method == Method::UcSda;
            const DenseMatrix b = between_scatter(stats);
            const DenseMatrix w =
                shrink ? shrinkage_within_scatter(stats) : within_scatter(train, stats);
            const std::size_t r =
                config.r > 0 ? config.r : default_projection_count(stats.class_count, p);
            if (r > default_projection_count(stats.class_count, p))
                throw std::invalid_argument("fit: r exceeds min(C - 1, p)");
            ProjectionPayload payload;
            payload.basis = fisher_directions(b, w, r, config.normalization,
                                              stats.total_n - stats.class_count);
            if (payload.basis.size() == 0) throw RankDeficient();
            payload.projected = project_stats(train, payload.basis);
            model.payload = std::move(payload);
            break;
        }
        case Method::Lda: {
            LdaPayload payload;
            const DenseMatrix pooled = pooled_covariance(stats);
            try {
                payload.pooled_chol = cholesky(pooled);
            } catch (const NotPositiveDefinite&) {
                throw SingularCovariance(-1);
            }
            for (const auto& cs : stats.per_class) {
                payload.means.push_back(cs.mean);
                payload.log_priors.push_back(
                    std::log(static_cast<double>(cs.n) / static_cast<double>(stats.total_n)));
            }
            model.payload = std::move(payload);
            break;
        }
        case Method::Qda: {
            QdaPayload payload;
            for (const auto& cs : stats.per_class) {
                DenseMatrix l;
                try {
                    l = cholesky(cs.cov);
                } catch (const NotPositiveDefinite&) {
                    throw SingularCovariance(cs.class_id);
                }
                payload.log_dets.push_back(log_det_from_cholesky(l));
                payload.chols.push_back(std::move(l));
                payload.means.push_back(cs.mean);
                payload.log_priors.push_back(
                    std::log(static_cast<double>(cs.n) / static_cast<double>(stats.total_n)));
            }
            model.payload = std::move(payload);
            break;
        }
        case Method::LdaLp:
        case Method::UcLdaLp: {
            LpPayload payload;
            payload.projection = fit_lp_projection(train, config.lp_exponent, config.lp_epsilon,
                                                   config.lp_max_iters,
                                                   config.lp_literal_numerator);
            ProjectionBasis basis;
            basis.normalization = Normalization::UnitNorm;
            basis.directions.push_back(payload.projection.w);
            basis.eigenvalues.push_back(payload.projection.objective_trace.back());
            payload.projected = project_stats(train, basis);
            model.payload = std::move(payload);
            break;
        }
    }
    return model;
}

// Plain FDA rule: nearest projected class mean, all directions weighted
// equally.
inline std::pair<int, DiscriminantScores> classify_fda(const FittedModel& model, const Vector& x) {
    const auto* payload = std::get_if<ProjectionPayload>(&model.payload);
    if (!payload) throw std::invalid_argument("classify_fda: model has no projection payload");
    if (x.size() != model.feature_count) throw DimensionMismatch();
    const Vector y = payload->basis.project(x);

    DiscriminantScores s;
    s.convention = DiscriminantScores::Convention::Minimize;
    for (std::size_t i = 0; i < payload->projected.class_ids.size(); ++i) {
        double d = 0.0;
        for (std::size_t j = 0; j < y.size(); ++j) {
            const double t = y[j] - payload->projected.means[i][j];
            d += t * t;
        }
        s.scores.push_back(d);
    }
    return {model.class_labels[detail::argbest(s)], s};
}

// Unequal-covariance rule: each squared projected distance is divided by
// the class's sample variance in that direction.
inline std::pair<int, DiscriminantScores> classify_uc(const FittedModel& model, const Vector& x) {
    const auto* payload = std::get_if<ProjectionPayload>(&model.payload);
    if (!payload) throw std::invalid_argument("classify_uc: model has no projection payload");
    if (x.size() != model.feature_count) throw DimensionMismatch();
    const Vector y = payload->basis.project(x);

    DiscriminantScores s;
    s.convention = DiscriminantScores::Convention::Minimize;
    for (std::size_t i = 0; i < payload->projected.class_ids.size(); ++i)
        s.scores.push_back(detail::standardized_distance(
            y, payload->projected.means[i], payload->projected.variances[i],
            model.variance_floor, payload->projected.class_ids[i]));
    return {model.class_labels[detail::argbest(s)], s};
}

inline std::pair<int, DiscriminantScores> classify_lda(const FittedModel& model, const Vector& x) {
    const auto* payload = std::get_if<LdaPayload>(&model.payload);
    if (!payload) throw std::invalid_argument("classify_lda: model is not LDA");
    if (x.size() != model.feature_count) throw DimensionMismatch();

    DiscriminantScores s;
    s.convention = DiscriminantScores::Convention::Maximize;
    for (std::size_t i = 0; i < payload->means.size(); ++i) {
        const Vector a = solve_with_cholesky(payload->pooled_chol, payload->means[i]);
        s.scores.push_back(dot(a, x) - 0.5 * dot(a, payload->means[i]) + payload->log_priors[i]);
    }
    return {model.class_labels[detail::argbest(s)], s};
}

inline std::pair<int, DiscriminantScores> classify_qda(const FittedModel& model, const Vector& x) {
    const auto* payload = std::get_if<QdaPayload>(&model.payload);
    if (!payload) throw std::invalid_argument("classify_qda: model is not QDA");
    if (x.size() != model.feature_count) throw DimensionMismatch();

    DiscriminantScores s;
    s.convention = DiscriminantScores::Convention::Maximize;
    for (std::size_t i = 0; i < payload->means.size(); ++i) {
        Vector d(x.size());
        for (std::size_t j = 0; j < x.size(); ++j) d[j] = x[j] - payload->means[i][j];
        // (x - m)^T S^-1 (x - m) = ||L^-1 (x - m)||^2
        const Vector half = forward_substitute(payload->chols[i], d);
        s.scores.push_back(-0.5 * payload->log_dets[i] - 0.5 * dot(half, half) +
                           payload->log_priors[i]);
    }
    return {model.class_labels[detail::argbest(s)], s};
}

inline std::pair<int, DiscriminantScores> classify_lp(const FittedModel& model, const Vector& x,
                                                      bool uc) {
    const auto* payload = std::get_if<LpPayload>(&model.payload);
    if (!payload) throw std::invalid_argument("classify_lp: model is not an Lp method");
    if (x.size() != model.feature_count) throw DimensionMismatch();
    const double y = dot(payload->projection.w, x);

    DiscriminantScores s;
    s.convention = DiscriminantScores::Convention::Minimize;
    for (std::size_t i = 0; i < payload->projected.class_ids.size(); ++i) {
        const double t = y - payload->projected.means[i][0];
        if (!uc) {
            s.scores.push_back(t * t);
            continue;
        }
        double v = payload->projected.variances[i][0];
        if (v < 1e-12) {
            if (model.variance_floor <= 0.0)
                throw DegenerateVariance(payload->projected.class_ids[i], 0);
            v = std::max(v, model.variance_floor);
        }
        s.scores.push_back(t * t / v);
    }
    return {model.class_labels[detail::argbest(s)], s};
}

// Dispatch on the model's method tag.
inline int predict(const FittedModel& model, const Vector& x) {
    switch (model.method) {
        case Method::Fda:
        case Method::Sda:
            return classify_fda(model, x).first;
        case Method::UcFda:
        case Method::UcSda:
            return classify_uc(model, x).first;
        case Method::Lda:
            return classify_lda(model, x).first;
        case Method::Qda:
            return classify_qda(model, x).first;
        case Method::LdaLp:
            return classify_lp(model, x, false).first;
        case Method::UcLdaLp:
            return classify_lp(model, x, true).first;
    }
    throw std::logic_error("predict: unknown method");
}

}  // namespace discrim
