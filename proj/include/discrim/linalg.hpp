#pragma once

// Minimal dense real linear algebra: Cholesky, symmetric and
// symmetric-definite generalized eigensolvers, SPD solves.
// Deterministic output conventions (descending eigenvalues, fixed
// sign choice) so that repeated runs are bit-identical.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

namespace discrim {

using Vector = std::vector<double>;

class NotPositiveDefinite : public std::runtime_error {
public:
    explicit NotPositiveDefinite(const std::string& what)
        : std::runtime_error(what) {}
};

class NoConvergence : public std::runtime_error {
public:
    explicit NoConvergence(const std::string& what)
        : std::runtime_error(what) {}
};

// Row-major dense matrix. Constructors reject non-finite entries.
class DenseMatrix {
public:
    DenseMatrix() = default;

    DenseMatrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {
        if (!std::isfinite(fill))
            throw std::invalid_argument("DenseMatrix: non-finite fill value");
    }

    DenseMatrix(std::size_t rows, std::size_t cols, Vector entries)
        : rows_(rows), cols_(cols), data_(std::move(entries)) {
        if (data_.size() != rows_ * cols_)
            throw std::invalid_argument("DenseMatrix: entry count mismatch");
        for (double v : data_)
            if (!std::isfinite(v))
                throw std::invalid_argument("DenseMatrix: non-finite entry");
    }

    static DenseMatrix identity(std::size_t n) {
        DenseMatrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = 1.0;
        return m;
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    double& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    double operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const Vector& data() const { return data_; }

    DenseMatrix transposed() const {
        DenseMatrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    Vector row(std::size_t i) const {
        return Vector(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                      data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
    }

    Vector col(std::size_t j) const {
        Vector c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) c[i] = (*this)(i, j);
        return c;
    }

    double frobenius_norm() const {
        double s = 0.0;
        for (double v : data_) s += v * v;
        return std::sqrt(s);
    }

    bool is_symmetric(double rel_tol = 1e-10) const {
        if (rows_ != cols_) return false;
        double scale = frobenius_norm();
        if (scale == 0.0) return true;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i + 1; j < cols_; ++j)
                if (std::abs((*this)(i, j) - (*this)(j, i)) > rel_tol * scale)
                    return false;
        return true;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    Vector data_;
};

inline DenseMatrix operator*(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.cols() != b.rows())
        throw std::invalid_argument("matrix product: dimension mismatch");
    DenseMatrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t k = 0; k < a.cols(); ++k) {
            const double aik = a(i, k);
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j)
                c(i, j) += aik * b(k, j);
        }
    return c;
}

inline DenseMatrix operator+(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("matrix sum: dimension mismatch");
    DenseMatrix c = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            c(i, j) += b(i, j);
    return c;
}

inline DenseMatrix operator-(const DenseMatrix& a, const DenseMatrix& b) {
    if (a.rows() != b.rows() || a.cols() != b.cols())
        throw std::invalid_argument("matrix difference: dimension mismatch");
    DenseMatrix c = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            c(i, j) -= b(i, j);
    return c;
}

inline DenseMatrix operator*(double s, const DenseMatrix& a) {
    DenseMatrix c = a;
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < a.cols(); ++j)
            c(i, j) *= s;
    return c;
}

inline Vector operator*(const DenseMatrix& a, const Vector& x) {
    if (a.cols() != x.size())
        throw std::invalid_argument("matrix-vector product: dimension mismatch");
    Vector y(a.rows(), 0.0);
    for (std::size_t i = 0; i < a.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < a.cols(); ++j) s += a(i, j) * x[j];
        y[i] = s;
    }
    return y;
}

inline double dot(const Vector& a, const Vector& b) {
    if (a.size() != b.size())
        throw std::invalid_argument("dot: length mismatch");
    return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

inline double norm2(const Vector& a) { return std::sqrt(dot(a, a)); }

// Eigenvalues sorted non-increasing; vectors[k] is the unit eigenvector
// for values[k]. Sign convention: the entry of largest magnitude in each
// vector is positive.
struct EigenPairs {
    Vector values;
    std::vector<Vector> vectors;
};

namespace detail {

inline DenseMatrix symmetrized(const DenseMatrix& m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("expected a square matrix");
    DenseMatrix s(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            s(i, j) = 0.5 * (m(i, j) + m(j, i));
    return s;
}

inline void fix_sign(Vector& v) {
    std::size_t arg = 0;
    double best = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (std::abs(v[i]) > best) {
            best = std::abs(v[i]);
            arg = i;
        }
    }
    if (!v.empty() && v[arg] < 0.0)
        for (double& x : v) x = -x;
}

inline void normalize(Vector& v) {
    double n = norm2(v);
    if (n > 0.0)
        for (double& x : v) x /= n;
}

}  // namespace detail

// Lower-triangular L with L*L^T = m. Requires a symmetric PD input;
// the input is symmetrized first to kill accumulation noise.
inline DenseMatrix cholesky(const DenseMatrix& m) {
    if (!m.is_symmetric())
        throw std::invalid_argument("cholesky: matrix not symmetric");
    const DenseMatrix a = detail::symmetrized(m);
    const std::size_t n = a.rows();
    DenseMatrix l(n, n);
    for (std::size_t j = 0; j < n; ++j) {
        double d = a(j, j);
        for (std::size_t k = 0; k < j; ++k) d -= l(j, k) * l(j, k);
        if (d <= 0.0 || !std::isfinite(d))
            throw NotPositiveDefinite("cholesky: pivot <= 0 at column " + std::to_string(j));
        l(j, j) = std::sqrt(d);
        for (std::size_t i = j + 1; i < n; ++i) {
            double s = a(i, j);
            for (std::size_t k = 0; k < j; ++k) s -= l(i, k) * l(j, k);
            l(i, j) = s / l(j, j);
        }
    }
    return l;
}

// Solves L*x = b for lower-triangular L.
inline Vector forward_substitute(const DenseMatrix& l, const Vector& b) {
    const std::size_t n = l.rows();
    Vector x(n);
    for (std::size_t i = 0; i < n; ++i) {
        double s = b[i];
        for (std::size_t k = 0; k < i; ++k) s -= l(i, k) * x[k];
        x[i] = s / l(i, i);
    }
    return x;
}

// Solves L^T*x = b for lower-triangular L.
inline Vector back_substitute_transposed(const DenseMatrix& l, const Vector& b) {
    const std::size_t n = l.rows();
    Vector x(n);
    for (std::size_t ii = n; ii-- > 0;) {
        double s = b[ii];
        for (std::size_t k = ii + 1; k < n; ++k) s -= l(k, ii) * x[k];
        x[ii] = s / l(ii, ii);
    }
    return x;
}

// x with m*x = rhs via Cholesky; no explicit inverse is ever formed.
inline Vector solve_spd(const DenseMatrix& m, const Vector& rhs) {
    if (rhs.size() != m.cols())
        throw std::invalid_argument("solve_spd: rhs length mismatch");
    const DenseMatrix l = cholesky(m);
    return back_substitute_transposed(l, forward_substitute(l, rhs));
}

inline Vector solve_with_cholesky(const DenseMatrix& l, const Vector& rhs) {
    return back_substitute_transposed(l, forward_substitute(l, rhs));
}

// log|m| = 2 * sum(log diag(chol(m))).
inline double log_det(const DenseMatrix& m) {
    const DenseMatrix l = cholesky(m);
    double s = 0.0;
    for (std::size_t i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
    return 2.0 * s;
}

inline double log_det_from_cholesky(const DenseMatrix& l) {
    double s = 0.0;
    for (std::size_t i = 0; i < l.rows(); ++i) s += std::log(l(i, i));
    return 2.0 * s;
}

// Cyclic Jacobi eigensolver for symmetric matrices. Plenty for the
// dimensionalities this library targets (p <= 64).
inline EigenPairs sym_eig(const DenseMatrix& m) {
    if (!m.is_symmetric())
        throw std::invalid_argument("sym_eig: matrix not symmetric");
    DenseMatrix a = detail::symmetrized(m);
    const std::size_t n = a.rows();
    DenseMatrix v = DenseMatrix::identity(n);

    const int max_sweeps = 100;
    bool converged = (n <= 1);
    for (int sweep = 0; sweep < max_sweeps && !converged; ++sweep) {
        double off = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
        if (off <= 1e-300) {
            converged = true;
            break;
        }
        for (std::size_t p = 0; p < n - 1; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (std::abs(apq) <= 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = (theta >= 0.0)
                                     ? 1.0 / (theta + std::sqrt(1.0 + theta * theta))
                                     : 1.0 / (theta - std::sqrt(1.0 + theta * theta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (std::size_t k = 0; k < n; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (std::size_t k = 0; k < n; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
        }
        double off_after = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j) off_after += a(i, j) * a(i, j);
        const double diag_scale = std::max(a.frobenius_norm(), 1e-300);
        if (std::sqrt(off_after) <= 1e-14 * diag_scale) converged = true;
    }
    if (!converged)
        throw NoConvergence("sym_eig: Jacobi sweeps did not converge");

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
        if (a(i, i) != a(j, j)) return a(i, i) > a(j, j);
        return i < j;
    });

    EigenPairs out;
    out.values.resize(n);
    out.vectors.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        out.values[k] = a(order[k], order[k]);
        out.vectors[k] = v.col(order[k]);
        detail::normalize(out.vectors[k]);
        detail::fix_sign(out.vectors[k]);
    }
    return out;
}

// Symmetric-definite pencil b*v = lambda*w*v, solved by Cholesky
// reduction: w = L L^T, eigensolve L^-1 b L^-T, back-transform.
// Returned vectors have unit Euclidean norm.
inline EigenPairs generalized_sym_eig(const DenseMatrix& b, const DenseMatrix& w) {
    if (b.rows() != w.rows() || b.cols() != w.cols())
        throw std::invalid_argument("generalized_sym_eig: dimension mismatch");
    const DenseMatrix l = cholesky(w);
    const std::size_t n = b.rows();

    // C = L^-1 * b * L^-T, built column by column through triangular solves.
    DenseMatrix half(n, n);  // L^-1 * b
    for (std::size_t j = 0; j < n; ++j) {
        Vector col = forward_substitute(l, b.col(j));
        for (std::size_t i = 0; i < n; ++i) half(i, j) = col[i];
    }
    DenseMatrix reduced(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        Vector row = forward_substitute(l, half.row(i));
        for (std::size_t j = 0; j < n; ++j) reduced(i, j) = row[j];
    }

    EigenPairs pairs = sym_eig(detail::symmetrized(reduced));
    for (auto& u : pairs.vectors) {
        u = back_substitute_transposed(l, u);
        detail::normalize(u);
        detail::fix_sign(u);
    }
    return pairs;
}

}  // namespace discrim
