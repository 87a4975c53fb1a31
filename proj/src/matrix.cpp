#include "augkm/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "augkm/errors.hpp"

namespace augkm {

Matrix::Matrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), values_(rows * cols, 0.0) {}

Matrix::Matrix(std::size_t rows, std::size_t cols, std::vector<double> values)
    : rows_(rows), cols_(cols), values_(std::move(values)) {
    if (values_.size() != rows_ * cols_) {
        throw DomainError("matrix: expected " + std::to_string(rows_ * cols_) + " values, got " +
                          std::to_string(values_.size()));
    }
    for (std::size_t i = 0; i < values_.size(); ++i) {
        if (!std::isfinite(values_[i])) {
            throw DomainError("matrix: non-finite entry at row " + std::to_string(i / cols_) +
                              ", column " + std::to_string(i % cols_));
        }
    }
}

Matrix Matrix::from_rows(std::initializer_list<std::initializer_list<double>> rows) {
    const std::size_t n = rows.size();
    const std::size_t d = n == 0 ? 0 : rows.begin()->size();
    std::vector<double> values;
    values.reserve(n * d);
    for (const auto& r : rows) {
        if (r.size() != d) {
            throw DomainError("matrix: ragged row initializer");
        }
        values.insert(values.end(), r.begin(), r.end());
    }
    return Matrix(n, d, std::move(values));
}

Matrix Matrix::identity(std::size_t n) {
    Matrix m(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        m(i, i) = 1.0;
    }
    return m;
}

Vector Matrix::column(std::size_t j) const {
    Vector out(rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        out[i] = (*this)(i, j);
    }
    return out;
}

Matrix Matrix::transpose() const {
    Matrix t(cols_, rows_);
    for (std::size_t i = 0; i < rows_; ++i) {
        for (std::size_t j = 0; j < cols_; ++j) {
            t(j, i) = (*this)(i, j);
        }
    }
    return t;
}

Matrix Matrix::select_rows(std::span<const std::size_t> indices) const {
    Matrix out(indices.size(), cols_);
    for (std::size_t r = 0; r < indices.size(); ++r) {
        if (indices[r] >= rows_) {
            throw DomainError("matrix: row index out of range");
        }
        std::copy_n(row(indices[r]).begin(), cols_, out.row(r).begin());
    }
    return out;
}

Matrix multiply(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.rows()) {
        throw DomainError("multiply: inner dimensions differ (" + std::to_string(a.cols()) +
                          " vs " + std::to_string(b.rows()) + ")");
    }
    Matrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        auto dst = out.row(i);
        for (std::size_t p = 0; p < a.cols(); ++p) {
            const double s = a(i, p);
            const auto src = b.row(p);
            for (std::size_t j = 0; j < b.cols(); ++j) {
                dst[j] += s * src[j];
            }
        }
    }
    return out;
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        const double t = a[j] - b[j];
        s += t * t;
    }
    return s;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double s = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j) {
        s += a[j] * b[j];
    }
    return s;
}

double max_abs(const Matrix& m) {
    double out = 0.0;
    for (double v : m.values()) {
        out = std::max(out, std::abs(v));
    }
    return out;
}

double frobenius_norm(const Matrix& m) {
    double s = 0.0;
    for (double v : m.values()) {
        s += v * v;
    }
    return std::sqrt(s);
}

Vector mean_rows(const Matrix& x) {
    if (x.rows() == 0) {
        throw DomainError("mean_rows: matrix has no rows");
    }
    Vector mu(x.cols(), 0.0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        const auto r = x.row(i);
        for (std::size_t j = 0; j < x.cols(); ++j) {
            mu[j] += r[j];
        }
    }
    const double inv = 1.0 / static_cast<double>(x.rows());
    for (double& v : mu) {
        v *= inv;
    }
    return mu;
}

Matrix center(const Matrix& x, std::span<const double> mu) {
    if (mu.size() != x.cols()) {
        throw DomainError("center: mean has length " + std::to_string(mu.size()) +
                          " but matrix has " + std::to_string(x.cols()) + " columns");
    }
    Matrix out = x;
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto r = out.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) {
            r[j] -= mu[j];
        }
    }
    return out;
}

Matrix scatter(const Matrix& centered) {
    const std::size_t m = centered.rows();
    const std::size_t d = centered.cols();
    if (m == 0) {
        throw DomainError("scatter: matrix has no rows");
    }
    Matrix c(d, d);
    // Upper triangle only, mirrored afterwards so the result is exactly symmetric.
    for (std::size_t i = 0; i < m; ++i) {
        const auto r = centered.row(i);
        for (std::size_t a = 0; a < d; ++a) {
            const double ra = r[a];
            if (ra == 0.0) {
                continue;
            }
            for (std::size_t b = a; b < d; ++b) {
                c(a, b) += ra * r[b];
            }
        }
    }
    const double inv = 1.0 / static_cast<double>(m);
    for (std::size_t a = 0; a < d; ++a) {
        for (std::size_t b = a; b < d; ++b) {
            c(a, b) *= inv;
            c(b, a) = c(a, b);
        }
    }
    return c;
}

}  // namespace augkm
