#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace augkm {

using Vector = std::vector<double>;

/// Dense row-major real matrix. Construction from values rejects non-finite
/// entries; element writes through operator() are unchecked.
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols);
    Matrix(std::size_t rows, std::size_t cols, std::vector<double> values);

    static Matrix from_rows(std::initializer_list<std::initializer_list<double>> rows);
    static Matrix identity(std::size_t n);

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return rows_ == 0 || cols_ == 0; }

    double operator()(std::size_t i, std::size_t j) const { return values_[i * cols_ + j]; }
    double& operator()(std::size_t i, std::size_t j) { return values_[i * cols_ + j]; }

    std::span<const double> row(std::size_t i) const {
        return {values_.data() + i * cols_, cols_};
    }
    std::span<double> row(std::size_t i) { return {values_.data() + i * cols_, cols_}; }

    const std::vector<double>& values() const noexcept { return values_; }

    Vector column(std::size_t j) const;
    Matrix transpose() const;
    Matrix select_rows(std::span<const std::size_t> indices) const;

    friend bool operator==(const Matrix&, const Matrix&) = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> values_;
};

Matrix multiply(const Matrix& a, const Matrix& b);

double squared_distance(std::span<const double> a, std::span<const double> b);
double dot(std::span<const double> a, std::span<const double> b);
double max_abs(const Matrix& m);
double frobenius_norm(const Matrix& m);

/// Column means. Throws DomainError on a matrix without rows.
Vector mean_rows(const Matrix& x);

/// x with mu subtracted from every row.
Matrix center(const Matrix& x, std::span<const double> mu);

/// (1/m) * Xcᵀ * Xc for an m-row centered matrix.
Matrix scatter(const Matrix& centered);

}  // namespace augkm
