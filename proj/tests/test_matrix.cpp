#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "augkm/errors.hpp"
#include "augkm/matrix.hpp"
#include "test_support.hpp"

using augkm::Matrix;

TEST_CASE("matrix construction rejects bad shapes and non-finite values") {
    CHECK_THROWS_AS(Matrix(2, 2, {1.0, 2.0, 3.0}), augkm::DomainError);
    CHECK_THROWS_AS(Matrix(1, 2, {1.0, std::numeric_limits<double>::quiet_NaN()}),
                    augkm::DomainError);
    CHECK_THROWS_AS(Matrix(1, 1, {std::numeric_limits<double>::infinity()}), augkm::DomainError);
    CHECK_THROWS_AS(Matrix::from_rows({{1, 2}, {3}}), augkm::DomainError);
}

TEST_CASE("mean_rows") {
    CHECK(augkm::mean_rows(Matrix::from_rows({{1, 2}, {3, 4}})) == augkm::Vector{2, 3});
    CHECK(augkm::mean_rows(Matrix::from_rows({{5, 5}, {5, 5}, {5, 5}})) == augkm::Vector{5, 5});
    CHECK_THROWS_AS(augkm::mean_rows(Matrix(0, 3)), augkm::DomainError);

    const Matrix x = testing::random_matrix(7, 3, 11);
    const auto mu = augkm::mean_rows(x);
    const auto oracle = testing::column_mean_oracle(x);
    for (std::size_t j = 0; j < 3; ++j) {
        CHECK(std::abs(mu[j] - oracle[j]) <= 1e-12);
    }
}

TEST_CASE("center") {
    const Matrix x = Matrix::from_rows({{1, 2}, {3, 4}});
    CHECK(augkm::center(x, augkm::Vector{2, 3}) == Matrix::from_rows({{-1, -1}, {1, 1}}));
    CHECK(augkm::center(x, augkm::Vector{0, 0}) == x);
    CHECK_THROWS_AS(augkm::center(x, augkm::Vector{1, 2, 3}), augkm::DomainError);

    const Matrix r = testing::random_matrix(5, 4, 12, -10, 10);
    const Matrix c = augkm::center(r, augkm::mean_rows(r));
    for (std::size_t j = 0; j < 4; ++j) {
        double s = 0.0;
        for (std::size_t i = 0; i < 5; ++i) {
            s += c(i, j);
        }
        CHECK(std::abs(s) <= 1e-10);
    }
}

TEST_CASE("mean of a self-centered matrix vanishes") {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        const Matrix x = testing::random_matrix(3 + seed % 17, 1 + seed % 6, seed, -100, 100);
        for (double v : augkm::mean_rows(augkm::center(x, augkm::mean_rows(x)))) {
            CHECK(std::abs(v) <= 1e-10);
        }
    }
}

TEST_CASE("scatter") {
    CHECK(augkm::scatter(Matrix::from_rows({{1, 1}, {-1, -1}})) ==
          Matrix::from_rows({{1, 1}, {1, 1}}));
    CHECK(augkm::scatter(Matrix(4, 3)) == Matrix(3, 3));
    CHECK_THROWS_AS(augkm::scatter(Matrix(0, 2)), augkm::DomainError);

    const Matrix x = testing::random_matrix(6, 3, 13);
    const Matrix c = augkm::scatter(x);
    const Matrix oracle = testing::scatter_oracle(x);
    for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
            CHECK(std::abs(c(i, j) - oracle(i, j)) <= 1e-10);
            CHECK(std::abs(c(i, j) - c(j, i)) <= 1e-12);
        }
    }
}

TEST_CASE("scatter is positive semidefinite") {
    std::mt19937_64 gen(99);
    std::normal_distribution<double> normal;
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        const Matrix x = testing::random_matrix(8, 5, 100 + seed, -3, 3);
        const Matrix c = augkm::scatter(augkm::center(x, augkm::mean_rows(x)));
        for (int t = 0; t < 100; ++t) {
            std::vector<double> v(5);
            for (double& e : v) {
                e = normal(gen);
            }
            double q = 0.0;
            for (std::size_t i = 0; i < 5; ++i) {
                for (std::size_t j = 0; j < 5; ++j) {
                    q += v[i] * c(i, j) * v[j];
                }
            }
            CHECK(q >= -1e-9);
        }
    }
}

TEST_CASE("multiply and transpose") {
    const Matrix a = Matrix::from_rows({{1, 2, 3}, {4, 5, 6}});
    CHECK(a.transpose() == Matrix::from_rows({{1, 4}, {2, 5}, {3, 6}}));
    CHECK(augkm::multiply(a, a.transpose()) == Matrix::from_rows({{14, 32}, {32, 77}}));
    CHECK_THROWS_AS(augkm::multiply(a, a), augkm::DomainError);
}
