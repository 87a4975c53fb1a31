#include "augkm/symmetric_eigen.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "augkm/errors.hpp"

namespace augkm {
namespace {

double off_diagonal_norm(const Matrix& a) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t j = 0; j < a.cols(); ++j) {
            if (i != j) {
                s += a(i, j) * a(i, j);
            }
        }
    }
    return std::sqrt(s);
}

// Applies the rotation that annihilates a(p, q) to a (both sides) and
// accumulates it into v.
void rotate(Matrix& a, Matrix& v, std::size_t p, std::size_t q) {
    const double apq = a(p, q);
    if (apq == 0.0) {
        return;
    }
    const double tau = (a(q, q) - a(p, p)) / (2.0 * apq);
    double t;
    if (std::abs(tau) > 1e150) {
        t = 0.5 / tau;
    } else {
        t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
    }
    const double c = 1.0 / std::sqrt(1.0 + t * t);
    const double s = t * c;
    const std::size_t n = a.rows();

    for (std::size_t k = 0; k < n; ++k) {
        const double akp = a(k, p);
        const double akq = a(k, q);
        a(k, p) = c * akp - s * akq;
        a(k, q) = s * akp + c * akq;
    }
    for (std::size_t k = 0; k < n; ++k) {
        const double apk = a(p, k);
        const double aqk = a(q, k);
        a(p, k) = c * apk - s * aqk;
        a(q, k) = s * apk + c * aqk;
    }
    a(p, q) = 0.0;
    a(q, p) = 0.0;

    for (std::size_t k = 0; k < n; ++k) {
        const double vkp = v(k, p);
        const double vkq = v(k, q);
        v(k, p) = c * vkp - s * vkq;
        v(k, q) = s * vkp + c * vkq;
    }
}

}  // namespace

EigenPairs sym_eigen(const Matrix& c, const JacobiOptions& options) {
    if (c.rows() != c.cols()) {
        throw DomainError("sym_eigen: matrix is " + std::to_string(c.rows()) + "x" +
                          std::to_string(c.cols()) + ", expected square");
    }
    const std::size_t n = c.rows();
    Matrix a(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            a(i, j) = 0.5 * (c(i, j) + c(j, i));
        }
    }
    Matrix v = Matrix::identity(n);

    const double threshold = options.relative_tolerance * frobenius_norm(a);
    double off = off_diagonal_norm(a);
    int sweep = 0;
    while (off > threshold) {
        if (sweep == options.max_sweeps) {
            throw NumericalError("sym_eigen: no convergence after " +
                                     std::to_string(options.max_sweeps) +
                                     " sweeps, off-diagonal norm " + std::to_string(off),
                                 off);
        }
        for (std::size_t p = 0; p + 1 < n; ++p) {
            for (std::size_t q = p + 1; q < n; ++q) {
                rotate(a, v, p, q);
            }
        }
        ++sweep;
        off = off_diagonal_norm(a);
    }

    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t x, std::size_t y) { return a(x, x) > a(y, y); });

    EigenPairs out{Vector(n), Matrix(n, n)};
    for (std::size_t j = 0; j < n; ++j) {
        const std::size_t src = order[j];
        out.eigenvalues[j] = a(src, src);
        std::size_t pivot = 0;
        for (std::size_t i = 1; i < n; ++i) {
            if (std::abs(v(i, src)) > std::abs(v(pivot, src))) {
                pivot = i;
            }
        }
        const double sign = v(pivot, src) < 0.0 ? -1.0 : 1.0;
        for (std::size_t i = 0; i < n; ++i) {
            out.eigenvectors(i, j) = sign * v(i, src);
        }
    }
    return out;
}

}  // namespace augkm
