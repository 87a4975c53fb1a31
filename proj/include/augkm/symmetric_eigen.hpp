#pragma once

#include "augkm/matrix.hpp"

namespace augkm {

/// Eigendecomposition of a real symmetric matrix.
struct EigenPairs {
    Vector eigenvalues;  // descending
    Matrix eigenvectors; // column j pairs with eigenvalues[j]
};

struct JacobiOptions {
    int max_sweeps = 100;
    /// Stop once the off-diagonal Frobenius norm is at most this times ‖C‖F.
    double relative_tolerance = 1e-10;
};

/// Cyclic Jacobi eigensolver. The input is symmetrized as (C + Cᵀ)/2 first.
/// Each eigenvector is signed so that its largest-magnitude entry (lowest
/// index on ties) is positive. Repeated eigenvalues get an arbitrary
/// orthonormal basis of their eigenspace.
///
/// Throws DomainError for non-square input and NumericalError (carrying the
/// final off-diagonal norm) when the sweep budget is exhausted.
EigenPairs sym_eigen(const Matrix& c, const JacobiOptions& options = {});

}  // namespace augkm
