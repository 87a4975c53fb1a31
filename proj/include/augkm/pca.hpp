#pragma once

#include <cstddef>
#include <span>
#include <string>

#include "augkm/matrix.hpp"

namespace augkm {

/// How many principal components to keep.
struct PcaPolicy {
    enum class Mode { FixedDim, EvrThreshold };

    Mode mode = Mode::EvrThreshold;
    std::size_t dim = 0;      // FixedDim
    double threshold = 0.95;  // EvrThreshold, in (0, 1]
    /// Divide each centered column by its sample standard deviation before
    /// the eigendecomposition. Columns with sigma < 1e-12 stay unscaled.
    bool standardize = false;

    static PcaPolicy fixed_dim(std::size_t r) { return {Mode::FixedDim, r, 0.0, false}; }
    static PcaPolicy evr_threshold(double t) { return {Mode::EvrThreshold, 0, t, false}; }

    /// Throws DomainError when the parameters are out of range.
    void validate() const;
};

/// A fitted PCA transform.
struct PcaModel {
    Vector mean;             // d
    Vector scale;            // d, all ones unless standardized
    Matrix components;       // d x r, orthonormal columns
    Vector eigenvalues_all;  // d, descending
    Vector evr;              // d, explained-variance ratio per eigenvalue
    std::size_t retained = 0;
    /// Total variance was zero; components are canonical axes and evr is zero.
    bool degenerate = false;

    std::size_t input_dim() const { return mean.size(); }
};

/// Eigenvalue shares λᵢ / Σλⱼ. Tiny negative eigenvalues (round-off on a
/// positive semidefinite matrix) count as zero. All zeros when the sum is 0.
Vector explained_variance_ratio(std::span<const double> eigenvalues);

inline const Vector& explained_variance_ratio(const PcaModel& model) { return model.evr; }

/// Fits PCA on the rows of x (at least 2 rows, 1 column).
/// Under an EVR threshold, zero total variance throws DegenerateDataError.
PcaModel fit(const Matrix& x, const PcaPolicy& policy);

/// (x - mean) / scale projected on the retained components: n x r.
Matrix transform(const PcaModel& model, const Matrix& x);

/// Maps reduced coordinates back to the input space.
Matrix inverse_transform(const PcaModel& model, const Matrix& reduced);

std::string to_json(const PcaModel& model);
/// Throws FormatError on malformed or wrong-version documents.
PcaModel pca_model_from_json(const std::string& text);

}  // namespace augkm
