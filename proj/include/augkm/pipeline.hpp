#pragma once

#include <cstddef>
#include <optional>

#include "augkm/kmeans.hpp"
#include "augkm/matrix.hpp"
#include "augkm/pca.hpp"
#include "augkm/predictors.hpp"

namespace augkm {

/// How predicted label classes become initial centers.
struct SeedingMode {
    enum class Kind { CoordinateMean, TrimmedMean };

    static constexpr double kDefaultTrim = 0.1;

    Kind kind = Kind::CoordinateMean;
    double alpha = 0.0;  // TrimmedMean only, in [0, 0.5)

    static SeedingMode coordinate_mean() { return {Kind::CoordinateMean, 0.0}; }
    static SeedingMode trimmed_mean(double a = kDefaultTrim) { return {Kind::TrimmedMean, a}; }

    void validate() const;
};

struct PipelineConfig {
    std::size_t k = 1;
    std::optional<PcaPolicy> pca;
    SeedingMode seeding;
    LloydConfig lloyd;
    bool refine = true;

    void validate() const;
};

struct PipelineResult {
    /// Centers, labels and cost on the original (unreduced) points.
    ClusteringResult result;
    std::optional<std::size_t> reduced_dim;
    std::optional<double> cost_ratio;
    /// Lloyd iterations in the working space, 0 without refinement.
    int iterations = 0;
    /// Seconds spent in Lloyd refinement.
    double lloyd_seconds = 0.0;
};

/// Per coordinate: sort, drop ceil(alpha*n) values from each end and average
/// the rest, or take the median when nothing remains. alpha = 0 is the plain
/// mean, summed in row order.
Vector coordinate_trimmed_mean(const Matrix& points, double alpha);

/// Center j is the (trimmed) coordinate-wise mean of the points labeled j.
/// A label class with no points takes the point farthest from the global mean
/// that no earlier empty class has taken (lowest index on ties).
Centers centers_from_labels(const Matrix& x, const Labeling& labels, std::size_t k,
                            const SeedingMode& mode);

/// Input points plus the space clustering runs in.
struct PreparedData {
    const Matrix* original = nullptr;
    Matrix working;
    std::optional<PcaModel> pca;

    const Matrix& working_points() const { return pca ? working : *original; }
};

/// Fits and applies the optional PCA. `x` must outlive the result.
PreparedData prepare(const Matrix& x, const std::optional<PcaPolicy>& pca);

/// Seeds from labels in the working space, optionally refines with Lloyd, then
/// recomputes centers and cost on the original points.
PipelineResult cluster_from_labels(const PreparedData& data, const Labeling& labels,
                                   const PipelineConfig& cfg);

/// The predictor-seeded clustering pipeline: optional PCA, prediction,
/// center seeding, optional Lloyd refinement, evaluation in original space.
/// A nearest-neighbor predictor is moved into the reduced space with the
/// fitted PCA model.
PipelineResult predictor_clustering(const Matrix& x, const Predictor& p, const PipelineConfig& cfg);

/// method / baseline; throws DomainError unless baseline > 0.
double cost_ratio(double method_cost, double baseline_cost);

}  // namespace augkm
