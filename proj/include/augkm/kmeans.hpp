#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "augkm/matrix.hpp"

namespace augkm {

/// k x d cluster centroids.
class Centers {
public:
    Centers() = default;
    /// Throws DomainError when the matrix has no rows.
    explicit Centers(Matrix values);

    std::size_t k() const noexcept { return values_.rows(); }
    std::size_t dim() const noexcept { return values_.cols(); }
    std::span<const double> operator[](std::size_t j) const { return values_.row(j); }
    const Matrix& matrix() const noexcept { return values_; }

    friend bool operator==(const Centers&, const Centers&) = default;

private:
    Matrix values_;
};

/// Per-point cluster ids in [0, k). Ids are meaningful only up to permutation.
class Labeling {
public:
    Labeling() = default;
    /// Throws DomainError if k is 0 or any id is >= k.
    Labeling(std::vector<std::size_t> ids, std::size_t k);

    std::size_t k() const noexcept { return k_; }
    std::size_t size() const noexcept { return ids_.size(); }
    std::size_t operator[](std::size_t i) const { return ids_[i]; }
    const std::vector<std::size_t>& ids() const noexcept { return ids_; }

    friend bool operator==(const Labeling&, const Labeling&) = default;

private:
    std::vector<std::size_t> ids_;
    std::size_t k_ = 0;
};

/// True when a and b induce the same partition of the points.
bool same_partition(const Labeling& a, const Labeling& b);

enum class InitMethod { KMeansPlusPlus, UniformRows };

struct LloydConfig {
    int max_iters = 100;
    /// Converged when every center moves less than tol * (1 + ‖center‖).
    double tol = 1e-6;
    std::uint64_t seed = 0;
    InitMethod init = InitMethod::KMeansPlusPlus;

    void validate() const;
};

struct ClusteringResult {
    Centers centers;
    Labeling labels;
    double cost = 0.0;
    int iterations = 0;
    bool converged = false;
    /// cost(X, centers) observed at each assignment step, final cost last.
    std::vector<double> cost_history;
};

/// k distinct rows chosen by D² sampling (first row uniform).
Centers kmeanspp_seed(const Matrix& x, std::size_t k, std::uint64_t seed);

/// k distinct rows chosen uniformly without replacement.
Centers uniform_seed(const Matrix& x, std::size_t k, std::uint64_t seed);

/// Nearest center per point; ties go to the lowest center index.
Labeling assign(const Matrix& x, const Centers& c);

/// Sum over points of the squared distance to the nearest center.
double cost(const Matrix& x, const Centers& c);

/// Per-cluster means. An empty cluster takes the point farthest from its own
/// assigned center (lowest index on ties); points already taken by an earlier
/// empty cluster are skipped.
Centers update_centers(const Matrix& x, const Labeling& labels, std::size_t k);

/// Lloyd iterations from init. Stops when labels repeat, when every center
/// shift is below tolerance, or after max_iters.
ClusteringResult lloyd(const Matrix& x, const Centers& init, const LloydConfig& cfg);

/// Seeds with cfg.init then runs Lloyd.
ClusteringResult kmeans(const Matrix& x, std::size_t k, const LloydConfig& cfg);

/// Lowest-cost of `restarts` seeded runs; restart r uses derive_seed(seed, r).
/// Equal costs keep the earlier restart.
ClusteringResult kmeans_best_of(const Matrix& x, std::size_t k, std::size_t restarts,
                                const LloydConfig& cfg);

}  // namespace augkm
