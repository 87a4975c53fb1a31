#include "augkm/pipeline.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "augkm/errors.hpp"

namespace augkm {
namespace {

// ceil(alpha * n) that ignores representation error in alpha, so 0.1 * 30
// trims 3 values and not 4.
std::size_t trim_count(double alpha, std::size_t n) {
    const double raw = alpha * static_cast<double>(n);
    return static_cast<std::size_t>(std::ceil(raw - 1e-9 * std::max(1.0, raw)));
}

double median_sorted(const std::vector<double>& v) {
    const std::size_t n = v.size();
    return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

void SeedingMode::validate() const {
    if (kind == Kind::TrimmedMean && !(alpha >= 0.0 && alpha < 0.5)) {
        throw DomainError("trimmed mean: alpha " + std::to_string(alpha) + " outside [0, 0.5)");
    }
}

void PipelineConfig::validate() const {
    if (k < 1) {
        throw DomainError("pipeline: k must be at least 1");
    }
    if (pca) {
        pca->validate();
    }
    seeding.validate();
    lloyd.validate();
}

Vector coordinate_trimmed_mean(const Matrix& points, double alpha) {
    if (points.rows() == 0) {
        throw DomainError("coordinate_trimmed_mean: empty point set");
    }
    if (!(alpha >= 0.0 && alpha < 0.5)) {
        throw DomainError("coordinate_trimmed_mean: alpha " + std::to_string(alpha) +
                          " outside [0, 0.5)");
    }
    if (alpha == 0.0) {
        return mean_rows(points);
    }
    const std::size_t n = points.rows();
    const std::size_t t = trim_count(alpha, n);
    Vector out(points.cols());
    std::vector<double> values(n);
    for (std::size_t j = 0; j < points.cols(); ++j) {
        for (std::size_t i = 0; i < n; ++i) {
            values[i] = points(i, j);
        }
        std::sort(values.begin(), values.end());
        if (2 * t >= n) {
            out[j] = median_sorted(values);
            continue;
        }
        double sum = 0.0;
        for (std::size_t i = t; i < n - t; ++i) {
            sum += values[i];
        }
        out[j] = sum / static_cast<double>(n - 2 * t);
    }
    return out;
}

Centers centers_from_labels(const Matrix& x, const Labeling& labels, std::size_t k,
                            const SeedingMode& mode) {
    mode.validate();
    if (labels.size() != x.rows()) {
        throw DomainError("centers_from_labels: " + std::to_string(labels.size()) +
                          " labels for " + std::to_string(x.rows()) + " points");
    }
    if (k < 1 || labels.k() > k) {
        throw DomainError("centers_from_labels: labels use k=" + std::to_string(labels.k()) +
                          " but k=" + std::to_string(k) + " was requested");
    }
    std::vector<std::vector<std::size_t>> members(k);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        members[labels[i]].push_back(i);
    }
    const double alpha = mode.kind == SeedingMode::Kind::TrimmedMean ? mode.alpha : 0.0;

    Matrix centers(k, x.cols());
    std::vector<bool> taken(x.rows(), false);
    std::optional<Vector> global_mean;
    for (std::size_t c = 0; c < k; ++c) {
        if (!members[c].empty()) {
            const Vector m = coordinate_trimmed_mean(x.select_rows(members[c]), alpha);
            std::copy(m.begin(), m.end(), centers.row(c).begin());
            continue;
        }
        if (!global_mean) {
            global_mean = mean_rows(x);
        }
        std::size_t far = x.rows();
        double far_d = -1.0;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            if (taken[i]) {
                continue;
            }
            const double d = squared_distance(x.row(i), *global_mean);
            if (d > far_d) {
                far_d = d;
                far = i;
            }
        }
        if (far == x.rows()) {
            throw DomainError("centers_from_labels: more empty label classes than points");
        }
        taken[far] = true;
        std::copy_n(x.row(far).begin(), x.cols(), centers.row(c).begin());
    }
    return Centers(std::move(centers));
}

PreparedData prepare(const Matrix& x, const std::optional<PcaPolicy>& pca) {
    PreparedData data;
    data.original = &x;
    if (pca) {
        data.pca = fit(x, *pca);
        data.working = transform(*data.pca, x);
    }
    return data;
}

PipelineResult cluster_from_labels(const PreparedData& data, const Labeling& labels,
                                   const PipelineConfig& cfg) {
    cfg.validate();
    const Matrix& original = *data.original;
    const Matrix& working = data.working_points();
    if (labels.size() != original.rows()) {
        throw DomainError("pipeline: " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(original.rows()) + " points");
    }
    if (labels.k() > cfg.k) {
        throw DomainError("pipeline: predictor emits k=" + std::to_string(labels.k()) +
                          " classes but the pipeline clusters with k=" + std::to_string(cfg.k));
    }

    PipelineResult out;
    if (data.pca) {
        out.reduced_dim = data.pca->retained;
    }

    Centers final_centers;
    if (cfg.refine) {
        const Centers seeded = centers_from_labels(working, labels, cfg.k, cfg.seeding);
        const auto start = std::chrono::steady_clock::now();
        ClusteringResult refined = lloyd(working, seeded, cfg.lloyd);
        out.lloyd_seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        out.iterations = refined.iterations;
        out.result.converged = refined.converged;
        out.result.cost_history = std::move(refined.cost_history);
        final_centers = update_centers(original, refined.labels, cfg.k);
    } else {
        // The strong average itself is the answer, taken over original points.
        final_centers = centers_from_labels(original, labels, cfg.k, cfg.seeding);
        out.result.converged = true;
    }

    out.result.labels = assign(original, final_centers);
    out.result.cost = cost(original, final_centers);
    out.result.iterations = out.iterations;
    out.result.centers = std::move(final_centers);
    return out;
}

PipelineResult predictor_clustering(const Matrix& x, const Predictor& p, const PipelineConfig& cfg) {
    cfg.validate();
    if (x.rows() < cfg.k) {
        throw DomainError("pipeline: k=" + std::to_string(cfg.k) + " exceeds " +
                          std::to_string(x.rows()) + " points");
    }
    const PreparedData data = prepare(x, cfg.pca);
    Labeling labels;
    if (p.is_geometric() && data.pca) {
        labels = predict(in_reduced_space(p, *data.pca), data.working);
    } else {
        labels = predict(p, x);
    }
    return cluster_from_labels(data, labels, cfg);
}

double cost_ratio(double method_cost, double baseline_cost) {
    if (!(baseline_cost > 0.0)) {
        throw DomainError("cost_ratio: baseline cost must be positive");
    }
    return method_cost / baseline_cost;
}

}  // namespace augkm
