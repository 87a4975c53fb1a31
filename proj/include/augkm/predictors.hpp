#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>

#include "augkm/kmeans.hpp"
#include "augkm/matrix.hpp"

namespace augkm {

struct PcaModel;

/// Labels each query with the label of its nearest reference point.
struct NearestNeighborPredictor {
    Matrix reference_points;
    Labeling reference_labels;
};

/// Base labels with each entry independently replaced, with probability
/// error_rate, by a uniform draw over all k labels (possibly the original).
struct NoisyPredictor {
    Labeling base_labels;
    double error_rate = 0.0;
    std::uint64_t seed = 0;
};

/// Labels produced by an external model, read from a label file.
struct FileOraclePredictor {
    Labeling labels;
};

class Predictor {
public:
    using Variant = std::variant<NearestNeighborPredictor, NoisyPredictor, FileOraclePredictor>;

    explicit Predictor(Variant v);

    const Variant& variant() const noexcept { return v_; }
    /// Number of label classes the predictor can emit.
    std::size_t k() const;
    bool is_geometric() const { return std::holds_alternative<NearestNeighborPredictor>(v_); }

private:
    Variant v_;
};

/// Throws DomainError for an empty reference set or mismatched lengths.
Predictor nn_predictor_build(const Matrix& ref_x, const Labeling& ref_labels);

/// Throws DomainError unless error_rate is in [0, 1].
Predictor noisy_predictor(const Labeling& base, double error_rate, std::uint64_t seed);

Labeling noisy_labels(const Labeling& base, double error_rate, std::size_t k, std::uint64_t seed);

/// Reads one base-10 label per line (LF or CRLF, optional final newline, no
/// blank lines). Throws FormatError naming the offending line.
Labeling read_label_file(const std::filesystem::path& path, std::size_t k);
void write_label_file(const std::filesystem::path& path, const Labeling& labels);

/// read_label_file plus a count check against expected_n.
Predictor file_oracle_load(const std::filesystem::path& path, std::size_t expected_n, std::size_t k);

Labeling predict(const Predictor& p, const Matrix& x);

/// The same predictor expressed in a PCA-reduced space: nearest-neighbor
/// references are transformed with the model, label predictors are returned
/// unchanged.
Predictor in_reduced_space(const Predictor& p, const PcaModel& model);

}  // namespace augkm
