#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "augkm/datasets.hpp"
#include "augkm/kmeans.hpp"
#include "augkm/pca.hpp"
#include "augkm/pipeline.hpp"

namespace augkm {

inline constexpr const char* kLibraryVersion = "0.1.0";
inline constexpr int kResultSchemaVersion = 1;

/// Where experiment points come from. Textual forms:
///   synth:k=4,n=100,dim=10,sep=20,sigma=1[,seed=1]
///   csv:PATH  cifar:PATH  edges:PATH  or a bare PATH (csv)
struct DataSource {
    enum class Kind { Csv, Cifar, EdgeList, Synth };

    Kind kind = Kind::Synth;
    std::string path;
    bool has_header = false;                          // csv
    PixelScaling scaling = PixelScaling::UnitInterval;  // cifar
    std::size_t embed_dim = 2;                        // edges
    // synth
    std::size_t synth_k = 4;
    std::size_t synth_n_per = 100;
    std::size_t synth_dim = 10;
    double synth_separation = 20.0;
    double synth_sigma = 1.0;
    std::uint64_t synth_seed = 1;

    /// Throws ConfigError on a malformed spec.
    static DataSource parse(const std::string& spec);
    /// Canonical textual form (parse(to_string()) reproduces the source).
    std::string to_string() const;

    LabeledDataset load() const;
};

/// Default corruption grid 0.0, 0.1, ..., 1.0.
std::vector<double> default_error_rates();

struct ExperimentConfig {
    DataSource dataset;
    std::size_t k = 10;
    std::vector<double> error_rates = default_error_rates();
    std::size_t trials = 5;
    std::optional<PcaPolicy> pca = PcaPolicy::evr_threshold(0.95);
    SeedingMode seeding;
    std::size_t baseline_restarts = 10;
    std::uint64_t master_seed = 0;
    std::optional<std::size_t> subsample;
    std::uint64_t subsample_seed = 0;
    LloydConfig lloyd;
    /// Emit the refined variant (the seed-only variant is always emitted).
    bool refine = true;
    /// Worker threads for grid cells; results do not depend on it.
    std::size_t threads = 1;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

enum class Variant { SeedOnly, Refined };
const char* to_string(Variant v);

struct CellRecord {
    std::size_t rate_index = 0;
    double error_rate = 0.0;
    std::size_t trial = 0;
    Variant variant = Variant::SeedOnly;
    std::uint64_t seed = 0;
    double method_cost = 0.0;
    double baseline_cost = 0.0;
    double cost_ratio = 0.0;
    int iterations = 0;
    std::optional<std::size_t> reduced_dim;
    double wall_time_s = 0.0;
    double lloyd_time_s = 0.0;
};

struct ExperimentResult {
    ExperimentConfig config;
    std::string library_version = kLibraryVersion;
    std::size_t n_points = 0;
    std::size_t n_features = 0;
    double baseline_cost = 0.0;
    /// Ordered by (rate_index, trial, variant).
    std::vector<CellRecord> records;
};

/// Runs the corruption sweep. Base labels and the baseline cost come from the
/// best of `baseline_restarts` k-means++ + Lloyd runs on the original points.
/// Each (rate, trial) cell draws its noise with
/// derive_seed(master_seed, rate_index, trial).
ExperimentResult run_experiment(const ExperimentConfig& cfg);

/// Runs the sweep on points already in memory (cfg.dataset and subsample are
/// only echoed).
ExperimentResult run_experiment_on(const Matrix& x, const ExperimentConfig& cfg);

enum class ResultFormat { Csv, Json };

std::string results_to_csv(const ExperimentResult& res);
std::string results_to_json(const ExperimentResult& res);
/// Throws FormatError on malformed documents.
ExperimentResult results_from_json(const std::string& text);

/// Throws IoError when the file cannot be written.
void emit_results(const ExperimentResult& res, ResultFormat format, const std::filesystem::path& path);

}  // namespace augkm
