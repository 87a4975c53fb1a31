#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "augkm/kmeans.hpp"
#include "augkm/matrix.hpp"

namespace augkm {

/// Undirected simple graph: edges stored as (u, v) with u < v, no duplicates.
struct Graph {
    std::size_t node_count = 0;
    std::vector<std::pair<std::size_t, std::size_t>> edges;

    friend bool operator==(const Graph&, const Graph&) = default;
};

struct LabeledDataset {
    Matrix points;
    std::optional<Labeling> labels;
    std::string name;
    std::string provenance;
};

/// Comma-separated reals, '.' decimal point, LF or CRLF. Blank lines are
/// skipped. Throws FormatError with the 1-based line of the first bad row.
Matrix load_csv(const std::filesystem::path& path, bool has_header);
void write_csv(const std::filesystem::path& path, const Matrix& m);

enum class PixelScaling { UnitInterval, RawBytes };

/// CIFAR-10 binary batch: 3073-byte records, label byte then 1024 R, 1024 G
/// and 1024 B pixel bytes. Throws FormatError for a size that is not a
/// multiple of 3073 (position 0) or a label above 9 (position = record index).
LabeledDataset load_cifar10(const std::filesystem::path& path,
                            PixelScaling scaling = PixelScaling::UnitInterval);

inline constexpr std::size_t kCifarRecordBytes = 3073;
inline constexpr std::size_t kCifarFeatures = 3072;

/// Whitespace-separated integer pairs, '#' comment lines. Node ids are
/// compacted to 0..n-1 in order of first appearance; self-loops and duplicate
/// edges are dropped (their endpoints still count as nodes).
Graph load_edge_list(const std::filesystem::path& path);
Graph parse_edge_list(const std::string& text);

/// Text that parse_edge_list maps back to exactly `g`.
std::string serialize_edge_list(const Graph& g);

/// Dense symmetric normalized Laplacian I - D^-1/2 A D^-1/2. Isolated nodes
/// get a unit diagonal.
Matrix normalized_laplacian(const Graph& g);

/// Rows are nodes; columns are the Laplacian eigenvectors at ascending
/// eigenvalue positions 1..dim (position 0 is skipped).
Matrix spectral_embed(const Graph& g, std::size_t dim);

/// k isotropic Gaussian blobs. Means are separation * u for random unit
/// vectors u, redrawn until every pair of means is at least separation/2
/// apart. Throws ConfigError after 10000 rejected attempts.
LabeledDataset synth_gmm(std::size_t k, std::size_t n_per, std::size_t dim, double separation,
                         double sigma, std::uint64_t seed);

/// Seeded uniform subsample without replacement, kept in original row order.
std::vector<std::size_t> sample_rows(std::size_t n, std::size_t count, std::uint64_t seed);

}  // namespace augkm
