#include "augkm/predictors.hpp"

#include <charconv>
#include <fstream>
#include <iterator>
#include <string>

#include "augkm/errors.hpp"
#include "augkm/pca.hpp"
#include "augkm/rng.hpp"

namespace augkm {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_rate(double rate) {
    if (!(rate >= 0.0 && rate <= 1.0)) {
        throw DomainError("noisy predictor: error rate " + std::to_string(rate) +
                          " outside [0, 1]");
    }
}

}  // namespace

Predictor::Predictor(Variant v) : v_(std::move(v)) {
    std::visit(overloaded{
                   [](const NearestNeighborPredictor& nn) {
                       if (nn.reference_points.rows() == 0) {
                           throw DomainError("nearest-neighbor predictor: empty reference set");
                       }
                       if (nn.reference_labels.size() != nn.reference_points.rows()) {
                           throw DomainError("nearest-neighbor predictor: " +
                                             std::to_string(nn.reference_labels.size()) +
                                             " labels for " +
                                             std::to_string(nn.reference_points.rows()) +
                                             " reference points");
                       }
                   },
                   [](const NoisyPredictor& n) { check_rate(n.error_rate); },
                   [](const FileOraclePredictor&) {},
               },
               v_);
}

std::size_t Predictor::k() const {
    return std::visit(overloaded{
                          [](const NearestNeighborPredictor& nn) { return nn.reference_labels.k(); },
                          [](const NoisyPredictor& n) { return n.base_labels.k(); },
                          [](const FileOraclePredictor& f) { return f.labels.k(); },
                      },
                      v_);
}

Predictor nn_predictor_build(const Matrix& ref_x, const Labeling& ref_labels) {
    return Predictor(NearestNeighborPredictor{ref_x, ref_labels});
}

Predictor noisy_predictor(const Labeling& base, double error_rate, std::uint64_t seed) {
    return Predictor(NoisyPredictor{base, error_rate, seed});
}

Labeling noisy_labels(const Labeling& base, double error_rate, std::size_t k, std::uint64_t seed) {
    check_rate(error_rate);
    if (k < base.k()) {
        throw DomainError("noisy_labels: base labels use k=" + std::to_string(base.k()) +
                          ", cannot draw from k=" + std::to_string(k));
    }
    Rng rng(seed);
    std::vector<std::size_t> ids = base.ids();
    for (auto& id : ids) {
        // Two draws per index regardless of outcome keeps index i's fate
        // independent of earlier indices' coin flips.
        const double coin = rng.uniform();
        const std::size_t replacement = rng.below(k);
        if (coin < error_rate) {
            id = replacement;
        }
    }
    return Labeling(std::move(ids), k);
}

Labeling read_label_file(const std::filesystem::path& path, std::size_t k) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open label file " + path.string());
    }
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    std::vector<std::size_t> ids;
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        ++line_no;
        std::size_t end = text.find('\n', pos);
        if (end == std::string::npos) {
            end = text.size();
        }
        std::string_view line(text.data() + pos, end - pos);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        if (line.empty()) {
            throw FormatError("label file line " + std::to_string(line_no) + ": empty line",
                              line_no);
        }
        std::size_t value = 0;
        const auto [ptr, ec] = std::from_chars(line.data(), line.data() + line.size(), value);
        if (ec != std::errc() || ptr != line.data() + line.size()) {
            throw FormatError("label file line " + std::to_string(line_no) + ": '" +
                                  std::string(line) + "' is not a non-negative integer",
                              line_no);
        }
        if (value >= k) {
            throw FormatError("label file line " + std::to_string(line_no) + ": label " +
                                  std::to_string(value) + " out of range for k=" +
                                  std::to_string(k),
                              line_no);
        }
        ids.push_back(value);
        pos = end + 1;
    }
    return Labeling(std::move(ids), k);
}

void write_label_file(const std::filesystem::path& path, const Labeling& labels) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write label file " + path.string());
    }
    for (std::size_t id : labels.ids()) {
        out << id << '\n';
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

Predictor file_oracle_load(const std::filesystem::path& path, std::size_t expected_n,
                           std::size_t k) {
    Labeling labels = read_label_file(path, k);
    if (labels.size() != expected_n) {
        throw FormatError("label file " + path.string() + ": expected " +
                              std::to_string(expected_n) + " labels, found " +
                              std::to_string(labels.size()),
                          labels.size() + 1);
    }
    return Predictor(FileOraclePredictor{std::move(labels)});
}

Labeling predict(const Predictor& p, const Matrix& x) {
    return std::visit(
        overloaded{
            [&](const NearestNeighborPredictor& nn) {
                if (x.cols() != nn.reference_points.cols()) {
                    throw DomainError("predict: queries have " + std::to_string(x.cols()) +
                                      " columns, references have " +
                                      std::to_string(nn.reference_points.cols()));
                }
                // Each reference row acts as a center; assign() breaks ties by
                // lowest index, which is the reference order.
                const Labeling nearest = assign(x, Centers(nn.reference_points));
                std::vector<std::size_t> ids(x.rows());
                for (std::size_t i = 0; i < x.rows(); ++i) {
                    ids[i] = nn.reference_labels[nearest[i]];
                }
                return Labeling(std::move(ids), nn.reference_labels.k());
            },
            [&](const NoisyPredictor& n) {
                if (x.rows() != n.base_labels.size()) {
                    throw DomainError("predict: " + std::to_string(x.rows()) +
                                      " points but noisy predictor holds " +
                                      std::to_string(n.base_labels.size()) + " labels");
                }
                return noisy_labels(n.base_labels, n.error_rate, n.base_labels.k(), n.seed);
            },
            [&](const FileOraclePredictor& f) {
                if (x.rows() != f.labels.size()) {
                    throw DomainError("predict: " + std::to_string(x.rows()) +
                                      " points but label oracle holds " +
                                      std::to_string(f.labels.size()) + " labels");
                }
                return f.labels;
            },
        },
        p.variant());
}

Predictor in_reduced_space(const Predictor& p, const PcaModel& model) {
    if (const auto* nn = std::get_if<NearestNeighborPredictor>(&p.variant())) {
        return Predictor(
            NearestNeighborPredictor{transform(model, nn->reference_points), nn->reference_labels});
    }
    return p;
}

}  // namespace augkm
