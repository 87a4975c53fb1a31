#include "augkm/datasets.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <numeric>
#include <set>
#include <sstream>
#include <string_view>
#include <unordered_map>

#include "augkm/errors.hpp"
#include "augkm/rng.hpp"
#include "augkm/symmetric_eigen.hpp"

namespace augkm {
namespace {

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open " + path.string());
    }
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Calls fn(line, 1-based line number) for each line with any trailing '\r' removed.
template <class Fn>
void for_each_line(std::string_view text, Fn&& fn) {
    std::size_t pos = 0;
    std::size_t line_no = 0;
    while (pos < text.size()) {
        ++line_no;
        std::size_t end = text.find('\n', pos);
        if (end == std::string_view::npos) {
            end = text.size();
        }
        std::string_view line = text.substr(pos, end - pos);
        if (!line.empty() && line.back() == '\r') {
            line.remove_suffix(1);
        }
        fn(line, line_no);
        pos = end + 1;
    }
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t");
    return s.substr(first, last - first + 1);
}

}  // namespace

Matrix load_csv(const std::filesystem::path& path, bool has_header) {
    const std::string text = read_file(path);
    std::vector<double> values;
    std::size_t cols = 0;
    std::size_t rows = 0;
    bool header_pending = has_header;
    for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        if (trim(line).empty()) {
            return;
        }
        if (header_pending) {
            header_pending = false;
            return;
        }
        std::size_t fields = 0;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            const std::string_view field =
                trim(line.substr(start, comma == std::string_view::npos ? std::string_view::npos
                                                                        : comma - start));
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
            if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() ||
                !std::isfinite(v)) {
                throw FormatError("csv line " + std::to_string(line_no) + ": field " +
                                      std::to_string(fields + 1) + " '" + std::string(field) +
                                      "' is not a finite number",
                                  line_no);
            }
            values.push_back(v);
            ++fields;
            if (comma == std::string_view::npos) {
                break;
            }
            start = comma + 1;
        }
        if (rows == 0) {
            cols = fields;
        } else if (fields != cols) {
            throw FormatError("csv line " + std::to_string(line_no) + ": expected " +
                                  std::to_string(cols) + " fields, found " + std::to_string(fields),
                              line_no);
        }
        ++rows;
    });
    return Matrix(rows, cols, std::move(values));
}

void write_csv(const std::filesystem::path& path, const Matrix& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write " + path.string());
    }
    char buf[32];
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            std::snprintf(buf, sizeof buf, "%.17g", m(i, j));
            out << (j ? "," : "") << buf;
        }
        out << '\n';
    }
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

LabeledDataset load_cifar10(const std::filesystem::path& path, PixelScaling scaling) {
    const std::string bytes = read_file(path);
    if (bytes.size() % kCifarRecordBytes != 0) {
        throw FormatError("cifar-10: file size " + std::to_string(bytes.size()) +
                              " is not a multiple of " + std::to_string(kCifarRecordBytes),
                          0);
    }
    const std::size_t n = bytes.size() / kCifarRecordBytes;
    const double factor = scaling == PixelScaling::UnitInterval ? 1.0 / 255.0 : 1.0;
    std::vector<double> pixels(n * kCifarFeatures);
    std::vector<std::size_t> labels(n);
    for (std::size_t r = 0; r < n; ++r) {
        const auto* rec = reinterpret_cast<const unsigned char*>(bytes.data()) + r * kCifarRecordBytes;
        if (rec[0] > 9) {
            throw FormatError("cifar-10 record " + std::to_string(r) + ": label byte " +
                                  std::to_string(rec[0]) + " exceeds 9",
                              r);
        }
        labels[r] = rec[0];
        for (std::size_t j = 0; j < kCifarFeatures; ++j) {
            pixels[r * kCifarFeatures + j] = static_cast<double>(rec[1 + j]) * factor;
        }
    }
    LabeledDataset ds;
    ds.points = Matrix(n, kCifarFeatures, std::move(pixels));
    ds.labels = Labeling(std::move(labels), 10);
    ds.name = path.filename().string();
    ds.provenance = "cifar10-binary:" + path.string();
    return ds;
}

Graph parse_edge_list(const std::string& text) {
    std::unordered_map<long long, std::size_t> ids;
    std::set<std::pair<std::size_t, std::size_t>> seen;
    Graph g;
    auto intern = [&](long long raw) {
        const auto [it, inserted] = ids.emplace(raw, ids.size());
        return it->second;
    };
    for_each_line(text, [&](std::string_view line, std::size_t line_no) {
        const std::string_view body = trim(line);
        if (body.empty() || body.front() == '#') {
            return;
        }
        std::istringstream in{std::string(body)};
        std::string a;
        std::string b;
        std::string extra;
        in >> a >> b;
        auto parse = [&](const std::string& tok) {
            long long v = 0;
            const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
            if (tok.empty() || ec != std::errc() || ptr != tok.data() + tok.size()) {
                throw FormatError("edge list line " + std::to_string(line_no) + ": '" + tok +
                                      "' is not an integer node id",
                                  line_no);
            }
            return v;
        };
        const long long u = parse(a);
        const long long v = parse(b);
        if (in >> extra) {
            throw FormatError("edge list line " + std::to_string(line_no) +
                                  ": expected exactly two node ids",
                              line_no);
        }
        const std::size_t iu = intern(u);
        const std::size_t iv = intern(v);
        if (iu == iv) {
            return;
        }
        const auto edge = std::minmax(iu, iv);
        if (seen.insert(edge).second) {
            g.edges.emplace_back(edge.first, edge.second);
        }
    });
    g.node_count = ids.size();
    return g;
}

Graph load_edge_list(const std::filesystem::path& path) { return parse_edge_list(read_file(path)); }

std::string serialize_edge_list(const Graph& g) {
    std::ostringstream out;
    out << "# nodes " << g.node_count << " edges " << g.edges.size() << '\n';
    std::size_t next = 0;  // every id below `next` has appeared
    std::vector<bool> seen(g.node_count, false);
    auto declare_through = [&](std::size_t last) {
        for (; next <= last; ++next) {
            if (!seen[next]) {
                out << next << ' ' << next << '\n';
                seen[next] = true;
            }
        }
    };
    for (const auto& [u, v] : g.edges) {
        // The line itself introduces new ids in the order u, v. That matches
        // compaction order only if the new ids are exactly next, next+1, ...
        std::size_t expect = next;
        bool in_order = true;
        for (std::size_t w : {u, v}) {
            if (!seen[w]) {
                in_order = in_order && w == expect;
                ++expect;
            }
        }
        if (!in_order) {
            declare_through(std::max(u, v));
        }
        out << u << ' ' << v << '\n';
        seen[u] = true;
        seen[v] = true;
        while (next < g.node_count && seen[next]) {
            ++next;
        }
    }
    if (g.node_count > 0) {
        declare_through(g.node_count - 1);
    }
    return out.str();
}

Matrix normalized_laplacian(const Graph& g) {
    const std::size_t n = g.node_count;
    std::vector<double> degree(n, 0.0);
    for (const auto& [u, v] : g.edges) {
        degree[u] += 1.0;
        degree[v] += 1.0;
    }
    Matrix l = Matrix::identity(n);
    for (const auto& [u, v] : g.edges) {
        const double w = -1.0 / std::sqrt(degree[u] * degree[v]);
        l(u, v) = w;
        l(v, u) = w;
    }
    return l;
}

Matrix spectral_embed(const Graph& g, std::size_t dim) {
    if (dim < 1) {
        throw DomainError("spectral_embed: dim must be at least 1");
    }
    if (g.node_count < dim + 1) {
        throw DomainError("spectral_embed: graph with " + std::to_string(g.node_count) +
                          " nodes is too small for a " + std::to_string(dim) +
                          "-dimensional embedding");
    }
    const EigenPairs eig = sym_eigen(normalized_laplacian(g));
    const std::size_t n = g.node_count;
    Matrix out(n, dim);
    for (std::size_t c = 0; c < dim; ++c) {
        // Eigenvalues come back descending; ascending position c+1 is column n-2-c.
        const std::size_t src = n - 2 - c;
        for (std::size_t i = 0; i < n; ++i) {
            out(i, c) = eig.eigenvectors(i, src);
        }
    }
    return out;
}

LabeledDataset synth_gmm(std::size_t k, std::size_t n_per, std::size_t dim, double separation,
                         double sigma, std::uint64_t seed) {
    if (k < 1 || n_per < 1 || dim < 1) {
        throw ConfigError("synth_gmm: k, n_per and dim must all be at least 1");
    }
    if (!(separation > 0.0) || !(sigma > 0.0) || !std::isfinite(separation) ||
        !std::isfinite(sigma)) {
        throw ConfigError("synth_gmm: separation and sigma must be positive and finite");
    }
    Rng rng(seed);
    constexpr int kMaxAttempts = 10000;
    const double min_gap2 = 0.25 * separation * separation;

    Matrix means(k, dim);
    for (std::size_t c = 0; c < k; ++c) {
        bool placed = false;
        for (int attempt = 0; attempt < kMaxAttempts && !placed; ++attempt) {
            std::vector<double> u(dim);
            double norm2 = 0.0;
            for (double& x : u) {
                x = rng.normal();
                norm2 += x * x;
            }
            if (norm2 == 0.0) {
                continue;
            }
            const double scale = separation / std::sqrt(norm2);
            for (double& x : u) {
                x *= scale;
            }
            placed = true;
            for (std::size_t p = 0; p < c && placed; ++p) {
                placed = squared_distance(u, means.row(p)) >= min_gap2;
            }
            if (placed) {
                std::copy(u.begin(), u.end(), means.row(c).begin());
            }
        }
        if (!placed) {
            throw ConfigError("synth_gmm: could not place " + std::to_string(k) +
                              " means with separation " + std::to_string(separation) + " in " +
                              std::to_string(dim) + " dimensions");
        }
    }

    std::vector<double> values;
    values.reserve(k * n_per * dim);
    std::vector<std::size_t> labels;
    labels.reserve(k * n_per);
    for (std::size_t c = 0; c < k; ++c) {
        for (std::size_t i = 0; i < n_per; ++i) {
            for (std::size_t j = 0; j < dim; ++j) {
                values.push_back(means(c, j) + sigma * rng.normal());
            }
            labels.push_back(c);
        }
    }

    LabeledDataset ds;
    ds.points = Matrix(k * n_per, dim, std::move(values));
    ds.labels = Labeling(std::move(labels), k);
    ds.name = "synth_gmm";
    std::ostringstream prov;
    prov.precision(17);
    prov << "synth:k=" << k << ",n=" << n_per << ",dim=" << dim << ",sep=" << separation
         << ",sigma=" << sigma << ",seed=" << seed;
    ds.provenance = prov.str();
    return ds;
}

std::vector<std::size_t> sample_rows(std::size_t n, std::size_t count, std::uint64_t seed) {
    if (count > n) {
        throw ConfigError("sample_rows: cannot draw " + std::to_string(count) + " rows from " +
                          std::to_string(n));
    }
    Rng rng(seed);
    std::vector<std::size_t> idx(n);
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    for (std::size_t i = 0; i < count; ++i) {
        std::swap(idx[i], idx[i + rng.below(n - i)]);
    }
    idx.resize(count);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace augkm
