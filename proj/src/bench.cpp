#include "augkm/bench.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "augkm/errors.hpp"
#include "augkm/predictors.hpp"
#include "augkm/rng.hpp"

namespace augkm {
namespace {

using nlohmann::json;

// Stream id for the baseline restarts; grid cells use their rate index.
constexpr std::uint64_t kBaselineStream = ~std::uint64_t{0};

template <class T>
T parse_number(std::string_view text, const std::string& what) {
    T v{};
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (text.empty() || ec != std::errc() || ptr != text.data() + text.size()) {
        throw ConfigError("data source: " + what + " '" + std::string(text) + "' is not a number");
    }
    return v;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double elapsed_since(std::chrono::steady_clock::time_point start) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

json pca_to_json(const std::optional<PcaPolicy>& pca) {
    if (!pca) {
        return nullptr;
    }
    json j;
    if (pca->mode == PcaPolicy::Mode::FixedDim) {
        j["mode"] = "fixed_dim";
        j["dim"] = pca->dim;
    } else {
        j["mode"] = "evr_threshold";
        j["threshold"] = pca->threshold;
    }
    j["standardize"] = pca->standardize;
    return j;
}

std::optional<PcaPolicy> pca_from_json(const json& j) {
    if (j.is_null()) {
        return std::nullopt;
    }
    PcaPolicy p;
    const auto mode = j.at("mode").get<std::string>();
    if (mode == "fixed_dim") {
        p = PcaPolicy::fixed_dim(j.at("dim").get<std::size_t>());
    } else if (mode == "evr_threshold") {
        p = PcaPolicy::evr_threshold(j.at("threshold").get<double>());
    } else {
        throw FormatError("results: unknown pca mode '" + mode + "'", 0);
    }
    p.standardize = j.at("standardize").get<bool>();
    return p;
}

json config_to_json(const ExperimentConfig& cfg) {
    json j;
    j["data"] = cfg.dataset.to_string();
    j["k"] = cfg.k;
    j["rates"] = cfg.error_rates;
    j["trials"] = cfg.trials;
    j["pca"] = pca_to_json(cfg.pca);
    if (cfg.seeding.kind == SeedingMode::Kind::TrimmedMean) {
        j["seeding"] = {{"kind", "trimmed_mean"}, {"alpha", cfg.seeding.alpha}};
    } else {
        j["seeding"] = {{"kind", "coordinate_mean"}};
    }
    j["baseline_restarts"] = cfg.baseline_restarts;
    j["seed"] = cfg.master_seed;
    j["subsample"] = cfg.subsample ? json(*cfg.subsample) : json(nullptr);
    j["subsample_seed"] = cfg.subsample_seed;
    j["max_iters"] = cfg.lloyd.max_iters;
    j["tol"] = cfg.lloyd.tol;
    j["refine"] = cfg.refine;
    return j;
}

ExperimentConfig config_from_json(const json& j) {
    ExperimentConfig cfg;
    cfg.dataset = DataSource::parse(j.at("data").get<std::string>());
    cfg.k = j.at("k").get<std::size_t>();
    cfg.error_rates = j.at("rates").get<std::vector<double>>();
    cfg.trials = j.at("trials").get<std::size_t>();
    cfg.pca = pca_from_json(j.at("pca"));
    const auto& s = j.at("seeding");
    if (s.at("kind").get<std::string>() == "trimmed_mean") {
        cfg.seeding = SeedingMode::trimmed_mean(s.at("alpha").get<double>());
    } else {
        cfg.seeding = SeedingMode::coordinate_mean();
    }
    cfg.baseline_restarts = j.at("baseline_restarts").get<std::size_t>();
    cfg.master_seed = j.at("seed").get<std::uint64_t>();
    if (!j.at("subsample").is_null()) {
        cfg.subsample = j.at("subsample").get<std::size_t>();
    }
    cfg.subsample_seed = j.at("subsample_seed").get<std::uint64_t>();
    cfg.lloyd.max_iters = j.at("max_iters").get<int>();
    cfg.lloyd.tol = j.at("tol").get<double>();
    cfg.refine = j.at("refine").get<bool>();
    return cfg;
}

}  // namespace

DataSource DataSource::parse(const std::string& spec) {
    DataSource src;
    const auto colon = spec.find(':');
    const std::string head = colon == std::string::npos ? "" : spec.substr(0, colon);
    std::string rest = colon == std::string::npos ? spec : spec.substr(colon + 1);

    if (head == "synth") {
        src.kind = Kind::Synth;
        std::istringstream in(rest);
        std::string item;
        while (std::getline(in, item, ',')) {
            const auto eq = item.find('=');
            if (eq == std::string::npos) {
                throw ConfigError("data source: synth parameter '" + item + "' lacks '='");
            }
            const std::string key = item.substr(0, eq);
            const std::string_view val = std::string_view(item).substr(eq + 1);
            if (key == "k") {
                src.synth_k = parse_number<std::size_t>(val, key);
            } else if (key == "n") {
                src.synth_n_per = parse_number<std::size_t>(val, key);
            } else if (key == "dim") {
                src.synth_dim = parse_number<std::size_t>(val, key);
            } else if (key == "sep") {
                src.synth_separation = parse_number<double>(val, key);
            } else if (key == "sigma") {
                src.synth_sigma = parse_number<double>(val, key);
            } else if (key == "seed") {
                src.synth_seed = parse_number<std::uint64_t>(val, key);
            } else {
                throw ConfigError("data source: unknown synth parameter '" + key + "'");
            }
        }
        return src;
    }

    std::string options;
    if (const auto q = rest.rfind('?'); q != std::string::npos) {
        options = rest.substr(q + 1);
        rest.resize(q);
    }
    if (head == "csv" || head.empty()) {
        src.kind = Kind::Csv;
    } else if (head == "cifar") {
        src.kind = Kind::Cifar;
    } else if (head == "edges") {
        src.kind = Kind::EdgeList;
    } else {
        throw ConfigError("data source: unknown kind '" + head + "'");
    }
    if (rest.empty()) {
        throw ConfigError("data source: missing path in '" + spec + "'");
    }
    src.path = rest;
    if (!options.empty()) {
        std::istringstream in(options);
        std::string opt;
        while (std::getline(in, opt, '&')) {
            if (opt == "header" && src.kind == Kind::Csv) {
                src.has_header = true;
            } else if (opt == "raw" && src.kind == Kind::Cifar) {
                src.scaling = PixelScaling::RawBytes;
            } else if (opt.rfind("dim=", 0) == 0 && src.kind == Kind::EdgeList) {
                src.embed_dim = parse_number<std::size_t>(std::string_view(opt).substr(4), "dim");
            } else {
                throw ConfigError("data source: unknown option '" + opt + "'");
            }
        }
    }
    return src;
}

std::string DataSource::to_string() const {
    std::ostringstream out;
    switch (kind) {
        case Kind::Synth:
            out << "synth:k=" << synth_k << ",n=" << synth_n_per << ",dim=" << synth_dim
                << ",sep=" << format_double(synth_separation)
                << ",sigma=" << format_double(synth_sigma) << ",seed=" << synth_seed;
            break;
        case Kind::Csv:
            out << "csv:" << path << (has_header ? "?header" : "");
            break;
        case Kind::Cifar:
            out << "cifar:" << path << (scaling == PixelScaling::RawBytes ? "?raw" : "");
            break;
        case Kind::EdgeList:
            out << "edges:" << path << "?dim=" << embed_dim;
            break;
    }
    return out.str();
}

LabeledDataset DataSource::load() const {
    switch (kind) {
        case Kind::Synth:
            return synth_gmm(synth_k, synth_n_per, synth_dim, synth_separation, synth_sigma,
                             synth_seed);
        case Kind::Csv: {
            LabeledDataset ds;
            ds.points = load_csv(path, has_header);
            ds.name = std::filesystem::path(path).filename().string();
            ds.provenance = to_string();
            return ds;
        }
        case Kind::Cifar:
            return load_cifar10(path, scaling);
        case Kind::EdgeList: {
            const Graph g = load_edge_list(path);
            LabeledDataset ds;
            ds.points = spectral_embed(g, embed_dim);
            ds.name = std::filesystem::path(path).filename().string();
            ds.provenance = to_string();
            return ds;
        }
    }
    throw ConfigError("data source: unknown kind");
}

std::vector<double> default_error_rates() {
    std::vector<double> rates;
    for (int i = 0; i <= 10; ++i) {
        rates.push_back(i / 10.0);
    }
    return rates;
}

void ExperimentConfig::validate() const {
    if (k < 1) {
        throw ConfigError("k must be at least 1");
    }
    if (trials < 1) {
        throw ConfigError("trials must be at least 1");
    }
    if (baseline_restarts < 1) {
        throw ConfigError("baseline_restarts must be at least 1");
    }
    if (threads < 1) {
        throw ConfigError("threads must be at least 1");
    }
    for (std::size_t i = 0; i < error_rates.size(); ++i) {
        if (!(error_rates[i] >= 0.0 && error_rates[i] <= 1.0)) {
            throw ConfigError("rates: " + format_double(error_rates[i]) + " is outside [0, 1]");
        }
        if (i > 0 && error_rates[i] < error_rates[i - 1]) {
            throw ConfigError("rates must be in ascending order");
        }
    }
    if (subsample && *subsample < 1) {
        throw ConfigError("subsample must be at least 1");
    }
    try {
        if (pca) {
            pca->validate();
        }
        seeding.validate();
        lloyd.validate();
    } catch (const DomainError& e) {
        throw ConfigError(e.what());
    }
}

const char* to_string(Variant v) { return v == Variant::SeedOnly ? "seed-only" : "refined"; }

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    cfg.validate();
    LabeledDataset ds = cfg.dataset.load();
    if (cfg.subsample) {
        if (*cfg.subsample > ds.points.rows()) {
            throw ConfigError("subsample of " + std::to_string(*cfg.subsample) +
                              " rows exceeds the " + std::to_string(ds.points.rows()) +
                              " available");
        }
        const auto idx = sample_rows(ds.points.rows(), *cfg.subsample, cfg.subsample_seed);
        ds.points = ds.points.select_rows(idx);
    }
    return run_experiment_on(ds.points, cfg);
}

ExperimentResult run_experiment_on(const Matrix& x, const ExperimentConfig& cfg) {
    cfg.validate();
    if (cfg.k > x.rows()) {
        throw ConfigError("k=" + std::to_string(cfg.k) + " exceeds the " +
                          std::to_string(x.rows()) + " data points");
    }
    if (cfg.pca && cfg.pca->mode == PcaPolicy::Mode::FixedDim && cfg.pca->dim > x.cols()) {
        throw ConfigError("pca dimension " + std::to_string(cfg.pca->dim) + " exceeds the " +
                          std::to_string(x.cols()) + " data columns");
    }

    ExperimentResult res;
    res.config = cfg;
    res.n_points = x.rows();
    res.n_features = x.cols();

    LloydConfig base_cfg = cfg.lloyd;
    base_cfg.init = InitMethod::KMeansPlusPlus;
    base_cfg.seed = derive_seed(cfg.master_seed, kBaselineStream);
    const ClusteringResult base = kmeans_best_of(x, cfg.k, cfg.baseline_restarts, base_cfg);
    if (!(base.cost > 0.0)) {
        throw ConfigError("baseline clustering cost is zero; data has at most k distinct points");
    }
    res.baseline_cost = base.cost;

    const PreparedData prepared = prepare(x, cfg.pca);
    const std::optional<std::size_t> reduced =
        prepared.pca ? std::optional<std::size_t>(prepared.pca->retained) : std::nullopt;

    const std::size_t n_rates = cfg.error_rates.size();
    const std::size_t n_cells = n_rates * cfg.trials;
    const std::size_t per_cell = cfg.refine ? 2 : 1;
    res.records.resize(n_cells * per_cell);

    auto run_cell = [&](std::size_t cell) {
        const std::size_t r = cell / cfg.trials;
        const std::size_t t = cell % cfg.trials;
        const std::uint64_t seed = derive_seed(cfg.master_seed, r, t);
        const Labeling noisy = noisy_labels(base.labels, cfg.error_rates[r], cfg.k, seed);

        PipelineConfig pc;
        pc.k = cfg.k;
        pc.pca = cfg.pca;
        pc.seeding = cfg.seeding;
        pc.lloyd = cfg.lloyd;

        auto record = [&](Variant v) {
            pc.refine = v == Variant::Refined;
            const auto start = std::chrono::steady_clock::now();
            const PipelineResult pr = cluster_from_labels(prepared, noisy, pc);
            CellRecord rec;
            rec.wall_time_s = elapsed_since(start);
            rec.rate_index = r;
            rec.error_rate = cfg.error_rates[r];
            rec.trial = t;
            rec.variant = v;
            rec.seed = seed;
            rec.method_cost = pr.result.cost;
            rec.baseline_cost = base.cost;
            rec.cost_ratio = cost_ratio(pr.result.cost, base.cost);
            rec.iterations = pr.iterations;
            rec.reduced_dim = reduced;
            rec.lloyd_time_s = pr.lloyd_seconds;
            return rec;
        };
        res.records[cell * per_cell] = record(Variant::SeedOnly);
        if (cfg.refine) {
            res.records[cell * per_cell + 1] = record(Variant::Refined);
        }
    };

    const std::size_t workers = std::min(cfg.threads, std::max<std::size_t>(n_cells, 1));
    if (workers <= 1) {
        for (std::size_t c = 0; c < n_cells; ++c) {
            run_cell(c);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        std::vector<std::jthread> pool;
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                for (std::size_t c = next++; c < n_cells; c = next++) {
                    try {
                        run_cell(c);
                    } catch (...) {
                        std::lock_guard lock(failure_mutex);
                        if (!failure) {
                            failure = std::current_exception();
                        }
                    }
                }
            });
        }
        pool.clear();
        if (failure) {
            std::rethrow_exception(failure);
        }
    }
    return res;
}

std::string results_to_csv(const ExperimentResult& res) {
    std::ostringstream out;
    out << "schema_version,rate_index,error_rate,trial,variant,seed,method_cost,baseline_cost,"
           "cost_ratio,iterations,reduced_dim,wall_time_s,lloyd_time_s\n";
    for (const auto& r : res.records) {
        out << kResultSchemaVersion << ',' << r.rate_index << ',' << format_double(r.error_rate)
            << ',' << r.trial << ',' << to_string(r.variant) << ',' << r.seed << ','
            << format_double(r.method_cost) << ',' << format_double(r.baseline_cost) << ','
            << format_double(r.cost_ratio) << ',' << r.iterations << ','
            << (r.reduced_dim ? std::to_string(*r.reduced_dim) : std::string()) << ','
            << format_double(r.wall_time_s) << ',' << format_double(r.lloyd_time_s) << '\n';
    }
    return out.str();
}

std::string results_to_json(const ExperimentResult& res) {
    json doc;
    doc["schema_version"] = kResultSchemaVersion;
    doc["kind"] = "experiment_result";
    doc["library_version"] = res.library_version;
    doc["config"] = config_to_json(res.config);
    doc["n_points"] = res.n_points;
    doc["n_features"] = res.n_features;
    doc["baseline_cost"] = res.baseline_cost;
    json records = json::array();
    for (const auto& r : res.records) {
        records.push_back({
            {"rate_index", r.rate_index},
            {"error_rate", r.error_rate},
            {"trial", r.trial},
            {"variant", to_string(r.variant)},
            {"seed", r.seed},
            {"method_cost", r.method_cost},
            {"baseline_cost", r.baseline_cost},
            {"cost_ratio", r.cost_ratio},
            {"iterations", r.iterations},
            {"reduced_dim", r.reduced_dim ? json(*r.reduced_dim) : json(nullptr)},
            {"wall_time_s", r.wall_time_s},
            {"lloyd_time_s", r.lloyd_time_s},
        });
    }
    doc["records"] = std::move(records);
    return doc.dump(2) + "\n";
}

ExperimentResult results_from_json(const std::string& text) {
    try {
        const json doc = json::parse(text);
        if (doc.at("kind").get<std::string>() != "experiment_result") {
            throw FormatError("results: wrong document kind", 0);
        }
        if (doc.at("schema_version").get<int>() != kResultSchemaVersion) {
            throw FormatError("results: unsupported schema_version", 0);
        }
        ExperimentResult res;
        res.library_version = doc.at("library_version").get<std::string>();
        res.config = config_from_json(doc.at("config"));
        res.n_points = doc.at("n_points").get<std::size_t>();
        res.n_features = doc.at("n_features").get<std::size_t>();
        res.baseline_cost = doc.at("baseline_cost").get<double>();
        for (const auto& j : doc.at("records")) {
            CellRecord r;
            r.rate_index = j.at("rate_index").get<std::size_t>();
            r.error_rate = j.at("error_rate").get<double>();
            r.trial = j.at("trial").get<std::size_t>();
            const auto variant = j.at("variant").get<std::string>();
            if (variant == "seed-only") {
                r.variant = Variant::SeedOnly;
            } else if (variant == "refined") {
                r.variant = Variant::Refined;
            } else {
                throw FormatError("results: unknown variant '" + variant + "'", 0);
            }
            r.seed = j.at("seed").get<std::uint64_t>();
            r.method_cost = j.at("method_cost").get<double>();
            r.baseline_cost = j.at("baseline_cost").get<double>();
            r.cost_ratio = j.at("cost_ratio").get<double>();
            r.iterations = j.at("iterations").get<int>();
            if (!j.at("reduced_dim").is_null()) {
                r.reduced_dim = j.at("reduced_dim").get<std::size_t>();
            }
            r.wall_time_s = j.at("wall_time_s").get<double>();
            r.lloyd_time_s = j.at("lloyd_time_s").get<double>();
            res.records.push_back(r);
        }
        return res;
    } catch (const json::exception& e) {
        throw FormatError(std::string("results: ") + e.what(), 0);
    } catch (const ConfigError& e) {
        throw FormatError(std::string("results: ") + e.what(), 0);
    }
}

void emit_results(const ExperimentResult& res, ResultFormat format,
                  const std::filesystem::path& path) {
    const std::string text =
        format == ResultFormat::Csv ? results_to_csv(res) : results_to_json(res);
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw IoError("cannot write results to " + path.string());
    }
    out << text;
    out.flush();
    if (!out) {
        throw IoError("write failed for " + path.string());
    }
}

}  // namespace augkm
