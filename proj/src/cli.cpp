#include "augkm/cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <memory>
#include <optional>
#include <ostream>
#include <string_view>

#include <CLI11.hpp>

#include "augkm/bench.hpp"
#include "augkm/datasets.hpp"
#include "augkm/errors.hpp"
#include "augkm/kmeans.hpp"
#include "augkm/pca.hpp"
#include "augkm/predictors.hpp"

namespace augkm {
namespace {

struct DataFlags {
    std::string spec;
    bool header = false;
    std::size_t embed_dim = 2;
    bool raw_pixels = false;

    void add_to(CLI::App* cmd) {
        cmd->add_option("--data", spec,
                        "Dataset: PATH.csv | csv:PATH | cifar:PATH | edges:PATH | "
                        "synth:k=,n=,dim=,sep=,sigma=[,seed=]")
            ->required();
        cmd->add_flag("--header", header, "CSV input has a header row");
        cmd->add_option("--embed-dim", embed_dim, "Spectral embedding dimension for edge lists")
            ->check(CLI::PositiveNumber);
        cmd->add_flag("--raw-pixels", raw_pixels, "Keep CIFAR-10 pixel bytes in 0..255");
    }

    DataSource source() const {
        DataSource src = DataSource::parse(spec);
        src.has_header = src.has_header || header;
        src.embed_dim = embed_dim != 2 ? embed_dim : src.embed_dim;
        if (raw_pixels) {
            src.scaling = PixelScaling::RawBytes;
        }
        return src;
    }
};

struct PcaFlags {
    std::optional<std::size_t> dim;
    std::optional<double> evr;
    bool none = false;
    bool standardize = false;

    void add_to(CLI::App* cmd, bool allow_none) {
        auto* d = cmd->add_option("--pca-dim", dim, "Retain this many principal components");
        auto* e = cmd->add_option("--pca-evr", evr,
                                  "Retain the fewest components reaching this explained-variance "
                                  "ratio");
        d->excludes(e);
        if (allow_none) {
            auto* n = cmd->add_flag("--no-pca", none, "Cluster in the original space");
            n->excludes(d)->excludes(e);
        }
        cmd->add_flag("--standardize", standardize,
                      "Scale centered columns to unit sample standard deviation");
    }

    std::optional<PcaPolicy> policy(std::optional<PcaPolicy> fallback) const {
        std::optional<PcaPolicy> p = fallback;
        if (none) {
            return std::nullopt;
        }
        if (dim) {
            if (*dim < 1) {
                throw ConfigError("pca-dim must be at least 1");
            }
            p = PcaPolicy::fixed_dim(*dim);
        } else if (evr) {
            if (!(*evr > 0.0 && *evr <= 1.0)) {
                throw ConfigError("pca-evr must lie in (0, 1]");
            }
            p = PcaPolicy::evr_threshold(*evr);
        }
        if (p) {
            p->standardize = standardize;
        }
        return p;
    }
};

void print_evr_table(std::ostream& out, const PcaModel& model) {
    out << "component  eigenvalue            evr       cumulative  retained\n";
    double cumulative = 0.0;
    char line[128];
    for (std::size_t i = 0; i < model.eigenvalues_all.size(); ++i) {
        cumulative += model.evr[i];
        std::snprintf(line, sizeof line, "%9zu  %-20.12g  %.6f  %.6f    %s\n", i + 1,
                      model.eigenvalues_all[i], model.evr[i], cumulative,
                      i < model.retained ? "yes" : "no");
        out << line;
    }
    if (model.degenerate) {
        out << "warning: total variance is zero; components are canonical axes\n";
    }
}

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

bool flag_given(const std::vector<std::string>& args, const std::string& flag) {
    return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
        return a == flag || a.rfind(flag + "=", 0) == 0;
    });
}

// Splices `key = value` lines from the file named by --config into the
// argument list as --key value, skipping keys already given as flags.
std::vector<std::string> expand_config(const std::vector<std::string>& args) {
    std::vector<std::string> rest;
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[++i];
        } else if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
        } else {
            rest.push_back(args[i]);
        }
    }
    if (path.empty()) {
        return args;
    }
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file " + path);
    }
    std::vector<std::string> spliced;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t[0] == '#') {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        }
        const std::string key = trim(std::string_view(t).substr(0, eq));
        std::string value = trim(std::string_view(t).substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') {
            value = value.substr(1, value.size() - 2);
        }
        if (key.empty()) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": empty key");
        }
        const std::string flag = "--" + key;
        if (flag_given(rest, flag)) {
            continue;
        }
        if (value == "true") {
            spliced.push_back(flag);
        } else if (value != "false") {
            spliced.push_back(flag);
            spliced.push_back(value);
        }
    }
    // after the program name and subcommand, before the explicit flags
    rest.insert(rest.begin() + std::min<std::size_t>(2, rest.size()), spliced.begin(),
                spliced.end());
    return rest;
}

int cmd_run(const DataFlags& data, const PcaFlags& pca, ExperimentConfig cfg,
            const std::string& seeding, std::optional<double> trim_alpha, bool no_refine,
            const std::string& out_path, std::string format, std::ostream& out) {
    cfg.dataset = data.source();
    cfg.pca = pca.policy(cfg.pca);
    if (trim_alpha) {
        cfg.seeding = SeedingMode::trimmed_mean(*trim_alpha);
    } else if (seeding == "trimmed") {
        cfg.seeding = SeedingMode::trimmed_mean();
    } else {
        cfg.seeding = SeedingMode::coordinate_mean();
    }
    cfg.refine = !no_refine;
    if (format.empty()) {
        format = std::filesystem::path(out_path).extension() == ".json" ? "json" : "csv";
    }
    const ExperimentResult res = run_experiment(cfg);
    emit_results(res, format == "json" ? ResultFormat::Json : ResultFormat::Csv, out_path);
    out << "wrote " << res.records.size() << " records (" << cfg.error_rates.size()
        << " rates x " << cfg.trials << " trials) to " << out_path << "\n"
        << "baseline cost " << std::setprecision(10) << res.baseline_cost << "\n";
    return kExitOk;
}

int cmd_pca(const DataFlags& data, const PcaFlags& pca, const std::string& save_model,
            const std::string& transform_out, std::ostream& out) {
    const LabeledDataset ds = data.source().load();
    const PcaModel model =
        fit(ds.points, *pca.policy(PcaPolicy::evr_threshold(0.95)));
    out << "pca: " << ds.points.rows() << " rows, " << ds.points.cols() << " columns, "
        << model.retained << " retained\n";
    print_evr_table(out, model);
    if (!save_model.empty()) {
        std::ofstream f(save_model, std::ios::binary);
        if (!f || !(f << to_json(model) << '\n')) {
            throw IoError("cannot write " + save_model);
        }
    }
    if (!transform_out.empty()) {
        write_csv(transform_out, transform(model, ds.points));
    }
    return kExitOk;
}

int cmd_kmeans(const DataFlags& data, std::size_t k, LloydConfig lloyd_cfg, std::size_t restarts,
               const std::string& init, const std::string& labels_out,
               const std::string& centers_out, std::ostream& out) {
    const LabeledDataset ds = data.source().load();
    if (k < 1 || k > ds.points.rows()) {
        throw ConfigError("k must lie in [1, " + std::to_string(ds.points.rows()) + "]");
    }
    if (restarts < 1) {
        throw ConfigError("restarts must be at least 1");
    }
    lloyd_cfg.init = init == "uniform" ? InitMethod::UniformRows : InitMethod::KMeansPlusPlus;
    const ClusteringResult res = kmeans_best_of(ds.points, k, restarts, lloyd_cfg);
    std::vector<std::size_t> sizes(k, 0);
    for (std::size_t id : res.labels.ids()) {
        ++sizes[id];
    }
    out << std::setprecision(17) << "cost " << res.cost << "\n"
        << "iterations " << res.iterations << "\n"
        << "converged " << (res.converged ? "yes" : "no") << "\n"
        << "sizes";
    for (std::size_t s : sizes) {
        out << ' ' << s;
    }
    out << '\n';
    if (!labels_out.empty()) {
        write_label_file(labels_out, res.labels);
    }
    if (!centers_out.empty()) {
        write_csv(centers_out, res.centers.matrix());
    }
    return kExitOk;
}

int cmd_inspect(const DataFlags& data, std::ostream& out) {
    const LabeledDataset ds = data.source().load();
    const Matrix& x = ds.points;
    out << "name " << ds.name << "\n"
        << "provenance " << ds.provenance << "\n"
        << "rows " << x.rows() << "\n"
        << "cols " << x.cols() << "\n";
    constexpr std::size_t kMaxColumns = 10;
    if (x.rows() > 0) {
        const Vector mean = mean_rows(x);
        char line[160];
        out << "column  min                   mean                  max\n";
        for (std::size_t j = 0; j < std::min(x.cols(), kMaxColumns); ++j) {
            double lo = x(0, j);
            double hi = x(0, j);
            for (std::size_t i = 1; i < x.rows(); ++i) {
                lo = std::min(lo, x(i, j));
                hi = std::max(hi, x(i, j));
            }
            std::snprintf(line, sizeof line, "%6zu  %-20.12g  %-20.12g  %.12g\n", j, lo, mean[j],
                          hi);
            out << line;
        }
        if (x.cols() > kMaxColumns) {
            out << "... " << (x.cols() - kMaxColumns) << " more columns\n";
        }
    }
    if (ds.labels) {
        std::vector<std::size_t> counts(ds.labels->k(), 0);
        for (std::size_t id : ds.labels->ids()) {
            ++counts[id];
        }
        out << "labels k=" << ds.labels->k() << " counts";
        for (std::size_t c : counts) {
            out << ' ' << c;
        }
        out << '\n';
    }
    return kExitOk;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Predictor-seeded k-means clustering with PCA and corruption benchmarks",
                 "augkm"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kLibraryVersion);

    // run
    auto* run = app.add_subcommand("run", "Corruption sweep: noisy predictor labels vs k-means");
    std::string config_path;
    run->add_option("--config", config_path,
                    "Flat key = value file using the flag names; flags win");
    DataFlags run_data;
    PcaFlags run_pca;
    ExperimentConfig cfg;
    std::string seeding = "mean";
    std::optional<double> trim_alpha;
    bool no_refine = false;
    std::string run_out;
    std::string format;
    std::uint64_t seed = 0;
    std::optional<std::size_t> subsample;
    int k_raw = 0;
    int trials_raw = static_cast<int>(cfg.trials);
    int restarts_raw = static_cast<int>(cfg.baseline_restarts);
    int threads_raw = 1;
    run_data.add_to(run);
    run->add_option("--k", k_raw, "Number of clusters")->required();
    run_pca.add_to(run, true);
    run->add_option("--rates", cfg.error_rates, "Comma-separated error rates in [0, 1]")
        ->delimiter(',');
    run->add_option("--trials", trials_raw, "Trials per error rate");
    run->add_option("--seed", seed, "Master seed");
    run->add_option("--seeding", seeding, "Center seeding from labels")
        ->check(CLI::IsMember({"mean", "trimmed"}));
    run->add_option("--trim-alpha", trim_alpha, "Trimmed-mean seeding with this tail fraction");
    run->add_option("--baseline-restarts", restarts_raw, "k-means++ restarts for the baseline");
    run->add_option("--subsample", subsample, "Cluster a seeded random subset of this many rows");
    run->add_option("--subsample-seed", cfg.subsample_seed, "Seed for --subsample");
    run->add_option("--max-iters", cfg.lloyd.max_iters, "Lloyd iteration cap");
    run->add_option("--tol", cfg.lloyd.tol, "Relative center-shift tolerance");
    run->add_flag("--no-refine", no_refine, "Emit only the seed-only variant");
    run->add_option("--threads", threads_raw, "Worker threads for grid cells");
    run->add_option("--out", run_out, "Result file")->required();
    run->add_option("--format", format, "csv or json (default: from --out extension)")
        ->check(CLI::IsMember({"csv", "json"}));

    // pca
    auto* pca = app.add_subcommand("pca", "Fit PCA on a dataset and print the EVR table");
    DataFlags pca_data;
    PcaFlags pca_flags;
    std::string save_model;
    std::string transform_out;
    pca_data.add_to(pca);
    pca_flags.add_to(pca, false);
    pca->add_option("--save-model", save_model, "Write the fitted model as JSON");
    pca->add_option("--transform-out", transform_out, "Write the projected data as CSV");

    // kmeans
    auto* km = app.add_subcommand("kmeans", "Plain k-means++ + Lloyd clustering");
    DataFlags km_data;
    int km_k = 0;
    int km_restarts = 1;
    LloydConfig km_cfg;
    std::string init = "kmeans++";
    std::string labels_out;
    std::string centers_out;
    km_data.add_to(km);
    km->add_option("--k", km_k, "Number of clusters")->required();
    km->add_option("--seed", km_cfg.seed, "Seed");
    km->add_option("--restarts", km_restarts, "Keep the best of this many runs");
    km->add_option("--max-iters", km_cfg.max_iters, "Lloyd iteration cap");
    km->add_option("--tol", km_cfg.tol, "Relative center-shift tolerance");
    km->add_option("--init", init, "Seeding method")
        ->check(CLI::IsMember({"kmeans++", "uniform"}));
    km->add_option("--labels-out", labels_out, "Write one label per line");
    km->add_option("--centers-out", centers_out, "Write centers as CSV");

    // inspect
    auto* inspect = app.add_subcommand("inspect", "Print dataset shape and column statistics");
    DataFlags inspect_data;
    inspect_data.add_to(inspect);

    std::vector<std::string> expanded = args;
    if (args.size() > 1 && args[1] == "run") {
        try {
            expanded = expand_config(args);
        } catch (const ConfigError& e) {
            err << "config error: " << e.what() << "\n";
            return kExitConfigError;
        }
    }
    std::vector<const char*> argv;
    argv.reserve(expanded.size());
    for (const auto& a : expanded) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfigError;
    }

    try {
        if (*run) {
            if (k_raw < 1) {
                throw ConfigError("k must be at least 1 (got " + std::to_string(k_raw) + ")");
            }
            if (trials_raw < 1) {
                throw ConfigError("trials must be at least 1");
            }
            if (restarts_raw < 1) {
                throw ConfigError("baseline-restarts must be at least 1");
            }
            if (threads_raw < 1) {
                throw ConfigError("threads must be at least 1");
            }
            cfg.k = static_cast<std::size_t>(k_raw);
            cfg.trials = static_cast<std::size_t>(trials_raw);
            cfg.baseline_restarts = static_cast<std::size_t>(restarts_raw);
            cfg.threads = static_cast<std::size_t>(threads_raw);
            cfg.master_seed = seed;
            cfg.subsample = subsample;
            return cmd_run(run_data, run_pca, cfg, seeding, trim_alpha, no_refine, run_out, format,
                           out);
        }
        if (*pca) {
            return cmd_pca(pca_data, pca_flags, save_model, transform_out, out);
        }
        if (*km) {
            if (km_k < 1) {
                throw ConfigError("k must be at least 1 (got " + std::to_string(km_k) + ")");
            }
            return cmd_kmeans(km_data, static_cast<std::size_t>(km_k), km_cfg,
                              static_cast<std::size_t>(std::max(km_restarts, 0)), init,
                              labels_out, centers_out, out);
        }
        if (*inspect) {
            return cmd_inspect(inspect_data, out);
        }
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const DomainError& e) {
        err << "invalid argument: " << e.what() << "\n";
        return kExitConfigError;
    } catch (const FormatError& e) {
        err << "data error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const IoError& e) {
        err << "data error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const DegenerateDataError& e) {
        err << "data error: " << e.what() << "\n";
        return kExitDataError;
    } catch (const NumericalError& e) {
        err << "data error: " << e.what() << "\n";
        return kExitDataError;
    }
    return kExitConfigError;
}

}  // namespace augkm
