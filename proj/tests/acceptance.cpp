// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any FAIL.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "augkm/bench.hpp"
#include "augkm/datasets.hpp"
#include "augkm/errors.hpp"
#include "augkm/kmeans.hpp"
#include "augkm/pca.hpp"
#include "augkm/pipeline.hpp"
#include "augkm/predictors.hpp"
#include "augkm/rng.hpp"
#include "augkm/symmetric_eigen.hpp"
#include "test_support.hpp"

using augkm::ExperimentConfig;
using augkm::ExperimentResult;
using augkm::Labeling;
using augkm::Matrix;
using augkm::PcaPolicy;
using augkm::Variant;

namespace {

// Tolerances and sizes.
constexpr double kEigenTol = 1e-8;
constexpr int kEigenMatrices = 200;
constexpr std::size_t kEigenMaxDim = 20;
constexpr double kEigenSeconds = 5.0;

constexpr int kPcaFits = 50;
constexpr double kPcaEigenRelTol = 1e-6;
constexpr double kEvrSumTol = 1e-10;

constexpr int kSmallInstances = 50;
constexpr double kOptSlack = 1e-9;
constexpr std::size_t kRestarts = 20;
constexpr double kApproxFactor = 1.2;
constexpr double kSmallSeconds = 10.0;

constexpr int kLloydRuns = 1000;
constexpr double kMonotoneSlack = 1e-9;

constexpr std::size_t kNoiseLabels = 10000;
constexpr double kNoiseSigmas = 3.0;

constexpr double kRateZeroRatio = 1.02;
constexpr double kSpearmanMin = 0.9;
constexpr double kSweepSeconds = 120.0;
constexpr double kCellSlack = 1e-9;

constexpr int kInvarianceRuns = 20;
constexpr double kPcaRatioFactor = 1.10;
constexpr double kPcaRateCap = 0.5;

constexpr double kStableRatio = 1.5;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(const char* f, double a) {
    char buf[64];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

struct Outcome {
    bool pass = true;
    std::string detail;
};

// The fixed GMM suite shared by the sweep criteria.
ExperimentConfig gmm_sweep(std::size_t k) {
    ExperimentConfig cfg;
    cfg.dataset = augkm::DataSource::parse("synth:k=" + std::to_string(k) +
                                           ",n=200,dim=50,sep=30,sigma=1,seed=1");
    cfg.k = k;
    cfg.trials = 5;
    cfg.master_seed = 2024;
    cfg.threads = 1;
    return cfg;
}

std::vector<double> mean_ratio_per_rate(const ExperimentResult& res, Variant v) {
    std::vector<double> sum(res.config.error_rates.size(), 0.0);
    std::vector<double> n(sum.size(), 0.0);
    for (const auto& r : res.records) {
        if (r.variant == v) {
            sum[r.rate_index] += r.cost_ratio;
            n[r.rate_index] += 1.0;
        }
    }
    for (std::size_t i = 0; i < sum.size(); ++i) {
        sum[i] /= n[i];
    }
    return sum;
}

std::vector<double> average_ranks(const std::vector<double>& v) {
    std::vector<std::size_t> idx(v.size());
    std::iota(idx.begin(), idx.end(), 0);
    std::stable_sort(idx.begin(), idx.end(), [&](auto a, auto b) { return v[a] < v[b]; });
    std::vector<double> rank(v.size());
    for (std::size_t i = 0; i < idx.size();) {
        std::size_t j = i;
        while (j + 1 < idx.size() && v[idx[j + 1]] == v[idx[i]]) {
            ++j;
        }
        for (std::size_t t = i; t <= j; ++t) {
            rank[idx[t]] = 0.5 * static_cast<double>(i + j) + 1.0;
        }
        i = j + 1;
    }
    return rank;
}

double spearman(const std::vector<double>& x, const std::vector<double>& y) {
    const auto rx = average_ranks(x);
    const auto ry = average_ranks(y);
    const double n = static_cast<double>(x.size());
    const double mx = std::accumulate(rx.begin(), rx.end(), 0.0) / n;
    const double my = std::accumulate(ry.begin(), ry.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (rx[i] - mx) * (ry[i] - my);
        sxx += (rx[i] - mx) * (rx[i] - mx);
        syy += (ry[i] - my) * (ry[i] - my);
    }
    if (sxx == 0.0 || syy == 0.0) {
        return 0.0;
    }
    return sxy / std::sqrt(sxx * syy);
}

std::string join(const std::vector<double>& v) {
    std::string s;
    for (double x : v) {
        s += (s.empty() ? "" : " ") + fmt("%.4f", x);
    }
    return s;
}

std::string csv_without_times(const std::string& csv) {
    std::istringstream in(csv);
    std::string line;
    std::string out;
    while (std::getline(in, line)) {
        for (int i = 0; i < 2; ++i) {
            line.erase(line.rfind(','));
        }
        out += line + "\n";
    }
    return out;
}

Outcome eigensolver() {
    const auto t0 = Clock::now();
    double worst_res = 0.0;
    double worst_orth = 0.0;
    int failures = 0;
    for (int m = 0; m < kEigenMatrices; ++m) {
        const std::size_t d = 1 + static_cast<std::size_t>(m) % kEigenMaxDim;
        const Matrix c = testing::random_symmetric(d, 1000 + m, 1.0 + m % 7);
        const auto ep = augkm::sym_eigen(c);
        const Matrix& v = ep.eigenvectors;
        double res = 0.0;
        double orth = 0.0;
        for (std::size_t i = 0; i < d; ++i) {
            for (std::size_t j = 0; j < d; ++j) {
                double cv = 0.0;
                double vtv = 0.0;
                for (std::size_t t = 0; t < d; ++t) {
                    cv += c(i, t) * v(t, j);
                    vtv += v(t, i) * v(t, j);
                }
                res = std::max(res, std::abs(cv - v(i, j) * ep.eigenvalues[j]));
                orth = std::max(orth, std::abs(vtv - (i == j ? 1.0 : 0.0)));
            }
        }
        const double scale = std::max(1.0, augkm::max_abs(c));
        worst_res = std::max(worst_res, res / scale);
        worst_orth = std::max(worst_orth, orth);
        if (res > kEigenTol * scale || orth > kEigenTol) {
            ++failures;
        }
    }
    const double secs = seconds_since(t0);
    return {failures == 0 && secs < kEigenSeconds,
            std::to_string(kEigenMatrices) + " matrices, worst scaled residual " +
                fmt("%.2e", worst_res) + ", worst orthogonality " + fmt("%.2e", worst_orth) +
                ", " + fmt("%.2f", secs) + " s"};
}

Outcome pca_oracle() {
    double worst_rel = 0.0;
    double worst_sum = 0.0;
    for (int m = 0; m < kPcaFits; ++m) {
        const Matrix x = testing::random_matrix(10, 5, 5000 + m, -3.0, 3.0);
        const auto model = augkm::fit(x, PcaPolicy::fixed_dim(5));
        const std::vector<double> mu = testing::column_mean_oracle(x);
        Matrix xc(10, 5);
        for (std::size_t i = 0; i < 10; ++i) {
            for (std::size_t j = 0; j < 5; ++j) {
                xc(i, j) = x(i, j) - mu[j];
            }
        }
        const auto expected = testing::eigenvalues_oracle(testing::scatter_oracle(xc));
        for (std::size_t i = 0; i < 5; ++i) {
            const double rel = std::abs(model.eigenvalues_all[i] - expected[i]) /
                               std::max(std::abs(expected[i]), 1e-300);
            worst_rel = std::max(worst_rel, rel);
        }
        const double sum = std::accumulate(model.evr.begin(), model.evr.end(), 0.0);
        worst_sum = std::max(worst_sum, std::abs(sum - 1.0));
    }
    return {worst_rel <= kPcaEigenRelTol && worst_sum <= kEvrSumTol,
            std::to_string(kPcaFits) + " fits, worst relative eigenvalue error " +
                fmt("%.2e", worst_rel) + ", worst |sum(evr) - 1| " + fmt("%.2e", worst_sum)};
}

Outcome kmeans_optimality() {
    const auto t0 = Clock::now();
    int below_opt = 0;
    int over_bound = 0;
    double worst_factor = 0.0;
    for (int inst = 0; inst < kSmallInstances; ++inst) {
        const std::size_t n = 6 + static_cast<std::size_t>(inst) % 7;
        const std::size_t d = 1 + static_cast<std::size_t>(inst) % 3;
        const std::size_t k = 2 + static_cast<std::size_t>(inst) % 2;
        const Matrix x = testing::random_matrix(n, d, 7000 + inst, -5.0, 5.0);
        const double opt = testing::brute_force_optimum(x, k);

        augkm::LloydConfig cfg;
        cfg.seed = 100 + inst;
        const auto single = augkm::kmeans(x, k, cfg);
        const auto best = augkm::kmeans_best_of(x, k, kRestarts, cfg);
        if (single.cost < opt - kOptSlack || best.cost < opt - kOptSlack) {
            ++below_opt;
        }
        if (best.cost > kApproxFactor * opt) {
            ++over_bound;
        }
        worst_factor = std::max(worst_factor, best.cost / opt);
    }
    const double secs = seconds_since(t0);
    return {below_opt == 0 && over_bound == 0 && secs < kSmallSeconds,
            std::to_string(kSmallInstances) + " instances, " + std::to_string(below_opt) +
                " below optimum, worst best-of-20 factor " + fmt("%.4f", worst_factor) + ", " +
                fmt("%.2f", secs) + " s"};
}

Outcome lloyd_monotonicity() {
    int violations = 0;
    std::size_t steps = 0;
    for (int run = 0; run < kLloydRuns; ++run) {
        augkm::Rng rng(augkm::derive_seed(31337, run));
        const std::size_t n = 5 + rng.below(60);
        const std::size_t d = 1 + rng.below(6);
        const std::size_t k = 1 + rng.below(std::min<std::size_t>(n, 8));
        const Matrix x = testing::random_matrix(n, d, 9000 + run, -10.0, 10.0);
        augkm::LloydConfig cfg;
        cfg.seed = rng.next();
        cfg.init = run % 2 == 0 ? augkm::InitMethod::KMeansPlusPlus
                                : augkm::InitMethod::UniformRows;
        const auto res = augkm::kmeans(x, k, cfg);
        for (std::size_t i = 1; i < res.cost_history.size(); ++i) {
            ++steps;
            if (res.cost_history[i] > res.cost_history[i - 1] + kMonotoneSlack) {
                ++violations;
            }
        }
    }
    return {violations == 0, std::to_string(kLloydRuns) + " runs, " + std::to_string(steps) +
                                 " steps, " + std::to_string(violations) + " violations"};
}

Outcome noise_calibration() {
    int outside = 0;
    double worst_z = 0.0;
    for (std::size_t k : {std::size_t{2}, std::size_t{10}}) {
        std::vector<std::size_t> ids(kNoiseLabels);
        for (std::size_t i = 0; i < ids.size(); ++i) {
            ids[i] = i % k;
        }
        const Labeling base(ids, k);
        for (int step = 1; step <= 10; ++step) {
            const double e = step / 10.0;
            const Labeling noisy = augkm::noisy_labels(base, e, k, augkm::derive_seed(77, k, step));
            std::size_t changed = 0;
            for (std::size_t i = 0; i < base.size(); ++i) {
                changed += noisy[i] != base[i];
            }
            const double p = e * static_cast<double>(k - 1) / static_cast<double>(k);
            const double n = static_cast<double>(kNoiseLabels);
            const double z = std::abs(static_cast<double>(changed) - n * p) /
                             std::sqrt(n * p * (1.0 - p));
            worst_z = std::max(worst_z, z);
            if (z > kNoiseSigmas) {
                ++outside;
            }
        }
    }
    return {outside == 0, "20 (k, rate) pairs, worst deviation " + fmt("%.2f", worst_z) +
                              " sigma, " + std::to_string(outside) + " outside 3 sigma"};
}

Outcome corruption_trend() {
    const auto t0 = Clock::now();
    const ExperimentConfig cfg = gmm_sweep(10);
    const ExperimentResult res = augkm::run_experiment(cfg);
    const double secs = seconds_since(t0);

    const auto refined = mean_ratio_per_rate(res, Variant::Refined);
    const double rho = spearman(cfg.error_rates, refined);
    int worse_cells = 0;
    for (std::size_t i = 0; i + 1 < res.records.size(); i += 2) {
        if (res.records[i + 1].method_cost > res.records[i].method_cost + kCellSlack) {
            ++worse_cells;
        }
    }
    const bool pass = refined.front() <= kRateZeroRatio && rho >= kSpearmanMin &&
                      worse_cells == 0 && secs < kSweepSeconds;
    const bool weakly_monotone = std::is_sorted(refined.begin(), refined.end());
    const double rho_seed = spearman(cfg.error_rates, mean_ratio_per_rate(res, Variant::SeedOnly));
    return {pass, "mean refined ratio by rate [" + join(refined) + "], spearman " +
                      fmt("%.3f", rho) + " (non-decreasing: " +
                      (weakly_monotone ? "yes" : "no") + "; seed-only spearman " +
                      fmt("%.3f", rho_seed) + "), " + std::to_string(worse_cells) +
                      " cells where refining hurt, " + fmt("%.1f", secs) + " s"};
}

Outcome pca_consistency() {
    int mismatches = 0;
    for (int run = 0; run < kInvarianceRuns; ++run) {
        const auto ds = augkm::synth_gmm(5, 40, 8, 6.0, 1.0, 400 + run);
        const auto predictor = augkm::noisy_predictor(*ds.labels, 0.5, 900 + run);
        augkm::PipelineConfig pc;
        pc.k = 5;
        pc.lloyd.seed = run;
        const auto plain = augkm::predictor_clustering(ds.points, predictor, pc);
        pc.pca = PcaPolicy::fixed_dim(8);
        const auto full = augkm::predictor_clustering(ds.points, predictor, pc);
        mismatches += !augkm::same_partition(plain.result.labels, full.result.labels);
    }

    ExperimentConfig cfg = gmm_sweep(10);
    cfg.error_rates.clear();
    for (double r : augkm::default_error_rates()) {
        if (r <= kPcaRateCap + 1e-12) {
            cfg.error_rates.push_back(r);
        }
    }
    cfg.pca.reset();
    const ExperimentResult none = augkm::run_experiment(cfg);
    cfg.pca = PcaPolicy::evr_threshold(0.95);
    const ExperimentResult reduced = augkm::run_experiment(cfg);

    const auto ratio_none = mean_ratio_per_rate(none, Variant::Refined);
    const auto ratio_pca = mean_ratio_per_rate(reduced, Variant::Refined);
    int ratio_failures = 0;
    for (std::size_t i = 0; i < ratio_none.size(); ++i) {
        if (ratio_pca[i] > kPcaRatioFactor * ratio_none[i]) {
            ++ratio_failures;
        }
    }
    auto per_iteration = [](const ExperimentResult& res) {
        double t = 0.0;
        double iters = 0.0;
        for (const auto& r : res.records) {
            if (r.variant == Variant::Refined) {
                t += r.lloyd_time_s;
                iters += r.iterations;
            }
        }
        return t / std::max(iters, 1.0);
    };
    const double t_none = per_iteration(none);
    const double t_pca = per_iteration(reduced);
    const std::size_t dim = reduced.records.front().reduced_dim.value_or(reduced.n_features);

    const bool pass = mismatches == 0 && ratio_failures == 0 && t_pca < t_none &&
                      dim < reduced.n_features;
    return {pass, std::to_string(kInvarianceRuns - mismatches) + "/" +
                      std::to_string(kInvarianceRuns) + " full-retention partitions identical; " +
                      "reduced_dim " + std::to_string(dim) + " of " +
                      std::to_string(reduced.n_features) + "; refined ratio pca [" +
                      join(ratio_pca) + "] vs none [" + join(ratio_none) + "]; " +
                      fmt("%.2e", t_pca) + " vs " + fmt("%.2e", t_none) + " s per iteration"};
}

Outcome k10_vs_k25() {
    bool pass = true;
    std::string detail;
    for (std::size_t k : {std::size_t{10}, std::size_t{25}}) {
        ExperimentConfig cfg = gmm_sweep(k);
        cfg.seeding = augkm::SeedingMode::trimmed_mean(0.1);
        cfg.threads = 4;
        const ExperimentResult res = augkm::run_experiment(cfg);
        double worst = 0.0;
        double worst_informative = 0.0;
        for (const auto& r : res.records) {
            if (r.variant == Variant::Refined) {
                worst = std::max(worst, r.cost_ratio);
                if (r.error_rate < 1.0) {
                    worst_informative = std::max(worst_informative, r.cost_ratio);
                }
            }
        }
        pass = pass && worst < kStableRatio;
        detail += (detail.empty() ? "" : "; ") + std::string("k=") + std::to_string(k) +
                  " worst refined ratio " + fmt("%.4f", worst) + " (" +
                  fmt("%.4f", worst_informative) + " below rate 1.0), mean by rate [" +
                  join(mean_ratio_per_rate(res, Variant::Refined)) + "]";
    }
    return {pass, detail};
}

Outcome cifar_parser() {
    std::string bytes(2 * augkm::kCifarRecordBytes, '\0');
    bytes[0] = 3;
    bytes[augkm::kCifarRecordBytes] = 7;
    for (std::size_t j = 0; j < augkm::kCifarFeatures; ++j) {
        bytes[1 + j] = static_cast<char>(j % 2 == 0 ? 0 : 255);
        bytes[augkm::kCifarRecordBytes + 1 + j] = static_cast<char>(j < 1024 ? 255 : 0);
    }
    const auto path = testing::write_temp("acceptance_cifar.bin", bytes);
    const auto ds = augkm::load_cifar10(path);
    bool exact = ds.points.rows() == 2 && ds.points.cols() == augkm::kCifarFeatures &&
                 ds.labels && (*ds.labels)[0] == 3 && (*ds.labels)[1] == 7;
    double lo = 1.0;
    double hi = 0.0;
    for (std::size_t i = 0; exact && i < 2; ++i) {
        for (std::size_t j = 0; j < augkm::kCifarFeatures; ++j) {
            const auto byte = static_cast<unsigned char>(bytes[i * augkm::kCifarRecordBytes + 1 + j]);
            exact = exact && ds.points(i, j) == byte / 255.0;
            lo = std::min(lo, ds.points(i, j));
            hi = std::max(hi, ds.points(i, j));
        }
    }
    exact = exact && lo == 0.0 && hi == 1.0;

    bool truncated_rejected = false;
    const auto truncated =
        testing::write_temp("acceptance_cifar_short.bin", std::string(3072, '\x01'));
    try {
        augkm::load_cifar10(truncated);
    } catch (const augkm::FormatError&) {
        truncated_rejected = true;
    }
    return {exact && truncated_rejected,
            std::string("fixture ") + (exact ? "exact" : "mismatch") + ", 3072-byte file " +
                (truncated_rejected ? "rejected" : "accepted")};
}

Outcome determinism() {
    int differing = 0;
    int configs = 0;
    auto check = [&](const ExperimentConfig& cfg) {
        ++configs;
        const auto a = csv_without_times(augkm::results_to_csv(augkm::run_experiment(cfg)));
        const auto b = csv_without_times(augkm::results_to_csv(augkm::run_experiment(cfg)));
        differing += a != b;
    };
    ExperimentConfig cfg = gmm_sweep(10);
    cfg.trials = 2;
    check(cfg);
    cfg.threads = 4;
    cfg.seeding = augkm::SeedingMode::trimmed_mean(0.1);
    check(cfg);
    ExperimentConfig small;
    small.dataset = augkm::DataSource::parse("synth:k=4,n=100,dim=10,sep=20,sigma=1,seed=7");
    small.k = 4;
    small.master_seed = 7;
    small.pca = PcaPolicy::fixed_dim(3);
    small.subsample = 250;
    small.subsample_seed = 3;
    check(small);
    return {differing == 0, std::to_string(configs - differing) + "/" + std::to_string(configs) +
                                " configurations byte-identical on rerun"};
}

}  // namespace

int main() {
    struct Criterion {
        const char* name;
        std::function<Outcome()> run;
    };
    const std::vector<Criterion> criteria = {
        {"eigensolver correctness", eigensolver},
        {"pca oracle equivalence", pca_oracle},
        {"k-means optimality bound", kmeans_optimality},
        {"lloyd monotonicity", lloyd_monotonicity},
        {"noise model calibration", noise_calibration},
        {"corruption sweep trend", corruption_trend},
        {"pca pipeline consistency", pca_consistency},
        {"k=10 vs k=25 stability", k10_vs_k25},
        {"cifar-10 parser", cifar_parser},
        {"determinism", determinism},
    };
    int failed = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].run();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        failed += !o.pass;
        std::printf("%s  %2zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].name,
                    o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%zu/%zu criteria passed\n", criteria.size() - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
