#include "augkm/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "augkm/errors.hpp"
#include "augkm/rng.hpp"

namespace augkm {
namespace {

void check_dims(const Matrix& x, const Centers& c, const char* op) {
    if (x.cols() != c.dim()) {
        throw DomainError(std::string(op) + ": data has " + std::to_string(x.cols()) +
                          " columns, centers have " + std::to_string(c.dim()));
    }
}

void check_k(const Matrix& x, std::size_t k, const char* op) {
    if (k < 1 || k > x.rows()) {
        throw DomainError(std::string(op) + ": k=" + std::to_string(k) + " must lie in [1, " +
                          std::to_string(x.rows()) + "]");
    }
}

std::size_t nearest(std::span<const double> p, const Centers& c, double& best) {
    std::size_t arg = 0;
    best = squared_distance(p, c[0]);
    for (std::size_t j = 1; j < c.k(); ++j) {
        const double d = squared_distance(p, c[j]);
        if (d < best) {
            best = d;
            arg = j;
        }
    }
    return arg;
}

double norm(std::span<const double> v) { return std::sqrt(dot(v, v)); }

}  // namespace

Centers::Centers(Matrix values) : values_(std::move(values)) {
    if (values_.rows() == 0) {
        throw DomainError("centers: need at least one center");
    }
}

Labeling::Labeling(std::vector<std::size_t> ids, std::size_t k) : ids_(std::move(ids)), k_(k) {
    if (k_ == 0) {
        throw DomainError("labeling: k must be at least 1");
    }
    for (std::size_t i = 0; i < ids_.size(); ++i) {
        if (ids_[i] >= k_) {
            throw DomainError("labeling: id " + std::to_string(ids_[i]) + " at index " +
                              std::to_string(i) + " is not below k=" + std::to_string(k_));
        }
    }
}

bool same_partition(const Labeling& a, const Labeling& b) {
    if (a.size() != b.size()) {
        return false;
    }
    constexpr std::size_t unset = std::numeric_limits<std::size_t>::max();
    std::vector<std::size_t> forward(a.k(), unset);
    std::vector<std::size_t> backward(b.k(), unset);
    for (std::size_t i = 0; i < a.size(); ++i) {
        const std::size_t u = a[i];
        const std::size_t v = b[i];
        if (forward[u] == unset && backward[v] == unset) {
            forward[u] = v;
            backward[v] = u;
        } else if (forward[u] != v || backward[v] != u) {
            return false;
        }
    }
    return true;
}

void LloydConfig::validate() const {
    if (max_iters < 1) {
        throw DomainError("lloyd: max_iters must be at least 1");
    }
    if (!(tol >= 0.0)) {
        throw DomainError("lloyd: tol must be non-negative");
    }
}

Centers kmeanspp_seed(const Matrix& x, std::size_t k, std::uint64_t seed) {
    check_k(x, k, "kmeanspp_seed");
    const std::size_t n = x.rows();
    Rng rng(seed);
    std::vector<std::size_t> chosen;
    std::vector<bool> used(n, false);
    std::vector<double> d2(n, std::numeric_limits<double>::infinity());

    std::size_t next = rng.below(n);
    while (true) {
        chosen.push_back(next);
        used[next] = true;
        if (chosen.size() == k) {
            break;
        }
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            d2[i] = used[i] ? 0.0 : std::min(d2[i], squared_distance(x.row(i), x.row(next)));
            total += d2[i];
        }
        if (total > 0.0) {
            const double target = rng.uniform() * total;
            double acc = 0.0;
            next = n;
            std::size_t last_positive = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (d2[i] <= 0.0) {
                    continue;
                }
                last_positive = i;
                acc += d2[i];
                if (target < acc) {
                    next = i;
                    break;
                }
            }
            if (next == n) {
                next = last_positive;
            }
        } else {
            // Every unused row duplicates a chosen one: draw uniformly among them.
            std::size_t pick = rng.below(n - chosen.size());
            for (std::size_t i = 0; i < n; ++i) {
                if (!used[i] && pick-- == 0) {
                    next = i;
                    break;
                }
            }
        }
    }
    return Centers(x.select_rows(chosen));
}

Centers uniform_seed(const Matrix& x, std::size_t k, std::uint64_t seed) {
    check_k(x, k, "uniform_seed");
    Rng rng(seed);
    std::vector<std::size_t> idx(x.rows());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    // Partial Fisher-Yates.
    for (std::size_t i = 0; i < k; ++i) {
        const std::size_t j = i + rng.below(idx.size() - i);
        std::swap(idx[i], idx[j]);
    }
    idx.resize(k);
    return Centers(x.select_rows(idx));
}

Labeling assign(const Matrix& x, const Centers& c) {
    check_dims(x, c, "assign");
    std::vector<std::size_t> ids(x.rows());
    double best;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        ids[i] = nearest(x.row(i), c, best);
    }
    return Labeling(std::move(ids), c.k());
}

double cost(const Matrix& x, const Centers& c) {
    check_dims(x, c, "cost");
    double total = 0.0;
    double best;
    for (std::size_t i = 0; i < x.rows(); ++i) {
        nearest(x.row(i), c, best);
        total += best;
    }
    return total;
}

Centers update_centers(const Matrix& x, const Labeling& labels, std::size_t k) {
    if (labels.size() != x.rows()) {
        throw DomainError("update_centers: " + std::to_string(labels.size()) + " labels for " +
                          std::to_string(x.rows()) + " points");
    }
    if (k < 1 || labels.k() > k) {
        throw DomainError("update_centers: labels use k=" + std::to_string(labels.k()) +
                          " but k=" + std::to_string(k) + " was requested");
    }
    const std::size_t d = x.cols();
    Matrix sums(k, d);
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < x.rows(); ++i) {
        auto s = sums.row(labels[i]);
        const auto p = x.row(i);
        for (std::size_t j = 0; j < d; ++j) {
            s[j] += p[j];
        }
        ++counts[labels[i]];
    }
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] > 0) {
            const double inv = 1.0 / static_cast<double>(counts[c]);
            for (double& v : sums.row(c)) {
                v *= inv;
            }
        }
    }

    std::vector<bool> taken(x.rows(), false);
    for (std::size_t c = 0; c < k; ++c) {
        if (counts[c] > 0) {
            continue;
        }
        std::size_t far = x.rows();
        double far_d = -1.0;
        for (std::size_t i = 0; i < x.rows(); ++i) {
            if (taken[i]) {
                continue;
            }
            const double dist = squared_distance(x.row(i), sums.row(labels[i]));
            if (dist > far_d) {
                far_d = dist;
                far = i;
            }
        }
        if (far == x.rows()) {
            throw DomainError("update_centers: more empty clusters than points");
        }
        taken[far] = true;
        std::copy_n(x.row(far).begin(), d, sums.row(c).begin());
    }
    return Centers(std::move(sums));
}

ClusteringResult lloyd(const Matrix& x, const Centers& init, const LloydConfig& cfg) {
    cfg.validate();
    check_dims(x, init, "lloyd");
    if (x.rows() == 0) {
        throw DomainError("lloyd: no points");
    }
    const std::size_t k = init.k();

    ClusteringResult out;
    Centers centers = init;
    Labeling previous;
    bool have_previous = false;

    for (int it = 1; it <= cfg.max_iters; ++it) {
        Labeling labels = assign(x, centers);
        out.cost_history.push_back(cost(x, centers));
        out.iterations = it;
        if (have_previous && labels == previous) {
            out.converged = true;
            break;
        }
        Centers updated = update_centers(x, labels, k);
        bool small_shift = true;
        for (std::size_t j = 0; j < k && small_shift; ++j) {
            const double shift = std::sqrt(squared_distance(updated[j], centers[j]));
            small_shift = shift < cfg.tol * (1.0 + norm(centers[j]));
        }
        centers = std::move(updated);
        previous = std::move(labels);
        have_previous = true;
        if (small_shift) {
            out.converged = true;
            break;
        }
    }

    out.labels = assign(x, centers);
    out.cost = cost(x, centers);
    if (out.cost_history.empty() || out.cost_history.back() != out.cost) {
        out.cost_history.push_back(out.cost);
    }
    out.centers = std::move(centers);
    return out;
}

ClusteringResult kmeans(const Matrix& x, std::size_t k, const LloydConfig& cfg) {
    const Centers init = cfg.init == InitMethod::KMeansPlusPlus ? kmeanspp_seed(x, k, cfg.seed)
                                                                : uniform_seed(x, k, cfg.seed);
    return lloyd(x, init, cfg);
}

ClusteringResult kmeans_best_of(const Matrix& x, std::size_t k, std::size_t restarts,
                                const LloydConfig& cfg) {
    if (restarts < 1) {
        throw DomainError("kmeans_best_of: need at least one restart");
    }
    ClusteringResult best;
    for (std::size_t r = 0; r < restarts; ++r) {
        LloydConfig run = cfg;
        run.seed = derive_seed(cfg.seed, r);
        ClusteringResult res = kmeans(x, k, run);
        if (r == 0 || res.cost < best.cost) {
            best = std::move(res);
        }
    }
    return best;
}

}  // namespace augkm
