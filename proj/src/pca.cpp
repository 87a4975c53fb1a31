#include "augkm/pca.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <json.hpp>

#include "augkm/errors.hpp"
#include "augkm/symmetric_eigen.hpp"

namespace augkm {
namespace {

constexpr int kModelSchemaVersion = 1;
constexpr double kMinScale = 1e-12;

Vector column_scales(const Matrix& centered) {
    Vector scale(centered.cols(), 1.0);
    const double denom = static_cast<double>(centered.rows() - 1);
    for (std::size_t j = 0; j < centered.cols(); ++j) {
        double ss = 0.0;
        for (std::size_t i = 0; i < centered.rows(); ++i) {
            ss += centered(i, j) * centered(i, j);
        }
        const double sigma = std::sqrt(ss / denom);
        if (sigma >= kMinScale) {
            scale[j] = sigma;
        }
    }
    return scale;
}

Matrix standardized(const Matrix& x, const PcaModel& model) {
    Matrix out = center(x, model.mean);
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto r = out.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) {
            r[j] /= model.scale[j];
        }
    }
    return out;
}

}  // namespace

void PcaPolicy::validate() const {
    if (mode == Mode::FixedDim && dim < 1) {
        throw DomainError("pca: fixed dimension must be at least 1");
    }
    if (mode == Mode::EvrThreshold && !(threshold > 0.0 && threshold <= 1.0)) {
        throw DomainError("pca: explained-variance threshold must lie in (0, 1]");
    }
}

Vector explained_variance_ratio(std::span<const double> eigenvalues) {
    double total = 0.0;
    for (double l : eigenvalues) {
        total += std::max(l, 0.0);
    }
    Vector evr(eigenvalues.size(), 0.0);
    if (total > 0.0) {
        for (std::size_t i = 0; i < eigenvalues.size(); ++i) {
            evr[i] = std::max(eigenvalues[i], 0.0) / total;
        }
    }
    return evr;
}

PcaModel fit(const Matrix& x, const PcaPolicy& policy) {
    policy.validate();
    if (x.rows() < 2 || x.cols() < 1) {
        throw DomainError("pca: need at least 2 rows and 1 column, got " +
                          std::to_string(x.rows()) + "x" + std::to_string(x.cols()));
    }
    const std::size_t d = x.cols();
    if (policy.mode == PcaPolicy::Mode::FixedDim && policy.dim > d) {
        throw DomainError("pca: cannot retain " + std::to_string(policy.dim) +
                          " components of " + std::to_string(d) + "-dimensional data");
    }

    PcaModel model;
    model.mean = mean_rows(x);
    Matrix centered = center(x, model.mean);
    model.scale = policy.standardize ? column_scales(centered) : Vector(d, 1.0);
    if (policy.standardize) {
        centered = standardized(x, model);
    }

    const EigenPairs eig = sym_eigen(scatter(centered));
    model.eigenvalues_all = eig.eigenvalues;
    model.evr = explained_variance_ratio(eig.eigenvalues);

    double total = 0.0;
    for (double l : eig.eigenvalues) {
        total += std::max(l, 0.0);
    }
    model.degenerate = !(total > 0.0);

    if (policy.mode == PcaPolicy::Mode::FixedDim) {
        model.retained = policy.dim;
    } else {
        if (model.degenerate) {
            throw DegenerateDataError(
                "pca: total variance is zero, no component explains any of it");
        }
        double cumulative = 0.0;
        model.retained = d;
        for (std::size_t r = 0; r < d; ++r) {
            cumulative += model.evr[r];
            if (cumulative >= policy.threshold) {
                model.retained = r + 1;
                break;
            }
        }
    }

    model.components = Matrix(d, model.retained);
    for (std::size_t i = 0; i < d; ++i) {
        for (std::size_t j = 0; j < model.retained; ++j) {
            model.components(i, j) =
                model.degenerate ? (i == j ? 1.0 : 0.0) : eig.eigenvectors(i, j);
        }
    }
    return model;
}

Matrix transform(const PcaModel& model, const Matrix& x) {
    if (x.cols() != model.input_dim()) {
        throw DomainError("pca transform: data has " + std::to_string(x.cols()) +
                          " columns, model expects " + std::to_string(model.input_dim()));
    }
    return multiply(standardized(x, model), model.components);
}

Matrix inverse_transform(const PcaModel& model, const Matrix& reduced) {
    if (reduced.cols() != model.retained) {
        throw DomainError("pca inverse: data has " + std::to_string(reduced.cols()) +
                          " columns, model retains " + std::to_string(model.retained));
    }
    Matrix out = multiply(reduced, model.components.transpose());
    for (std::size_t i = 0; i < out.rows(); ++i) {
        auto r = out.row(i);
        for (std::size_t j = 0; j < r.size(); ++j) {
            r[j] = r[j] * model.scale[j] + model.mean[j];
        }
    }
    return out;
}

std::string to_json(const PcaModel& model) {
    nlohmann::json doc;
    doc["schema_version"] = kModelSchemaVersion;
    doc["kind"] = "pca_model";
    doc["input_dim"] = model.input_dim();
    doc["retained"] = model.retained;
    doc["degenerate"] = model.degenerate;
    doc["mean"] = model.mean;
    doc["scale"] = model.scale;
    doc["eigenvalues"] = model.eigenvalues_all;
    doc["evr"] = model.evr;
    doc["components"] = model.components.values();
    return doc.dump(2);
}

PcaModel pca_model_from_json(const std::string& text) {
    try {
        const auto doc = nlohmann::json::parse(text);
        if (doc.at("kind").get<std::string>() != "pca_model") {
            throw FormatError("pca model: wrong document kind", 0);
        }
        if (doc.at("schema_version").get<int>() != kModelSchemaVersion) {
            throw FormatError("pca model: unsupported schema_version", 0);
        }
        PcaModel model;
        const auto d = doc.at("input_dim").get<std::size_t>();
        model.retained = doc.at("retained").get<std::size_t>();
        model.degenerate = doc.at("degenerate").get<bool>();
        model.mean = doc.at("mean").get<Vector>();
        model.scale = doc.at("scale").get<Vector>();
        model.eigenvalues_all = doc.at("eigenvalues").get<Vector>();
        model.evr = doc.at("evr").get<Vector>();
        if (model.mean.size() != d || model.scale.size() != d ||
            model.eigenvalues_all.size() != d || model.evr.size() != d ||
            model.retained < 1 || model.retained > d) {
            throw FormatError("pca model: inconsistent dimensions", 0);
        }
        model.components =
            Matrix(d, model.retained, doc.at("components").get<std::vector<double>>());
        return model;
    } catch (const nlohmann::json::exception& e) {
        throw FormatError(std::string("pca model: ") + e.what(), 0);
    } catch (const DomainError& e) {
        throw FormatError(std::string("pca model: ") + e.what(), 0);
    }
}

}  // namespace augkm
