#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bintex/dataset.hpp"

namespace bintex {

enum class PcaMode { correlation, covariance };

/// Principal component model. Component rows are unit-norm and mutually
/// orthogonal; eigenvalues are sorted descending. Constant input columns are
/// dropped before fitting and listed in dropped_features.
struct PcaModel {
    PcaMode mode = PcaMode::correlation;
    std::vector<std::string> feature_names;
    std::vector<std::string> dropped_features;
    std::vector<double> means;
    std::vector<double> scales;
    std::vector<std::vector<double>> components;  // component x feature
    std::vector<double> eigenvalues;
    int retained = 0;
    double variance_target = 0.95;

    double total_variance() const {
        return std::accumulate(eigenvalues.begin(), eigenvalues.end(), 0.0);
    }
};

namespace detail {

/// Cyclic Jacobi eigendecomposition of a symmetric matrix (row-major,
/// destroyed in place). Converged when the off-diagonal Frobenius norm drops
/// below 1e-10. Eigenvectors come back as columns of v.
inline void jacobi_eigen(std::vector<double>& a, int n, std::vector<double>& eigvals,
                         std::vector<double>& v) {
    auto at = [&](std::vector<double>& m, int i, int j) -> double& {
        return m[static_cast<std::size_t>(i) * n + j];
    };
    v.assign(static_cast<std::size_t>(n) * n, 0.0);
    for (int i = 0; i < n; ++i) at(v, i, i) = 1.0;

    auto off_norm = [&]() {
        double s = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) s += at(a, i, j) * at(a, i, j);
        return std::sqrt(s);
    };

    const int max_sweeps = 100;
    for (int sweep = 0; sweep < max_sweeps && off_norm() >= 1e-10; ++sweep) {
        for (int p = 0; p < n - 1; ++p)
            for (int q = p + 1; q < n; ++q) {
                double apq = at(a, p, q);
                if (apq == 0.0) continue;
                double theta = (at(a, q, q) - at(a, p, p)) / (2.0 * apq);
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0);
                double s = t * c;
                double tau = s / (1.0 + c);

                double app = at(a, p, p), aqq = at(a, q, q);
                at(a, p, p) = app - t * apq;
                at(a, q, q) = aqq + t * apq;
                at(a, p, q) = 0.0;
                at(a, q, p) = 0.0;
                for (int i = 0; i < n; ++i) {
                    if (i != p && i != q) {
                        double aip = at(a, i, p), aiq = at(a, i, q);
                        at(a, i, p) = aip - s * (aiq + tau * aip);
                        at(a, p, i) = at(a, i, p);
                        at(a, i, q) = aiq + s * (aip - tau * aiq);
                        at(a, q, i) = at(a, i, q);
                    }
                    double vip = at(v, i, p), viq = at(v, i, q);
                    at(v, i, p) = vip - s * (viq + tau * vip);
                    at(v, i, q) = viq + s * (vip - tau * viq);
                }
            }
    }
    eigvals.resize(n);
    for (int i = 0; i < n; ++i) eigvals[i] = at(a, i, i);
}

} // namespace detail

/// Correlation-matrix PCA (covariance behind the mode switch). Standardizes
/// every kept column, eigendecomposes with cyclic Jacobi, and retains the
/// smallest component count whose cumulative variance ratio reaches the
/// target. Each component is sign-fixed so its largest-magnitude loading is
/// non-negative.
inline PcaModel fit_pca(const FeatureTable& table, double variance_target = 0.95,
                        PcaMode mode = PcaMode::correlation) {
    if (table.records.size() < 2) throw std::runtime_error("PCA needs at least 2 records");
    if (table.schema.size() < 2) throw std::runtime_error("PCA needs at least 2 features");
    if (!(variance_target > 0.0 && variance_target <= 1.0))
        throw std::invalid_argument("variance target must be in (0,1]");

    const std::size_t n = table.records.size();
    PcaModel model;
    model.mode = mode;
    model.variance_target = variance_target;

    // column statistics; constant columns are dropped
    std::vector<std::size_t> kept;
    for (std::size_t c = 0; c < table.schema.size(); ++c) {
        double mean = 0;
        for (const auto& rec : table.records) mean += rec.values[c];
        mean /= static_cast<double>(n);
        double var = 0;
        for (const auto& rec : table.records)
            var += (rec.values[c] - mean) * (rec.values[c] - mean);
        var /= static_cast<double>(n);  // population variance
        if (var <= 0.0) {
            model.dropped_features.push_back(table.schema[c]);
            continue;
        }
        kept.push_back(c);
        model.feature_names.push_back(table.schema[c]);
        model.means.push_back(mean);
        model.scales.push_back(mode == PcaMode::correlation ? std::sqrt(var) : 1.0);
    }
    const int d = static_cast<int>(kept.size());
    if (d < 2) throw std::runtime_error("PCA needs at least 2 non-constant features");

    // standardized data, then (1/n) Z^T Z
    std::vector<double> z(n * static_cast<std::size_t>(d));
    for (std::size_t r = 0; r < n; ++r)
        for (int c = 0; c < d; ++c)
            z[r * d + c] =
                (table.records[r].values[kept[c]] - model.means[c]) / model.scales[c];
    std::vector<double> m(static_cast<std::size_t>(d) * d, 0.0);
    for (int i = 0; i < d; ++i)
        for (int j = i; j < d; ++j) {
            double s = 0;
            for (std::size_t r = 0; r < n; ++r) s += z[r * d + i] * z[r * d + j];
            s /= static_cast<double>(n);
            m[static_cast<std::size_t>(i) * d + j] = s;
            m[static_cast<std::size_t>(j) * d + i] = s;
        }

    std::vector<double> eigvals, v;
    detail::jacobi_eigen(m, d, eigvals, v);

    std::vector<int> order(d);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return eigvals[a] > eigvals[b]; });

    model.eigenvalues.resize(d);
    model.components.assign(d, std::vector<double>(d));
    for (int r = 0; r < d; ++r) {
        double lambda = eigvals[order[r]];
        model.eigenvalues[r] = lambda < 1e-12 ? 0.0 : lambda;
        for (int c = 0; c < d; ++c)
            model.components[r][c] = v[static_cast<std::size_t>(c) * d + order[r]];
        // sign convention: largest-magnitude loading >= 0
        int arg = 0;
        for (int c = 1; c < d; ++c)
            if (std::abs(model.components[r][c]) > std::abs(model.components[r][arg])) arg = c;
        if (model.components[r][arg] < 0)
            for (double& x : model.components[r]) x = -x;
    }

    double total = model.total_variance();
    double cum = 0;
    model.retained = d;
    for (int r = 0; r < d; ++r) {
        cum += model.eigenvalues[r];
        if (cum / total >= variance_target - 1e-12) {
            model.retained = r + 1;
            break;
        }
    }
    return model;
}

/// Projects a record onto the retained components:
/// y_m = sum_f loadings[m][f] * (x_f - mean_f) / scale_f.
inline std::vector<double> transform(const PcaModel& model, const FeatureRecord& rec) {
    std::vector<double> std_vals(model.feature_names.size());
    for (std::size_t f = 0; f < model.feature_names.size(); ++f)
        std_vals[f] = (rec.value(model.feature_names[f]) - model.means[f]) / model.scales[f];
    std::vector<double> out(model.retained, 0.0);
    for (int m = 0; m < model.retained; ++m) {
        double s = 0;
        for (std::size_t f = 0; f < std_vals.size(); ++f)
            s += model.components[m][f] * std_vals[f];
        out[m] = s;
    }
    return out;
}

/// One line per retained component: ranked value (1 minus the cumulative
/// variance proportion, 4 decimals), the 1-based component index, then the
/// max_terms largest-magnitude loadings as signed 3-decimal coefficients
/// concatenated with the feature names.
inline std::vector<std::string> ranked_report(const PcaModel& model, int max_terms = 5) {
    std::vector<std::string> lines;
    double total = model.total_variance();
    double cum = 0;
    for (int m = 0; m < model.retained; ++m) {
        cum += model.eigenvalues[m];
        double ranked = 1.0 - cum / total;

        std::vector<std::size_t> idx(model.feature_names.size());
        std::iota(idx.begin(), idx.end(), 0);
        std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
            return std::abs(model.components[m][a]) > std::abs(model.components[m][b]);
        });
        std::size_t terms = std::min<std::size_t>(max_terms, idx.size());

        char buf[32];
        std::snprintf(buf, sizeof(buf), "%.4f", ranked);
        std::string line = std::string(buf) + " " + std::to_string(m + 1) + " ";
        for (std::size_t t = 0; t < terms; ++t) {
            double coeff = model.components[m][idx[t]];
            std::snprintf(buf, sizeof(buf), "%.3f", coeff);
            if (t > 0 && coeff >= 0) line += "+";
            line += buf;
            line += model.feature_names[idx[t]];
        }
        lines.push_back(std::move(line));
    }
    return lines;
}

inline std::string ranked_report_text(const PcaModel& model, int max_terms = 5) {
    std::string out;
    for (const auto& line : ranked_report(model, max_terms)) {
        out += line;
        out += '\n';
    }
    return out;
}

inline nlohmann::json pca_to_json(const PcaModel& model) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["kind"] = "pca";
    j["mode"] = model.mode == PcaMode::correlation ? "correlation" : "covariance";
    j["feature_names"] = model.feature_names;
    j["dropped_features"] = model.dropped_features;
    j["means"] = model.means;
    j["scales"] = model.scales;
    j["eigenvalues"] = model.eigenvalues;
    j["components"] = model.components;
    j["retained"] = model.retained;
    j["variance_target"] = model.variance_target;
    return j;
}

inline PcaModel pca_from_json(const nlohmann::json& j) {
    if (!j.contains("kind") || j.at("kind") != "pca")
        throw std::runtime_error("unknown model kind");
    PcaModel m;
    m.mode = j.at("mode") == "covariance" ? PcaMode::covariance : PcaMode::correlation;
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    m.dropped_features = j.at("dropped_features").get<std::vector<std::string>>();
    m.means = j.at("means").get<std::vector<double>>();
    m.scales = j.at("scales").get<std::vector<double>>();
    m.eigenvalues = j.at("eigenvalues").get<std::vector<double>>();
    m.components = j.at("components").get<std::vector<std::vector<double>>>();
    m.retained = j.at("retained").get<int>();
    m.variance_target = j.at("variance_target").get<double>();
    return m;
}

inline void save_pca(const PcaModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write PCA model: " + path.string());
    out << pca_to_json(model).dump(2) << '\n';
}

inline PcaModel load_pca(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open PCA model: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed PCA model JSON: " + std::string(e.what()));
    }
    return pca_from_json(j);
}

/// Appends one 0/1 indicator column per label of the active mode, named
/// "Malware_class=<label>". Reproduces the tool behavior where class
/// indicators take part in the component mix.
inline FeatureTable add_class_indicator_columns(const FeatureTable& table) {
    FeatureTable out;
    out.label_mode = table.label_mode;
    out.schema = table.schema;
    auto labels = table.labels();
    for (const auto& l : labels) out.schema.push_back("Malware_class=" + l);
    for (const auto& rec : table.records) {
        FeatureRecord r = rec;
        for (const auto& l : labels)
            r.push("Malware_class=" + l, table.label_of(rec) == l ? 1.0 : 0.0);
        out.add(std::move(r));
    }
    return out;
}

} // namespace bintex
