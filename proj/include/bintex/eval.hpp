#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "bintex/dataset.hpp"
#include "bintex/model.hpp"
#include "bintex/rng.hpp"

namespace bintex {

struct ConfusionMatrix {
    std::vector<std::string> labels;
    // counts[actual][predicted]
    std::vector<std::vector<std::uint64_t>> counts;

    std::uint64_t total() const {
        std::uint64_t t = 0;
        for (const auto& row : counts)
            for (std::uint64_t c : row) t += c;
        return t;
    }

    ConfusionMatrix& operator+=(const ConfusionMatrix& other) {
        if (labels != other.labels)
            throw std::invalid_argument("confusion matrices have different labels");
        for (std::size_t i = 0; i < counts.size(); ++i)
            for (std::size_t j = 0; j < counts.size(); ++j)
                counts[i][j] += other.counts[i][j];
        return *this;
    }
};

inline ConfusionMatrix confusion(const std::vector<std::string>& actual,
                                 const std::vector<std::string>& predicted,
                                 const std::vector<std::string>& labels) {
    if (actual.size() != predicted.size())
        throw std::invalid_argument("actual and predicted label counts differ");
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < labels.size(); ++i) index[labels[i]] = i;
    ConfusionMatrix cm;
    cm.labels = labels;
    cm.counts.assign(labels.size(), std::vector<std::uint64_t>(labels.size(), 0));
    for (std::size_t i = 0; i < actual.size(); ++i) {
        auto a = index.find(actual[i]);
        if (a == index.end()) throw std::invalid_argument("unknown label: " + actual[i]);
        auto p = index.find(predicted[i]);
        if (p == index.end()) throw std::invalid_argument("unknown label: " + predicted[i]);
        ++cm.counts[a->second][p->second];
    }
    return cm;
}

struct ClassMetrics {
    std::string label;
    double precision = 0.0;
    double recall = 0.0;
    std::uint64_t support = 0;
    bool precision_undefined = false;
    bool recall_undefined = false;
};

struct MetricsReport {
    double accuracy = 0.0;
    std::vector<ClassMetrics> per_class;
    double macro_precision = 0.0;
    double macro_recall = 0.0;
    double weighted_precision = 0.0;
    double weighted_recall = 0.0;
    std::uint64_t total = 0;
};

inline MetricsReport metrics(const ConfusionMatrix& cm) {
    const std::size_t n = cm.labels.size();
    MetricsReport rep;
    rep.total = cm.total();
    if (rep.total == 0) throw std::invalid_argument("empty confusion matrix");

    std::uint64_t trace = 0;
    for (std::size_t i = 0; i < n; ++i) trace += cm.counts[i][i];
    rep.accuracy = static_cast<double>(trace) / static_cast<double>(rep.total);

    for (std::size_t i = 0; i < n; ++i) {
        ClassMetrics m;
        m.label = cm.labels[i];
        std::uint64_t tp = cm.counts[i][i];
        std::uint64_t actual_total = 0;    // tp + fn
        std::uint64_t predicted_total = 0; // tp + fp
        for (std::size_t j = 0; j < n; ++j) {
            actual_total += cm.counts[i][j];
            predicted_total += cm.counts[j][i];
        }
        m.support = actual_total;
        if (predicted_total == 0) {
            m.precision_undefined = true;
        } else {
            m.precision = static_cast<double>(tp) / static_cast<double>(predicted_total);
        }
        if (actual_total == 0) {
            m.recall_undefined = true;
        } else {
            m.recall = static_cast<double>(tp) / static_cast<double>(actual_total);
        }
        rep.per_class.push_back(std::move(m));
    }

    double psum = 0.0, rsum = 0.0, wpsum = 0.0, wrsum = 0.0;
    for (const auto& m : rep.per_class) {
        psum += m.precision;
        rsum += m.recall;
        wpsum += m.precision * static_cast<double>(m.support);
        wrsum += m.recall * static_cast<double>(m.support);
    }
    rep.macro_precision = psum / static_cast<double>(n);
    rep.macro_recall = rsum / static_cast<double>(n);
    rep.weighted_precision = wpsum / static_cast<double>(rep.total);
    rep.weighted_recall = wrsum / static_cast<double>(rep.total);
    return rep;
}

inline MetricsReport evaluate(const TrainedModel& model, const FeatureTable& table,
                              ConfusionMatrix* cm_out = nullptr) {
    std::vector<std::string> actual, predicted;
    actual.reserve(table.size());
    predicted.reserve(table.size());
    for (const auto& rec : table.records) {
        actual.push_back(table.label_of(rec));
        predicted.push_back(predict(model, rec).label);
    }
    ConfusionMatrix cm = confusion(actual, predicted, model.labels);
    MetricsReport rep = metrics(cm);
    if (cm_out) *cm_out = cm;
    return rep;
}

using Trainer = std::function<TrainedModel(const FeatureTable&, std::uint64_t)>;

struct FoldResult {
    ConfusionMatrix confusion;
    MetricsReport metrics;
};

struct CrossValResult {
    std::vector<FoldResult> folds;
    ConfusionMatrix aggregate_confusion;
    MetricsReport aggregate;
};

/// k-fold cross-validation: fold f trains on all folds but f and predicts
/// fold f; per-fold trainers get independent derived seeds.  The aggregate
/// confusion matrix sums fold matrices, so every record is predicted once.
inline CrossValResult cross_validate(const Trainer& trainer, const FeatureTable& table,
                                     int k, std::uint64_t seed) {
    auto folds = kfold(table, k, seed);
    std::vector<std::string> all_labels = table.labels();
    CrossValResult result;
    result.aggregate_confusion.labels = all_labels;
    result.aggregate_confusion.counts.assign(
        all_labels.size(), std::vector<std::uint64_t>(all_labels.size(), 0));
    for (std::size_t f = 0; f < folds.size(); ++f) {
        const FeatureTable& train = folds[f].first;
        const FeatureTable& validate = folds[f].second;
        TrainedModel model = trainer(train, Rng::derive(seed, f));

        std::vector<std::string> actual, predicted;
        for (const auto& rec : validate.records) {
            actual.push_back(validate.label_of(rec));
            predicted.push_back(predict(model, rec).label);
        }
        FoldResult fr;
        fr.confusion = confusion(actual, predicted, all_labels);
        fr.metrics = metrics(fr.confusion);
        result.aggregate_confusion += fr.confusion;
        result.folds.push_back(std::move(fr));
    }
    result.aggregate = metrics(result.aggregate_confusion);
    return result;
}

namespace detail {

inline void append_metric(std::string& out, double v, bool undefined) {
    if (undefined) {
        out += "undefined";
    } else {
        char buf[64];
        std::snprintf(buf, sizeof(buf), "%.4f", v);
        out += buf;
    }
}

} // namespace detail

inline std::string confusion_csv(const ConfusionMatrix& cm) {
    std::string out = "actual";
    for (const auto& l : cm.labels) out += "," + l;
    out += '\n';
    for (std::size_t i = 0; i < cm.labels.size(); ++i) {
        out += cm.labels[i];
        for (std::size_t j = 0; j < cm.labels.size(); ++j)
            out += "," + std::to_string(cm.counts[i][j]);
        out += '\n';
    }
    return out;
}

inline nlohmann::json metrics_to_json(const MetricsReport& rep) {
    nlohmann::json j;
    j["accuracy"] = rep.accuracy;
    j["total"] = rep.total;
    j["macro_precision"] = rep.macro_precision;
    j["macro_recall"] = rep.macro_recall;
    j["weighted_precision"] = rep.weighted_precision;
    j["weighted_recall"] = rep.weighted_recall;
    nlohmann::json per = nlohmann::json::object();
    for (const auto& m : rep.per_class) {
        nlohmann::json c;
        c["precision"] = m.precision;
        c["recall"] = m.recall;
        c["support"] = m.support;
        c["precision_undefined"] = m.precision_undefined;
        c["recall_undefined"] = m.recall_undefined;
        per[m.label] = c;
    }
    j["per_class"] = per;
    return j;
}

/// Plain-text report: accuracy, per-class precision/recall table with
/// supports, macro and weighted averages, and the confusion matrix.
inline std::string render_report(const ConfusionMatrix& cm, const MetricsReport& rep) {
    std::string out;
    char buf[128];
    std::snprintf(buf, sizeof(buf), "accuracy %.4f (%llu records)\n", rep.accuracy,
                  static_cast<unsigned long long>(rep.total));
    out += buf;
    out += "\nclass metrics\n";
    std::size_t width = 5;
    for (const auto& m : rep.per_class) width = std::max(width, m.label.size());
    std::snprintf(buf, sizeof(buf), "%-*s %9s %9s %8s\n", static_cast<int>(width), "class",
                  "precision", "recall", "support");
    out += buf;
    for (const auto& m : rep.per_class) {
        std::snprintf(buf, sizeof(buf), "%-*s ", static_cast<int>(width), m.label.c_str());
        out += buf;
        std::string p, r;
        detail::append_metric(p, m.precision, m.precision_undefined);
        detail::append_metric(r, m.recall, m.recall_undefined);
        std::snprintf(buf, sizeof(buf), "%9s %9s %8llu\n", p.c_str(), r.c_str(),
                      static_cast<unsigned long long>(m.support));
        out += buf;
    }
    std::snprintf(buf, sizeof(buf), "%-*s %9.4f %9.4f\n", static_cast<int>(width), "macro",
                  rep.macro_precision, rep.macro_recall);
    out += buf;
    std::snprintf(buf, sizeof(buf), "%-*s %9.4f %9.4f\n", static_cast<int>(width), "weighted",
                  rep.weighted_precision, rep.weighted_recall);
    out += buf;

    out += "\nconfusion matrix (rows actual, columns predicted)\n";
    std::size_t cell = 5;
    for (const auto& l : cm.labels) cell = std::max(cell, l.size());
    std::snprintf(buf, sizeof(buf), "%-*s", static_cast<int>(width), "");
    out += buf;
    for (const auto& l : cm.labels) {
        std::snprintf(buf, sizeof(buf), " %*s", static_cast<int>(cell), l.c_str());
        out += buf;
    }
    out += '\n';
    for (std::size_t i = 0; i < cm.labels.size(); ++i) {
        std::snprintf(buf, sizeof(buf), "%-*s", static_cast<int>(width), cm.labels[i].c_str());
        out += buf;
        for (std::size_t j = 0; j < cm.labels.size(); ++j) {
            std::snprintf(buf, sizeof(buf), " %*llu", static_cast<int>(cell),
                          static_cast<unsigned long long>(cm.counts[i][j]));
            out += buf;
        }
        out += '\n';
    }
    return out;
}

} // namespace bintex
