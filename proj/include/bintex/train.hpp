#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "bintex/dataset.hpp"
#include "bintex/model.hpp"
#include "bintex/rng.hpp"

namespace bintex {

namespace detail {

struct DesignMatrix {
    std::vector<std::string> labels;      // sorted unique
    std::vector<std::vector<double>> x;   // record x feature
    std::vector<std::size_t> y;           // label indices
};

inline DesignMatrix design_matrix(const FeatureTable& table) {
    if (table.records.empty()) throw std::runtime_error("empty training table");
    DesignMatrix d;
    d.labels = table.labels();
    std::map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < d.labels.size(); ++i) index[d.labels[i]] = i;
    d.x.reserve(table.records.size());
    d.y.reserve(table.records.size());
    for (const auto& rec : table.records) {
        d.x.push_back(rec.values);
        d.y.push_back(index.at(table.label_of(rec)));
    }
    return d;
}

} // namespace detail

/// Class priors from class frequency; per class and feature a Gaussian with
/// the class mean and population variance plus the floor
/// 1e-9 * max(1, global feature variance).
inline TrainedModel train_naive_bayes(const FeatureTable& table) {
    auto d = detail::design_matrix(table);
    const std::size_t n = d.x.size(), n_feat = table.schema.size(),
                      n_labels = d.labels.size();

    // global population variance per feature, for the floor
    std::vector<double> floor_per_feature(n_feat);
    for (std::size_t f = 0; f < n_feat; ++f) {
        double mean = 0;
        for (const auto& row : d.x) mean += row[f];
        mean /= static_cast<double>(n);
        double var = 0;
        for (const auto& row : d.x) var += (row[f] - mean) * (row[f] - mean);
        var /= static_cast<double>(n);
        floor_per_feature[f] = 1e-9 * std::max(1.0, var);
    }

    NaiveBayesParams p;
    p.priors.assign(n_labels, 0.0);
    p.means.assign(n_labels, std::vector<double>(n_feat, 0.0));
    p.variances.assign(n_labels, std::vector<double>(n_feat, 0.0));
    std::vector<double> class_n(n_labels, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        class_n[d.y[i]] += 1.0;
        for (std::size_t f = 0; f < n_feat; ++f) p.means[d.y[i]][f] += d.x[i][f];
    }
    for (std::size_t c = 0; c < n_labels; ++c) {
        p.priors[c] = class_n[c] / static_cast<double>(n);
        for (std::size_t f = 0; f < n_feat; ++f) p.means[c][f] /= class_n[c];
    }
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t f = 0; f < n_feat; ++f) {
            double diff = d.x[i][f] - p.means[d.y[i]][f];
            p.variances[d.y[i]][f] += diff * diff;
        }
    for (std::size_t c = 0; c < n_labels; ++c)
        for (std::size_t f = 0; f < n_feat; ++f)
            p.variances[c][f] = p.variances[c][f] / class_n[c] + floor_per_feature[f];

    TrainedModel m;
    m.kind = ModelKind::naive_bayes;
    m.labels = d.labels;
    m.feature_names = table.schema;
    m.params = std::move(p);
    return m;
}

/// Mean cross-entropy of softmax(Wx + b) plus (l2/2) * sum of squared
/// non-bias weights, with its analytic gradient. weights is
/// n_classes x (n_features + 1), bias last.
inline double logistic_loss_and_gradient(const std::vector<std::vector<double>>& weights,
                                         const std::vector<std::vector<double>>& x,
                                         const std::vector<std::size_t>& y, double l2,
                                         std::vector<std::vector<double>>* gradient) {
    const std::size_t n = x.size(), n_classes = weights.size(),
                      n_feat = weights[0].size() - 1;
    if (gradient)
        gradient->assign(n_classes, std::vector<double>(n_feat + 1, 0.0));

    double loss = 0;
    std::vector<double> logits(n_classes);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t c = 0; c < n_classes; ++c) {
            double z = weights[c][n_feat];
            for (std::size_t f = 0; f < n_feat; ++f) z += weights[c][f] * x[i][f];
            logits[c] = z;
        }
        double mx = *std::max_element(logits.begin(), logits.end());
        double sum = 0;
        for (double& z : logits) {
            z = std::exp(z - mx);
            sum += z;
        }
        loss -= std::log(logits[y[i]] / sum);
        if (gradient) {
            for (std::size_t c = 0; c < n_classes; ++c) {
                double delta = logits[c] / sum - (c == y[i] ? 1.0 : 0.0);
                auto& g = (*gradient)[c];
                for (std::size_t f = 0; f < n_feat; ++f) g[f] += delta * x[i][f];
                g[n_feat] += delta;
            }
        }
    }
    loss /= static_cast<double>(n);
    for (std::size_t c = 0; c < n_classes; ++c)
        for (std::size_t f = 0; f < n_feat; ++f) loss += 0.5 * l2 * weights[c][f] * weights[c][f];
    if (gradient)
        for (std::size_t c = 0; c < n_classes; ++c) {
            for (double& g : (*gradient)[c]) g /= static_cast<double>(n);
            for (std::size_t f = 0; f < n_feat; ++f)
                (*gradient)[c][f] += l2 * weights[c][f];
        }
    return loss;
}

/// Multinomial softmax regression: full-batch gradient descent from zero
/// weights for a fixed epoch count. A step that would increase the loss is
/// retried with a halved step size, so the loss curve is non-increasing.
inline TrainedModel train_logistic(const FeatureTable& table, LogisticHyper hyper = {}) {
    auto d = detail::design_matrix(table);
    if (d.labels.size() < 2) throw std::runtime_error("logistic regression needs >= 2 classes");
    for (const auto& row : d.x)
        for (double v : row)
            if (!std::isfinite(v)) throw std::runtime_error("non-finite feature value");

    const std::size_t n_classes = d.labels.size(), n_feat = table.schema.size();
    LogisticParams p;
    p.hyper = hyper;
    p.weights.assign(n_classes, std::vector<double>(n_feat + 1, 0.0));

    double lr = hyper.learning_rate;
    std::vector<std::vector<double>> grad;
    double loss = logistic_loss_and_gradient(p.weights, d.x, d.y, hyper.l2, &grad);
    for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
        std::vector<std::vector<double>> trial = p.weights;
        while (true) {
            for (std::size_t c = 0; c < n_classes; ++c)
                for (std::size_t f = 0; f <= n_feat; ++f)
                    trial[c][f] = p.weights[c][f] - lr * grad[c][f];
            double trial_loss = logistic_loss_and_gradient(trial, d.x, d.y, hyper.l2, nullptr);
            if (trial_loss <= loss || lr <= 1e-12) {
                p.weights = trial;
                loss = trial_loss;
                break;
            }
            lr *= 0.5;
            ++p.lr_halvings;
        }
        logistic_loss_and_gradient(p.weights, d.x, d.y, hyper.l2, &grad);
    }

    TrainedModel m;
    m.kind = ModelKind::logistic;
    m.labels = d.labels;
    m.feature_names = table.schema;
    m.params = std::move(p);
    return m;
}

namespace detail {

inline double gini(const std::vector<double>& counts, double total) {
    if (total <= 0) return 0;
    double s = 0;
    for (double c : counts) s += (c / total) * (c / total);
    return 1.0 - s;
}

struct TreeBuilder {
    const std::vector<std::vector<double>>& x;
    const std::vector<std::size_t>& y;
    std::size_t n_labels;
    int max_features;
    int min_samples_split;
    Rng& rng;
    DecisionTree tree;

    int build(std::vector<std::size_t>& samples) {
        std::vector<double> counts(n_labels, 0.0);
        for (std::size_t i : samples) counts[y[i]] += 1.0;
        double total = static_cast<double>(samples.size());
        double node_gini = gini(counts, total);

        bool pure = node_gini == 0.0;
        if (pure || samples.size() < static_cast<std::size_t>(min_samples_split))
            return make_leaf(std::move(counts));

        // random feature subset, examined in ascending index order
        const int d = static_cast<int>(x[0].size());
        std::vector<int> pool(d);
        std::iota(pool.begin(), pool.end(), 0);
        int k = std::min(max_features, d);
        for (int i = 0; i < k; ++i) {
            int j = i + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(d - i)));
            std::swap(pool[i], pool[j]);
        }
        std::vector<int> candidates(pool.begin(), pool.begin() + k);
        std::sort(candidates.begin(), candidates.end());

        int best_feature = -1;
        double best_threshold = 0, best_score = node_gini - 1e-12;
        for (int f : candidates) {
            std::vector<std::pair<double, std::size_t>> vals;
            vals.reserve(samples.size());
            for (std::size_t i : samples) vals.emplace_back(x[i][f], y[i]);
            std::sort(vals.begin(), vals.end(),
                      [](const auto& a, const auto& b) { return a.first < b.first; });

            std::vector<double> left_counts(n_labels, 0.0);
            double n_left = 0;
            for (std::size_t i = 0; i + 1 < vals.size(); ++i) {
                left_counts[vals[i].second] += 1.0;
                n_left += 1.0;
                if (vals[i].first == vals[i + 1].first) continue;
                std::vector<double> right_counts(counts);
                for (std::size_t c = 0; c < n_labels; ++c) right_counts[c] -= left_counts[c];
                double score = (n_left * gini(left_counts, n_left) +
                                (total - n_left) * gini(right_counts, total - n_left)) /
                               total;
                if (score < best_score) {
                    best_score = score;
                    best_feature = f;
                    best_threshold = (vals[i].first + vals[i + 1].first) / 2.0;
                }
            }
        }
        if (best_feature < 0) return make_leaf(std::move(counts));

        std::vector<std::size_t> left, right;
        for (std::size_t i : samples)
            (x[i][best_feature] < best_threshold ? left : right).push_back(i);
        int node = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[node].feature = best_feature;
        tree.nodes[node].threshold = best_threshold;
        int l = build(left);
        int r = build(right);
        tree.nodes[node].left = l;
        tree.nodes[node].right = r;
        return node;
    }

    int make_leaf(std::vector<double> counts) {
        int node = static_cast<int>(tree.nodes.size());
        tree.nodes.emplace_back();
        tree.nodes[node].counts = std::move(counts);
        return node;
    }
};

} // namespace detail

/// CART forest on bootstrap samples. Tree i draws its random stream from
/// (seed, i), so serial and parallel builds agree; splits minimize weighted
/// Gini impurity over midpoints of sorted unique values.
inline TrainedModel train_forest(const FeatureTable& table, ForestHyper hyper,
                                 std::uint64_t seed) {
    auto d = detail::design_matrix(table);
    const std::size_t n = d.x.size();
    const int n_feat = static_cast<int>(table.schema.size());
    if (hyper.n_trees < 1) throw std::invalid_argument("n_trees must be >= 1");
    int max_features = hyper.max_features;
    if (max_features <= 0)
        max_features = std::max(1, static_cast<int>(std::floor(std::sqrt(n_feat))));
    max_features = std::min(max_features, n_feat);

    ForestParams p;
    p.hyper = hyper;
    p.hyper.max_features = max_features;
    for (int t = 0; t < hyper.n_trees; ++t) {
        Rng rng = Rng::substream(seed, static_cast<std::uint64_t>(t));
        std::vector<std::size_t> bootstrap(n);
        for (std::size_t i = 0; i < n; ++i)
            bootstrap[i] = static_cast<std::size_t>(rng.bounded(n));
        detail::TreeBuilder builder{d.x, d.y, d.labels.size(), max_features,
                                    hyper.min_samples_split, rng, {}};
        builder.build(bootstrap);
        p.trees.push_back(std::move(builder.tree));
    }

    TrainedModel m;
    m.kind = ModelKind::forest;
    m.labels = d.labels;
    m.feature_names = table.schema;
    m.seed = seed;
    m.params = std::move(p);
    return m;
}

} // namespace bintex
