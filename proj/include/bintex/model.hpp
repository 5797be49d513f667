#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "bintex/dataset.hpp"
#include "bintex/features.hpp"

namespace bintex {

enum class ModelKind { naive_bayes, logistic, forest };

inline std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::naive_bayes: return "naive_bayes";
        case ModelKind::logistic: return "logistic";
        case ModelKind::forest: return "forest";
    }
    return "?";
}

inline ModelKind model_kind_from_string(const std::string& s) {
    if (s == "naive_bayes") return ModelKind::naive_bayes;
    if (s == "logistic") return ModelKind::logistic;
    if (s == "forest") return ModelKind::forest;
    throw std::runtime_error("unknown model kind: " + s);
}

/// Gaussian class-conditional parameters. Variances carry the floor
/// 1e-9 * max(1, global feature variance) so no class-feature pair is
/// degenerate.
struct NaiveBayesParams {
    std::vector<double> priors;                   // per label, sums to 1
    std::vector<std::vector<double>> means;       // label x feature
    std::vector<std::vector<double>> variances;   // label x feature
};

struct LogisticHyper {
    double learning_rate = 0.1;
    int epochs = 500;
    double l2 = 1e-4;
    bool operator==(const LogisticHyper&) const = default;
};

struct LogisticParams {
    std::vector<std::vector<double>> weights;  // label x (features + 1), bias last
    LogisticHyper hyper;
    int lr_halvings = 0;  // times the step size was halved during training
};

struct ForestHyper {
    int n_trees = 100;
    int max_features = 0;  // 0 = floor(sqrt(d)), at least 1
    int min_samples_split = 2;
    bool operator==(const ForestHyper&) const = default;
};

/// Node of a CART tree. feature < 0 marks a leaf holding per-label counts;
/// interior nodes route x[feature] < threshold to left, else right.
struct TreeNode {
    int feature = -1;
    double threshold = 0;
    int left = -1;
    int right = -1;
    std::vector<double> counts;
};

struct DecisionTree {
    std::vector<TreeNode> nodes;  // nodes[0] is the root
};

struct ForestParams {
    ForestHyper hyper;
    std::vector<DecisionTree> trees;
};

struct TrainedModel {
    ModelKind kind = ModelKind::naive_bayes;
    std::vector<std::string> labels;         // ordered label set
    std::vector<std::string> feature_names;  // training schema
    std::uint64_t seed = 0;
    // Min-max scaling baked into the model when training data was
    // normalized; predict applies it before scoring.
    bool normalized = false;
    NormParams norm;
    std::variant<NaiveBayesParams, LogisticParams, ForestParams> params;
};

struct Prediction {
    std::size_t label_index = 0;
    std::string label;
    std::vector<double> scores;  // aligned with the model's label set, sums to 1
};

namespace detail {

inline std::size_t argmax_first(const std::vector<double>& v) {
    std::size_t best = 0;
    for (std::size_t i = 1; i < v.size(); ++i)
        if (v[i] > v[best]) best = i;
    return best;
}

inline std::vector<double> softmax(std::vector<double> logits) {
    double mx = logits[0];
    for (double v : logits) mx = std::max(mx, v);
    double sum = 0;
    for (double& v : logits) {
        v = std::exp(v - mx);
        sum += v;
    }
    for (double& v : logits) v /= sum;
    return logits;
}

inline std::size_t tree_leaf_for(const DecisionTree& tree, const std::vector<double>& x) {
    std::size_t node = 0;
    while (tree.nodes[node].feature >= 0) {
        const TreeNode& nd = tree.nodes[node];
        node = static_cast<std::size_t>(x[nd.feature] < nd.threshold ? nd.left : nd.right);
    }
    return node;
}

// majority label of a leaf count vector, ties to the lowest label index
inline std::size_t leaf_majority(const std::vector<double>& counts) {
    return argmax_first(counts);
}

} // namespace detail

/// Looks the model's feature schema up in the record, in training order, and
/// applies the model's scaling when it was trained on normalized data.
inline std::vector<double> feature_vector_for(const TrainedModel& model,
                                              const FeatureRecord& rec) {
    std::vector<double> x;
    x.reserve(model.feature_names.size());
    for (const auto& name : model.feature_names) x.push_back(rec.value(name));
    if (model.normalized) {
        if (model.norm.min_max.size() != x.size())
            throw std::runtime_error("model normalization params do not match schema");
        for (std::size_t c = 0; c < x.size(); ++c) {
            auto [lo, hi] = model.norm.min_max[c];
            x[c] = hi == lo ? 0.5 : std::clamp((x[c] - lo) / (hi - lo), 0.0, 1.0);
        }
    }
    return x;
}

/// Shared inference contract. Naive Bayes evaluates log posteriors and
/// normalizes with log-sum-exp; logistic applies softmax(Wx + b); the forest
/// lets trees vote with their leaf-majority class. Ties break by label order.
inline Prediction predict(const TrainedModel& model, const FeatureRecord& rec) {
    std::vector<double> x = feature_vector_for(model, rec);
    const std::size_t n_labels = model.labels.size();
    Prediction pred;
    pred.scores.assign(n_labels, 0.0);

    if (model.kind == ModelKind::naive_bayes) {
        const auto& p = std::get<NaiveBayesParams>(model.params);
        std::vector<double> logpost(n_labels);
        for (std::size_t c = 0; c < n_labels; ++c) {
            double lp = std::log(p.priors[c]);
            for (std::size_t f = 0; f < x.size(); ++f) {
                double var = p.variances[c][f];
                double diff = x[f] - p.means[c][f];
                lp += -0.5 * std::log(2.0 * 3.14159265358979323846 * var) -
                      diff * diff / (2.0 * var);
            }
            logpost[c] = lp;
        }
        double mx = logpost[0];
        for (double v : logpost) mx = std::max(mx, v);
        double sum = 0;
        for (std::size_t c = 0; c < n_labels; ++c) {
            pred.scores[c] = std::exp(logpost[c] - mx);
            sum += pred.scores[c];
        }
        for (double& s : pred.scores) s /= sum;
    } else if (model.kind == ModelKind::logistic) {
        const auto& p = std::get<LogisticParams>(model.params);
        std::vector<double> logits(n_labels);
        for (std::size_t c = 0; c < n_labels; ++c) {
            double z = p.weights[c].back();  // bias
            for (std::size_t f = 0; f < x.size(); ++f) z += p.weights[c][f] * x[f];
            logits[c] = z;
        }
        pred.scores = detail::softmax(std::move(logits));
    } else {
        const auto& p = std::get<ForestParams>(model.params);
        for (const auto& tree : p.trees) {
            std::size_t leaf = detail::tree_leaf_for(tree, x);
            pred.scores[detail::leaf_majority(tree.nodes[leaf].counts)] += 1.0;
        }
        for (double& s : pred.scores) s /= static_cast<double>(p.trees.size());
    }

    pred.label_index = detail::argmax_first(pred.scores);
    pred.label = model.labels[pred.label_index];
    return pred;
}

// ---------------------------------------------------------------------------
// JSON serialization

namespace detail {

inline nlohmann::json tree_to_json(const DecisionTree& tree) {
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& nd : tree.nodes) {
        nlohmann::json n;
        if (nd.feature < 0) {
            n["counts"] = nd.counts;
        } else {
            n["feature"] = nd.feature;
            n["threshold"] = nd.threshold;
            n["left"] = nd.left;
            n["right"] = nd.right;
        }
        nodes.push_back(std::move(n));
    }
    return nlohmann::json{{"nodes", std::move(nodes)}};
}

inline DecisionTree tree_from_json(const nlohmann::json& j) {
    DecisionTree tree;
    for (const auto& n : j.at("nodes")) {
        TreeNode nd;
        if (n.contains("counts")) {
            nd.counts = n.at("counts").get<std::vector<double>>();
        } else {
            nd.feature = n.at("feature").get<int>();
            nd.threshold = n.at("threshold").get<double>();
            nd.left = n.at("left").get<int>();
            nd.right = n.at("right").get<int>();
        }
        tree.nodes.push_back(std::move(nd));
    }
    return tree;
}

} // namespace detail

inline nlohmann::json model_to_json(const TrainedModel& model) {
    nlohmann::json j;
    j["format_version"] = 1;
    j["kind"] = to_string(model.kind);
    j["labels"] = model.labels;
    j["feature_names"] = model.feature_names;

    nlohmann::json cfg;
    cfg["seed"] = model.seed;
    nlohmann::json params;
    if (model.kind == ModelKind::naive_bayes) {
        const auto& p = std::get<NaiveBayesParams>(model.params);
        params["priors"] = p.priors;
        params["means"] = p.means;
        params["variances"] = p.variances;
    } else if (model.kind == ModelKind::logistic) {
        const auto& p = std::get<LogisticParams>(model.params);
        params["weights"] = p.weights;
        cfg["learning_rate"] = p.hyper.learning_rate;
        cfg["epochs"] = p.hyper.epochs;
        cfg["l2"] = p.hyper.l2;
        cfg["lr_halvings"] = p.lr_halvings;
    } else {
        const auto& p = std::get<ForestParams>(model.params);
        nlohmann::json trees = nlohmann::json::array();
        for (const auto& t : p.trees) trees.push_back(detail::tree_to_json(t));
        params["trees"] = std::move(trees);
        cfg["n_trees"] = p.hyper.n_trees;
        cfg["max_features"] = p.hyper.max_features;
        cfg["min_samples_split"] = p.hyper.min_samples_split;
    }
    j["training_config"] = std::move(cfg);
    j["parameters"] = std::move(params);
    if (model.normalized) {
        nlohmann::json mm = nlohmann::json::array();
        for (const auto& [lo, hi] : model.norm.min_max)
            mm.push_back(nlohmann::json::array({lo, hi}));
        j["normalization"] = {{"min_max", std::move(mm)}};
    }
    return j;
}

inline TrainedModel model_from_json(const nlohmann::json& j) {
    if (!j.contains("kind") || !j.at("kind").is_string())
        throw std::runtime_error("unknown model kind");
    TrainedModel m;
    m.kind = model_kind_from_string(j.at("kind").get<std::string>());
    int version = j.value("format_version", -1);
    if (version != 1)
        throw std::runtime_error("unsupported model format_version " + std::to_string(version));
    m.labels = j.at("labels").get<std::vector<std::string>>();
    m.feature_names = j.at("feature_names").get<std::vector<std::string>>();
    if (j.contains("normalization")) {
        m.normalized = true;
        for (const auto& pair : j.at("normalization").at("min_max"))
            m.norm.min_max.emplace_back(pair.at(0).get<double>(), pair.at(1).get<double>());
    }
    const auto& cfg = j.at("training_config");
    m.seed = cfg.value("seed", std::uint64_t{0});
    const auto& params = j.at("parameters");
    if (m.kind == ModelKind::naive_bayes) {
        NaiveBayesParams p;
        p.priors = params.at("priors").get<std::vector<double>>();
        p.means = params.at("means").get<std::vector<std::vector<double>>>();
        p.variances = params.at("variances").get<std::vector<std::vector<double>>>();
        m.params = std::move(p);
    } else if (m.kind == ModelKind::logistic) {
        LogisticParams p;
        p.weights = params.at("weights").get<std::vector<std::vector<double>>>();
        p.hyper.learning_rate = cfg.at("learning_rate").get<double>();
        p.hyper.epochs = cfg.at("epochs").get<int>();
        p.hyper.l2 = cfg.at("l2").get<double>();
        p.lr_halvings = cfg.value("lr_halvings", 0);
        m.params = std::move(p);
    } else {
        ForestParams p;
        p.hyper.n_trees = cfg.at("n_trees").get<int>();
        p.hyper.max_features = cfg.at("max_features").get<int>();
        p.hyper.min_samples_split = cfg.at("min_samples_split").get<int>();
        for (const auto& t : params.at("trees")) p.trees.push_back(detail::tree_from_json(t));
        m.params = std::move(p);
    }
    return m;
}

inline void save_model(const TrainedModel& model, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write model: " + path.string());
    out << model_to_json(model).dump(2) << '\n';
    if (!out) throw std::runtime_error("write failure: " + path.string());
}

inline TrainedModel load_model(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open model: " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error("malformed model JSON in " + path.string() + ": " + e.what());
    }
    return model_from_json(j);
}

} // namespace bintex
