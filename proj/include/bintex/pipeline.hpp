#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "bintex/dataset.hpp"
#include "bintex/eval.hpp"
#include "bintex/features.hpp"
#include "bintex/image.hpp"
#include "bintex/image_io.hpp"
#include "bintex/pca.hpp"
#include "bintex/run_config.hpp"
#include "bintex/scatter.hpp"
#include "bintex/train.hpp"

namespace bintex {

namespace detail {

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << text;
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

} // namespace detail

/// Converts every corpus file to a grayscale image under out_dir/<family>/,
/// named <source>.pgm (or .png). Returns the number of images written;
/// failures are reported through on_error and skipped.
template <typename ErrorFn>
inline std::size_t convert_corpus(const std::vector<CorpusEntry>& entries,
                                  const std::filesystem::path& out_dir, ImageFormat format,
                                  ErrorFn&& on_error) {
    namespace fs = std::filesystem;
    std::size_t written = 0;
    for (const auto& e : entries) {
        try {
            auto bytes = detail::read_file_bytes(e.path);
            GrayImage img = bytes_to_image(bytes);
            fs::create_directories(out_dir / e.family);
            std::string name =
                e.path.filename().string() + (format == ImageFormat::pgm ? ".pgm" : ".png");
            write_image(img, out_dir / e.family / name, format);
            ++written;
        } catch (const std::exception& ex) {
            on_error(e.path, ex.what());
        }
    }
    return written;
}

/// Reads each corpus file, converts it to an image and extracts the base
/// features. source_id is "<family>/<filename>".
inline FeatureTable extract_corpus(const std::vector<CorpusEntry>& entries,
                                   const ExtractionConfig& cfg, LabelMode mode) {
    GaborBank bank = build_gabor_bank(cfg.gabor_frequencies, cfg.gabor_orientations,
                                      cfg.gabor_sigma_factor);
    FeatureTable table;
    table.label_mode = mode;
    table.schema = base_feature_names();
    for (const auto& e : entries) {
        try {
            auto bytes = detail::read_file_bytes(e.path);
            GrayImage img = bytes_to_image(bytes);
            FeatureRecord rec = extract_features(img, cfg, bank);
            rec.source_id = e.family + "/" + e.path.filename().string();
            rec.family = e.family;
            rec.main_class = e.main_class;
            table.add(std::move(rec));
        } catch (const std::exception& ex) {
            throw std::runtime_error("feature extraction failed for " + e.path.string() + ": " +
                                     ex.what());
        }
    }
    return table;
}

struct PipelineResult {
    std::filesystem::path run_dir;
    std::size_t corpus_size = 0;
    std::size_t images_written = 0;
    // test-split accuracy per trained model kind, in cfg.models order
    std::vector<std::pair<ModelKind, double>> test_accuracy;
};

/// Full run: convert, extract, engineer, EDA plots, PCA report, split,
/// normalize, train every configured classifier, evaluate on the held-out
/// split and with k-fold cross-validation. Everything lands under
/// <output_dir>/run-<seed>/ with a copy of the config; reruns with the same
/// config are byte-identical.
inline PipelineResult run_pipeline(const RunConfig& cfg) {
    namespace fs = std::filesystem;
    validate_run_config(cfg);

    ClassMap class_map = load_class_map(cfg.class_map);
    std::vector<CorpusEntry> entries = scan_corpus(cfg.corpus, class_map);

    PipelineResult result;
    result.corpus_size = entries.size();
    fs::path run_dir = cfg.output_dir / ("run-" + std::to_string(cfg.seed));
    result.run_dir = run_dir;
    for (const char* sub : {"images", "features", "eda", "pca", "models", "reports"})
        fs::create_directories(run_dir / sub);
    save_run_config(cfg, run_dir / "run.cfg");

    std::string convert_errors;
    result.images_written =
        convert_corpus(entries, run_dir / "images", ImageFormat::pgm,
                       [&](const fs::path& p, const std::string& what) {
                           convert_errors += p.string() + ": " + what + "\n";
                       });
    if (!convert_errors.empty())
        throw std::runtime_error("image conversion failed:\n" + convert_errors);

    FeatureTable base = extract_corpus(entries, cfg.extraction, cfg.label_mode);
    write_csv(base, run_dir / "features" / "features.csv");
    FeatureTable table = engineer_table(base, cfg.extraction.transforms);
    write_csv(table, run_dir / "features" / "features_engineered.csv");

    for (const auto& [x, y] : std::vector<std::pair<std::string, std::string>>{
             {"gabor_entropy", "lbp_energy"}, {"gabor_entropy", "correlation"}}) {
        auto points = scatter_data(base, x, y);
        std::string stem = x + "_vs_" + y;
        detail::write_text_file(run_dir / "eda" / (stem + ".csv"), scatter_csv(points, x, y));
        detail::write_text_file(run_dir / "eda" / (stem + ".svg"), scatter_svg(points, x, y));
    }

    PcaModel pca = fit_pca(table, 0.95, PcaMode::correlation);
    save_pca(pca, run_dir / "pca" / "pca.json");
    detail::write_text_file(run_dir / "pca" / "ranked_report.txt", ranked_report_text(pca, 5));

    auto [train_raw, test_raw] = stratified_split(table, cfg.test_fraction, cfg.seed);
    NormParams global_params;
    if (cfg.norm_scope == NormScope::whole) global_params = fit_normalization(table);

    std::string summary = "normalization scope: " + to_string(cfg.norm_scope) + "\n";
    for (ModelKind kind : cfg.models) {
        auto fit_kind = [&](const FeatureTable& t, std::uint64_t seed) -> TrainedModel {
            switch (kind) {
                case ModelKind::naive_bayes: return train_naive_bayes(t);
                case ModelKind::logistic: return train_logistic(t, cfg.logistic);
                default: return train_forest(t, cfg.forest, seed);
            }
        };
        // Scaling is fitted on whatever the scope dictates (train: the rows
        // being trained on; whole: the full table) and stored in the model,
        // so evaluation always runs on raw records.
        auto fit = [&](const FeatureTable& raw, std::uint64_t seed) -> TrainedModel {
            if (cfg.norm_scope == NormScope::none) return fit_kind(raw, seed);
            NormParams p = cfg.norm_scope == NormScope::train ? fit_normalization(raw)
                                                              : global_params;
            TrainedModel m = fit_kind(apply_normalization(raw, p), seed);
            m.normalized = true;
            m.norm = p;
            return m;
        };
        TrainedModel model = fit(train_raw, cfg.seed);
        save_model(model, run_dir / "models" / (to_string(kind) + ".json"));

        ConfusionMatrix cm;
        MetricsReport rep = evaluate(model, test_raw, &cm);
        result.test_accuracy.emplace_back(kind, rep.accuracy);
        fs::path reports = run_dir / "reports";
        detail::write_text_file(reports / (to_string(kind) + "_metrics.txt"),
                                render_report(cm, rep));
        detail::write_text_file(reports / (to_string(kind) + "_metrics.json"),
                                metrics_to_json(rep).dump(2) + "\n");
        detail::write_text_file(reports / (to_string(kind) + "_confusion.csv"),
                                confusion_csv(cm));

        CrossValResult cv = cross_validate(fit, table, cfg.k, cfg.seed);

        nlohmann::json cvj;
        cvj["aggregate"] = metrics_to_json(cv.aggregate);
        nlohmann::json foldsj = nlohmann::json::array();
        for (const auto& fr : cv.folds) foldsj.push_back(metrics_to_json(fr.metrics));
        cvj["folds"] = foldsj;
        detail::write_text_file(reports / (to_string(kind) + "_cv.json"), cvj.dump(2) + "\n");
        detail::write_text_file(reports / (to_string(kind) + "_cv.txt"),
                                render_report(cv.aggregate_confusion, cv.aggregate));

        char buf[160];
        std::snprintf(buf, sizeof(buf), "%-12s test accuracy %.4f   cv accuracy %.4f\n",
                      to_string(kind).c_str(), rep.accuracy, cv.aggregate.accuracy);
        summary += buf;
    }
    detail::write_text_file(run_dir / "reports" / "summary.txt", summary);
    return result;
}

} // namespace bintex
