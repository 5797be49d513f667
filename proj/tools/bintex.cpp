#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "bintex/pipeline.hpp"

namespace fs = std::filesystem;
using namespace bintex;

namespace {

struct HyperOptions {
    LogisticHyper logistic;
    ForestHyper forest;
};

void add_hyper_options(CLI::App* cmd, HyperOptions& h) {
    cmd->add_option("--learning-rate", h.logistic.learning_rate,
                    "logistic regression step size");
    cmd->add_option("--epochs", h.logistic.epochs, "logistic regression epochs");
    cmd->add_option("--l2", h.logistic.l2, "logistic regression L2 strength");
    cmd->add_option("--trees", h.forest.n_trees, "number of forest trees");
    cmd->add_option("--max-features", h.forest.max_features,
                    "features tried per split (0 = sqrt of feature count)");
    cmd->add_option("--min-samples-split", h.forest.min_samples_split,
                    "smallest node the forest will split");
}

struct ExtractOptions {
    int levels = 32;
    std::vector<std::string> offsets;
    bool asymmetric = false;
    std::string offset_mode = "accumulate";
    std::vector<double> frequencies;
    std::vector<double> orientations;
    double sigma_factor = 0.56;
};

void add_extract_options(CLI::App* cmd, ExtractOptions& x) {
    cmd->add_option("--levels", x.levels, "GLCM gray levels")->check(CLI::Range(2, 256));
    cmd->add_option("--offset", x.offsets, "GLCM offset as drow:dcol (repeatable)");
    cmd->add_flag("--asymmetric", x.asymmetric, "count GLCM pairs in one direction only");
    cmd->add_option("--offset-mode", x.offset_mode, "combine offsets: accumulate or average")
        ->check(CLI::IsMember({"accumulate", "average"}));
    cmd->add_option("--gabor-frequency", x.frequencies, "Gabor frequency (repeatable)");
    cmd->add_option("--gabor-orientation", x.orientations,
                    "Gabor orientation in radians (repeatable)");
    cmd->add_option("--gabor-sigma-factor", x.sigma_factor, "Gabor envelope sigma = factor/f");
}

ExtractionConfig to_extraction_config(const ExtractOptions& x) {
    ExtractionConfig cfg;
    cfg.glcm_levels = x.levels;
    if (!x.offsets.empty()) {
        cfg.glcm_offsets.clear();
        for (const auto& tok : x.offsets) {
            auto colon = tok.find(':');
            if (colon == std::string::npos)
                throw std::runtime_error("offset must be drow:dcol, got '" + tok + "'");
            cfg.glcm_offsets.push_back(
                {std::stoi(tok.substr(0, colon)), std::stoi(tok.substr(colon + 1))});
        }
    }
    cfg.glcm_symmetric = !x.asymmetric;
    cfg.glcm_offset_mode = glcm_offset_mode_from_string(x.offset_mode);
    if (!x.frequencies.empty()) cfg.gabor_frequencies = x.frequencies;
    if (!x.orientations.empty()) cfg.gabor_orientations = x.orientations;
    cfg.gabor_sigma_factor = x.sigma_factor;
    return cfg;
}

TrainedModel fit_model(ModelKind kind, const FeatureTable& table, const HyperOptions& h,
                       std::uint64_t seed, NormScope scope, const NormParams* whole_params) {
    auto fit = [&](const FeatureTable& t) {
        switch (kind) {
            case ModelKind::naive_bayes: return train_naive_bayes(t);
            case ModelKind::logistic: return train_logistic(t, h.logistic);
            default: return train_forest(t, h.forest, seed);
        }
    };
    if (scope == NormScope::none) return fit(table);
    NormParams params =
        scope == NormScope::train ? fit_normalization(table) : *whole_params;
    TrainedModel m = fit(apply_normalization(table, params));
    m.normalized = true;
    m.norm = params;
    return m;
}

void write_metrics_files(const fs::path& dir, const std::string& stem,
                         const ConfusionMatrix& cm, const MetricsReport& rep) {
    detail::write_text_file(dir / (stem + "_metrics.txt"), render_report(cm, rep));
    detail::write_text_file(dir / (stem + "_metrics.json"), metrics_to_json(rep).dump(2) + "\n");
    detail::write_text_file(dir / (stem + "_confusion.csv"), confusion_csv(cm));
}

int cmd_convert(const std::vector<std::string>& inputs, const fs::path& out,
                const std::string& format_name) {
    ImageFormat format = format_name == "png" ? ImageFormat::png : ImageFormat::pgm;
    const char* ext = format == ImageFormat::png ? ".png" : ".pgm";
    std::size_t written = 0, failed = 0;
    auto convert_one = [&](const fs::path& src, const fs::path& dst_dir) {
        try {
            auto bytes = detail::read_file_bytes(src);
            GrayImage img = bytes_to_image(bytes);
            fs::create_directories(dst_dir);
            write_image(img, dst_dir / (src.filename().string() + ext), format);
            ++written;
        } catch (const std::exception& ex) {
            std::cerr << "error: " << src.string() << ": " << ex.what() << "\n";
            ++failed;
        }
    };
    for (const auto& input : inputs) {
        fs::path p(input);
        if (fs::is_directory(p)) {
            std::vector<fs::path> files;
            for (const auto& e : fs::recursive_directory_iterator(p))
                if (e.is_regular_file()) files.push_back(e.path());
            std::sort(files.begin(), files.end());
            for (const auto& f : files)
                convert_one(f, out / fs::relative(f, p).parent_path());
        } else if (fs::is_regular_file(p)) {
            convert_one(p, out);
        } else {
            std::cerr << "error: no such file or directory: " << input << "\n";
            ++failed;
        }
    }
    std::cout << "wrote " << written << " images\n";
    return failed == 0 ? 0 : 1;
}

int cmd_extract(const fs::path& corpus, const fs::path& class_map_path, const fs::path& out_dir,
                const std::string& mode, const ExtractOptions& opts, bool engineer) {
    ClassMap class_map = load_class_map(class_map_path);
    auto entries = scan_corpus(corpus, class_map);
    ExtractionConfig cfg = to_extraction_config(opts);
    fs::create_directories(out_dir);
    std::vector<LabelMode> modes;
    if (mode == "both") {
        modes = {LabelMode::main, LabelMode::sub};
    } else {
        modes = {label_mode_from_string(mode)};
    }
    for (LabelMode m : modes) {
        FeatureTable table = extract_corpus(entries, cfg, m);
        if (engineer) table = engineer_table(table, cfg.transforms);
        fs::path csv = out_dir / ("features_" + to_string(m) + ".csv");
        write_csv(table, csv);
        std::cout << csv.string() << ": " << table.size() << " rows\n";
    }
    return 0;
}

int cmd_eda(const fs::path& csv, std::string x, std::string y, const fs::path& out_dir,
            const std::string& mode) {
    FeatureTable table = read_csv(csv, label_mode_from_string(mode));
    std::vector<std::pair<std::string, std::string>> pairs;
    if (x.empty() && y.empty()) {
        pairs = {{"gabor_entropy", "lbp_energy"}, {"gabor_entropy", "correlation"}};
    } else if (x.empty() || y.empty()) {
        throw std::runtime_error("--x and --y must be given together");
    } else {
        pairs = {{x, y}};
    }
    fs::create_directories(out_dir);
    for (const auto& [xf, yf] : pairs) {
        auto points = scatter_data(table, xf, yf);
        std::string stem = xf + "_vs_" + yf;
        detail::write_text_file(out_dir / (stem + ".csv"), scatter_csv(points, xf, yf));
        detail::write_text_file(out_dir / (stem + ".svg"), scatter_svg(points, xf, yf));
        std::cout << (out_dir / stem).string() << ".{csv,svg}: " << points.size()
                  << " points\n";
    }
    return 0;
}

int cmd_pca(const fs::path& csv, const fs::path& out_dir, double variance, int max_terms,
            const std::string& mode, bool class_indicators, bool covariance) {
    FeatureTable table = read_csv(csv, label_mode_from_string(mode));
    if (class_indicators) table = add_class_indicator_columns(table);
    PcaModel model =
        fit_pca(table, variance, covariance ? PcaMode::covariance : PcaMode::correlation);
    fs::create_directories(out_dir);
    save_pca(model, out_dir / "pca.json");
    std::string report = ranked_report_text(model, max_terms);
    detail::write_text_file(out_dir / "ranked_report.txt", report);
    std::cout << report;
    std::cout << "retained " << model.retained << " of " << model.components.size()
              << " components\n";
    return 0;
}

int cmd_train(const fs::path& csv, const std::string& kind_name, const fs::path& out_dir,
              std::uint64_t seed, double split, NormScope scope, const HyperOptions& hyper,
              const std::string& mode) {
    ModelKind kind = model_kind_from_string(kind_name);
    FeatureTable table = read_csv(csv, label_mode_from_string(mode));
    NormParams whole_params;
    if (scope == NormScope::whole) whole_params = fit_normalization(table);
    auto [train, test] = stratified_split(table, split, seed);
    TrainedModel model = fit_model(kind, train, hyper, seed, scope, &whole_params);
    fs::create_directories(out_dir);
    save_model(model, out_dir / (to_string(kind) + ".json"));
    ConfusionMatrix cm;
    MetricsReport rep = evaluate(model, test, &cm);
    write_metrics_files(out_dir, to_string(kind), cm, rep);
    std::printf("%s: train %zu, test %zu, accuracy %.4f, normalization %s\n",
                to_string(kind).c_str(), train.size(), test.size(), rep.accuracy,
                to_string(scope).c_str());
    return 0;
}

int cmd_validate(const fs::path& csv, const std::string& kind_name, int k, std::uint64_t seed,
                 const fs::path& out_dir, NormScope scope, const HyperOptions& hyper,
                 const std::string& mode) {
    ModelKind kind = model_kind_from_string(kind_name);
    FeatureTable table = read_csv(csv, label_mode_from_string(mode));
    NormParams whole_params;
    if (scope == NormScope::whole) whole_params = fit_normalization(table);
    Trainer trainer = [&](const FeatureTable& fold_train, std::uint64_t fold_seed) {
        return fit_model(kind, fold_train, hyper, fold_seed, scope, &whole_params);
    };
    CrossValResult cv = cross_validate(trainer, table, k, seed);
    fs::create_directories(out_dir);
    nlohmann::json j;
    j["aggregate"] = metrics_to_json(cv.aggregate);
    nlohmann::json folds = nlohmann::json::array();
    for (const auto& fr : cv.folds) folds.push_back(metrics_to_json(fr.metrics));
    j["folds"] = folds;
    detail::write_text_file(out_dir / (to_string(kind) + "_cv.json"), j.dump(2) + "\n");
    detail::write_text_file(out_dir / (to_string(kind) + "_cv.txt"),
                            render_report(cv.aggregate_confusion, cv.aggregate));
    for (std::size_t f = 0; f < cv.folds.size(); ++f)
        detail::write_text_file(
            out_dir / (to_string(kind) + "_fold" + std::to_string(f + 1) + "_metrics.txt"),
            render_report(cv.folds[f].confusion, cv.folds[f].metrics));
    std::printf("%s: %d-fold accuracy %.4f, normalization %s\n", to_string(kind).c_str(), k,
                cv.aggregate.accuracy, to_string(scope).c_str());
    return 0;
}

int cmd_pipeline(const fs::path& config_path) {
    RunConfig cfg = load_run_config(config_path);
    PipelineResult result = run_pipeline(cfg);
    std::cout << "corpus: " << result.corpus_size << " files, " << result.images_written
              << " images\n";
    for (const auto& [kind, acc] : result.test_accuracy)
        std::printf("%-12s test accuracy %.4f\n", to_string(kind).c_str(), acc);
    std::cout << "artifacts: " << result.run_dir.string() << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"binary texture analysis and malware family classification"};
    app.require_subcommand(1);

    auto* convert = app.add_subcommand("convert", "render binaries as grayscale images");
    std::vector<std::string> convert_inputs;
    std::string convert_out, convert_format = "pgm";
    convert->add_option("inputs", convert_inputs, "files or directories")->required();
    convert->add_option("--out", convert_out, "output directory")->required();
    convert->add_option("--format", convert_format, "pgm or png")
        ->check(CLI::IsMember({"pgm", "png"}));

    auto* extract = app.add_subcommand("extract", "extract texture features to CSV");
    std::string ex_corpus, ex_class_map, ex_out, ex_mode = "both";
    ExtractOptions ex_opts;
    bool ex_engineer = false;
    extract->add_option("--corpus", ex_corpus, "corpus root (family subdirectories)")
        ->required();
    extract->add_option("--class-map", ex_class_map, "family to class TSV")->required();
    extract->add_option("--out", ex_out, "output directory")->required();
    extract->add_option("--mode", ex_mode, "label mode: main, sub or both")
        ->check(CLI::IsMember({"main", "sub", "both"}));
    extract->add_flag("--engineer", ex_engineer, "append log/square/cube columns");
    add_extract_options(extract, ex_opts);

    auto* eda = app.add_subcommand("eda", "scatter plots of feature pairs");
    std::string eda_csv, eda_x, eda_y, eda_out, eda_mode = "main";
    eda->add_option("--csv", eda_csv, "feature CSV")->required();
    eda->add_option("--x", eda_x, "x feature (default pairs when omitted)");
    eda->add_option("--y", eda_y, "y feature");
    eda->add_option("--out", eda_out, "output directory")->required();
    eda->add_option("--mode", eda_mode, "label mode")->check(CLI::IsMember({"main", "sub"}));

    auto* pca = app.add_subcommand("pca", "principal component analysis and ranked report");
    std::string pca_csv, pca_out, pca_mode = "main";
    double pca_variance = 0.95;
    int pca_terms = 5;
    bool pca_indicators = false, pca_covariance = false;
    pca->add_option("--csv", pca_csv, "feature CSV")->required();
    pca->add_option("--out", pca_out, "output directory")->required();
    pca->add_option("--variance", pca_variance, "retained variance target")
        ->check(CLI::Range(0.0, 1.0));
    pca->add_option("--max-terms", pca_terms, "terms per report line")->check(CLI::Range(1, 64));
    pca->add_option("--mode", pca_mode, "label mode")->check(CLI::IsMember({"main", "sub"}));
    pca->add_flag("--include-class-indicators", pca_indicators,
                  "append one-hot class columns before fitting");
    pca->add_flag("--covariance", pca_covariance, "use covariance instead of correlation");

    auto* train = app.add_subcommand("train", "train one classifier on a stratified split");
    std::string tr_csv, tr_kind, tr_out, tr_mode = "main", tr_norm = "none";
    std::uint64_t tr_seed = 0;
    double tr_split = 0.2;
    HyperOptions tr_hyper;
    train->add_option("--csv", tr_csv, "feature CSV")->required();
    train->add_option("--model", tr_kind, "naive_bayes, logistic or forest")
        ->required()
        ->check(CLI::IsMember({"naive_bayes", "logistic", "forest"}));
    train->add_option("--out", tr_out, "output directory")->required();
    train->add_option("--seed", tr_seed, "random seed")->required();
    train->add_option("--split", tr_split, "held-out test fraction");
    train->add_option("--normalize", tr_norm,
                      "min-max scaling scope: none, train or whole")
        ->check(CLI::IsMember({"none", "train", "whole"}));
    train->add_option("--mode", tr_mode, "label mode")->check(CLI::IsMember({"main", "sub"}));
    add_hyper_options(train, tr_hyper);

    auto* validate = app.add_subcommand("validate", "k-fold cross-validation");
    std::string va_csv, va_kind, va_out, va_mode = "main", va_norm = "none";
    std::uint64_t va_seed = 0;
    int va_k = 2;
    HyperOptions va_hyper;
    validate->add_option("--csv", va_csv, "feature CSV")->required();
    validate->add_option("--model", va_kind, "naive_bayes, logistic or forest")
        ->required()
        ->check(CLI::IsMember({"naive_bayes", "logistic", "forest"}));
    validate->add_option("--out", va_out, "output directory")->required();
    validate->add_option("--seed", va_seed, "random seed")->required();
    validate->add_option("--k", va_k, "number of folds")->check(CLI::Range(2, 1000));
    validate->add_option("--normalize", va_norm,
                         "min-max scaling scope: none, train (per fold) or whole")
        ->check(CLI::IsMember({"none", "train", "whole"}));
    validate->add_option("--mode", va_mode, "label mode")
        ->check(CLI::IsMember({"main", "sub"}));
    add_hyper_options(validate, va_hyper);

    auto* pipeline = app.add_subcommand("pipeline", "full corpus-to-reports run");
    std::string pl_config;
    pipeline->add_option("--config", pl_config, "run configuration file")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (convert->parsed())
            return cmd_convert(convert_inputs, convert_out, convert_format);
        if (extract->parsed())
            return cmd_extract(ex_corpus, ex_class_map, ex_out, ex_mode, ex_opts, ex_engineer);
        if (eda->parsed()) return cmd_eda(eda_csv, eda_x, eda_y, eda_out, eda_mode);
        if (pca->parsed())
            return cmd_pca(pca_csv, pca_out, pca_variance, pca_terms, pca_mode, pca_indicators,
                           pca_covariance);
        if (train->parsed())
            return cmd_train(tr_csv, tr_kind, tr_out, tr_seed, tr_split,
                             norm_scope_from_string(tr_norm), tr_hyper, tr_mode);
        if (validate->parsed())
            return cmd_validate(va_csv, va_kind, va_k, va_seed, va_out,
                                norm_scope_from_string(va_norm), va_hyper, va_mode);
        if (pipeline->parsed()) return cmd_pipeline(pl_config);
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 1;
    }
    return 0;
}
