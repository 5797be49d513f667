// End-to-end acceptance checks, one printed line per criterion.
// Exit status 0 only if every criterion passes.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "bintex/pipeline.hpp"
#include "test_util.hpp"

namespace fs = std::filesystem;
using namespace bintex;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
    bool ok = true;
    std::string detail;
};

std::string fmt(const char* pattern, double a, double b = 0, double c = 0) {
    char buf[160];
    std::snprintf(buf, sizeof(buf), pattern, a, b, c);
    return buf;
}

// ---------------------------------------------------------------- criterion 1

GlcmFeatures oracle_glcm_features(const std::vector<double>& p, int levels) {
    GlcmFeatures f;
    std::vector<double> pi(levels, 0.0), pj(levels, 0.0);
    for (int i = 0; i < levels; ++i)
        for (int j = 0; j < levels; ++j) {
            double v = p[static_cast<std::size_t>(i) * levels + j];
            f.energy += v * v;
            if (v > 0) f.entropy -= v * std::log2(v);
            f.contrast += v * (i - j) * (i - j);
            f.dissimilarity += v * std::abs(i - j);
            f.homogeneity += v / (1.0 + (i - j) * (i - j));
            pi[i] += v;
            pj[j] += v;
        }
    double mi = 0, mj = 0;
    for (int i = 0; i < levels; ++i) {
        mi += i * pi[i];
        mj += i * pj[i];
    }
    double vi = 0, vj = 0;
    for (int i = 0; i < levels; ++i) {
        vi += (i - mi) * (i - mi) * pi[i];
        vj += (i - mj) * (i - mj) * pj[i];
    }
    double denom = std::sqrt(vi) * std::sqrt(vj);
    if (denom == 0.0) {
        f.correlation = 1.0;
    } else {
        double cov = 0;
        for (int i = 0; i < levels; ++i)
            for (int j = 0; j < levels; ++j)
                cov += (i - mi) * (j - mj) * p[static_cast<std::size_t>(i) * levels + j];
        f.correlation = cov / denom;
    }
    return f;
}

Outcome criterion_glcm_oracle() {
    auto t0 = Clock::now();
    Rng rng(101);
    double max_diff = 0;
    const GlcmOffset extras[] = {{-1, 1}, {-1, 0}, {-1, -1}, {1, 2}};
    for (int trial = 0; trial < 500; ++trial) {
        int w = 2 + static_cast<int>(rng.bounded(7));
        int h = 2 + static_cast<int>(rng.bounded(7));
        int levels = 2 + static_cast<int>(rng.bounded(3));
        GrayImage img = testutil::random_image(w, h, rng);
        QuantImage q = quantize(img, levels);
        std::vector<GlcmOffset> offsets = {{0, 1}};
        for (const auto& e : extras)
            if (rng.bounded(2) == 0) offsets.push_back(e);
        bool symmetric = rng.bounded(2) == 0;

        Glcm g = compute_glcm(q, offsets, symmetric);

        std::vector<double> counts(static_cast<std::size_t>(levels) * levels, 0.0);
        double total = 0;
        for (int r = 0; r < h; ++r)
            for (int c = 0; c < w; ++c)
                for (const auto& off : offsets) {
                    int nr = r + off.drow, nc = c + off.dcol;
                    if (nr < 0 || nr >= h || nc < 0 || nc >= w) continue;
                    int a = q.at(r, c), b = q.at(nr, nc);
                    counts[static_cast<std::size_t>(a) * levels + b] += 1;
                    total += 1;
                    if (symmetric) {
                        counts[static_cast<std::size_t>(b) * levels + a] += 1;
                        total += 1;
                    }
                }
        for (double& v : counts) v /= total;

        for (int i = 0; i < levels; ++i)
            for (int j = 0; j < levels; ++j)
                max_diff = std::max(
                    max_diff, std::abs(g.p(i, j) - counts[static_cast<std::size_t>(i) * levels + j]));

        GlcmFeatures got = glcm_features(g);
        GlcmFeatures want = oracle_glcm_features(counts, levels);
        for (double d : {got.energy - want.energy, got.entropy - want.entropy,
                         got.contrast - want.contrast, got.dissimilarity - want.dissimilarity,
                         got.homogeneity - want.homogeneity,
                         got.correlation - want.correlation})
            max_diff = std::max(max_diff, std::abs(d));
    }
    double secs = seconds_since(t0);
    Outcome o;
    o.ok = max_diff <= 1e-12 && secs < 10.0;
    o.detail = fmt("500 images, max diff %.2e, %.2fs (limit 10s)", max_diff, secs);
    return o;
}

// ---------------------------------------------------------------- criterion 2

Outcome criterion_closed_forms() {
    Outcome o;
    auto expect = [&](bool cond, const std::string& msg) {
        if (!cond) {
            o.ok = false;
            if (!o.detail.empty()) o.detail += "; ";
            o.detail += msg;
        }
    };

    GrayImage flat(64, 64);
    std::fill(flat.pixels.begin(), flat.pixels.end(), std::uint8_t(200));
    ExtractionConfig cfg;
    GaborBank bank = build_gabor_bank(cfg.gabor_frequencies, cfg.gabor_orientations,
                                      cfg.gabor_sigma_factor);
    FeatureRecord rec = extract_features(flat, cfg, bank);
    expect(rec.value("energy") == 1.0, "energy != 1");
    expect(rec.value("entropy") == 0.0, "entropy != 0");
    expect(rec.value("contrast") == 0.0, "contrast != 0");
    expect(rec.value("dissimilarity") == 0.0, "dissimilarity != 0");
    expect(rec.value("homogeneity") == 1.0, "homogeneity != 1");
    expect(rec.value("correlation") == 1.0, "correlation != 1");
    expect(rec.value("lbp_energy") == 1.0, "lbp_energy != 1");
    expect(rec.value("lbp_entropy") == 0.0, "lbp_entropy != 0");
    expect(std::abs(rec.value("gabor_energy")) <= 1e-12, "gabor_energy not ~0");
    expect(rec.value("gabor_entropy") == 0.0, "gabor_entropy != 0");

    std::array<double, 256> uniform{};
    uniform.fill(1.0 / 256.0);
    LbpFeatures lf = lbp_stats_from_histogram(uniform);
    expect(std::abs(lf.lbp_entropy - 8.0) <= 1e-9,
           fmt("uniform LBP entropy %.12f", lf.lbp_entropy));

    GrayImage checker(2, 2);
    checker.pixels = {0, 255, 255, 0};
    GlcmFeatures anti = glcm_features(compute_glcm(quantize(checker, 2), {{0, 1}}, true));
    expect(std::abs(anti.correlation + 1.0) <= 1e-9,
           fmt("anti-diagonal correlation %.12f", anti.correlation));

    if (o.ok) o.detail = "constant-image tuple, uniform LBP entropy 8, anti-diagonal corr -1";
    return o;
}

// ---------------------------------------------------------------- criterion 3

Outcome criterion_pca() {
    auto t0 = Clock::now();
    const int n = 1000;
    Rng rng(303);
    std::vector<double> x(n), z(n);
    for (int i = 0; i < n; ++i) {
        x[i] = rng.normal();
        z[i] = rng.normal();
    }
    auto standardize = [&](std::vector<double>& v) {
        double mean = 0;
        for (double d : v) mean += d;
        mean /= n;
        double var = 0;
        for (double d : v) var += (d - mean) * (d - mean);
        var /= n;
        for (double& d : v) d = (d - mean) / std::sqrt(var);
    };
    standardize(x);
    standardize(z);
    double dot = 0;
    for (int i = 0; i < n; ++i) dot += x[i] * z[i];
    for (int i = 0; i < n; ++i) z[i] -= (dot / n) * x[i];
    standardize(z);
    // empirical correlation between x and y is exactly 0.9 by construction
    const double r = 0.9;
    std::vector<double> y(n);
    for (int i = 0; i < n; ++i) y[i] = r * x[i] + std::sqrt(1.0 - r * r) * z[i];

    FeatureTable table;
    table.schema = {"x", "y"};
    for (int i = 0; i < n; ++i) {
        FeatureRecord rec;
        rec.source_id = "s" + std::to_string(i);
        rec.family = "syn";
        rec.main_class = "Sample";
        rec.names = table.schema;
        rec.values = {x[i], y[i]};
        table.add(std::move(rec));
    }
    PcaModel model = fit_pca(table, 0.95, PcaMode::correlation);

    Outcome o;
    auto expect = [&](bool cond, const std::string& msg) {
        if (!cond) {
            o.ok = false;
            if (!o.detail.empty()) o.detail += "; ";
            o.detail += msg;
        }
    };
    const double want[2] = {1.9, 0.1};
    for (int k = 0; k < 2; ++k)
        expect(std::abs(model.eigenvalues[k] - want[k]) <= 0.05 * want[k],
               fmt("eigenvalue %.0f = %.6f", k, model.eigenvalues[k]));
    expect(model.retained == 1, "retained != 1 at target 0.95");

    double ortho = 0;
    for (std::size_t a = 0; a < model.components.size(); ++a)
        for (std::size_t b = 0; b < model.components.size(); ++b) {
            double d = 0;
            for (std::size_t f = 0; f < model.feature_names.size(); ++f)
                d += model.components[a][f] * model.components[b][f];
            ortho = std::max(ortho, std::abs(d - (a == b ? 1.0 : 0.0)));
        }
    expect(ortho <= 1e-8, fmt("orthonormality error %.2e", ortho));

    double recon = 0;
    for (int i = 0; i < 5; ++i) {
        const FeatureRecord& rec = table.records[static_cast<std::size_t>(i) * 199];
        std::size_t nf = model.feature_names.size();
        std::vector<double> std_vals(nf), scores(model.components.size(), 0.0);
        for (std::size_t f = 0; f < nf; ++f)
            std_vals[f] = (rec.value(model.feature_names[f]) - model.means[f]) / model.scales[f];
        for (std::size_t m = 0; m < model.components.size(); ++m)
            for (std::size_t f = 0; f < nf; ++f)
                scores[m] += model.components[m][f] * std_vals[f];
        for (std::size_t f = 0; f < nf; ++f) {
            double back = 0;
            for (std::size_t m = 0; m < model.components.size(); ++m)
                back += scores[m] * model.components[m][f];
            back = back * model.scales[f] + model.means[f];
            recon = std::max(recon,
                             std::abs(back - rec.value(model.feature_names[f])));
        }
    }
    expect(recon <= 1e-8, fmt("reconstruction error %.2e", recon));

    double secs = seconds_since(t0);
    expect(secs < 5.0, fmt("runtime %.2fs >= 5s", secs));
    if (o.ok)
        o.detail = fmt("eigenvalues %.4f/%.4f, retained 1, %.2fs", model.eigenvalues[0],
                       model.eigenvalues[1], secs);
    return o;
}

// ---------------------------------------------------------------- criterion 4

FeatureTable six_class_blobs() {
    FeatureTable table;
    for (int f = 0; f < 10; ++f) table.schema.push_back("f" + std::to_string(f));
    Rng rng(404);
    for (int c = 0; c < 6; ++c)
        for (int i = 0; i < 100; ++i) {
            FeatureRecord rec;
            rec.source_id = "c" + std::to_string(c) + "/" + std::to_string(i);
            rec.family = "fam" + std::to_string(c);
            rec.main_class = "C" + std::to_string(c);
            rec.names = table.schema;
            for (int f = 0; f < 10; ++f)
                rec.values.push_back((f == c ? 8.0 : 0.0) + rng.normal());
            table.add(std::move(rec));
        }
    return table;
}

Outcome criterion_classifiers() {
    auto t0 = Clock::now();
    FeatureTable table = six_class_blobs();
    auto [train, test] = stratified_split(table, 0.2, 42);

    Outcome o;
    auto expect = [&](bool cond, const std::string& msg) {
        if (!cond) {
            o.ok = false;
            if (!o.detail.empty()) o.detail += "; ";
            o.detail += msg;
        }
    };

    std::string accs;
    for (ModelKind kind : {ModelKind::naive_bayes, ModelKind::logistic, ModelKind::forest}) {
        Trainer trainer = [kind](const FeatureTable& t, std::uint64_t seed) {
            switch (kind) {
                case ModelKind::naive_bayes: return train_naive_bayes(t);
                case ModelKind::logistic: return train_logistic(t);
                default: return train_forest(t, {}, seed);
            }
        };
        TrainedModel model = trainer(train, 42);
        double split_acc = evaluate(model, test).accuracy;
        double cv_acc = cross_validate(trainer, table, 2, 42).aggregate.accuracy;
        expect(split_acc >= 0.95, to_string(kind) + fmt(" split accuracy %.4f < 0.95", split_acc));
        expect(std::abs(cv_acc - split_acc) <= 0.05,
               to_string(kind) + fmt(" cv %.4f vs split %.4f", cv_acc, split_acc));
        accs += (accs.empty() ? "" : ", ") + to_string(kind) +
                fmt(" %.3f/%.3f", split_acc, cv_acc);
    }
    double secs = seconds_since(t0);
    expect(secs < 60.0, fmt("runtime %.1fs >= 60s", secs));
    if (o.ok) o.detail = accs + fmt(" (split/cv), %.1fs", secs);
    return o;
}

// ---------------------------------------------------------------- criterion 5

Outcome criterion_gradient_check() {
    Rng rng(505);
    double max_rel = 0;
    for (int trial = 0; trial < 20; ++trial) {
        std::size_t n_classes = 2 + rng.bounded(4);
        std::size_t n_feat = 1 + rng.bounded(6);
        std::size_t n = 3 + rng.bounded(10);
        double l2 = std::array<double, 3>{0.0, 0.01, 0.1}[rng.bounded(3)];

        std::vector<std::vector<double>> x(n, std::vector<double>(n_feat));
        std::vector<std::size_t> y(n);
        for (auto& row : x)
            for (double& v : row) v = rng.uniform(-2.0, 2.0);
        for (auto& label : y) label = rng.bounded(n_classes);
        std::vector<std::vector<double>> w(n_classes, std::vector<double>(n_feat + 1));
        for (auto& row : w)
            for (double& v : row) v = rng.uniform(-1.0, 1.0);

        std::vector<std::vector<double>> grad;
        logistic_loss_and_gradient(w, x, y, l2, &grad);

        double num2 = 0, ana2 = 0, diff2 = 0;
        const double h = 1e-6;
        for (std::size_t c = 0; c < n_classes; ++c)
            for (std::size_t f = 0; f <= n_feat; ++f) {
                auto wp = w, wm = w;
                wp[c][f] += h;
                wm[c][f] -= h;
                double numeric = (logistic_loss_and_gradient(wp, x, y, l2, nullptr) -
                                  logistic_loss_and_gradient(wm, x, y, l2, nullptr)) /
                                 (2 * h);
                double analytic = grad[c][f];
                num2 += numeric * numeric;
                ana2 += analytic * analytic;
                diff2 += (numeric - analytic) * (numeric - analytic);
            }
        double rel = std::sqrt(diff2) / (std::sqrt(num2) + std::sqrt(ana2) + 1e-12);
        max_rel = std::max(max_rel, rel);
    }
    Outcome o;
    o.ok = max_rel < 1e-5;
    o.detail = fmt("20 configurations, max relative error %.2e", max_rel);
    return o;
}

// ------------------------------------------------------- criteria 6 and 8

std::map<std::string, std::vector<std::uint8_t>> snapshot_tree(const fs::path& root) {
    std::map<std::string, std::vector<std::uint8_t>> files;
    for (const auto& e : fs::recursive_directory_iterator(root))
        if (e.is_regular_file())
            files[fs::relative(e.path(), root).generic_string()] = testutil::slurp(e.path());
    return files;
}

struct PipelineSnapshots {
    bool ran = false;
    std::map<std::string, std::vector<std::uint8_t>> first, second;
};
PipelineSnapshots pipeline_snaps;

void write_synthetic_corpus(const fs::path& root, Rng& rng) {
    const char* families[6] = {"constbyte", "uniform", "periodic",
                               "sparse",    "ramp",    "twolevel"};
    for (int f = 0; f < 6; ++f) {
        fs::create_directories(root / families[f]);
        for (int i = 0; i < 60; ++i) {
            std::size_t n = 1024 + rng.bounded(1025);
            std::vector<std::uint8_t> b(n);
            switch (f) {
                case 0: {
                    std::uint8_t val = static_cast<std::uint8_t>(40 + 8 * (i % 20));
                    std::fill(b.begin(), b.end(), val);
                    break;
                }
                case 1:
                    for (auto& v : b) v = static_cast<std::uint8_t>(rng.bounded(256));
                    break;
                case 2: {
                    double period = 6.0 + static_cast<double>(i % 10);
                    for (std::size_t j = 0; j < n; ++j)
                        b[j] = static_cast<std::uint8_t>(
                            128.0 + 127.0 * std::sin(6.283185307179586 * j / period));
                    break;
                }
                case 3:
                    for (auto& v : b)
                        v = rng.bounded(16) == 0
                                ? static_cast<std::uint8_t>(1 + rng.bounded(255))
                                : 0;
                    break;
                case 4:
                    for (std::size_t j = 0; j < n; ++j)
                        b[j] = static_cast<std::uint8_t>(j * 255 / (n - 1));
                    break;
                default: {
                    std::uint8_t cur = 32;
                    for (auto& v : b) {
                        if (rng.bounded(8) == 0) cur = cur == 32 ? 224 : 32;
                        v = cur;
                    }
                }
            }
            testutil::spit(root / families[f] /
                               (std::string(families[f]) + "_" + std::to_string(i) + ".bin"),
                           b);
        }
    }
}

Outcome criterion_pipeline() {
    auto t0 = Clock::now();
    testutil::TempDir dir("bintex-acceptance-pipeline");
    Rng rng(606);
    write_synthetic_corpus(dir / "corpus", rng);
    testutil::spit(dir / "classes.tsv",
                   "constbyte\tConstant\nuniform\tNoise\nperiodic\tPeriodic\n"
                   "sparse\tSparse\nramp\tGradient\ntwolevel\tBlock\n");

    RunConfig cfg;
    cfg.corpus = dir / "corpus";
    cfg.class_map = dir / "classes.tsv";
    cfg.output_dir = dir / "out";
    cfg.seed = 7;

    PipelineResult result = run_pipeline(cfg);
    pipeline_snaps.first = snapshot_tree(result.run_dir);
    run_pipeline(cfg);
    pipeline_snaps.second = snapshot_tree(result.run_dir);
    pipeline_snaps.ran = true;

    Outcome o;
    auto expect = [&](bool cond, const std::string& msg) {
        if (!cond) {
            o.ok = false;
            if (!o.detail.empty()) o.detail += "; ";
            o.detail += msg;
        }
    };
    expect(result.corpus_size == 360 && result.images_written == 360,
           "corpus conversion incomplete");
    double rf_acc = -1;
    for (const auto& [kind, acc] : result.test_accuracy)
        if (kind == ModelKind::forest) rf_acc = acc;
    expect(rf_acc >= 0.90, fmt("forest test accuracy %.4f < 0.90", rf_acc));

    expect(pipeline_snaps.first.size() == pipeline_snaps.second.size(),
           "rerun artifact sets differ");
    std::size_t diffs = 0;
    for (const auto& [rel, bytes] : pipeline_snaps.first) {
        auto it = pipeline_snaps.second.find(rel);
        if (it == pipeline_snaps.second.end() || it->second != bytes) ++diffs;
    }
    expect(diffs == 0, fmt("%.0f artifacts changed between reruns", double(diffs)));

    double secs = seconds_since(t0);
    expect(secs < 300.0, fmt("runtime %.1fs >= 300s", secs));
    if (o.ok)
        o.detail = fmt("360 files, forest accuracy %.4f, rerun identical, %.1fs", rf_acc, secs);
    return o;
}

Outcome criterion_determinism() {
    Outcome o;
    if (!pipeline_snaps.ran) {
        o.ok = false;
        o.detail = "pipeline runs unavailable";
        return o;
    }
    std::size_t models = 0, csvs = 0, reports = 0, mismatched = 0;
    for (const auto& [rel, bytes] : pipeline_snaps.first) {
        bool is_model = rel.rfind("models/", 0) == 0 && rel.ends_with(".json");
        bool is_csv = rel.ends_with(".csv");
        bool is_report = rel.rfind("reports/", 0) == 0;
        if (!is_model && !is_csv && !is_report) continue;
        models += is_model;
        csvs += is_csv;
        reports += is_report;
        auto it = pipeline_snaps.second.find(rel);
        if (it == pipeline_snaps.second.end() || it->second != bytes) ++mismatched;
    }
    o.ok = models == 3 && csvs >= 4 && reports >= 10 && mismatched == 0;
    o.detail = fmt("%.0f model files, %.0f CSVs, %.0f reports byte-identical across runs",
                   double(models), double(csvs), double(reports));
    if (mismatched > 0) o.detail = fmt("%.0f artifacts differ between runs", double(mismatched));
    return o;
}

// ---------------------------------------------------------------- criterion 7

Outcome criterion_metrics_fuzz() {
    Rng rng(707);
    double max_err = 0;
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t k = 2 + rng.bounded(5);
        std::vector<std::string> labels;
        for (std::size_t i = 0; i < k; ++i) labels.push_back("L" + std::to_string(i));
        std::size_t n = 1 + rng.bounded(60);
        std::vector<std::string> actual(n), predicted(n);
        for (std::size_t i = 0; i < n; ++i) {
            actual[i] = labels[rng.bounded(k)];
            predicted[i] = rng.bounded(100) < 55 ? actual[i] : labels[rng.bounded(k)];
        }
        ConfusionMatrix cm = confusion(actual, predicted, labels);
        MetricsReport rep = metrics(cm);

        std::size_t correct = 0;
        for (std::size_t i = 0; i < n; ++i) correct += actual[i] == predicted[i];
        max_err = std::max(max_err,
                           std::abs(rep.accuracy * static_cast<double>(n) -
                                    static_cast<double>(correct)));
        max_err = std::max(max_err, std::abs(rep.weighted_recall - rep.accuracy));

        for (const auto& m : rep.per_class) {
            std::size_t tp = 0, fp = 0, fn = 0;
            for (std::size_t i = 0; i < n; ++i) {
                tp += actual[i] == m.label && predicted[i] == m.label;
                fp += actual[i] != m.label && predicted[i] == m.label;
                fn += actual[i] == m.label && predicted[i] != m.label;
            }
            if (tp + fp == 0) {
                if (!m.precision_undefined || m.precision != 0.0) return {false, "precision flag"};
            } else {
                max_err = std::max(
                    max_err, std::abs(m.precision - double(tp) / double(tp + fp)));
                if (m.precision_undefined) return {false, "spurious precision flag"};
            }
            if (tp + fn == 0) {
                if (!m.recall_undefined || m.recall != 0.0) return {false, "recall flag"};
            } else {
                max_err =
                    std::max(max_err, std::abs(m.recall - double(tp) / double(tp + fn)));
                if (m.recall_undefined) return {false, "spurious recall flag"};
            }
            if (m.support != tp + fn) return {false, "support mismatch"};
        }
    }
    Outcome o;
    o.ok = max_err <= 1e-12;
    o.detail = fmt("200 matrices, max deviation %.2e", max_err);
    return o;
}

// ---------------------------------------------------------------- criterion 9

Outcome criterion_report_fidelity() {
    PcaModel model;
    model.feature_names = {"alpha", "beta", "gamma", "delta", "epsilon", "zeta"};
    model.means.assign(6, 0.0);
    model.scales.assign(6, 1.0);
    const double a = 1.0 / std::sqrt(6.0), b = 1.0 / std::sqrt(12.0);
    model.components = {
        {a, a, a, a, a, a},
        {a, -a, a, -a, a, -a},
        {-b, -b, 2 * b, -b, -b, 2 * b},
    };
    model.eigenvalues = {3.0, 2.0, 1.0, 0.0, 0.0, 0.0};
    model.retained = 3;

    std::string got = ranked_report_text(model, 5);
    auto bytes = testutil::slurp(fs::path(BINTEX_GOLDEN_DIR) / "ranked_report.txt");
    std::string want(bytes.begin(), bytes.end());

    Outcome o;
    o.ok = got == want;
    o.detail = o.ok ? "byte-exact against golden fixture"
                    : "rendered report differs from golden fixture:\n" + got;
    return o;
}

} // namespace

int main() {
    struct Entry {
        int id;
        const char* title;
        Outcome (*run)();
    };
    const Entry entries[] = {
        {1, "GLCM and features match a pair-enumeration oracle", criterion_glcm_oracle},
        {2, "closed-form feature values", criterion_closed_forms},
        {3, "PCA recovers a known 2-D correlation structure", criterion_pca},
        {4, "classifiers separate six synthetic classes", criterion_classifiers},
        {5, "logistic gradient matches finite differences", criterion_gradient_check},
        {6, "end-to-end pipeline on a synthetic corpus", criterion_pipeline},
        {7, "metrics match raw-pair formulas under fuzzing", criterion_metrics_fuzz},
        {8, "identical seeds give byte-identical artifacts", criterion_determinism},
        {9, "ranked report matches the golden fixture", criterion_report_fidelity},
    };
    int failed = 0;
    for (const auto& e : entries) {
        Outcome o;
        try {
            o = e.run();
        } catch (const std::exception& ex) {
            o.ok = false;
            o.detail = std::string("exception: ") + ex.what();
        }
        std::printf("[%s] criterion %d: %s%s%s\n", o.ok ? "PASS" : "FAIL", e.id, e.title,
                    o.detail.empty() ? "" : " — ", o.detail.c_str());
        std::fflush(stdout);
        if (!o.ok) ++failed;
    }
    std::printf("%d/9 criteria passed\n", 9 - failed);
    return failed == 0 ? 0 : 1;
}
