#include "sdml/errors.hpp"
#include "sdml/harness.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

namespace sdml {

namespace {

enum Stream : std::uint64_t { kDownsample = 1, kEmbed = 2, kInnerFolds = 3, kFolds = 4, kScatter = 5 };

class StageClock {
public:
    StageClock(PipelineTrace* trace, int fold, std::string_view method, std::string_view stage)
        : trace_(trace), fold_(fold), method_(method), stage_(stage), start_(std::chrono::steady_clock::now()) {}
    ~StageClock() {
        if (!trace_) return;
        const std::chrono::duration<double> elapsed = std::chrono::steady_clock::now() - start_;
        trace_->timings.push_back({fold_, std::string(method_), std::string(stage_), elapsed.count()});
    }
    StageClock(const StageClock&) = delete;
    StageClock& operator=(const StageClock&) = delete;

private:
    PipelineTrace* trace_;
    int fold_;
    std::string_view method_;
    std::string_view stage_;
    std::chrono::steady_clock::time_point start_;
};

/// Runs `fn`, timing it and prefixing any library error with where it happened.
template <typename F>
auto stage(PipelineTrace* trace, int fold, std::string_view method, std::string_view name, F&& fn) {
    StageClock clock(trace, fold, method, name);
    const std::string where = "fold " + std::to_string(fold) + ", " + std::string(method) + ", " + std::string(name) + ": ";
    try {
        return fn();
    } catch (const ConfigError& e) {
        throw ConfigError(where + e.what());
    } catch (const DataError& e) {
        throw DataError(where + e.what());
    } catch (const NumericError& e) {
        throw NumericError(where + e.what());
    }
}

void warn(PipelineTrace* trace, std::string message) {
    if (trace) trace->warnings.push_back(std::move(message));
}

Matrix rows_of(const Matrix& x, std::span<const std::size_t> rows) {
    Matrix out(static_cast<Eigen::Index>(rows.size()), x.cols());
    for (std::size_t r = 0; r < rows.size(); ++r) out.row(static_cast<Eigen::Index>(r)) = x.row(static_cast<Eigen::Index>(rows[r]));
    return out;
}

std::vector<int> labels_of(std::span<const int> labels, std::span<const std::size_t> rows) {
    std::vector<int> out;
    out.reserve(rows.size());
    for (std::size_t r : rows) out.push_back(labels[r]);
    return out;
}

bool is_nested(Backend b) { return b != Backend::autoencoder; }

bool maps_new_rows(Backend b) {
    return b == Backend::pca || b == Backend::lda || b == Backend::kpca || b == Backend::autoencoder;
}

struct FoldData {
    Matrix train_x;
    std::vector<int> train_y;
    Matrix test_x;
    std::vector<int> test_y;
    Matrix fit_x;  // downsampled training rows used for embedding and fitting
    std::vector<int> fit_y;
};

FoldData prepare_fold(const ExperimentConfig& config, const Dataset& ds, const FoldPlan& plan, int fold,
                      PipelineTrace* trace) {
    FoldData f;
    const auto train_idx = plan.train_indices(fold);
    const auto test_idx = plan.test_indices(fold);
    if (train_idx.empty() || test_idx.empty()) throw DataError("fold " + std::to_string(fold) + " is empty");
    f.train_y = labels_of(ds.labels, train_idx);
    f.test_y = labels_of(ds.labels, test_idx);
    stage(trace, fold, "shared", "standardize", [&] {
        f.train_x = rows_of(ds.features, train_idx);
        f.test_x = rows_of(ds.features, test_idx);
        if (config.standardize) {
            const auto stats = fit_standardizer(f.train_x);
            f.train_x = stats.apply(f.train_x);
            f.test_x = stats.apply(f.test_x);
        }
        return 0;
    });
    stage(trace, fold, "shared", "downsample", [&] {
        if (train_idx.size() > config.downsample_threshold) {
            const auto keep = stratified_downsample_indices(f.train_y, ds.num_classes(), config.downsample_factor,
                                                            derive_seed(config.seed, static_cast<std::uint64_t>(fold), kDownsample));
            f.fit_x = rows_of(f.train_x, keep);
            f.fit_y = labels_of(f.train_y, keep);
        } else {
            f.fit_x = f.train_x;
            f.fit_y = f.train_y;
        }
        return 0;
    });
    return f;
}

EmbedParams embed_params(const ExperimentConfig& config, Eigen::Index d, std::uint64_t seed) {
    EmbedParams p;
    p.d = d;
    p.k_graph = config.k_graph;
    p.gamma = config.gamma;
    p.autoencoder = config.autoencoder;
    p.seed = seed;
    return p;
}

/// One embedding per configured d. Spectral backends are solved once at the
/// largest d and sliced.
std::vector<Embedding> sweep_embeddings(const ExperimentConfig& config, const Matrix& x, std::span<const int> labels,
                                        int fold, PipelineTrace* trace, std::string_view method) {
    const auto seed = derive_seed(config.seed, static_cast<std::uint64_t>(fold), kEmbed);
    std::vector<Embedding> out;
    auto record = [&](const Embedding& e) {
        for (const auto& w : e.warnings) warn(trace, "fold " + std::to_string(fold) + ": " + w);
    };
    if (is_nested(config.method)) {
        const Eigen::Index top = *std::max_element(config.d.begin(), config.d.end());
        const Embedding full = stage(trace, fold, method, "embed",
                                     [&] { return embed(x, labels, config.method, embed_params(config, top, seed)); });
        record(full);
        for (auto d : config.d) out.push_back(full.leading(std::min(d, full.d)));
    } else {
        for (auto d : config.d) {
            out.push_back(stage(trace, fold, method, "embed",
                                [&] { return embed(x, labels, config.method, embed_params(config, d, seed)); }));
            record(out.back());
        }
    }
    return out;
}

FoldOutcome score(int fold, std::span<const int> truth, std::span<const int> predicted, const Dataset& ds) {
    FoldOutcome o;
    o.fold = fold;
    o.confusion = confusion(truth, predicted, ds.num_classes(), ds.class_names);
    o.accuracy = accuracy(o.confusion);
    o.macro_sensitivity = macro_sensitivity(o.confusion).value;
    o.macro_specificity = macro_specificity(o.confusion).value;
    for (int c = 0; c < ds.num_classes(); ++c) {
        o.sensitivity.push_back(sensitivity(o.confusion, c));
        o.specificity.push_back(specificity(o.confusion, c));
    }
    return o;
}

FitOptions fit_options(const ExperimentConfig& config, double lambda) {
    return {lambda, config.tol, config.max_iter};
}

/// Structural fit on fit_x, then k-NN of test_x against the transformed
/// reference rows.
struct StructuralRun {
    MetricModel model;
    std::vector<int> predicted;
    std::size_t starved = 0;
};

StructuralRun structural_run(const ExperimentConfig& config, const Matrix& fit_x, std::span<const int> fit_y,
                             const Matrix& coords, const Matrix& ref_x, std::span<const int> ref_y,
                             const Matrix& test_x, double lambda, int fold, PipelineTrace* trace) {
    StructuralRun run;
    const auto targets = stage(trace, fold, kProposed, "neighborhood", [&] {
        const auto sets = build_sets(coords, fit_y, config.neighborhood_k, config.similar_mode);
        run.starved = sets.starved().size();
        return build_targets(sets, sets.size());
    });
    run.model = stage(trace, fold, kProposed, "fit", [&] { return fit_structural(fit_x, targets, fit_options(config, lambda)); });
    const auto [ref_t, test_t] = stage(trace, fold, kProposed, "transform", [&] {
        return std::pair{transform(run.model, ref_x), transform(run.model, test_x)};
    });
    run.predicted = stage(trace, fold, kProposed, "classify", [&] {
        return knn_predict(ref_t, ref_y, test_t, std::min(config.knn_k, static_cast<std::size_t>(ref_t.rows())));
    });
    return run;
}

/// Inner stratified 3-fold selection over the lambda grid; ties go to the
/// smaller lambda.
template <typename Evaluate>
double select_lambda(const ExperimentConfig& config, std::span<const int> labels, int num_classes, int fold,
                     Evaluate&& evaluate) {
    if (config.lambda_grid.empty()) return config.lambda;
    std::vector<double> grid = config.lambda_grid;
    std::sort(grid.begin(), grid.end());
    const int inner_k = std::min<int>(3, static_cast<int>(labels.size()));
    const auto inner = stratified_kfold(labels, num_classes, inner_k,
                                        derive_seed(config.seed, static_cast<std::uint64_t>(fold), kInnerFolds));
    double best_lambda = grid.front();
    double best_score = -1.0;
    for (double lambda : grid) {
        double total = 0.0;
        for (int f = 0; f < inner_k; ++f) total += evaluate(lambda, inner.train_indices(f), inner.test_indices(f));
        const double mean = total / inner_k;
        if (mean > best_score) {
            best_score = mean;
            best_lambda = lambda;
        }
    }
    return best_lambda;
}

double hit_rate(std::span<const int> truth, std::span<const int> predicted) {
    std::size_t hits = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == predicted[i];
    return truth.empty() ? 0.0 : static_cast<double>(hits) / static_cast<double>(truth.size());
}

struct FoldMethods {
    bool proposed = false;
    bool raw = false;
    bool dr_only = false;
    bool dlsr = false;
};

struct FoldEvaluation {
    std::vector<FoldOutcome> proposed;  // per d
    std::vector<FoldOutcome> dr_only;   // per d
    std::optional<FoldOutcome> raw;
    std::optional<FoldOutcome> dlsr;
};

FoldEvaluation evaluate_fold(const ExperimentConfig& config, const Dataset& ds, const FoldPlan& plan, int fold,
                             const FoldMethods& which, PipelineTrace* trace) {
    FoldEvaluation out;
    const FoldData f = prepare_fold(config, ds, plan, fold, trace);
    const Matrix& ref_x = config.strict_reference ? f.fit_x : f.train_x;
    const std::vector<int>& ref_y = config.strict_reference ? f.fit_y : f.train_y;
    const std::size_t knn_k = std::min(config.knn_k, ref_y.size());
    if (knn_k < config.knn_k) warn(trace, "fold " + std::to_string(fold) + ": knn_k reduced to reference size");

    std::vector<Embedding> embeddings;
    if (which.proposed || (which.dr_only && maps_new_rows(config.method))) {
        embeddings = sweep_embeddings(config, f.fit_x, f.fit_y, fold, trace, kProposed);
    }

    if (which.proposed) {
        for (std::size_t di = 0; di < config.d.size(); ++di) {
            const Matrix& coords = embeddings[di].coords;
            const double lambda = stage(trace, fold, kProposed, "select-lambda", [&] {
                return select_lambda(config, f.fit_y, ds.num_classes(), fold,
                                     [&](double l, const std::vector<std::size_t>& tr, const std::vector<std::size_t>& te) {
                                         const Matrix tr_x = rows_of(f.fit_x, tr);
                                         const auto tr_y = labels_of(f.fit_y, tr);
                                         const auto run = structural_run(config, tr_x, tr_y, rows_of(coords, tr), tr_x, tr_y,
                                                                         rows_of(f.fit_x, te), l, fold, nullptr);
                                         return hit_rate(labels_of(f.fit_y, te), run.predicted);
                                     });
            });
            const auto run = structural_run(config, f.fit_x, f.fit_y, coords, ref_x, ref_y, f.test_x, lambda, fold, trace);
            FoldOutcome o = score(fold, f.test_y, run.predicted, ds);
            o.objective_trace = run.model.objective_trace;
            o.lambda = lambda;
            o.fit_rows = f.fit_y.size();
            o.starved = run.starved;
            if (run.starved > 0) {
                warn(trace, "fold " + std::to_string(fold) + ": " + std::to_string(run.starved) +
                                " training sample(s) have empty balanced neighbourhoods");
            }
            if (!run.model.converged) {
                warn(trace, "fold " + std::to_string(fold) + ": metric fit stopped at max_iter without converging");
            }
            if (trace) trace->models.push_back(run.model);
            out.proposed.push_back(std::move(o));
        }
    }

    if (which.raw) {
        const auto predicted = stage(trace, fold, kRawKnn, "classify", [&] {
            return knn_predict(f.train_x, f.train_y, f.test_x, std::min(config.knn_k, f.train_y.size()));
        });
        out.raw = score(fold, f.test_y, predicted, ds);
    }

    if (which.dr_only) {
        if (maps_new_rows(config.method)) {
            for (const auto& e : embeddings) {
                const auto [ref_e, test_e] = stage(trace, fold, kDrOnly, "transform",
                                                   [&] { return std::pair{e.map(ref_x), e.map(f.test_x)}; });
                const auto predicted = stage(trace, fold, kDrOnly, "classify",
                                             [&] { return knn_predict(ref_e, ref_y, test_e, knn_k); });
                out.dr_only.push_back(score(fold, f.test_y, predicted, ds));
            }
        } else {
            // No out-of-sample map: embed the fitting rows and the unlabeled
            // test rows together, then classify within that embedding.
            Matrix stacked(f.fit_x.rows() + f.test_x.rows(), f.fit_x.cols());
            stacked << f.fit_x, f.test_x;
            const auto joint = sweep_embeddings(config, stacked, {}, fold, trace, kDrOnly);
            const Eigen::Index n_fit = f.fit_x.rows();
            for (const auto& e : joint) {
                const auto predicted = stage(trace, fold, kDrOnly, "classify", [&] {
                    return knn_predict(e.coords.topRows(n_fit), f.fit_y, e.coords.bottomRows(f.test_x.rows()),
                                       std::min(config.knn_k, f.fit_y.size()));
                });
                out.dr_only.push_back(score(fold, f.test_y, predicted, ds));
            }
        }
    }

    if (which.dlsr) {
        const double lambda = stage(trace, fold, kDlsrOriginal, "select-lambda", [&] {
            return select_lambda(config, f.fit_y, ds.num_classes(), fold,
                                 [&](double l, const std::vector<std::size_t>& tr, const std::vector<std::size_t>& te) {
                                     const Matrix tr_x = rows_of(f.fit_x, tr);
                                     const auto tr_y = labels_of(f.fit_y, tr);
                                     const auto model = fit_dlsr_original(tr_x, tr_y, ds.num_classes(), fit_options(config, l));
                                     const auto predicted = knn_predict(transform(model, tr_x), tr_y,
                                                                        transform(model, rows_of(f.fit_x, te)),
                                                                        std::min(config.knn_k, tr_y.size()));
                                     return hit_rate(labels_of(f.fit_y, te), predicted);
                                 });
        });
        const auto model = stage(trace, fold, kDlsrOriginal, "fit", [&] {
            return fit_dlsr_original(f.fit_x, f.fit_y, ds.num_classes(), fit_options(config, lambda));
        });
        const auto predicted = stage(trace, fold, kDlsrOriginal, "classify", [&] {
            return knn_predict(transform(model, ref_x), ref_y, transform(model, f.test_x), knn_k);
        });
        FoldOutcome o = score(fold, f.test_y, predicted, ds);
        o.objective_trace = model.objective_trace;
        o.lambda = lambda;
        o.fit_rows = f.fit_y.size();
        out.dlsr = std::move(o);
    }
    return out;
}

FoldPlan plan_for(const ExperimentConfig& config, const Dataset& ds) {
    return stratified_kfold(ds, config.folds, derive_seed(config.seed, 0, kFolds));
}

EvaluationReport empty_report(const ExperimentConfig& config, const Dataset& ds) {
    EvaluationReport r;
    r.dataset = ds.source_id;
    r.config_json = config_to_json(config);
    r.samples = ds.rows();
    r.features = ds.num_features();
    r.class_names = ds.class_names;
    r.class_counts = ds.class_counts();
    r.imbalance_ratio = imbalance_ratio(ds);
    r.plan = plan_for(config, ds);
    return r;
}

EvaluationReport evaluate(const ExperimentConfig& config, const Dataset& ds, FoldMethods which) {
    config.validate();
    EvaluationReport report = empty_report(config, ds);
    PipelineTrace trace;

    MethodResult proposed{std::string(kProposed), std::string(backend_name(config.method)), {}, 0};
    MethodResult dr{std::string(kDrOnly), std::string(backend_name(config.method)), {}, 0};
    MethodResult raw{std::string(kRawKnn), "", {DimensionResult{}}, 0};
    MethodResult dlsr{std::string(kDlsrOriginal), "", {DimensionResult{}}, 0};
    for (auto d : config.d) {
        proposed.sweep.push_back(DimensionResult{d, {}, 0, 0, 0, {}});
        dr.sweep.push_back(DimensionResult{d, {}, 0, 0, 0, {}});
    }

    for (int fold = 0; fold < config.folds; ++fold) {
        auto result = evaluate_fold(config, ds, report.plan, fold, which, &trace);
        for (std::size_t di = 0; di < result.proposed.size(); ++di) proposed.sweep[di].folds.push_back(std::move(result.proposed[di]));
        for (std::size_t di = 0; di < result.dr_only.size(); ++di) dr.sweep[di].folds.push_back(std::move(result.dr_only[di]));
        if (result.raw) raw.sweep[0].folds.push_back(std::move(*result.raw));
        if (result.dlsr) dlsr.sweep[0].folds.push_back(std::move(*result.dlsr));
    }

    auto finish = [&](MethodResult& m) {
        for (auto& s : m.sweep) s.aggregate();
        m.pick_best();
        report.methods.push_back(std::move(m));
    };
    if (which.proposed) finish(proposed);
    for (const auto& name : config.baselines) {
        if (name == kRawKnn && which.raw) finish(raw);
        if (name == kDrOnly && which.dr_only) finish(dr);
        if (name == kDlsrOriginal && which.dlsr) finish(dlsr);
    }

    // Identical warnings across folds collapse into one line with a count.
    std::vector<std::string> unique;
    std::vector<std::size_t> counts;
    for (const auto& w : trace.warnings) {
        const auto it = std::find(unique.begin(), unique.end(), w);
        if (it == unique.end()) {
            unique.push_back(w);
            counts.push_back(1);
        } else {
            ++counts[static_cast<std::size_t>(it - unique.begin())];
        }
    }
    for (std::size_t i = 0; i < unique.size(); ++i) {
        report.warnings.push_back(counts[i] > 1 ? unique[i] + " (x" + std::to_string(counts[i]) + ")" : unique[i]);
    }
    report.timings = std::move(trace.timings);
    return report;
}

FoldMethods baselines_of(const ExperimentConfig& config) {
    FoldMethods which;
    for (const auto& b : config.baselines) {
        which.raw |= b == kRawKnn;
        which.dr_only |= b == kDrOnly;
        which.dlsr |= b == kDlsrOriginal;
    }
    return which;
}

}  // namespace

void DimensionResult::aggregate() {
    if (folds.empty()) return;
    double acc = 0.0;
    double sen = 0.0;
    double spc = 0.0;
    std::vector<ConfusionMatrix> cms;
    for (const auto& f : folds) {
        acc += f.accuracy;
        sen += f.macro_sensitivity;
        spc += f.macro_specificity;
        cms.push_back(f.confusion);
    }
    const auto k = static_cast<double>(folds.size());
    mean_accuracy = acc / k;
    mean_sensitivity = sen / k;
    mean_specificity = spc / k;
    mean_confusion = sdml::mean_confusion(cms);
}

void MethodResult::pick_best() {
    best = 0;
    for (std::size_t i = 1; i < sweep.size(); ++i) {
        const auto& cand = sweep[i];
        const auto& cur = sweep[best];
        if (cand.mean_accuracy > cur.mean_accuracy || (cand.mean_accuracy == cur.mean_accuracy && cand.d < cur.d)) best = i;
    }
}

const MethodResult* EvaluationReport::find(std::string_view name) const {
    for (const auto& m : methods) {
        if (m.name == name) return &m;
    }
    return nullptr;
}

std::vector<int> EvaluationReport::local_ranks(std::string_view metric) const {
    auto value = [&](const MethodResult& m) {
        const auto& r = m.best_result();
        if (metric == "sensitivity") return r.mean_sensitivity;
        if (metric == "specificity") return r.mean_specificity;
        return r.mean_accuracy;
    };
    std::vector<int> ranks;
    for (const auto& m : methods) {
        int rank = 1;
        for (const auto& other : methods) rank += value(other) > value(m);
        ranks.push_back(rank);
    }
    return ranks;
}

std::vector<FoldOutcome> run_pipeline(const ExperimentConfig& config, const Dataset& ds, const FoldPlan& plan, int fold,
                                      PipelineTrace* trace) {
    config.validate();
    if (fold < 0 || fold >= plan.k) throw ConfigError("fold " + std::to_string(fold) + " out of range");
    FoldMethods which;
    which.proposed = true;
    return evaluate_fold(config, ds, plan, fold, which, trace).proposed;
}

EvaluationReport run_cv(const ExperimentConfig& config, const Dataset& ds) {
    FoldMethods which = baselines_of(config);
    which.proposed = true;
    return evaluate(config, ds, which);
}

EvaluationReport run_cv(const ExperimentConfig& config) { return run_cv(config, load_dataset(config)); }

EvaluationReport run_baselines(const ExperimentConfig& config, const Dataset& ds) {
    if (config.baselines.empty()) throw ConfigError("no baselines configured");
    return evaluate(config, ds, baselines_of(config));
}

std::vector<std::filesystem::path> write_scatter_panels(const ExperimentConfig& config, const Dataset& ds,
                                                        const std::filesystem::path& dir) {
    config.validate();
    Matrix x = ds.features;
    if (config.standardize) x = fit_standardizer(x).apply(x);
    if (x.cols() < 2) throw DataError("scatter needs at least two features");

    std::vector<std::size_t> fit_rows(ds.rows());
    for (std::size_t i = 0; i < fit_rows.size(); ++i) fit_rows[i] = i;
    if (ds.rows() > config.downsample_threshold) {
        fit_rows = stratified_downsample_indices(ds.labels, ds.num_classes(), config.downsample_factor,
                                                 derive_seed(config.seed, 0, kScatter));
    }
    const Matrix fit_x = rows_of(x, fit_rows);
    const auto fit_y = labels_of(ds.labels, fit_rows);
    const FitOptions options = fit_options(config, config.lambda);

    const auto dlsr = fit_dlsr_original(fit_x, fit_y, ds.num_classes(), options);
    const auto e = embed(fit_x, fit_y, config.method,
                         embed_params(config, config.d.front(), derive_seed(config.seed, 0, kScatter)));
    const auto sets = build_sets(e.coords, fit_y, config.neighborhood_k, config.similar_mode);
    const auto structural = fit_structural(fit_x, build_targets(sets, sets.size()), options);

    std::filesystem::create_directories(dir);
    const std::vector<std::pair<std::string, Matrix>> panels = {
        {"original", pca(x, 2).coords},
        {"dlsr", pca(transform(dlsr, x), 2).coords},
        {"proposed", pca(transform(structural, x), 2).coords},
    };
    std::vector<std::filesystem::path> written;
    for (const auto& [name, coords] : panels) {
        written.push_back(dir / ("scatter_" + name + ".csv"));
        export_scatter(coords, ds.labels, ds.class_names, written.back());
    }
    return written;
}

}  // namespace sdml
