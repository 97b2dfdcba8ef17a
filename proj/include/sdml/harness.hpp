#pragma once

#include "sdml/classify.hpp"
#include "sdml/data.hpp"
#include "sdml/embedding.hpp"
#include "sdml/metric.hpp"
#include "sdml/neighborhood.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace sdml {

enum class DatasetKind { csv, kdd, kdd_surrogate };

std::string_view dataset_kind_name(DatasetKind kind);
DatasetKind parse_dataset_kind(std::string_view tag);

/// Every field has a default; a minimal JSON config is {"dataset": "file.csv"}.
struct ExperimentConfig {
    std::string dataset;
    DatasetKind dataset_kind = DatasetKind::csv;
    LabelColumn label_column = std::string();  // empty name: last column
    bool has_header = true;

    std::string kdd_categories;
    double kdd_rate = 0.01;
    std::vector<std::string> kdd_minority = {"U2R"};

    Backend method = Backend::lle;
    std::vector<Eigen::Index> d = {2};
    std::size_t k_graph = 10;
    std::optional<double> gamma;
    AutoencoderParams autoencoder;

    std::size_t neighborhood_k = 7;
    SimilarMode similar_mode = SimilarMode::farthest;

    double lambda = 0.1;
    std::vector<double> lambda_grid;  // non-empty: inner 3-fold selection
    double tol = 1e-6;
    int max_iter = 50;

    int folds = 10;
    std::size_t knn_k = 7;
    std::uint64_t seed = 1;
    bool standardize = true;
    double downsample_factor = 0.1;
    std::size_t downsample_threshold = 2000;
    bool strict_reference = false;

    std::vector<std::string> baselines;
    std::string out_dir = "out";

    /// Throws ConfigError on the first violated constraint.
    void validate() const;
};

ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& config);

/// Loads the configured dataset (CSV, raw KDD plus subsampling, or the KDD
/// surrogate plus subsampling).
Dataset load_dataset(const ExperimentConfig& config);

/// Method tags used in reports.
inline constexpr std::string_view kProposed = "proposed";
inline constexpr std::string_view kRawKnn = "raw-knn";
inline constexpr std::string_view kDrOnly = "dr-only";
inline constexpr std::string_view kDlsrOriginal = "dlsr-original";

struct FoldOutcome {
    int fold = 0;
    ConfusionMatrix confusion;
    double accuracy = 0.0;
    double macro_sensitivity = 0.0;
    double macro_specificity = 0.0;
    std::vector<std::optional<double>> sensitivity;  // per class
    std::vector<std::optional<double>> specificity;
    std::vector<double> objective_trace;
    double lambda = 0.0;
    std::size_t fit_rows = 0;
    std::size_t starved = 0;  // samples with empty balanced neighbourhoods
};

/// Results of one method at one latent dimension (d = 0 when the method has
/// no latent dimension).
struct DimensionResult {
    Eigen::Index d = 0;
    std::vector<FoldOutcome> folds;
    double mean_accuracy = 0.0;
    double mean_sensitivity = 0.0;
    double mean_specificity = 0.0;
    MeanConfusion mean_confusion;

    void aggregate();
};

struct MethodResult {
    std::string name;
    std::string backend;  // empty when no embedding is involved
    std::vector<DimensionResult> sweep;
    std::size_t best = 0;  // index into sweep: best mean accuracy, smallest d on ties

    const DimensionResult& best_result() const { return sweep.at(best); }
    void pick_best();
};

struct StageTiming {
    int fold = 0;
    std::string method;
    std::string stage;
    double seconds = 0.0;
};

struct EvaluationReport {
    std::string dataset;
    std::string config_json;
    std::size_t samples = 0;
    std::size_t features = 0;
    std::vector<std::string> class_names;
    std::vector<std::size_t> class_counts;
    double imbalance_ratio = 1.0;
    FoldPlan plan;
    std::vector<MethodResult> methods;
    std::vector<std::string> warnings;
    std::vector<StageTiming> timings;

    const MethodResult* find(std::string_view name) const;
    /// Competition ranks (1, 2, 2, 4) of the methods by best mean accuracy.
    std::vector<int> local_ranks(std::string_view metric = "accuracy") const;
};

/// Runs the proposed pipeline for every fold and every d, plus the configured
/// baselines, all on one shared fold plan.
EvaluationReport run_cv(const ExperimentConfig& config, const Dataset& ds);
EvaluationReport run_cv(const ExperimentConfig& config);

/// Baselines only, on the same fold plan run_cv would use.
EvaluationReport run_baselines(const ExperimentConfig& config, const Dataset& ds);

/// Side outputs of one pipeline run.
struct PipelineTrace {
    std::vector<std::string> warnings;
    std::vector<StageTiming> timings;
    std::vector<MetricModel> models;  // one per configured d
};

/// Single fold of the proposed pipeline at every configured d.
std::vector<FoldOutcome> run_pipeline(const ExperimentConfig& config, const Dataset& ds, const FoldPlan& plan, int fold,
                                      PipelineTrace* trace = nullptr);

/// Everything needed to reproduce every number of a report; no timings.
std::string results_json(const EvaluationReport& report);
EvaluationReport parse_results_json(std::string_view text);

std::string timing_json(const EvaluationReport& report);
std::string summary_markdown(const EvaluationReport& report);

/// results.json, timing.json, summary.md and <method>/confusion_<fold>.csv
/// (plus confusion_mean.csv) under `dir`.
void render_report(const EvaluationReport& report, const std::filesystem::path& dir, bool with_timing = true);

/// `x,y,label` rows, 12 significant digits.
void export_scatter(const Matrix& coords, std::span<const int> labels, const std::vector<std::string>& class_names,
                    const std::filesystem::path& path);

/// Writes scatter_original.csv, scatter_dlsr.csv and scatter_proposed.csv for
/// the whole dataset.
std::vector<std::filesystem::path> write_scatter_panels(const ExperimentConfig& config, const Dataset& ds,
                                                        const std::filesystem::path& dir);

/// Sample count, class count, feature count, imbalance ratio and class sizes.
std::string describe_dataset(const Dataset& ds);

}  // namespace sdml
