#include "sdml/errors.hpp"
#include "sdml/harness.hpp"

#include <CLI11.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

namespace {

/// Flags that override fields of the JSON config.
struct Overrides {
    std::optional<std::string> config;
    std::optional<std::string> dataset;
    std::optional<std::string> dataset_kind;
    std::optional<std::string> label_column;
    bool no_header = false;
    std::optional<std::string> method;
    std::vector<long> d;
    std::optional<std::size_t> k_graph;
    std::optional<double> gamma;
    std::optional<std::size_t> neighborhood_k;
    std::optional<std::string> similar_mode;
    std::optional<double> lambda;
    std::vector<double> lambda_grid;
    std::optional<int> folds;
    std::optional<std::size_t> knn_k;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::vector<std::string> baselines;
    bool strict_reference = false;
    bool no_standardize = false;

    void attach(CLI::App& app, bool with_baselines) {
        app.add_option("-c,--config", config, "JSON experiment config");
        app.add_option("--dataset", dataset, "CSV path (or raw KDD file)");
        app.add_option("--dataset-kind", dataset_kind, "csv, kdd or kdd-surrogate");
        app.add_option("--label-column", label_column, "label column name or zero-based index");
        app.add_flag("--no-header", no_header, "the CSV has no header row");
        app.add_option("--method", method, "pca, mds, isomap, lle, lda, kpca or autoencoder");
        app.add_option("--d", d, "latent dimensions to sweep")->delimiter(',');
        app.add_option("--k-graph", k_graph, "manifold neighbour count");
        app.add_option("--gamma", gamma, "RBF kernel width for kpca");
        app.add_option("--neighborhood-k", neighborhood_k, "similar/dissimilar set size");
        app.add_option("--similar-mode", similar_mode, "farthest or nearest");
        app.add_option("--lambda", lambda, "ridge weight");
        app.add_option("--lambda-grid", lambda_grid, "lambda candidates for inner 3-fold selection")->delimiter(',');
        app.add_option("--folds", folds, "cross-validation folds");
        app.add_option("--knn-k", knn_k, "neighbours for classification");
        app.add_option("--seed", seed, "random seed");
        app.add_option("--out-dir", out_dir, "output directory");
        app.add_flag("--strict-reference", strict_reference, "use only the downsampled rows as k-NN references");
        app.add_flag("--no-standardize", no_standardize, "skip feature standardization");
        if (with_baselines) {
            app.add_option("--baseline", baselines, "raw-knn, dr-only or dlsr-original")->delimiter(',');
        }
    }

    sdml::ExperimentConfig build() const {
        sdml::ExperimentConfig c = config ? sdml::load_config(*config) : sdml::ExperimentConfig{};
        if (dataset) c.dataset = *dataset;
        if (dataset_kind) c.dataset_kind = sdml::parse_dataset_kind(*dataset_kind);
        if (label_column) {
            const bool numeric = !label_column->empty() &&
                                 label_column->find_first_not_of("0123456789") == std::string::npos;
            if (numeric) {
                c.label_column = static_cast<std::size_t>(std::stoull(*label_column));
            } else {
                c.label_column = *label_column;
            }
        }
        if (no_header) c.has_header = false;
        if (method) c.method = sdml::parse_backend(*method);
        if (!d.empty()) c.d.assign(d.begin(), d.end());
        if (k_graph) c.k_graph = *k_graph;
        if (gamma) c.gamma = *gamma;
        if (neighborhood_k) c.neighborhood_k = *neighborhood_k;
        if (similar_mode) c.similar_mode = sdml::parse_similar_mode(*similar_mode);
        if (lambda) c.lambda = *lambda;
        if (!lambda_grid.empty()) c.lambda_grid = lambda_grid;
        if (folds) c.folds = *folds;
        if (knn_k) c.knn_k = *knn_k;
        if (seed) c.seed = *seed;
        if (out_dir) c.out_dir = *out_dir;
        if (!baselines.empty()) c.baselines = baselines;
        if (strict_reference) c.strict_reference = true;
        if (no_standardize) c.standardize = false;
        c.validate();
        return c;
    }
};

void print_warnings(const sdml::EvaluationReport& report) {
    for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw sdml::DataError("cannot open '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return text.str();
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Structural-neighbourhood metric learning toolkit"};
    app.require_subcommand(1);

    Overrides run_opts;
    auto* run = app.add_subcommand("run", "cross-validated proposed pipeline plus configured baselines");
    run_opts.attach(*run, true);

    Overrides base_opts;
    auto* baseline = app.add_subcommand("baseline", "baselines only, on the same folds");
    base_opts.attach(*baseline, true);

    Overrides scatter_opts;
    auto* scatter = app.add_subcommand("scatter", "2D scatter CSVs: original, dlsr and proposed panels");
    scatter_opts.attach(*scatter, false);

    Overrides inspect_opts;
    auto* inspect = app.add_subcommand("inspect-data", "dataset size, classes, features and imbalance ratio");
    inspect_opts.attach(*inspect, false);

    std::string results_path;
    std::string report_dir;
    auto* report = app.add_subcommand("report", "re-render summary and confusion CSVs from results.json");
    report->add_option("--results", results_path, "results.json from a previous run")->required();
    report->add_option("--out-dir", report_dir, "output directory (default: alongside results.json)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (run->parsed()) {
            const auto config = run_opts.build();
            const auto result = sdml::run_cv(config);
            sdml::render_report(result, config.out_dir);
            print_warnings(result);
            std::cout << sdml::summary_markdown(result);
        } else if (baseline->parsed()) {
            auto config = base_opts.build();
            if (config.baselines.empty()) config.baselines = {"raw-knn", "dr-only", "dlsr-original"};
            const auto result = sdml::run_baselines(config, sdml::load_dataset(config));
            sdml::render_report(result, config.out_dir);
            print_warnings(result);
            std::cout << sdml::summary_markdown(result);
        } else if (scatter->parsed()) {
            const auto config = scatter_opts.build();
            for (const auto& path : sdml::write_scatter_panels(config, sdml::load_dataset(config), config.out_dir)) {
                std::cout << path.string() << '\n';
            }
        } else if (inspect->parsed()) {
            const auto config = inspect_opts.build();
            std::cout << sdml::describe_dataset(sdml::load_dataset(config));
        } else if (report->parsed()) {
            const auto result = sdml::parse_results_json(read_file(results_path));
            const std::filesystem::path dir =
                report_dir.empty() ? std::filesystem::path(results_path).parent_path() : std::filesystem::path(report_dir);
            sdml::render_report(result, dir.empty() ? "." : dir, false);
            std::cout << sdml::summary_markdown(result);
        }
    } catch (const sdml::ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const sdml::DataError& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    } catch (const sdml::NumericError& e) {
        std::cerr << "numeric error: " << e.what() << '\n';
        return 4;
    } catch (const std::filesystem::filesystem_error& e) {
        std::cerr << "data error: " << e.what() << '\n';
        return 3;
    }
    return 0;
}
