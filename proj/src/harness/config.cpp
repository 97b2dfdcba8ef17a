#include "sdml/errors.hpp"
#include "sdml/harness.hpp"

#include "../data/text.hpp"

#include <json.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

namespace sdml {

using nlohmann::json;

namespace {

const std::set<std::string> kKnownKeys = {
    "dataset", "dataset_kind", "label_column", "has_header", "kdd_categories", "kdd_rate", "kdd_minority",
    "method", "d", "k_graph", "gamma", "autoencoder", "neighborhood_k", "similar_mode", "lambda", "lambda_grid",
    "tol", "max_iter", "folds", "knn_k", "seed", "standardize", "downsample_factor", "downsample_threshold",
    "strict_reference", "baselines", "out_dir"};

const std::set<std::string> kKnownBaselines = {std::string(kRawKnn), std::string(kDrOnly),
                                               std::string(kDlsrOriginal)};

template <typename T>
T get(const json& doc, const char* key, T fallback) {
    if (!doc.contains(key) || doc.at(key).is_null()) return fallback;
    try {
        return doc.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(std::string("config field '") + key + "' has the wrong type");
    }
}

}  // namespace

std::string_view dataset_kind_name(DatasetKind kind) {
    switch (kind) {
        case DatasetKind::csv: return "csv";
        case DatasetKind::kdd: return "kdd";
        case DatasetKind::kdd_surrogate: return "kdd-surrogate";
    }
    return "csv";
}

DatasetKind parse_dataset_kind(std::string_view tag) {
    if (tag == "csv") return DatasetKind::csv;
    if (tag == "kdd") return DatasetKind::kdd;
    if (tag == "kdd-surrogate") return DatasetKind::kdd_surrogate;
    throw ConfigError("unknown dataset_kind '" + std::string(tag) + "' (expected csv, kdd or kdd-surrogate)");
}

void ExperimentConfig::validate() const {
    if (dataset.empty() && dataset_kind != DatasetKind::kdd_surrogate) throw ConfigError("config: 'dataset' is required");
    if (dataset_kind == DatasetKind::kdd && kdd_categories.empty()) {
        throw ConfigError("config: 'kdd_categories' is required for KDD input");
    }
    if (!(kdd_rate > 0.0 && kdd_rate <= 1.0)) throw ConfigError("config: kdd_rate must be in (0, 1]");
    if (d.empty()) throw ConfigError("config: 'd' must list at least one dimension");
    for (auto v : d) {
        if (v < 1) throw ConfigError("config: every d must be at least 1");
    }
    if (k_graph < 1) throw ConfigError("config: k_graph must be at least 1");
    if (gamma && !(*gamma > 0.0)) throw ConfigError("config: gamma must be positive");
    if (autoencoder.epochs < 0 || autoencoder.batch_size < 1 || !(autoencoder.learning_rate > 0.0) ||
        autoencoder.lambda < 0.0) {
        throw ConfigError("config: invalid autoencoder settings");
    }
    if (neighborhood_k < 1) throw ConfigError("config: neighborhood_k must be at least 1");
    if (!(lambda > 0.0)) throw ConfigError("config: lambda must be positive");
    for (double l : lambda_grid) {
        if (!(l > 0.0)) throw ConfigError("config: lambda_grid values must be positive");
    }
    if (!(tol >= 0.0)) throw ConfigError("config: tol must be non-negative");
    if (max_iter < 1) throw ConfigError("config: max_iter must be at least 1");
    if (folds < 2) throw ConfigError("config: folds must be at least 2");
    if (knn_k < 1) throw ConfigError("config: knn_k must be at least 1");
    if (!(downsample_factor > 0.0 && downsample_factor <= 1.0)) {
        throw ConfigError("config: downsample_factor must be in (0, 1]");
    }
    for (const auto& b : baselines) {
        if (!kKnownBaselines.contains(b)) {
            throw ConfigError("config: unknown baseline '" + b + "' (expected raw-knn, dr-only or dlsr-original)");
        }
    }
    if (out_dir.empty()) throw ConfigError("config: out_dir must not be empty");
}

ExperimentConfig parse_config(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ConfigError("config must be a JSON object");
    for (const auto& [key, value] : doc.items()) {
        if (!kKnownKeys.contains(key)) throw ConfigError("config: unknown field '" + key + "'");
    }

    ExperimentConfig c;
    c.dataset = get(doc, "dataset", c.dataset);
    c.dataset_kind = parse_dataset_kind(get(doc, "dataset_kind", std::string(dataset_kind_name(c.dataset_kind))));
    if (doc.contains("label_column")) {
        const auto& lc = doc.at("label_column");
        if (lc.is_string()) {
            c.label_column = lc.get<std::string>();
        } else if (lc.is_number_unsigned()) {
            c.label_column = lc.get<std::size_t>();
        } else {
            throw ConfigError("config: label_column must be a name or a non-negative index");
        }
    }
    c.has_header = get(doc, "has_header", c.has_header);
    c.kdd_categories = get(doc, "kdd_categories", c.kdd_categories);
    c.kdd_rate = get(doc, "kdd_rate", c.kdd_rate);
    c.kdd_minority = get(doc, "kdd_minority", c.kdd_minority);
    c.method = parse_backend(get(doc, "method", std::string(backend_name(c.method))));
    if (doc.contains("d")) {
        const auto& d = doc.at("d");
        if (d.is_number_integer()) {
            c.d = {d.get<Eigen::Index>()};
        } else {
            c.d = get(doc, "d", std::vector<Eigen::Index>{});
        }
    }
    c.k_graph = get(doc, "k_graph", c.k_graph);
    if (doc.contains("gamma") && !doc.at("gamma").is_null()) c.gamma = get(doc, "gamma", 0.0);
    if (doc.contains("autoencoder")) {
        const auto& ae = doc.at("autoencoder");
        if (!ae.is_object()) throw ConfigError("config: autoencoder must be an object");
        for (const auto& [key, value] : ae.items()) {
            if (key != "epochs" && key != "batch_size" && key != "learning_rate" && key != "lambda") {
                throw ConfigError("config: unknown autoencoder field '" + key + "'");
            }
        }
        c.autoencoder.epochs = get(ae, "epochs", c.autoencoder.epochs);
        c.autoencoder.batch_size = get(ae, "batch_size", c.autoencoder.batch_size);
        c.autoencoder.learning_rate = get(ae, "learning_rate", c.autoencoder.learning_rate);
        c.autoencoder.lambda = get(ae, "lambda", c.autoencoder.lambda);
    }
    c.neighborhood_k = get(doc, "neighborhood_k", c.neighborhood_k);
    c.similar_mode = parse_similar_mode(get(doc, "similar_mode", std::string(similar_mode_name(c.similar_mode))));
    c.lambda = get(doc, "lambda", c.lambda);
    c.lambda_grid = get(doc, "lambda_grid", c.lambda_grid);
    c.tol = get(doc, "tol", c.tol);
    c.max_iter = get(doc, "max_iter", c.max_iter);
    c.folds = get(doc, "folds", c.folds);
    c.knn_k = get(doc, "knn_k", c.knn_k);
    c.seed = get(doc, "seed", c.seed);
    c.standardize = get(doc, "standardize", c.standardize);
    c.downsample_factor = get(doc, "downsample_factor", c.downsample_factor);
    c.downsample_threshold = get(doc, "downsample_threshold", c.downsample_threshold);
    c.strict_reference = get(doc, "strict_reference", c.strict_reference);
    c.baselines = get(doc, "baselines", c.baselines);
    c.out_dir = get(doc, "out_dir", c.out_dir);
    c.validate();
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string config_to_json(const ExperimentConfig& c) {
    json doc;
    doc["dataset"] = c.dataset;
    doc["dataset_kind"] = dataset_kind_name(c.dataset_kind);
    if (const auto* name = std::get_if<std::string>(&c.label_column)) {
        doc["label_column"] = *name;
    } else {
        doc["label_column"] = std::get<std::size_t>(c.label_column);
    }
    doc["has_header"] = c.has_header;
    doc["kdd_categories"] = c.kdd_categories;
    doc["kdd_rate"] = c.kdd_rate;
    doc["kdd_minority"] = c.kdd_minority;
    doc["method"] = backend_name(c.method);
    doc["d"] = c.d;
    doc["k_graph"] = c.k_graph;
    doc["gamma"] = c.gamma ? json(*c.gamma) : json(nullptr);
    doc["autoencoder"] = {{"epochs", c.autoencoder.epochs},
                          {"batch_size", c.autoencoder.batch_size},
                          {"learning_rate", c.autoencoder.learning_rate},
                          {"lambda", c.autoencoder.lambda}};
    doc["neighborhood_k"] = c.neighborhood_k;
    doc["similar_mode"] = similar_mode_name(c.similar_mode);
    doc["lambda"] = c.lambda;
    doc["lambda_grid"] = c.lambda_grid;
    doc["tol"] = c.tol;
    doc["max_iter"] = c.max_iter;
    doc["folds"] = c.folds;
    doc["knn_k"] = c.knn_k;
    doc["seed"] = c.seed;
    doc["standardize"] = c.standardize;
    doc["downsample_factor"] = c.downsample_factor;
    doc["downsample_threshold"] = c.downsample_threshold;
    doc["strict_reference"] = c.strict_reference;
    doc["baselines"] = c.baselines;
    doc["out_dir"] = c.out_dir;
    return doc.dump(2);
}

Dataset load_dataset(const ExperimentConfig& config) {
    switch (config.dataset_kind) {
        case DatasetKind::csv: {
            LabelColumn column = config.label_column;
            if (const auto* name = std::get_if<std::string>(&column); name && name->empty()) {
                std::ifstream in(config.dataset);
                if (!in) throw DataError("cannot open '" + config.dataset + "'");
                std::vector<std::string> fields;
                if (!detail::read_record(in, fields)) throw DataError(config.dataset + ": empty file");
                column = fields.size() - 1;
            }
            return load_csv(config.dataset, column, config.has_header);
        }
        case DatasetKind::kdd: {
            const auto full = load_kdd(config.dataset, load_kdd_categories(config.kdd_categories));
            return kdd_subsample(full, config.kdd_minority, config.kdd_rate, derive_seed(config.seed, 0xDD));
        }
        case DatasetKind::kdd_surrogate: {
            const auto full = make_kdd_surrogate(config.seed);
            return kdd_subsample(full, config.kdd_minority, config.kdd_rate, derive_seed(config.seed, 0xDD));
        }
    }
    throw ConfigError("unknown dataset kind");
}

std::string describe_dataset(const Dataset& ds) {
    std::ostringstream out;
    out << "dataset: " << ds.source_id << '\n';
    out << "samples: " << ds.rows() << '\n';
    out << "classes: " << ds.num_classes() << '\n';
    out << "features: " << ds.num_features() << '\n';
    char ratio[32];
    std::snprintf(ratio, sizeof ratio, "%.2f", imbalance_ratio(ds));
    out << "imbalance_ratio: " << ratio << '\n';
    const auto counts = ds.class_counts();
    out << "class_counts:";
    for (std::size_t c = 0; c < counts.size(); ++c) out << ' ' << ds.class_names[c] << '=' << counts[c];
    out << '\n';
    return out.str();
}

}  // namespace sdml
