#include "sdml/errors.hpp"
#include "sdml/harness.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace sdml {

using nlohmann::json;

namespace {

json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_of(const json& j) { return j.is_null() ? std::nan("") : j.get<double>(); }

json optional_list(const std::vector<std::optional<double>>& values) {
    json out = json::array();
    for (const auto& v : values) out.push_back(v ? json(*v) : json(nullptr));
    return out;
}

std::vector<std::optional<double>> optional_list_of(const json& j) {
    std::vector<std::optional<double>> out;
    for (const auto& v : j) out.push_back(v.is_null() ? std::nullopt : std::optional<double>(v.get<double>()));
    return out;
}

template <typename M>
json matrix_json(const M& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
        rows.push_back(std::move(row));
    }
    return rows;
}

template <typename T>
Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> matrix_of(const json& j) {
    const auto rows = static_cast<Eigen::Index>(j.size());
    const auto cols = rows ? static_cast<Eigen::Index>(j.at(0).size()) : 0;
    Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic> m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).template get<T>();
    }
    return m;
}

json fold_json(const FoldOutcome& f) {
    return {{"fold", f.fold},
            {"accuracy", number(f.accuracy)},
            {"macro_sensitivity", number(f.macro_sensitivity)},
            {"macro_specificity", number(f.macro_specificity)},
            {"sensitivity", optional_list(f.sensitivity)},
            {"specificity", optional_list(f.specificity)},
            {"confusion", matrix_json(f.confusion.counts)},
            {"lambda", f.lambda},
            {"fit_rows", f.fit_rows},
            {"starved", f.starved},
            {"objective_trace", f.objective_trace}};
}

FoldOutcome fold_of(const json& j, const std::vector<std::string>& names) {
    FoldOutcome f;
    f.fold = j.at("fold").get<int>();
    f.accuracy = number_of(j.at("accuracy"));
    f.macro_sensitivity = number_of(j.at("macro_sensitivity"));
    f.macro_specificity = number_of(j.at("macro_specificity"));
    f.sensitivity = optional_list_of(j.at("sensitivity"));
    f.specificity = optional_list_of(j.at("specificity"));
    f.confusion.counts = matrix_of<std::int64_t>(j.at("confusion"));
    f.confusion.class_names = names;
    f.lambda = j.at("lambda").get<double>();
    f.fit_rows = j.at("fit_rows").get<std::size_t>();
    f.starved = j.at("starved").get<std::size_t>();
    f.objective_trace = j.at("objective_trace").get<std::vector<double>>();
    return f;
}

std::string fixed(double v, int digits = 4) {
    if (!std::isfinite(v)) return "n/a";
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot write '" + path.string() + "'");
    out << text;
}

}  // namespace

std::string results_json(const EvaluationReport& report) {
    json doc;
    doc["dataset"] = report.dataset;
    doc["config"] = report.config_json.empty() ? json(nullptr) : json::parse(report.config_json);
    doc["samples"] = report.samples;
    doc["features"] = report.features;
    doc["class_names"] = report.class_names;
    doc["class_counts"] = report.class_counts;
    doc["imbalance_ratio"] = report.imbalance_ratio;
    doc["fold_plan"] = {{"k", report.plan.k}, {"seed", report.plan.seed}, {"fold_of", report.plan.fold_of}};

    const auto ranks = report.local_ranks("accuracy");
    json methods = json::array();
    for (std::size_t mi = 0; mi < report.methods.size(); ++mi) {
        const auto& m = report.methods[mi];
        json sweep = json::array();
        for (const auto& s : m.sweep) {
            json folds = json::array();
            for (const auto& f : s.folds) folds.push_back(fold_json(f));
            sweep.push_back({{"d", s.d},
                             {"mean_accuracy", number(s.mean_accuracy)},
                             {"mean_sensitivity", number(s.mean_sensitivity)},
                             {"mean_specificity", number(s.mean_specificity)},
                             {"mean_confusion", matrix_json(s.mean_confusion.counts)},
                             {"folds", std::move(folds)}});
        }
        methods.push_back({{"name", m.name},
                           {"backend", m.backend},
                           {"best_index", m.best},
                           {"best_d", m.sweep.empty() ? 0 : m.best_result().d},
                           {"local_rank", ranks[mi]},
                           {"sweep", std::move(sweep)}});
    }
    doc["methods"] = std::move(methods);
    doc["warnings"] = report.warnings;
    return doc.dump(2) + "\n";
}

EvaluationReport parse_results_json(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw DataError(std::string("results file is not valid JSON: ") + e.what());
    }
    EvaluationReport r;
    try {
        r.dataset = doc.at("dataset").get<std::string>();
        if (!doc.at("config").is_null()) r.config_json = doc.at("config").dump(2);
        r.samples = doc.at("samples").get<std::size_t>();
        r.features = doc.at("features").get<std::size_t>();
        r.class_names = doc.at("class_names").get<std::vector<std::string>>();
        r.class_counts = doc.at("class_counts").get<std::vector<std::size_t>>();
        r.imbalance_ratio = doc.at("imbalance_ratio").get<double>();
        const auto& plan = doc.at("fold_plan");
        r.plan.k = plan.at("k").get<int>();
        r.plan.seed = plan.at("seed").get<std::uint64_t>();
        r.plan.fold_of = plan.at("fold_of").get<std::vector<int>>();
        for (const auto& mj : doc.at("methods")) {
            MethodResult m;
            m.name = mj.at("name").get<std::string>();
            m.backend = mj.at("backend").get<std::string>();
            m.best = mj.at("best_index").get<std::size_t>();
            for (const auto& sj : mj.at("sweep")) {
                DimensionResult s;
                s.d = sj.at("d").get<Eigen::Index>();
                s.mean_accuracy = number_of(sj.at("mean_accuracy"));
                s.mean_sensitivity = number_of(sj.at("mean_sensitivity"));
                s.mean_specificity = number_of(sj.at("mean_specificity"));
                s.mean_confusion.counts = matrix_of<double>(sj.at("mean_confusion"));
                s.mean_confusion.class_names = r.class_names;
                for (const auto& fj : sj.at("folds")) s.folds.push_back(fold_of(fj, r.class_names));
                m.sweep.push_back(std::move(s));
            }
            r.methods.push_back(std::move(m));
        }
        r.warnings = doc.at("warnings").get<std::vector<std::string>>();
    } catch (const json::exception& e) {
        throw DataError(std::string("results file is malformed: ") + e.what());
    }
    return r;
}

std::string timing_json(const EvaluationReport& report) {
    json rows = json::array();
    double total = 0.0;
    for (const auto& t : report.timings) {
        rows.push_back({{"fold", t.fold}, {"method", t.method}, {"stage", t.stage}, {"seconds", t.seconds}});
        total += t.seconds;
    }
    return json{{"stages", std::move(rows)}, {"total_seconds", total}}.dump(2) + "\n";
}

std::string summary_markdown(const EvaluationReport& report) {
    std::ostringstream out;
    out << "# " << report.dataset << "\n\n";
    out << "| samples | classes | features | imbalance ratio |\n|---|---|---|---|\n";
    out << "| " << report.samples << " | " << report.class_names.size() << " | " << report.features << " | "
        << fixed(report.imbalance_ratio, 2) << " |\n\n";
    out << report.plan.k << "-fold cross-validation. Each best cell reads `value (d, R)`: d is the best latent "
        << "dimension and R the rank among the methods of this run only (local rank).\n";

    std::set<Eigen::Index> dims;
    for (const auto& m : report.methods) {
        for (const auto& s : m.sweep) {
            if (s.d > 0) dims.insert(s.d);
        }
    }

    const std::vector<std::pair<std::string, std::string>> metrics = {
        {"accuracy", "Accuracy"}, {"sensitivity", "Sensitivity (macro)"}, {"specificity", "Specificity (macro)"}};
    for (const auto& [key, title] : metrics) {
        const auto ranks = report.local_ranks(key);
        auto value = [&](const DimensionResult& s) {
            return key == "accuracy" ? s.mean_accuracy : key == "sensitivity" ? s.mean_sensitivity : s.mean_specificity;
        };
        out << "\n## " << title << "\n\n| method | backend |";
        for (auto d : dims) out << " d=" << d << " |";
        out << " best (d, R) |\n|---|---|";
        for (std::size_t i = 0; i < dims.size(); ++i) out << "---|";
        out << "---|\n";
        for (std::size_t mi = 0; mi < report.methods.size(); ++mi) {
            const auto& m = report.methods[mi];
            out << "| " << m.name << " | " << (m.backend.empty() ? "-" : m.backend) << " |";
            for (auto d : dims) {
                auto it = std::find_if(m.sweep.begin(), m.sweep.end(), [&](const DimensionResult& s) { return s.d == d; });
                out << ' ' << (it == m.sweep.end() ? "-" : fixed(value(*it))) << " |";
            }
            const auto& best = m.best_result();
            out << ' ' << fixed(value(best)) << " (" << (best.d > 0 ? std::to_string(best.d) : "-") << ", "
                << ranks[mi] << ") |\n";
        }
    }

    for (const auto& m : report.methods) {
        const auto& best = m.best_result();
        out << "\n## Mean confusion: " << m.name;
        if (best.d > 0) out << " (d=" << best.d << ")";
        out << "\n\n| class |";
        for (const auto& name : report.class_names) out << ' ' << name << " |";
        out << " recall |\n|---|";
        for (std::size_t i = 0; i <= report.class_names.size(); ++i) out << "---|";
        out << '\n';
        const auto& cm = best.mean_confusion;
        for (int r = 0; r < cm.classes(); ++r) {
            out << "| " << report.class_names[static_cast<std::size_t>(r)] << " |";
            for (int c = 0; c < cm.classes(); ++c) out << ' ' << fixed(cm.counts(r, c), 1) << " |";
            const auto recall = sensitivity(cm, r);
            out << ' ' << (recall ? fixed(*recall, 6) : "n/a") << " |\n";
        }
    }

    if (!report.warnings.empty()) {
        out << "\n## Warnings\n\n";
        for (const auto& w : report.warnings) out << "- " << w << '\n';
    }
    return out.str();
}

void render_report(const EvaluationReport& report, const std::filesystem::path& dir, bool with_timing) {
    std::filesystem::create_directories(dir);
    write_text(dir / "results.json", results_json(report));
    if (with_timing) write_text(dir / "timing.json", timing_json(report));
    write_text(dir / "summary.md", summary_markdown(report));
    for (const auto& m : report.methods) {
        const auto sub = dir / m.name;
        std::filesystem::create_directories(sub);
        const auto& best = m.best_result();
        for (const auto& f : best.folds) {
            std::ostringstream csv;
            write_confusion_csv(csv, f.confusion);
            write_text(sub / ("confusion_" + std::to_string(f.fold) + ".csv"), csv.str());
        }
        std::ostringstream mean;
        write_confusion_csv(mean, best.mean_confusion);
        write_text(sub / "confusion_mean.csv", mean.str());
    }
}

}  // namespace sdml
