#include "sdml/classify.hpp"
#include "sdml/errors.hpp"

#include <cmath>
#include <iomanip>
#include <limits>
#include <ostream>
#include <string>

namespace sdml {

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted, int num_classes,
                          std::vector<std::string> class_names) {
    if (truth.size() != predicted.size()) {
        throw DataError("confusion: " + std::to_string(truth.size()) + " true labels but " +
                        std::to_string(predicted.size()) + " predictions");
    }
    if (num_classes < 1) throw DataError("confusion: need at least one class");
    ConfusionMatrix cm;
    cm.counts = ConfusionMatrix::Matrix_t::Zero(num_classes, num_classes);
    for (std::size_t i = 0; i < truth.size(); ++i) {
        if (truth[i] < 0 || truth[i] >= num_classes || predicted[i] < 0 || predicted[i] >= num_classes) {
            throw DataError("confusion: label out of range at position " + std::to_string(i));
        }
        ++cm.counts(truth[i], predicted[i]);
    }
    for (int c = static_cast<int>(class_names.size()); c < num_classes; ++c) class_names.push_back(std::to_string(c));
    class_names.resize(static_cast<std::size_t>(num_classes));
    cm.class_names = std::move(class_names);
    return cm;
}

MeanConfusion mean_confusion(std::span<const ConfusionMatrix> folds) {
    if (folds.empty()) throw DataError("mean_confusion: no folds");
    MeanConfusion mean;
    mean.class_names = folds.front().class_names;
    mean.counts = Eigen::MatrixXd::Zero(folds.front().counts.rows(), folds.front().counts.cols());
    for (const auto& f : folds) {
        if (f.counts.rows() != mean.counts.rows()) throw DataError("mean_confusion: size mismatch");
        mean.counts += f.counts.cast<double>();
    }
    mean.counts /= static_cast<double>(folds.size());
    return mean;
}

template <typename T>
BinaryCounts one_vs_rest(const BasicConfusion<T>& cm, int positive) {
    if (positive < 0 || positive >= cm.classes()) throw DataError("positive class out of range");
    const Eigen::MatrixXd c = cm.counts.template cast<double>();
    BinaryCounts b;
    b.tp = c(positive, positive);
    b.fn = c.row(positive).sum() - b.tp;
    b.fp = c.col(positive).sum() - b.tp;
    b.tn = c.sum() - b.tp - b.fn - b.fp;
    return b;
}

template <typename T>
double accuracy(const BasicConfusion<T>& cm) {
    const Eigen::MatrixXd c = cm.counts.template cast<double>();
    const double total = c.sum();
    if (c.size() == 0 || !(total > 0.0)) throw DataError("accuracy: empty confusion matrix");
    return c.trace() / total;
}

template <typename T>
std::optional<double> sensitivity(const BasicConfusion<T>& cm, int positive) {
    const auto b = one_vs_rest(cm, positive);
    if (!(b.tp + b.fn > 0.0)) return std::nullopt;
    return b.tp / (b.tp + b.fn);
}

template <typename T>
std::optional<double> specificity(const BasicConfusion<T>& cm, int positive) {
    const auto b = one_vs_rest(cm, positive);
    if (!(b.tn + b.fp > 0.0)) return std::nullopt;
    return b.tn / (b.tn + b.fp);
}

namespace {

template <typename T, typename F>
MacroMetric macro(const BasicConfusion<T>& cm, F per_class) {
    MacroMetric out;
    double sum = 0.0;
    int used = 0;
    for (int c = 0; c < cm.classes(); ++c) {
        if (const auto v = per_class(cm, c)) {
            sum += *v;
            ++used;
        } else {
            out.excluded.push_back(c);
        }
    }
    out.value = used ? sum / used : std::numeric_limits<double>::quiet_NaN();
    return out;
}

}  // namespace

template <typename T>
MacroMetric macro_sensitivity(const BasicConfusion<T>& cm) {
    return macro(cm, [](const BasicConfusion<T>& m, int c) { return sensitivity(m, c); });
}

template <typename T>
MacroMetric macro_specificity(const BasicConfusion<T>& cm) {
    return macro(cm, [](const BasicConfusion<T>& m, int c) { return specificity(m, c); });
}

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + '"';
}

}  // namespace

template <typename T>
void write_confusion_csv(std::ostream& out, const BasicConfusion<T>& cm) {
    out << "true\\predicted";
    for (const auto& name : cm.class_names) out << ',' << csv_field(name);
    out << '\n';
    const auto old_precision = out.precision(12);
    for (int r = 0; r < cm.classes(); ++r) {
        out << csv_field(cm.class_names[static_cast<std::size_t>(r)]);
        for (int c = 0; c < cm.classes(); ++c) out << ',' << cm.counts(r, c);
        out << '\n';
    }
    out.precision(old_precision);
}

#define SDML_CONFUSION_INSTANTIATE(T)                                                       \
    template BinaryCounts one_vs_rest(const BasicConfusion<T>&, int);                       \
    template double accuracy(const BasicConfusion<T>&);                                     \
    template std::optional<double> sensitivity(const BasicConfusion<T>&, int);              \
    template std::optional<double> specificity(const BasicConfusion<T>&, int);              \
    template MacroMetric macro_sensitivity(const BasicConfusion<T>&);                       \
    template MacroMetric macro_specificity(const BasicConfusion<T>&);                       \
    template void write_confusion_csv(std::ostream&, const BasicConfusion<T>&);

SDML_CONFUSION_INSTANTIATE(std::int64_t)
SDML_CONFUSION_INSTANTIATE(double)

#undef SDML_CONFUSION_INSTANTIATE

}  // namespace sdml
