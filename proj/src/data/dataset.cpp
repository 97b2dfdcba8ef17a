#include "sdml/data.hpp"
#include "sdml/errors.hpp"

#include <algorithm>
#include <cmath>

namespace sdml {

std::vector<std::size_t> Dataset::class_counts() const {
    std::vector<std::size_t> counts(class_names.size(), 0);
    for (int label : labels) ++counts.at(static_cast<std::size_t>(label));
    return counts;
}

Dataset Dataset::subset(std::span<const std::size_t> indices) const {
    Dataset out;
    out.class_names = class_names;
    out.feature_names = feature_names;
    out.source_id = source_id;
    out.features.resize(static_cast<Eigen::Index>(indices.size()), features.cols());
    out.labels.reserve(indices.size());
    for (std::size_t r = 0; r < indices.size(); ++r) {
        const auto src = static_cast<Eigen::Index>(indices[r]);
        out.features.row(static_cast<Eigen::Index>(r)) = features.row(src);
        out.labels.push_back(labels.at(indices[r]));
    }
    return out;
}

void Dataset::validate() const {
    const std::string where = source_id.empty() ? "dataset" : source_id;
    if (rows() < 2) throw DataError(where + ": need at least 2 samples");
    if (features.cols() < 1) throw DataError(where + ": need at least 1 feature");
    if (static_cast<std::size_t>(features.rows()) != rows()) throw DataError(where + ": feature/label row mismatch");
    if (class_names.size() < 2) throw DataError(where + ": single-class data (need at least 2 classes)");
    if (!feature_names.empty() && feature_names.size() != num_features()) {
        throw DataError(where + ": feature name count does not match feature columns");
    }
    for (int label : labels) {
        if (label < 0 || label >= num_classes()) throw DataError(where + ": label out of range");
    }
    const auto counts = class_counts();
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0) throw DataError(where + ": class '" + class_names[c] + "' has no samples");
    }
    if (!features.allFinite()) throw DataError(where + ": non-finite feature values");
}

Standardizer fit_standardizer(const Matrix& x) {
    Standardizer s;
    const auto n = static_cast<double>(x.rows());
    s.mean = x.colwise().mean().transpose();
    s.scale = Vector::Ones(x.cols());
    s.constant.assign(static_cast<std::size_t>(x.cols()), false);
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        const double var = (x.col(c).array() - s.mean[c]).square().sum() / n;
        const double sd = std::sqrt(var);
        if (!(sd > 1e-12 * std::max(1.0, std::abs(s.mean[c])))) {
            s.constant[static_cast<std::size_t>(c)] = true;
        } else {
            s.scale[c] = sd;
        }
    }
    return s;
}

Matrix Standardizer::apply(const Matrix& x) const {
    if (x.cols() != mean.size()) throw DataError("standardizer: column count mismatch");
    Matrix out = x;
    for (Eigen::Index c = 0; c < x.cols(); ++c) {
        if (constant[static_cast<std::size_t>(c)]) continue;
        out.col(c) = (x.col(c).array() - mean[c]) / scale[c];
    }
    return out;
}

Standardized standardize(const Dataset& ds) {
    Standardized out{ds, fit_standardizer(ds.features)};
    out.data.features = out.stats.apply(ds.features);
    return out;
}

double imbalance_ratio(const Dataset& ds) {
    const auto counts = ds.class_counts();
    std::size_t largest = 0;
    std::size_t smallest = std::numeric_limits<std::size_t>::max();
    for (std::size_t c : counts) {
        if (c == 0) continue;
        largest = std::max(largest, c);
        smallest = std::min(smallest, c);
    }
    if (largest == 0) throw DataError("imbalance_ratio: dataset has no samples");
    return static_cast<double>(largest) / static_cast<double>(smallest);
}

}  // namespace sdml
