#pragma once

#include "sdml/numeric.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace sdml {

/// Majority vote among the k nearest training rows (Euclidean). Vote ties go
/// to the class with the smaller summed distance, then the smaller class
/// index; distance ties at the neighbour boundary go to the smaller training
/// index.
std::vector<int> knn_predict(const Matrix& train, std::span<const int> train_labels, const Matrix& test,
                             std::size_t k);

/// Rows are true classes, columns predicted classes.
template <typename T>
struct BasicConfusion {
    using Matrix_t = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;

    Matrix_t counts;
    std::vector<std::string> class_names;

    int classes() const { return static_cast<int>(counts.rows()); }
    T total() const { return counts.sum(); }
};

using ConfusionMatrix = BasicConfusion<std::int64_t>;
/// Fold-averaged counts, as printed in per-class result tables.
using MeanConfusion = BasicConfusion<double>;

/// Throws DataError on length mismatch or out-of-range labels. Missing
/// class names default to the class index.
ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predicted, int num_classes,
                          std::vector<std::string> class_names = {});

/// Element-wise mean over folds; every matrix must have the same size.
MeanConfusion mean_confusion(std::span<const ConfusionMatrix> folds);

/// One-vs-rest collapse around a positive class.
struct BinaryCounts {
    double tp = 0;
    double fn = 0;
    double fp = 0;
    double tn = 0;
};

template <typename T>
BinaryCounts one_vs_rest(const BasicConfusion<T>& cm, int positive);

/// trace / total; throws DataError when the matrix is empty.
template <typename T>
double accuracy(const BasicConfusion<T>& cm);

/// TP / (TP + FN); empty when the class has no true samples.
template <typename T>
std::optional<double> sensitivity(const BasicConfusion<T>& cm, int positive);

/// TN / (TN + FP); empty when there are no negatives.
template <typename T>
std::optional<double> specificity(const BasicConfusion<T>& cm, int positive);

/// Unweighted mean over the classes where the per-class value is defined.
/// `value` is NaN if no class qualifies.
struct MacroMetric {
    double value = 0.0;
    std::vector<int> excluded;
};

template <typename T>
MacroMetric macro_sensitivity(const BasicConfusion<T>& cm);

template <typename T>
MacroMetric macro_specificity(const BasicConfusion<T>& cm);

/// Class names as header row and first column; integers for counts, up to
/// 12 significant digits for averaged matrices.
template <typename T>
void write_confusion_csv(std::ostream& out, const BasicConfusion<T>& cm);

}  // namespace sdml
