#pragma once

#include "sdml/numeric.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace sdml {

/// Labeled feature matrix. Labels are dense class indices in [0, C) and
/// `class_names[c]` is the original token for class c.
struct Dataset {
    Matrix features;
    std::vector<int> labels;
    std::vector<std::string> class_names;
    std::vector<std::string> feature_names;
    std::string source_id;

    std::size_t rows() const { return labels.size(); }
    std::size_t num_features() const { return static_cast<std::size_t>(features.cols()); }
    int num_classes() const { return static_cast<int>(class_names.size()); }

    /// Sample count per class index (absent classes count zero).
    std::vector<std::size_t> class_counts() const;

    /// Rows at `indices` in the given order; class metadata is kept, so some
    /// classes may be absent from the result.
    Dataset subset(std::span<const std::size_t> indices) const;

    /// Throws DataError if any loading invariant fails: n >= 2, m >= 1,
    /// C >= 2, every class populated, all features finite.
    void validate() const;
};

/// Label column chosen by header name or zero-based index.
using LabelColumn = std::variant<std::string, std::size_t>;

/// Reads an RFC-4180 style CSV. Labels are re-encoded to 0..C-1 in order of
/// first appearance.
Dataset load_csv(const std::filesystem::path& path, const LabelColumn& label_column, bool has_header);
Dataset parse_csv(std::istream& in, const LabelColumn& label_column, bool has_header,
                  const std::string& source_id);

/// Per-feature statistics learned from one matrix and reapplicable to another.
/// Zero-variance features are flagged and pass through untouched.
struct Standardizer {
    Vector mean;
    Vector scale;
    std::vector<bool> constant;

    Matrix apply(const Matrix& x) const;
};

/// Population mean/standard deviation per column.
Standardizer fit_standardizer(const Matrix& x);

struct Standardized {
    Dataset data;
    Standardizer stats;
};
Standardized standardize(const Dataset& ds);

/// Per-class draw of max(1, round_half_up(factor * n_c)) samples without
/// replacement. Returned indices are ascending.
std::vector<std::size_t> stratified_downsample_indices(std::span<const int> labels, int num_classes,
                                                       double factor, std::uint64_t seed);
Dataset stratified_downsample(const Dataset& ds, double factor, std::uint64_t seed);

/// Downsamples every class at `rate` except the named minority classes,
/// which are kept in full.
Dataset kdd_subsample(const Dataset& ds, const std::vector<std::string>& minority_classes, double rate,
                      std::uint64_t seed);

/// Largest class count over smallest class count.
double imbalance_ratio(const Dataset& ds);

/// Stratified assignment of samples to K folds.
struct FoldPlan {
    std::vector<int> fold_of;
    int k = 0;
    std::uint64_t seed = 0;

    std::vector<std::size_t> train_indices(int fold) const;
    std::vector<std::size_t> test_indices(int fold) const;
};

FoldPlan stratified_kfold(std::span<const int> labels, int num_classes, int k, std::uint64_t seed);
FoldPlan stratified_kfold(const Dataset& ds, int k, std::uint64_t seed);

/// attack label (without trailing '.') -> category name.
using KddCategoryMap = std::map<std::string, std::string>;

KddCategoryMap load_kdd_categories(const std::filesystem::path& path);
KddCategoryMap parse_kdd_categories(std::istream& in);

/// Reads raw KDD Cup 1999 records (41 features + label). The symbolic
/// protocol/service/flag columns are one-hot encoded; labels are grouped into
/// categories, ordered alphabetically.
Dataset load_kdd(const std::filesystem::path& path, const KddCategoryMap& categories);
Dataset parse_kdd(std::istream& in, const KddCategoryMap& categories, const std::string& source_id);

/// Class sizes of the 10% KDD Cup 1999 training file.
struct KddClassSizes {
    std::size_t dos = 391458;
    std::size_t normal = 97278;
    std::size_t probe = 4107;
    std::size_t r2l = 1126;
    std::size_t u2r = 52;
};

/// Synthetic stand-in for KDD: five multi-modal Gaussian classes named
/// DOS/Normal/Probe/R2L/U2R with the given sizes.
Dataset make_kdd_surrogate(std::uint64_t seed, const KddClassSizes& sizes = {});

}  // namespace sdml
