#include "sdml/data.hpp"
#include "sdml/errors.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace sdml {

namespace {

std::vector<std::vector<std::size_t>> members_by_class(std::span<const int> labels, int num_classes) {
    std::vector<std::vector<std::size_t>> members(static_cast<std::size_t>(num_classes));
    for (std::size_t i = 0; i < labels.size(); ++i) {
        const int c = labels[i];
        if (c < 0 || c >= num_classes) throw DataError("label out of range");
        members[static_cast<std::size_t>(c)].push_back(i);
    }
    return members;
}

// max(1, round_half_up(rate * n)) for non-empty classes.
std::size_t retained_count(double rate, std::size_t n) {
    if (n == 0) return 0;
    const auto scaled = static_cast<std::size_t>(std::floor(rate * static_cast<double>(n) + 0.5));
    return std::clamp<std::size_t>(scaled, 1, n);
}

std::vector<std::size_t> sample_classes(std::span<const int> labels, int num_classes,
                                        const std::vector<double>& rate_of_class, std::uint64_t seed) {
    Rng rng(seed);
    auto members = members_by_class(labels, num_classes);
    std::vector<std::size_t> kept;
    for (std::size_t c = 0; c < members.size(); ++c) {
        auto& pool = members[c];
        const std::size_t take = retained_count(rate_of_class[c], pool.size());
        // Partial Fisher-Yates: the first `take` slots become a uniform draw.
        for (std::size_t i = 0; i < take; ++i) {
            std::swap(pool[i], pool[i + rng.below(pool.size() - i)]);
        }
        kept.insert(kept.end(), pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(take));
    }
    std::sort(kept.begin(), kept.end());
    return kept;
}

}  // namespace

std::vector<std::size_t> stratified_downsample_indices(std::span<const int> labels, int num_classes,
                                                       double factor, std::uint64_t seed) {
    if (!(factor > 0.0 && factor <= 1.0)) throw ConfigError("downsample factor must be in (0, 1]");
    return sample_classes(labels, num_classes, std::vector<double>(static_cast<std::size_t>(num_classes), factor),
                          seed);
}

Dataset stratified_downsample(const Dataset& ds, double factor, std::uint64_t seed) {
    const auto keep = stratified_downsample_indices(ds.labels, ds.num_classes(), factor, seed);
    return ds.subset(keep);
}

Dataset kdd_subsample(const Dataset& ds, const std::vector<std::string>& minority_classes, double rate,
                      std::uint64_t seed) {
    if (!(rate > 0.0 && rate <= 1.0)) throw ConfigError("subsampling rate must be in (0, 1]");
    std::vector<double> rates(ds.class_names.size(), rate);
    for (const auto& name : minority_classes) {
        auto it = std::find(ds.class_names.begin(), ds.class_names.end(), name);
        if (it == ds.class_names.end()) throw DataError("kdd_subsample: unknown class '" + name + "'");
        rates[static_cast<std::size_t>(it - ds.class_names.begin())] = 1.0;
    }
    return ds.subset(sample_classes(ds.labels, ds.num_classes(), rates, seed));
}

std::vector<std::size_t> FoldPlan::train_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
        if (fold_of[i] != fold) out.push_back(i);
    }
    return out;
}

std::vector<std::size_t> FoldPlan::test_indices(int fold) const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < fold_of.size(); ++i) {
        if (fold_of[i] == fold) out.push_back(i);
    }
    return out;
}

FoldPlan stratified_kfold(std::span<const int> labels, int num_classes, int k, std::uint64_t seed) {
    if (k < 2) throw ConfigError("fold count must be at least 2, got " + std::to_string(k));
    if (static_cast<std::size_t>(k) > labels.size()) {
        throw ConfigError("fold count " + std::to_string(k) + " exceeds sample count " +
                          std::to_string(labels.size()));
    }
    FoldPlan plan;
    plan.k = k;
    plan.seed = seed;
    plan.fold_of.assign(labels.size(), -1);

    Rng rng(seed);
    auto members = members_by_class(labels, num_classes);
    // Deal each shuffled class round-robin, continuing the rotation across
    // classes so that small classes do not all land in the first folds.
    std::size_t next_fold = 0;
    for (auto& pool : members) {
        rng.shuffle(std::span<std::size_t>(pool));
        for (std::size_t idx : pool) {
            plan.fold_of[idx] = static_cast<int>(next_fold);
            next_fold = (next_fold + 1) % static_cast<std::size_t>(k);
        }
    }
    return plan;
}

FoldPlan stratified_kfold(const Dataset& ds, int k, std::uint64_t seed) {
    return stratified_kfold(ds.labels, ds.num_classes(), k, seed);
}

}  // namespace sdml
