#pragma once

#include "sdml/numeric.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sdml {

enum class SimilarMode { farthest, nearest };

std::string_view similar_mode_name(SimilarMode mode);
SimilarMode parse_similar_mode(std::string_view tag);

/// Per-sample similar (same label), dissimilar (other label) and unrelated
/// index sets. Each list is sorted ascending; |similar[i]| == |dissimilar[i]|.
struct NeighborhoodSets {
    std::vector<std::vector<std::size_t>> similar;
    std::vector<std::vector<std::size_t>> dissimilar;
    std::vector<std::vector<std::size_t>> unrelated;
    std::vector<std::size_t> k_effective;

    std::size_t size() const { return k_effective.size(); }
    /// Samples whose balanced set size came out as zero.
    std::vector<std::size_t> starved() const;
};

/// Dissimilar set: the k_eff nearest other-label points. Similar set: k_eff
/// same-label points, farthest or nearest first. k_eff = min(k, same-label
/// count, other-label count). Distance ties go to the smaller index.
NeighborhoodSets build_sets(const Matrix& coords, std::span<const int> labels, std::size_t k, SimilarMode mode);

/// One line per sample: `i: S=[...] D=[...]`.
std::string dump_sets(const NeighborhoodSets& sets);

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

/// Sparse 0/1 targets Y and +1/-1/0 drag directions B, row-major triplets.
struct TargetMatrices {
    std::size_t n = 0;
    std::vector<Triplet> y;
    std::vector<Triplet> b;

    Matrix dense_y() const;
    Matrix dense_b() const;
};

/// Y_ij = 1 and B_ij = +1 for j in S_i; B_ij = -1 for j in D_i.
TargetMatrices build_targets(const NeighborhoodSets& sets, std::size_t n);

}  // namespace sdml
