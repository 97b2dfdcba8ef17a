#include "sdml/neighborhood.hpp"
#include "sdml/errors.hpp"

#include <algorithm>
#include <sstream>

namespace sdml {

std::string_view similar_mode_name(SimilarMode mode) {
    return mode == SimilarMode::farthest ? "farthest" : "nearest";
}

SimilarMode parse_similar_mode(std::string_view tag) {
    if (tag == "farthest") return SimilarMode::farthest;
    if (tag == "nearest") return SimilarMode::nearest;
    throw ConfigError("unknown similar_mode '" + std::string(tag) + "' (expected farthest or nearest)");
}

std::vector<std::size_t> NeighborhoodSets::starved() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < k_effective.size(); ++i) {
        if (k_effective[i] == 0) out.push_back(i);
    }
    return out;
}

NeighborhoodSets build_sets(const Matrix& coords, std::span<const int> labels, std::size_t k, SimilarMode mode) {
    const auto n = static_cast<std::size_t>(coords.rows());
    if (labels.size() != n) throw DataError("build_sets: label count does not match embedding rows");
    if (k < 1) throw ConfigError("build_sets: k must be at least 1");

    const Matrix sq = pairwise_sq_dists(coords);
    NeighborhoodSets sets;
    sets.similar.resize(n);
    sets.dissimilar.resize(n);
    sets.unrelated.resize(n);
    sets.k_effective.resize(n);

    std::vector<std::size_t> same;
    std::vector<std::size_t> other;
    for (std::size_t i = 0; i < n; ++i) {
        same.clear();
        other.clear();
        for (std::size_t j = 0; j < n; ++j) {
            if (j == i) continue;
            (labels[j] == labels[i] ? same : other).push_back(j);
        }
        const auto row = static_cast<Eigen::Index>(i);
        auto dist = [&](std::size_t j) { return sq(row, static_cast<Eigen::Index>(j)); };
        auto nearer = [&](std::size_t a, std::size_t b) {
            return dist(a) < dist(b) || (dist(a) == dist(b) && a < b);
        };
        auto farther = [&](std::size_t a, std::size_t b) {
            return dist(a) > dist(b) || (dist(a) == dist(b) && a < b);
        };

        const std::size_t keff = std::min({k, same.size(), other.size()});
        sets.k_effective[i] = keff;
        const auto take = static_cast<std::ptrdiff_t>(keff);
        std::partial_sort(other.begin(), other.begin() + take, other.end(), nearer);
        if (mode == SimilarMode::farthest) {
            std::partial_sort(same.begin(), same.begin() + take, same.end(), farther);
        } else {
            std::partial_sort(same.begin(), same.begin() + take, same.end(), nearer);
        }

        auto& s = sets.similar[i];
        auto& d = sets.dissimilar[i];
        s.assign(same.begin(), same.begin() + take);
        d.assign(other.begin(), other.begin() + take);
        std::sort(s.begin(), s.end());
        std::sort(d.begin(), d.end());

        auto& u = sets.unrelated[i];
        u.insert(u.end(), same.begin() + take, same.end());
        u.insert(u.end(), other.begin() + take, other.end());
        std::sort(u.begin(), u.end());
    }
    return sets;
}

std::string dump_sets(const NeighborhoodSets& sets) {
    std::ostringstream out;
    auto list = [&](const std::vector<std::size_t>& v) {
        out << '[';
        for (std::size_t a = 0; a < v.size(); ++a) out << (a ? "," : "") << v[a];
        out << ']';
    };
    for (std::size_t i = 0; i < sets.size(); ++i) {
        out << i << ": S=";
        list(sets.similar[i]);
        out << " D=";
        list(sets.dissimilar[i]);
        out << '\n';
    }
    return out.str();
}

TargetMatrices build_targets(const NeighborhoodSets& sets, std::size_t n) {
    if (sets.size() != n) throw DataError("build_targets: sets cover " + std::to_string(sets.size()) + " samples, expected " +
                                          std::to_string(n));
    TargetMatrices t;
    t.n = n;
    for (std::size_t i = 0; i < n; ++i) {
        // Merge the two sorted lists so B stays in column order.
        const auto& s = sets.similar[i];
        const auto& d = sets.dissimilar[i];
        std::size_t a = 0;
        std::size_t b = 0;
        while (a < s.size() || b < d.size()) {
            if (b == d.size() || (a < s.size() && s[a] < d[b])) {
                if (s[a] >= n) throw DataError("build_targets: index out of range");
                t.y.push_back({i, s[a], 1.0});
                t.b.push_back({i, s[a], 1.0});
                ++a;
            } else {
                if (d[b] >= n) throw DataError("build_targets: index out of range");
                t.b.push_back({i, d[b], -1.0});
                ++b;
            }
        }
    }
    return t;
}

namespace {

Matrix densify(const std::vector<Triplet>& entries, std::size_t n) {
    Matrix m = Matrix::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (const auto& e : entries) m(static_cast<Eigen::Index>(e.row), static_cast<Eigen::Index>(e.col)) = e.value;
    return m;
}

}  // namespace

Matrix TargetMatrices::dense_y() const { return densify(y, n); }
Matrix TargetMatrices::dense_b() const { return densify(b, n); }

}  // namespace sdml
