#include "sdml/classify.hpp"
#include "sdml/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace sdml {

std::vector<int> knn_predict(const Matrix& train, std::span<const int> train_labels, const Matrix& test,
                             std::size_t k) {
    const auto n = static_cast<std::size_t>(train.rows());
    if (n == 0) throw DataError("knn: empty training set");
    if (train_labels.size() != n) throw DataError("knn: label count does not match training rows");
    if (k < 1 || k > n) {
        throw ConfigError("knn: k = " + std::to_string(k) + " outside [1, " + std::to_string(n) + "]");
    }
    if (test.rows() == 0) return {};
    if (test.cols() != train.cols()) throw DataError("knn: test and training columns differ");

    const int num_classes = *std::max_element(train_labels.begin(), train_labels.end()) + 1;
    const Matrix sq = cross_sq_dists(test, train);
    std::vector<int> predicted(static_cast<std::size_t>(test.rows()));
    std::vector<std::size_t> order(n);
    std::vector<int> votes(static_cast<std::size_t>(num_classes));
    std::vector<double> dist_sum(static_cast<std::size_t>(num_classes));

    for (Eigen::Index q = 0; q < test.rows(); ++q) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        auto nearer = [&](std::size_t a, std::size_t b) {
            const double da = sq(q, static_cast<Eigen::Index>(a));
            const double db = sq(q, static_cast<Eigen::Index>(b));
            return da < db || (da == db && a < b);
        };
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), nearer);

        std::fill(votes.begin(), votes.end(), 0);
        std::fill(dist_sum.begin(), dist_sum.end(), 0.0);
        for (std::size_t a = 0; a < k; ++a) {
            const auto c = static_cast<std::size_t>(train_labels[order[a]]);
            ++votes[c];
            dist_sum[c] += std::sqrt(sq(q, static_cast<Eigen::Index>(order[a])));
        }
        int best = 0;
        for (int c = 1; c < num_classes; ++c) {
            const auto i = static_cast<std::size_t>(c);
            const auto b = static_cast<std::size_t>(best);
            if (votes[i] > votes[b] || (votes[i] == votes[b] && votes[i] > 0 && dist_sum[i] < dist_sum[b])) best = c;
        }
        predicted[static_cast<std::size_t>(q)] = best;
    }
    return predicted;
}

}  // namespace sdml
