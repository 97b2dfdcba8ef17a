#include "sdml/errors.hpp"
#include "sdml/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <utility>
#include <vector>

namespace sdml {

Matrix graph_shortest_paths(const Matrix& weights) {
    if (weights.rows() != weights.cols()) throw NumericError("graph_shortest_paths: matrix is not square");
    const Eigen::Index n = weights.rows();

    struct Edge {
        Eigen::Index to;
        double w;
    };
    std::vector<std::vector<Edge>> adjacency(static_cast<std::size_t>(n));
    for (Eigen::Index i = 0; i < n; ++i) {
        if (weights(i, i) != 0.0) throw NumericError("graph_shortest_paths: diagonal must be zero");
        for (Eigen::Index j = 0; j < n; ++j) {
            if (i == j) continue;
            const double w = weights(i, j);
            if (std::isnan(w)) throw NumericError("graph_shortest_paths: NaN edge weight");
            if (w < 0.0) throw NumericError("graph_shortest_paths: negative edge weight");
            if (w == kInfinity) continue;
            adjacency[static_cast<std::size_t>(i)].push_back({j, w});
        }
    }

    Matrix dist = Matrix::Constant(n, n, kInfinity);
    using Item = std::pair<double, Eigen::Index>;
    std::vector<char> settled(static_cast<std::size_t>(n));
    for (Eigen::Index source = 0; source < n; ++source) {
        std::fill(settled.begin(), settled.end(), 0);
        std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
        dist(source, source) = 0.0;
        heap.emplace(0.0, source);
        while (!heap.empty()) {
            const auto [d, u] = heap.top();
            heap.pop();
            if (settled[static_cast<std::size_t>(u)]) continue;
            settled[static_cast<std::size_t>(u)] = 1;
            for (const Edge& e : adjacency[static_cast<std::size_t>(u)]) {
                const double candidate = d + e.w;
                if (candidate < dist(source, e.to)) {
                    dist(source, e.to) = candidate;
                    heap.emplace(candidate, e.to);
                }
            }
        }
    }
    return dist;
}

}  // namespace sdml
