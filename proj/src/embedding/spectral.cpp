#include "sdml/embedding.hpp"
#include "sdml/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <queue>
#include <string>

namespace sdml {

Embedding classical_mds(const Matrix& sq_dists, Eigen::Index d) {
    require_finite(sq_dists, "classical_mds");
    const Eigen::Index n = sq_dists.rows();
    if (sq_dists.cols() != n) throw NumericError("classical_mds: distance matrix is not square");
    if (d < 1) throw ConfigError("classical_mds: d must be at least 1");

    // B = -1/2 H D2 H with H = I - 11^T/n
    Matrix b = sq_dists;
    const Vector row_means = b.rowwise().mean();
    const Vector col_means = b.colwise().mean().transpose();
    const double grand = b.mean();
    b.rowwise() -= col_means.transpose();
    b.colwise() -= row_means;
    b.array() += grand;
    b *= -0.5;

    const auto eig = sym_eig(b, EigenOrder::descending);
    const double top = eig.values.cwiseAbs().maxCoeff();
    Eigen::Index positive = 0;
    while (positive < n && eig.values[positive] > 1e-10 * top) ++positive;

    Embedding e;
    e.method = Backend::mds;
    Eigen::Index kept = std::min(d, n);
    if (kept > std::max<Eigen::Index>(positive, 1)) {
        kept = std::max<Eigen::Index>(positive, 1);
        e.warnings.push_back("classical_mds: only " + std::to_string(positive) + " positive eigenvalue(s); d reduced from " +
                             std::to_string(d) + " to " + std::to_string(kept));
    }
    e.d = kept;
    e.params.d = kept;
    e.coords.resize(n, kept);
    for (Eigen::Index c = 0; c < kept; ++c) {
        e.coords.col(c) = eig.vectors.col(c) * std::sqrt(std::max(eig.values[c], 0.0));
    }
    return e;
}

std::vector<std::vector<std::size_t>> nearest_neighbors(const Matrix& sq_dists, std::size_t k) {
    const auto n = static_cast<std::size_t>(sq_dists.rows());
    if (k >= n) throw ConfigError("neighbour count " + std::to_string(k) + " must be below sample count " + std::to_string(n));
    std::vector<std::vector<std::size_t>> out(n);
    std::vector<std::size_t> order;
    for (std::size_t i = 0; i < n; ++i) {
        order.resize(n);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::erase(order, i);
        const auto row = static_cast<Eigen::Index>(i);
        auto closer = [&](std::size_t a, std::size_t b) {
            const double da = sq_dists(row, static_cast<Eigen::Index>(a));
            const double db = sq_dists(row, static_cast<Eigen::Index>(b));
            return da < db || (da == db && a < b);
        };
        std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k), order.end(), closer);
        out[i].assign(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(k));
    }
    return out;
}

Embedding isomap(const Matrix& x, std::size_t k_graph, Eigen::Index d) {
    require_finite(x, "isomap");
    if (k_graph < 1) throw ConfigError("isomap: k_graph must be at least 1");
    const Eigen::Index n = x.rows();
    const Matrix sq = pairwise_sq_dists(x);
    const auto nbrs = nearest_neighbors(sq, std::min<std::size_t>(k_graph, static_cast<std::size_t>(n - 1)));

    Matrix graph = Matrix::Constant(n, n, kInfinity);
    graph.diagonal().setZero();
    for (std::size_t i = 0; i < nbrs.size(); ++i) {
        for (std::size_t j : nbrs[i]) {
            const auto a = static_cast<Eigen::Index>(i);
            const auto b = static_cast<Eigen::Index>(j);
            const double w = std::sqrt(sq(a, b));
            graph(a, b) = w;
            graph(b, a) = w;
        }
    }

    // Components by breadth-first search; the largest wins, earliest on ties.
    std::vector<int> component(static_cast<std::size_t>(n), -1);
    std::vector<std::vector<std::size_t>> members;
    for (Eigen::Index s = 0; s < n; ++s) {
        if (component[static_cast<std::size_t>(s)] >= 0) continue;
        const int id = static_cast<int>(members.size());
        members.emplace_back();
        std::queue<Eigen::Index> frontier;
        frontier.push(s);
        component[static_cast<std::size_t>(s)] = id;
        while (!frontier.empty()) {
            const Eigen::Index u = frontier.front();
            frontier.pop();
            members.back().push_back(static_cast<std::size_t>(u));
            for (Eigen::Index v = 0; v < n; ++v) {
                if (component[static_cast<std::size_t>(v)] < 0 && std::isfinite(graph(u, v))) {
                    component[static_cast<std::size_t>(v)] = id;
                    frontier.push(v);
                }
            }
        }
    }
    if (members.size() > 1) {
        std::size_t best = 0;
        for (std::size_t c = 1; c < members.size(); ++c) {
            if (members[c].size() > members[best].size()) best = c;
        }
        std::vector<std::size_t> kept = members[best];
        std::vector<std::size_t> dropped;
        for (std::size_t c = 0; c < members.size(); ++c) {
            if (c != best) dropped.insert(dropped.end(), members[c].begin(), members[c].end());
        }
        std::sort(kept.begin(), kept.end());
        std::sort(dropped.begin(), dropped.end());
        throw DisconnectedGraphError(std::move(kept), std::move(dropped));
    }

    const Matrix geodesic = graph_shortest_paths(graph);
    Embedding e = classical_mds(geodesic.array().square().matrix(), d);
    e.method = Backend::isomap;
    e.params.k_graph = k_graph;
    return e;
}

Matrix lle_weights(const Matrix& x, std::size_t k_nbrs) {
    require_finite(x, "lle");
    const Eigen::Index n = x.rows();
    const Eigen::Index m = x.cols();
    if (k_nbrs < 1) throw ConfigError("lle: k_nbrs must be at least 1");
    if (k_nbrs >= static_cast<std::size_t>(n)) {
        throw ConfigError("lle: k_nbrs = " + std::to_string(k_nbrs) + " must be below sample count " + std::to_string(n));
    }
    const auto nbrs = nearest_neighbors(pairwise_sq_dists(x), k_nbrs);
    const auto k = static_cast<Eigen::Index>(k_nbrs);

    Matrix omega = Matrix::Zero(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        const auto& nb = nbrs[static_cast<std::size_t>(i)];
        Matrix z(k, m);
        for (Eigen::Index a = 0; a < k; ++a) z.row(a) = x.row(static_cast<Eigen::Index>(nb[static_cast<std::size_t>(a)])) - x.row(i);
        Matrix gram = z * z.transpose();
        const double trace = gram.trace();
        const Vector ones = Vector::Ones(k);

        Vector w;
        if (trace <= 0.0) {
            w = ones;  // every neighbour coincides with x_i
        } else {
            auto regularized = [&] {
                Matrix g = gram;
                g.diagonal().array() += 1e-3 * trace / static_cast<double>(k);
                return solve_spd(g, ones);
            };
            if (k > m) {
                w = regularized();
            } else {
                try {
                    w = solve_spd(gram, ones);
                } catch (const SingularMatrixError&) {
                    w = regularized();
                }
            }
        }
        w /= w.sum();
        for (Eigen::Index a = 0; a < k; ++a) omega(i, static_cast<Eigen::Index>(nb[static_cast<std::size_t>(a)])) = w[a];
    }
    return omega;
}

Embedding lle(const Matrix& x, std::size_t k_nbrs, Eigen::Index d) {
    const Eigen::Index n = x.rows();
    if (d < 1 || d > n - 2) {
        throw ConfigError("lle: d = " + std::to_string(d) + " outside [1, " + std::to_string(n - 2) + "]");
    }
    const Matrix omega = lle_weights(x, k_nbrs);
    const Matrix iw = Matrix::Identity(n, n) - omega;
    Matrix cost = iw.transpose() * iw;
    // Lift the constant vector (the trivial zero mode) to the top of the
    // spectrum so the bottom d eigenvectors are orthogonal to it exactly.
    const Matrix centering = Matrix::Identity(n, n) - Matrix::Constant(n, n, 1.0 / static_cast<double>(n));
    cost = centering * cost * centering;
    cost.array() += (cost.trace() + 1.0) / static_cast<double>(n);
    const auto eig = sym_eig(cost, EigenOrder::ascending);

    Embedding e;
    e.method = Backend::lle;
    e.d = d;
    e.params.d = d;
    e.params.k_graph = k_nbrs;
    e.coords = eig.vectors.leftCols(d) * std::sqrt(static_cast<double>(n));
    return e;
}

}  // namespace sdml
