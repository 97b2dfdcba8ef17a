#include "sdml/embedding.hpp"
#include "sdml/errors.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace sdml {

Eigen::Index max_dimension(Backend method, Eigen::Index n, Eigen::Index m, int num_classes) {
    switch (method) {
        case Backend::pca: return std::min(m, n - 1);
        case Backend::mds:
        case Backend::isomap:
        case Backend::kpca: return n - 1;
        case Backend::lle: return n - 2;
        case Backend::lda: return num_classes - 1;
        case Backend::autoencoder: return std::numeric_limits<Eigen::Index>::max();
    }
    return 0;
}

Embedding embed(const Matrix& x, std::span<const int> labels, Backend method, const EmbedParams& params) {
    if (params.d < 1) throw ConfigError("embedding dimension must be at least 1");
    if (!labels.empty() && labels.size() != static_cast<std::size_t>(x.rows())) {
        throw DataError("embedding: label count does not match rows");
    }
    int num_classes = 0;
    if (method == Backend::lda) {
        if (labels.empty()) throw ConfigError("lda embedding requires labels");
        num_classes = *std::max_element(labels.begin(), labels.end()) + 1;
    }

    std::vector<std::string> warnings;
    Eigen::Index d = params.d;
    const Eigen::Index cap = max_dimension(method, x.rows(), x.cols(), num_classes);
    if (cap < 1) throw DataError(std::string(backend_name(method)) + ": too few samples to embed");
    if (d > cap) {
        warnings.push_back(std::string(backend_name(method)) + ": d = " + std::to_string(d) + " clamped to " +
                           std::to_string(cap));
        d = cap;
    }

    Embedding e;
    switch (method) {
        case Backend::pca: e = pca(x, d); break;
        case Backend::mds: e = classical_mds(pairwise_sq_dists(x), d); break;
        case Backend::isomap: {
            std::size_t k = params.k_graph;
            const auto complete = static_cast<std::size_t>(x.rows() - 1);
            while (true) {
                try {
                    e = isomap(x, k, d);
                    break;
                } catch (const DisconnectedGraphError& err) {
                    if (k >= complete) throw;
                    const std::size_t next = std::min(complete, 2 * k);
                    warnings.push_back("isomap: graph with k_graph = " + std::to_string(k) + " left " +
                                       std::to_string(err.dropped().size()) + " sample(s) disconnected; retrying with " +
                                       std::to_string(next));
                    k = next;
                }
            }
            break;
        }
        case Backend::lle:
            e = lle(x, std::min<std::size_t>(params.k_graph, static_cast<std::size_t>(x.rows() - 1)), d);
            break;
        case Backend::lda: e = lda(x, labels, num_classes, d); break;
        case Backend::kpca: e = kernel_pca(x, params.gamma.value_or(default_kpca_gamma(x)), d); break;
        case Backend::autoencoder: {
            const auto fit = train_autoencoder(x, d, params.autoencoder, params.seed);
            e = ae_encode(fit.model, x);
            break;
        }
    }

    const std::size_t k_used = e.params.k_graph;
    const auto gamma_used = e.params.gamma;
    e.params = params;
    e.params.d = e.d;
    if (method == Backend::isomap || method == Backend::lle) e.params.k_graph = k_used;
    if (method == Backend::kpca) e.params.gamma = gamma_used;
    warnings.insert(warnings.end(), e.warnings.begin(), e.warnings.end());
    e.warnings = std::move(warnings);
    e.method = method;
    return e;
}

}  // namespace sdml
