#include "sdml/embedding.hpp"
#include "sdml/errors.hpp"

#include <cmath>
#include <string>

namespace sdml {

namespace {

Matrix kernel(const Matrix& a, const Matrix& b, KernelKind kind, double gamma) {
    if (kind == KernelKind::linear) return a * b.transpose();
    return (-gamma * cross_sq_dists(a, b).array()).exp().matrix();
}

}  // namespace

KernelMap::KernelMap(Matrix train, KernelKind kind, double gamma, Vector column_means, double grand_mean, Matrix alpha)
    : train_(std::move(train)),
      kind_(kind),
      gamma_(gamma),
      column_means_(std::move(column_means)),
      grand_mean_(grand_mean),
      alpha_(std::move(alpha)) {}

Matrix KernelMap::apply(const Matrix& x) const {
    if (x.cols() != train_.cols()) {
        throw DataError("kernel map expects " + std::to_string(train_.cols()) + " features, got " +
                        std::to_string(x.cols()));
    }
    Matrix k = kernel(x, train_, kind_, gamma_);
    const Vector row_means = k.rowwise().mean();
    k.rowwise() -= column_means_.transpose();
    k.colwise() -= row_means;
    k.array() += grand_mean_;
    return k * alpha_;
}

std::shared_ptr<const OutOfSampleMap> KernelMap::leading(Eigen::Index d) const {
    return std::make_shared<KernelMap>(train_, kind_, gamma_, column_means_, grand_mean_, alpha_.leftCols(d));
}

double default_kpca_gamma(const Matrix& x) {
    const Vector mean = x.colwise().mean().transpose();
    const double mean_variance =
        (x.rowwise() - mean.transpose()).array().square().sum() / static_cast<double>(x.rows() * x.cols());
    if (!(mean_variance > 0.0)) return 1.0 / static_cast<double>(x.cols());
    return 1.0 / (static_cast<double>(x.cols()) * mean_variance);
}

Embedding kernel_pca(const Matrix& x, double gamma, Eigen::Index d, KernelKind kind) {
    require_finite(x, "kernel_pca");
    const Eigen::Index n = x.rows();
    if (kind == KernelKind::rbf && !(gamma > 0.0)) throw ConfigError("kernel_pca: gamma must be positive");
    if (d < 1 || d > n - 1) {
        throw ConfigError("kernel_pca: d = " + std::to_string(d) + " outside [1, " + std::to_string(n - 1) + "]");
    }
    const Matrix k = kernel(x, x, kind, gamma);
    const Vector column_means = k.colwise().mean().transpose();
    const double grand = k.mean();
    Matrix centered = k;
    centered.rowwise() -= column_means.transpose();
    centered.colwise() -= column_means;
    centered.array() += grand;

    const auto eig = sym_eig(centered, EigenOrder::descending);
    Eigen::Index positive = 0;
    while (positive < n && eig.values[positive] >= 1e-12) ++positive;
    if (positive == 0) throw NumericError("kernel_pca: degenerate kernel (all eigenvalues below 1e-12)");

    Embedding e;
    e.method = Backend::kpca;
    Eigen::Index kept = d;
    if (kept > positive) {
        kept = positive;
        e.warnings.push_back("kernel_pca: only " + std::to_string(positive) + " usable eigenvalue(s); d reduced from " +
                             std::to_string(d) + " to " + std::to_string(kept));
    }
    e.d = kept;
    e.params.d = kept;
    if (kind == KernelKind::rbf) e.params.gamma = gamma;

    Matrix alpha(n, kept);
    e.coords.resize(n, kept);
    for (Eigen::Index c = 0; c < kept; ++c) {
        const double root = std::sqrt(eig.values[c]);
        e.coords.col(c) = eig.vectors.col(c) * root;
        alpha.col(c) = eig.vectors.col(c) / root;
    }
    e.oos = std::make_shared<KernelMap>(x, kind, gamma, column_means, grand, std::move(alpha));
    return e;
}

}  // namespace sdml
