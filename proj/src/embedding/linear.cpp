#include "sdml/embedding.hpp"
#include "sdml/errors.hpp"

#include <array>
#include <cmath>
#include <string>

namespace sdml {

namespace {

constexpr std::array<std::pair<Backend, std::string_view>, 7> kBackendNames = {{
    {Backend::pca, "pca"},
    {Backend::mds, "mds"},
    {Backend::isomap, "isomap"},
    {Backend::lle, "lle"},
    {Backend::lda, "lda"},
    {Backend::kpca, "kpca"},
    {Backend::autoencoder, "autoencoder"},
}};

}  // namespace

std::string_view backend_name(Backend b) {
    for (const auto& [backend, name] : kBackendNames) {
        if (backend == b) return name;
    }
    return "unknown";
}

Backend parse_backend(std::string_view tag) {
    for (const auto& [backend, name] : kBackendNames) {
        if (name == tag) return backend;
    }
    throw ConfigError("unknown embedding method '" + std::string(tag) +
                      "' (expected pca, mds, isomap, lle, lda, kpca or autoencoder)");
}

LinearMap::LinearMap(Vector center, Matrix projection) : center_(std::move(center)), projection_(std::move(projection)) {}

Matrix LinearMap::apply(const Matrix& x) const {
    if (x.cols() != center_.size()) {
        throw DataError("out-of-sample map expects " + std::to_string(center_.size()) + " features, got " +
                        std::to_string(x.cols()));
    }
    return (x.rowwise() - center_.transpose()) * projection_;
}

std::shared_ptr<const OutOfSampleMap> LinearMap::leading(Eigen::Index d) const {
    return std::make_shared<LinearMap>(center_, projection_.leftCols(d));
}

Matrix Embedding::map(const Matrix& x) const {
    if (!oos) throw ConfigError(std::string(backend_name(method)) + " embedding has no out-of-sample map");
    return oos->apply(x);
}

Embedding Embedding::leading(Eigen::Index keep) const {
    if (method == Backend::autoencoder) throw ConfigError("autoencoder embeddings are not nested in d");
    if (keep < 1 || keep > d) {
        throw ConfigError("cannot take " + std::to_string(keep) + " leading coordinates of a " + std::to_string(d) +
                          "-dimensional embedding");
    }
    Embedding out = *this;
    out.coords = coords.leftCols(keep);
    out.d = keep;
    out.params.d = keep;
    if (oos) out.oos = oos->leading(keep);
    return out;
}

Embedding pca(const Matrix& x, Eigen::Index d) {
    require_finite(x, "pca");
    const Eigen::Index n = x.rows();
    const Eigen::Index m = x.cols();
    if (d < 1 || d > std::min(m, n - 1)) {
        throw ConfigError("pca: d = " + std::to_string(d) + " outside [1, " + std::to_string(std::min(m, n - 1)) + "]");
    }
    const Vector mean = x.colwise().mean().transpose();
    const Matrix centered = x.rowwise() - mean.transpose();
    const Matrix cov = centered.transpose() * centered / static_cast<double>(n - 1);
    const auto eig = sym_eig(cov, EigenOrder::descending);
    Matrix projection = eig.vectors.leftCols(d);

    Embedding e;
    e.method = Backend::pca;
    e.d = d;
    e.params.d = d;
    e.coords = centered * projection;
    e.oos = std::make_shared<LinearMap>(mean, std::move(projection));
    return e;
}

ScatterMatrices class_scatter(const Matrix& x, std::span<const int> labels, int num_classes) {
    if (static_cast<std::size_t>(x.rows()) != labels.size()) throw DataError("lda: label count does not match rows");
    const Eigen::Index m = x.cols();
    std::vector<Vector> means(static_cast<std::size_t>(num_classes), Vector::Zero(m));
    std::vector<double> counts(static_cast<std::size_t>(num_classes), 0.0);
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const auto c = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
        if (c >= counts.size()) throw DataError("lda: label out of range");
        means[c] += x.row(i).transpose();
        counts[c] += 1.0;
    }
    int present = 0;
    Vector overall = Vector::Zero(m);
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0.0) continue;
        means[c] /= counts[c];
        overall += means[c];
        ++present;
    }
    if (present < 2) throw DataError("lda: need at least two populated classes");
    overall /= present;

    ScatterMatrices s{Matrix::Zero(m, m), Matrix::Zero(m, m)};
    std::vector<Matrix> within(counts.size(), Matrix::Zero(m, m));
    for (Eigen::Index i = 0; i < x.rows(); ++i) {
        const auto c = static_cast<std::size_t>(labels[static_cast<std::size_t>(i)]);
        const Vector dev = x.row(i).transpose() - means[c];
        within[c].noalias() += dev * dev.transpose();
    }
    for (std::size_t c = 0; c < counts.size(); ++c) {
        if (counts[c] == 0.0) continue;
        s.within += within[c] / counts[c];
        const Vector gap = means[c] - overall;
        s.between += gap * gap.transpose();
    }
    s.within /= present;
    s.between /= present;
    return s;
}

Embedding lda(const Matrix& x, std::span<const int> labels, int num_classes, Eigen::Index d) {
    require_finite(x, "lda");
    if (num_classes < 2) throw DataError("lda: need at least two classes");
    if (d < 1 || d > num_classes - 1) {
        throw ConfigError("lda: d = " + std::to_string(d) + " outside [1, " + std::to_string(num_classes - 1) + "]");
    }
    const auto scatter = class_scatter(x, labels, num_classes);
    const Eigen::Index m = x.cols();
    const double trace = scatter.within.trace();
    const double gamma = trace > 0.0 ? 1e-6 * trace / static_cast<double>(m) : 1e-12;
    const Matrix regularized = scatter.within + gamma * Matrix::Identity(m, m);

    Eigen::LLT<Matrix> chol(regularized);
    if (chol.info() != Eigen::Success) throw NumericError("lda: within-class scatter is not positive definite");
    const Matrix l = chol.matrixL();
    // A = L^-1 S_B L^-T, then W = L^-T V.
    Matrix a = l.triangularView<Eigen::Lower>().solve(scatter.between);
    a = l.triangularView<Eigen::Lower>().solve(a.transpose()).transpose();
    const auto eig = sym_eig(a, EigenOrder::descending);
    Matrix w = l.transpose().triangularView<Eigen::Upper>().solve(eig.vectors.leftCols(d));

    Embedding e;
    e.method = Backend::lda;
    e.d = d;
    e.params.d = d;
    const double scale = std::max(std::abs(eig.values[0]), scatter.between.cwiseAbs().maxCoeff());
    if (!(scale > 1e-12 * std::max(1.0, trace))) {
        e.warnings.push_back("lda: between-class scatter is numerically zero; projection directions are arbitrary");
    }
    const Vector mean = x.colwise().mean().transpose();
    e.coords = (x.rowwise() - mean.transpose()) * w;
    e.oos = std::make_shared<LinearMap>(mean, std::move(w));
    return e;
}

}  // namespace sdml
