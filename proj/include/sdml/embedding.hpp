#pragma once

#include "sdml/numeric.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sdml {

enum class Backend { pca, mds, isomap, lle, lda, kpca, autoencoder };

std::string_view backend_name(Backend b);
/// Throws ConfigError for an unknown tag.
Backend parse_backend(std::string_view tag);

/// Maps rows of new data into an existing embedding.
class OutOfSampleMap {
public:
    virtual ~OutOfSampleMap() = default;
    virtual Matrix apply(const Matrix& x) const = 0;
    /// The same map restricted to its leading `d` output coordinates.
    virtual std::shared_ptr<const OutOfSampleMap> leading(Eigen::Index d) const = 0;
};

/// coords = (x - center) * projection
class LinearMap final : public OutOfSampleMap {
public:
    LinearMap(Vector center, Matrix projection);
    Matrix apply(const Matrix& x) const override;
    std::shared_ptr<const OutOfSampleMap> leading(Eigen::Index d) const override;
    const Vector& center() const { return center_; }
    const Matrix& projection() const { return projection_; }

private:
    Vector center_;
    Matrix projection_;
};

enum class KernelKind { rbf, linear };

/// Centered-kernel projection against the training rows.
class KernelMap final : public OutOfSampleMap {
public:
    KernelMap(Matrix train, KernelKind kind, double gamma, Vector column_means, double grand_mean, Matrix alpha);
    Matrix apply(const Matrix& x) const override;
    std::shared_ptr<const OutOfSampleMap> leading(Eigen::Index d) const override;

private:
    Matrix train_;
    KernelKind kind_;
    double gamma_;
    Vector column_means_;
    double grand_mean_;
    Matrix alpha_;
};

struct AutoencoderParams {
    int epochs = 200;
    std::size_t batch_size = 32;
    double learning_rate = 0.05;
    double lambda = 1e-4;
};

struct EmbedParams {
    Eigen::Index d = 2;
    std::size_t k_graph = 10;
    /// RBF width; unset means 1 / (m * mean feature variance).
    std::optional<double> gamma;
    AutoencoderParams autoencoder;
    std::uint64_t seed = 0;
};

/// Low-dimensional coordinates of the fitted rows. `oos` is set for the
/// backends that can place unseen rows (pca, lda, kpca, autoencoder).
///
/// LLE coordinates are scaled so that (1/n) coords^T coords = I and every
/// column has zero mean.
struct Embedding {
    Matrix coords;
    Backend method = Backend::pca;
    Eigen::Index d = 0;
    EmbedParams params;
    std::shared_ptr<const OutOfSampleMap> oos;
    std::vector<std::string> warnings;

    bool has_oos() const { return oos != nullptr; }
    /// Throws ConfigError when the backend has no out-of-sample map.
    Matrix map(const Matrix& x) const;
    /// Leading `d` coordinates. Valid for the spectral backends, whose
    /// solutions are nested in d.
    Embedding leading(Eigen::Index d) const;
};

Embedding pca(const Matrix& x, Eigen::Index d);

/// Classical scaling of a squared-distance matrix. Shrinks d to the number of
/// positive eigenvalues (at least 1), recording a warning.
Embedding classical_mds(const Matrix& sq_dists, Eigen::Index d);

/// Symmetrized k-nearest-neighbour graph, geodesic distances, then classical
/// scaling. Throws DisconnectedGraphError if the graph is not connected.
Embedding isomap(const Matrix& x, std::size_t k_graph, Eigen::Index d);

/// Indices of the k nearest other rows of `sq_dists`, nearest first; ties go
/// to the smaller index.
std::vector<std::vector<std::size_t>> nearest_neighbors(const Matrix& sq_dists, std::size_t k);

/// Dense n x n reconstruction weights; row i is supported on the k nearest
/// neighbours of i and sums to one.
Matrix lle_weights(const Matrix& x, std::size_t k_nbrs);
Embedding lle(const Matrix& x, std::size_t k_nbrs, Eigen::Index d);

/// Within-class and between-class scatter, each averaged over classes.
struct ScatterMatrices {
    Matrix within;
    Matrix between;
};
ScatterMatrices class_scatter(const Matrix& x, std::span<const int> labels, int num_classes);

/// Ratio-trace LDA: top-d generalized eigenvectors of (within + gamma I, between),
/// normalized so that W^T (within + gamma I) W = I. Requires 1 <= d <= C-1.
Embedding lda(const Matrix& x, std::span<const int> labels, int num_classes, Eigen::Index d);

double default_kpca_gamma(const Matrix& x);
Embedding kernel_pca(const Matrix& x, double gamma, Eigen::Index d, KernelKind kind = KernelKind::rbf);

/// Single hidden layer, sigmoid hidden units, linear output, decoder tied to W^T.
struct AutoencoderModel {
    Matrix w;   // m x h
    Vector b1;  // h
    Vector b2;  // m

    Eigen::Index inputs() const { return w.rows(); }
    Eigen::Index hidden() const { return w.cols(); }
};

struct AutoencoderGradient {
    Matrix w;
    Vector b1;
    Vector b2;
};

struct AutoencoderFit {
    AutoencoderModel model;
    std::vector<double> loss;  // after each epoch
    Matrix hidden;             // activations of the training rows under the final model
};

/// Glorot-uniform weights, zero biases.
AutoencoderModel init_autoencoder(Eigen::Index inputs, Eigen::Index hidden, std::uint64_t seed);

/// (1 / 2N) sum ||reconstruction - x||^2 + (lambda / 2) ||W||^2
double autoencoder_loss(const AutoencoderModel& model, const Matrix& x, double lambda);
AutoencoderGradient autoencoder_gradient(const AutoencoderModel& model, const Matrix& x, double lambda);

/// Mini-batch gradient descent with a seeded batch order. Throws NumericError
/// if the loss stops being finite.
AutoencoderFit train_autoencoder(const Matrix& x, Eigen::Index d, const AutoencoderParams& params,
                                 std::uint64_t seed);

Matrix ae_hidden(const AutoencoderModel& model, const Matrix& x);
Embedding ae_encode(const AutoencoderModel& model, const Matrix& x);

/// Dispatches to a backend. `labels` may be empty except for lda. Requests
/// above a backend's dimension cap are clamped with a warning; an isomap
/// graph that comes out disconnected is rebuilt with k_graph doubled.
Embedding embed(const Matrix& x, std::span<const int> labels, Backend method, const EmbedParams& params);

/// Largest d the backend accepts for an n x m input with C classes.
Eigen::Index max_dimension(Backend method, Eigen::Index n, Eigen::Index m, int num_classes);

}  // namespace sdml
