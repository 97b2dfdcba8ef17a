#include "sdml/embedding.hpp"
#include "sdml/errors.hpp"

#include <cmath>
#include <numeric>
#include <string>

namespace sdml {

namespace {

Matrix sigmoid(const Matrix& z) {
    return (1.0 / (1.0 + (-z.array()).exp())).matrix();
}

class EncoderMap final : public OutOfSampleMap {
public:
    explicit EncoderMap(AutoencoderModel model) : model_(std::move(model)) {}
    Matrix apply(const Matrix& x) const override { return ae_hidden(model_, x); }
    std::shared_ptr<const OutOfSampleMap> leading(Eigen::Index) const override {
        throw ConfigError("autoencoder embeddings are not nested in d");
    }

private:
    AutoencoderModel model_;
};

void check_inputs(const AutoencoderModel& model, const Matrix& x) {
    if (x.cols() != model.inputs()) {
        throw DataError("autoencoder expects " + std::to_string(model.inputs()) + " features, got " +
                        std::to_string(x.cols()));
    }
}

}  // namespace

AutoencoderModel init_autoencoder(Eigen::Index inputs, Eigen::Index hidden, std::uint64_t seed) {
    if (inputs < 1 || hidden < 1) throw ConfigError("autoencoder: input and hidden widths must be positive");
    Rng rng(seed);
    const double limit = std::sqrt(6.0 / static_cast<double>(inputs + hidden));
    AutoencoderModel model{Matrix(inputs, hidden), Vector::Zero(hidden), Vector::Zero(inputs)};
    for (Eigen::Index j = 0; j < hidden; ++j) {
        for (Eigen::Index i = 0; i < inputs; ++i) model.w(i, j) = rng.uniform(-limit, limit);
    }
    return model;
}

Matrix ae_hidden(const AutoencoderModel& model, const Matrix& x) {
    check_inputs(model, x);
    Matrix z = x * model.w;
    z.rowwise() += model.b1.transpose();
    return sigmoid(z);
}

double autoencoder_loss(const AutoencoderModel& model, const Matrix& x, double lambda) {
    const Matrix h = ae_hidden(model, x);
    Matrix r = h * model.w.transpose();
    r.rowwise() += model.b2.transpose();
    r -= x;
    return r.squaredNorm() / (2.0 * static_cast<double>(x.rows())) + 0.5 * lambda * model.w.squaredNorm();
}

AutoencoderGradient autoencoder_gradient(const AutoencoderModel& model, const Matrix& x, double lambda) {
    const Matrix h = ae_hidden(model, x);
    Matrix g = h * model.w.transpose();
    g.rowwise() += model.b2.transpose();
    g -= x;
    g /= static_cast<double>(x.rows());

    const Matrix dz = ((g * model.w).array() * h.array() * (1.0 - h.array())).matrix();
    AutoencoderGradient grad;
    grad.w = g.transpose() * h + x.transpose() * dz + lambda * model.w;
    grad.b1 = dz.colwise().sum().transpose();
    grad.b2 = g.colwise().sum().transpose();
    return grad;
}

AutoencoderFit train_autoencoder(const Matrix& x, Eigen::Index d, const AutoencoderParams& params,
                                 std::uint64_t seed) {
    require_finite(x, "train_autoencoder");
    if (d < 1) throw ConfigError("autoencoder: hidden width must be at least 1");
    if (params.epochs < 0) throw ConfigError("autoencoder: epochs must be non-negative");
    if (params.batch_size < 1) throw ConfigError("autoencoder: batch size must be at least 1");
    if (!(params.learning_rate > 0.0)) throw ConfigError("autoencoder: learning rate must be positive");
    if (params.lambda < 0.0) throw ConfigError("autoencoder: lambda must be non-negative");

    AutoencoderFit fit;
    fit.model = init_autoencoder(x.cols(), d, derive_seed(seed, 1));
    Rng order_rng(derive_seed(seed, 2));
    const auto n = static_cast<std::size_t>(x.rows());
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});

    for (int epoch = 0; epoch < params.epochs; ++epoch) {
        order_rng.shuffle(std::span<std::size_t>(order));
        for (std::size_t start = 0; start < n; start += params.batch_size) {
            const std::size_t stop = std::min(n, start + params.batch_size);
            Matrix batch(static_cast<Eigen::Index>(stop - start), x.cols());
            for (std::size_t r = start; r < stop; ++r) {
                batch.row(static_cast<Eigen::Index>(r - start)) = x.row(static_cast<Eigen::Index>(order[r]));
            }
            const auto grad = autoencoder_gradient(fit.model, batch, params.lambda);
            fit.model.w -= params.learning_rate * grad.w;
            fit.model.b1 -= params.learning_rate * grad.b1;
            fit.model.b2 -= params.learning_rate * grad.b2;
        }
        const double loss = autoencoder_loss(fit.model, x, params.lambda);
        if (!std::isfinite(loss)) {
            throw NumericError("autoencoder: loss became non-finite at epoch " + std::to_string(epoch + 1) +
                               " (learning rate " + std::to_string(params.learning_rate) + " is too high)");
        }
        fit.loss.push_back(loss);
    }
    fit.hidden = ae_hidden(fit.model, x);
    return fit;
}

Embedding ae_encode(const AutoencoderModel& model, const Matrix& x) {
    Embedding e;
    e.method = Backend::autoencoder;
    e.d = model.hidden();
    e.params.d = model.hidden();
    e.coords = ae_hidden(model, x);
    e.oos = std::make_shared<EncoderMap>(model);
    return e;
}

}  // namespace sdml
