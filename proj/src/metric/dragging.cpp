#include "sdml/errors.hpp"
#include "sdml/metric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sdml {

namespace {

void require_shape(const Matrix& a, Eigen::Index rows, Eigen::Index cols, const char* what) {
    if (a.rows() != rows || a.cols() != cols) {
        throw DataError(std::string(what) + " is " + std::to_string(a.rows()) + "x" + std::to_string(a.cols()) +
                        ", expected " + std::to_string(rows) + "x" + std::to_string(cols));
    }
}

Matrix residual(const Matrix& x, const RidgeSolution& fit, const Matrix& y) {
    Matrix r = x * fit.w - y;
    r.rowwise() += fit.t.transpose();
    return r;
}

}  // namespace

RidgeSolution solve_wt(const Matrix& x, const Matrix& targets, double lambda) {
    if (!(lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (targets.rows() != x.rows()) throw DataError("solve_wt: target rows do not match samples");
    require_finite(x, "solve_wt");
    const Vector x_mean = x.colwise().mean().transpose();
    const Vector t_mean = targets.colwise().mean().transpose();
    const Matrix xc = x.rowwise() - x_mean.transpose();

    Matrix normal = xc.transpose() * xc;
    normal.diagonal().array() += lambda;
    RidgeSolution out;
    out.w = solve_spd(normal, xc.transpose() * targets);
    out.t = t_mean - out.w.transpose() * x_mean;
    return out;
}

Matrix update_drag(const Matrix& r, const Matrix& b) {
    require_shape(b, r.rows(), r.cols(), "drag direction matrix");
    return (b.array() * r.array()).max(0.0).matrix().cwiseProduct(b.cwiseAbs());
}

double objective(const Matrix& x, const Matrix& w, const Vector& t, const Matrix& y, const Matrix& b, const Matrix& m,
                 double lambda) {
    Matrix r = x * w - y - b.cwiseProduct(m);
    r.rowwise() += t.transpose();
    return r.squaredNorm() + lambda * w.squaredNorm();
}

MetricModel fit_dragging(const Matrix& x, const Matrix& y, const Matrix& b, const FitOptions& options) {
    if (!(options.lambda > 0.0)) throw ConfigError("lambda must be positive");
    if (options.max_iter < 1) throw ConfigError("max_iter must be at least 1");
    if (!(options.tol >= 0.0)) throw ConfigError("tol must be non-negative");
    require_shape(b, y.rows(), y.cols(), "drag direction matrix");
    if (y.rows() != x.rows()) throw DataError("fit: target rows do not match samples");

    MetricModel model;
    model.lambda = options.lambda;
    Matrix m = Matrix::Zero(y.rows(), y.cols());
    for (int iter = 1; iter <= options.max_iter; ++iter) {
        const RidgeSolution fit = solve_wt(x, y + b.cwiseProduct(m), options.lambda);
        Matrix next_m = update_drag(residual(x, fit, y), b);
        const double value = objective(x, fit.w, fit.t, y, b, next_m, options.lambda);
        if (!std::isfinite(value)) {
            throw NumericError("fit: objective became non-finite at iteration " + std::to_string(iter));
        }
        model.w = fit.w;
        model.t = fit.t;
        model.iterations_run = iter;
        const bool unchanged = next_m == m;
        const double previous = model.objective_trace.empty() ? 0.0 : model.objective_trace.back();
        model.objective_trace.push_back(value);
        m = std::move(next_m);
        if (unchanged) {
            model.converged = true;
            break;
        }
        if (iter > 1 && (previous - value) <= options.tol * std::max(std::abs(previous), 1e-300)) {
            model.converged = true;
            break;
        }
    }
    model.drag = std::move(m);
    return model;
}

MetricModel fit_structural(const Matrix& x, const TargetMatrices& targets, const FitOptions& options) {
    if (targets.n != static_cast<std::size_t>(x.rows())) {
        throw DataError("fit_structural: targets cover " + std::to_string(targets.n) + " samples, data has " +
                        std::to_string(x.rows()));
    }
    return fit_dragging(x, targets.dense_y(), targets.dense_b(), options);
}

Matrix one_hot(std::span<const int> labels, int num_classes) {
    Matrix y = Matrix::Zero(static_cast<Eigen::Index>(labels.size()), num_classes);
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] < 0 || labels[i] >= num_classes) throw DataError("label out of range");
        y(static_cast<Eigen::Index>(i), labels[i]) = 1.0;
    }
    return y;
}

MetricModel fit_dlsr_original(const Matrix& x, std::span<const int> labels, int num_classes, const FitOptions& options) {
    if (num_classes < 2) throw DataError("dlsr: need at least two classes");
    if (labels.size() != static_cast<std::size_t>(x.rows())) throw DataError("dlsr: label count does not match rows");
    const Matrix y = one_hot(labels, num_classes);
    const Matrix b = 2.0 * y.array() - 1.0;
    return fit_dragging(x, y, b, options);
}

Matrix transform(const MetricModel& model, const Matrix& x) {
    if (x.cols() != model.inputs()) {
        throw DataError("transform expects " + std::to_string(model.inputs()) + " features, got " +
                        std::to_string(x.cols()));
    }
    Matrix out = x * model.w;
    out.rowwise() += model.t.transpose();
    return out;
}

}  // namespace sdml
