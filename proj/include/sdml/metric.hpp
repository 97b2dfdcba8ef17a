#pragma once

#include "sdml/neighborhood.hpp"
#include "sdml/numeric.hpp"

#include <filesystem>
#include <iosfwd>
#include <span>
#include <vector>

namespace sdml {

/// Affine map x -> W^T x + t into a p-dimensional target space.
struct MetricModel {
    Matrix w;  // m x p
    Vector t;  // p
    double lambda = 0.0;
    int iterations_run = 0;
    bool converged = false;
    std::vector<double> objective_trace;
    Matrix drag;  // final M, n x p; not serialized

    Eigen::Index inputs() const { return w.rows(); }
    Eigen::Index outputs() const { return w.cols(); }
};

struct RidgeSolution {
    Matrix w;
    Vector t;
};

struct FitOptions {
    double lambda = 0.1;
    double tol = 1e-6;
    int max_iter = 50;
};

/// Minimizer of ||X W + e t^T - T||^2 + lambda ||W||^2. The intercept is left
/// unpenalized, so W comes from the column-centered problem.
RidgeSolution solve_wt(const Matrix& x, const Matrix& targets, double lambda);

/// M_ij = max(B_ij R_ij, 0) where B_ij != 0, else 0.
Matrix update_drag(const Matrix& residual, const Matrix& directions);

/// ||X W + e t^T - Y - B .* M||^2 + lambda ||W||^2
double objective(const Matrix& x, const Matrix& w, const Vector& t, const Matrix& y, const Matrix& b, const Matrix& m,
                 double lambda);

/// Alternates ridge and drag updates from M = 0. Stops when the relative
/// objective decrease falls below tol, when M stops changing, or at max_iter.
MetricModel fit_dragging(const Matrix& x, const Matrix& y, const Matrix& b, const FitOptions& options);

/// Dragging fit against neighbourhood targets; p equals the number of rows of x.
MetricModel fit_structural(const Matrix& x, const TargetMatrices& targets, const FitOptions& options);

/// One-hot n x C indicator matrix.
Matrix one_hot(std::span<const int> labels, int num_classes);

/// Dragging fit against one-hot class targets with B = 2Y - 1.
MetricModel fit_dlsr_original(const Matrix& x, std::span<const int> labels, int num_classes, const FitOptions& options);

/// X W + e t^T
Matrix transform(const MetricModel& model, const Matrix& x);

/// Text container: shape header, row-major W, t, lambda, iteration count and
/// objective trace. Doubles are written in shortest round-trip form.
void write_model(std::ostream& out, const MetricModel& model);
MetricModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const MetricModel& model);
MetricModel load_model(const std::filesystem::path& path);

}  // namespace sdml
