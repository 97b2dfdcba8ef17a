#include "sdml/errors.hpp"
#include "sdml/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace sdml {

Matrix solve_spd(const Matrix& a, const Matrix& b) {
    if (a.rows() != a.cols()) throw NumericError("solve_spd: coefficient matrix is not square");
    if (b.rows() != a.rows()) {
        throw NumericError("solve_spd: right-hand side has " + std::to_string(b.rows()) +
                           " rows, expected " + std::to_string(a.rows()));
    }
    require_finite(a, "solve_spd");
    if (b.cols() > 0 && !b.allFinite()) throw NumericError("solve_spd: right-hand side is not finite");

    const Eigen::Index n = a.rows();
    const double threshold = 1e-12 * a.trace() / static_cast<double>(n);

    // Lower Cholesky factor, column by column; only the lower triangle of A is read.
    Matrix l = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        double pivot = a(j, j) - l.row(j).head(j).squaredNorm();
        if (!(pivot > threshold) || pivot <= 0.0) {
            throw SingularMatrixError("solve_spd: pivot " + std::to_string(j) + " is " +
                                      std::to_string(pivot) +
                                      "; matrix is numerically singular (increase regularization)");
        }
        const double ljj = std::sqrt(pivot);
        l(j, j) = ljj;
        for (Eigen::Index i = j + 1; i < n; ++i) {
            l(i, j) = (a(i, j) - l.row(i).head(j).dot(l.row(j).head(j))) / ljj;
        }
    }

    Matrix x = b;
    l.triangularView<Eigen::Lower>().solveInPlace(x);
    l.transpose().triangularView<Eigen::Upper>().solveInPlace(x);
    return x;
}

Matrix cross_sq_dists(const Matrix& a, const Matrix& b) {
    if (a.cols() != b.cols()) throw NumericError("cross_sq_dists: column counts differ");
    // Samples as contiguous columns.
    const Matrix at = a.transpose();
    const Matrix bt = b.transpose();
    Matrix out(a.rows(), b.rows());
    for (Eigen::Index j = 0; j < b.rows(); ++j) {
        for (Eigen::Index i = 0; i < a.rows(); ++i) {
            out(i, j) = (at.col(i) - bt.col(j)).squaredNorm();
        }
    }
    return out;
}

Matrix pairwise_sq_dists(const Matrix& x) {
    if (x.rows() < 1) throw NumericError("pairwise_sq_dists: need at least one row");
    const Matrix xt = x.transpose();
    const Eigen::Index n = x.rows();
    Matrix out = Matrix::Zero(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        for (Eigen::Index i = j + 1; i < n; ++i) {
            const double d = std::max(0.0, (xt.col(i) - xt.col(j)).squaredNorm());
            out(i, j) = d;
            out(j, i) = d;
        }
    }
    return out;
}

}  // namespace sdml
