#include "sdml/errors.hpp"
#include "sdml/numeric.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <vector>

namespace sdml {

void require_finite(const Matrix& m, std::string_view what) {
    if (m.rows() < 1 || m.cols() < 1) {
        throw NumericError(std::string(what) + ": matrix must have at least one row and column");
    }
    if (!m.allFinite()) {
        throw NumericError(std::string(what) + ": matrix has non-finite entries");
    }
}

EigenResult sym_eig(const Matrix& a, EigenOrder order) {
    if (a.rows() != a.cols()) {
        throw NumericError("sym_eig: matrix is " + std::to_string(a.rows()) + "x" +
                           std::to_string(a.cols()) + ", expected square");
    }
    require_finite(a, "sym_eig");

    const Matrix sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Matrix> solver(sym, Eigen::ComputeEigenvectors);
    if (solver.info() != Eigen::Success) {
        throw NumericError("sym_eig: eigensolver did not converge");
    }

    const Vector& raw_values = solver.eigenvalues();  // ascending
    const Matrix& raw_vectors = solver.eigenvectors();
    const Eigen::Index n = sym.rows();

    std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), Eigen::Index{0});
    if (order == EigenOrder::descending) {
        std::stable_sort(perm.begin(), perm.end(), [&](Eigen::Index x, Eigen::Index y) {
            return raw_values[x] > raw_values[y];
        });
    }

    EigenResult out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::Index src = perm[static_cast<std::size_t>(j)];
        out.values[j] = raw_values[src];
        Vector v = raw_vectors.col(src);
        v.normalize();
        Eigen::Index arg = 0;
        v.cwiseAbs().maxCoeff(&arg);
        if (v[arg] < 0.0) v = -v;
        out.vectors.col(j) = v;
    }
    return out;
}

}  // namespace sdml
