#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <limits>
#include <span>
#include <string_view>
#include <utility>

namespace sdml {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Sentinel for "no edge" / "unreachable" in graph matrices.
inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Throws NumericError unless `m` is non-empty and every entry is finite.
void require_finite(const Matrix& m, std::string_view what);

enum class EigenOrder { ascending, descending };

/// Eigenpairs of a real symmetric matrix. Columns of `vectors` are unit-norm,
/// mutually orthogonal, and sign-normalized so that each column's
/// largest-magnitude entry is positive.
struct EigenResult {
    Vector values;
    Matrix vectors;
};

/// Symmetric eigendecomposition of (A + A^T)/2. Equal eigenvalues keep the
/// order the solver produced them in, so the output is deterministic.
EigenResult sym_eig(const Matrix& a, EigenOrder order);

/// Solves A X = B for symmetric positive-definite A by Cholesky factorization.
/// Throws SingularMatrixError when a pivot drops below 1e-12 * trace(A) / n.
Matrix solve_spd(const Matrix& a, const Matrix& b);

/// n x n matrix of squared Euclidean distances between the rows of `x`.
Matrix pairwise_sq_dists(const Matrix& x);

/// |a| x |b| matrix of squared Euclidean distances between rows of a and b.
Matrix cross_sq_dists(const Matrix& a, const Matrix& b);

/// All-pairs shortest paths (Dijkstra per source) over a weighted adjacency
/// matrix; absent edges and unreachable pairs are kInfinity.
Matrix graph_shortest_paths(const Matrix& weights);

/// Deterministic random source. Draws are built from raw 64-bit engine
/// output so results do not depend on the standard library's distributions.
class Rng {
public:
    explicit Rng(std::uint64_t seed);

    std::uint64_t next();
    /// Uniform on [0, 1).
    double uniform();
    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    /// Uniform integer on [0, n); n must be positive.
    std::size_t below(std::size_t n);
    /// Standard normal.
    double normal();

    template <typename T>
    void shuffle(std::span<T> items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            std::swap(items[i - 1], items[below(i)]);
        }
    }

private:
    std::uint64_t state_[4];
};

/// Mixes a base seed with stream identifiers into an independent seed.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream_a, std::uint64_t stream_b = 0);

}  // namespace sdml
