#include "oracles.hpp"

#include "sdml/errors.hpp"
#include "sdml/numeric.hpp"

#include <doctest.h>

#include <set>

using namespace sdml;

namespace {

double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace

TEST_CASE("sym_eig on small hand cases") {
    SUBCASE("identity") {
        const auto r = sym_eig(Matrix::Identity(3, 3), EigenOrder::ascending);
        CHECK(max_abs(r.values - Vector::Ones(3)) < 1e-12);
        // columns are a signed permutation of e1..e3 made positive by convention
        std::set<Eigen::Index> hit;
        for (int c = 0; c < 3; ++c) {
            Eigen::Index row = 0;
            CHECK(r.vectors.col(c).maxCoeff(&row) == doctest::Approx(1.0));
            hit.insert(row);
        }
        CHECK(hit.size() == 3);
    }
    SUBCASE("2x2 characteristic roots") {
        Matrix a(2, 2);
        a << 2, 1, 1, 2;
        const auto r = sym_eig(a, EigenOrder::ascending);
        CHECK(r.values[0] == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(r.values[1] == doctest::Approx(3.0).epsilon(1e-12));
    }
    SUBCASE("diagonal descending") {
        const Matrix a = Vector::Map(std::vector<double>{5, 2, 9}.data(), 3).asDiagonal();
        const auto r = sym_eig(a, EigenOrder::descending);
        CHECK(r.values[0] == 9.0);
        CHECK(r.values[1] == 5.0);
        CHECK(r.values[2] == 2.0);
    }
}

TEST_CASE("sym_eig rejects bad input") {
    CHECK_THROWS_AS(sym_eig(Matrix::Zero(2, 3), EigenOrder::ascending), NumericError);
    Matrix bad = Matrix::Identity(2, 2);
    bad(0, 1) = std::nan("");
    CHECK_THROWS_AS(sym_eig(bad, EigenOrder::ascending), NumericError);
}

TEST_CASE("sym_eig invariants against a Jacobi oracle") {
    for (int n : {1, 2, 5, 13, 30, 50}) {
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const Matrix a = oracle::random_symmetric(n, 100 * n + seed);
            const auto r = sym_eig(a, EigenOrder::ascending);
            const double tol = 1e-8 * (1.0 + max_abs(a));
            CHECK(max_abs(a * r.vectors - r.vectors * r.values.asDiagonal()) <= tol);
            CHECK(max_abs(r.vectors.transpose() * r.vectors - Matrix::Identity(n, n)) <= 1e-8);
            CHECK(max_abs(r.vectors * r.values.asDiagonal() * r.vectors.transpose() - a) <= tol);
            CHECK(max_abs(r.values - oracle::jacobi_eigenvalues(a)) <= tol);
            for (int c = 0; c < n; ++c) {
                Eigen::Index at = 0;
                r.vectors.col(c).cwiseAbs().maxCoeff(&at);
                CHECK(r.vectors(at, c) > 0.0);
            }
            for (int c = 1; c < n; ++c) CHECK(r.values[c - 1] <= r.values[c]);
        }
    }
}

TEST_CASE("sym_eig descending reverses ascending and is deterministic") {
    const Matrix a = oracle::random_symmetric(8, 7);
    const auto up = sym_eig(a, EigenOrder::ascending);
    const auto down = sym_eig(a, EigenOrder::descending);
    for (int i = 0; i < 8; ++i) CHECK(down.values[i] == doctest::Approx(up.values[7 - i]).epsilon(1e-12));
    const auto again = sym_eig(a, EigenOrder::descending);
    CHECK((again.vectors.array() == down.vectors.array()).all());
}

TEST_CASE("solve_spd hand cases") {
    const Matrix b = oracle::random_matrix(3, 2, 4);
    CHECK(max_abs(solve_spd(Matrix::Identity(3, 3), b) - b) < 1e-14);

    Matrix a(2, 2);
    a << 2, 0, 0, 4;
    Matrix rhs(2, 1);
    rhs << 2, 8;
    const Matrix x = solve_spd(a, rhs);
    CHECK(x(0, 0) == doctest::Approx(1.0));
    CHECK(x(1, 0) == doctest::Approx(2.0));
}

TEST_CASE("solve_spd agrees with conjugate gradients") {
    for (int n : {1, 3, 5, 10, 20}) {
        for (std::uint64_t seed = 1; seed <= 4; ++seed) {
            const Matrix a = oracle::random_spd(n, 50 + seed * n);
            const Matrix b = oracle::random_matrix(n, 3, 90 + seed);
            const Matrix x = solve_spd(a, b);
            CHECK(max_abs(a * x - b) <= 1e-8 * (1.0 + max_abs(b)));
            CHECK(max_abs(x - oracle::conjugate_gradient(a, b)) <= 1e-6);
        }
    }
}

TEST_CASE("solve_spd signals singular systems") {
    Matrix a = Matrix::Zero(3, 3);
    a(0, 0) = 1.0;
    a(1, 1) = 1.0;
    CHECK_THROWS_AS(solve_spd(a, Matrix::Ones(3, 1)), SingularMatrixError);
    Matrix rank1 = Vector::Ones(4) * Vector::Ones(4).transpose();
    CHECK_THROWS_AS(solve_spd(rank1, Matrix::Ones(4, 1)), SingularMatrixError);
    CHECK_THROWS_AS(solve_spd(Matrix::Identity(2, 2), Matrix::Ones(3, 1)), NumericError);
}

TEST_CASE("pairwise_sq_dists") {
    CHECK(pairwise_sq_dists(Matrix::Ones(1, 3))(0, 0) == 0.0);

    Matrix tri(2, 2);
    tri << 0, 0, 3, 4;
    const Matrix d = pairwise_sq_dists(tri);
    CHECK(d(0, 1) == doctest::Approx(25.0));
    CHECK(d(1, 0) == doctest::Approx(25.0));

    const Matrix x = oracle::random_matrix(4, 3, 11);
    CHECK(max_abs(pairwise_sq_dists(x) - oracle::naive_sq_dists(x)) <= 1e-10);

    const Matrix dup = Matrix::Constant(3, 2, 1e8);
    const Matrix dz = pairwise_sq_dists(dup);
    CHECK((dz.array() >= 0.0).all());
}

TEST_CASE("pairwise_sq_dists is a metric on square roots") {
    const Matrix x = oracle::random_matrix(25, 4, 12);
    const Matrix d = pairwise_sq_dists(x).cwiseSqrt();
    CHECK(max_abs(d - d.transpose()) == 0.0);
    CHECK(d.diagonal().cwiseAbs().maxCoeff() == 0.0);
    for (int i = 0; i < 25; ++i) {
        for (int j = 0; j < 25; ++j) {
            for (int k = 0; k < 25; ++k) CHECK_LE(d(i, k), d(i, j) + d(j, k) + 1e-12);
        }
    }
}

TEST_CASE("cross_sq_dists matches the full matrix block") {
    const Matrix a = oracle::random_matrix(5, 3, 21);
    const Matrix b = oracle::random_matrix(4, 3, 22);
    Matrix both(9, 3);
    both << a, b;
    CHECK(max_abs(cross_sq_dists(a, b) - oracle::naive_sq_dists(both).topRightCorner(5, 4)) <= 1e-10);
    CHECK_THROWS_AS(cross_sq_dists(a, Matrix::Zero(2, 2)), NumericError);
}

TEST_CASE("graph_shortest_paths") {
    SUBCASE("path graph") {
        Matrix w = Matrix::Constant(3, 3, kInfinity);
        w.diagonal().setZero();
        w(0, 1) = w(1, 0) = 1.0;
        w(1, 2) = w(2, 1) = 2.0;
        const Matrix d = graph_shortest_paths(w);
        CHECK(d(0, 2) == 3.0);
        CHECK(d(2, 0) == 3.0);
    }
    SUBCASE("complete Euclidean graph is its own closure") {
        const Matrix x = oracle::random_matrix(8, 2, 31);
        const Matrix w = pairwise_sq_dists(x).cwiseSqrt();
        CHECK(max_abs(graph_shortest_paths(w) - w) <= 1e-12);
    }
    SUBCASE("disconnected pair") {
        Matrix w(2, 2);
        w << 0, kInfinity, kInfinity, 0;
        const Matrix d = graph_shortest_paths(w);
        CHECK(d(0, 1) == kInfinity);
        CHECK(d(0, 0) == 0.0);
    }
    SUBCASE("negative weight") {
        Matrix w(2, 2);
        w << 0, -1, -1, 0;
        CHECK_THROWS_AS(graph_shortest_paths(w), NumericError);
    }
}

TEST_CASE("graph_shortest_paths satisfies the triangle inequality") {
    const int n = 20;
    oracle::Mat w = oracle::Mat::Constant(n, n, kInfinity);
    w.diagonal().setZero();
    Rng rng(5);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (rng.uniform() < 0.2) w(i, j) = w(j, i) = rng.uniform(0.1, 5.0);
        }
    }
    const Matrix d = graph_shortest_paths(w);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j) {
            CHECK_LE(d(i, j), w(i, j));
            for (int k = 0; k < n; ++k) {
                if (std::isfinite(d(i, j)) && std::isfinite(d(j, k))) CHECK_LE(d(i, k), d(i, j) + d(j, k) + 1e-12);
            }
        }
    }
}

TEST_CASE("Rng is reproducible and seeds derive distinct streams") {
    Rng a(42), b(42), c(43);
    for (int i = 0; i < 10; ++i) {
        const auto va = a.next();
        CHECK(va == b.next());
        CHECK(va != c.next());
    }
    CHECK(derive_seed(1, 2, 3) == derive_seed(1, 2, 3));
    CHECK(derive_seed(1, 2, 3) != derive_seed(1, 3, 2));
    CHECK(derive_seed(1, 2) != derive_seed(2, 2));

    Rng r(9);
    double sum = 0.0;
    double sq = 0.0;
    for (int i = 0; i < 20000; ++i) {
        const double u = r.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
        const double z = r.normal();
        sum += z;
        sq += z * z;
        CHECK(r.below(7) < 7u);
    }
    CHECK(std::abs(sum / 20000) < 0.05);
    CHECK(std::abs(sq / 20000 - 1.0) < 0.05);
}

TEST_CASE("require_finite") {
    CHECK_NOTHROW(require_finite(Matrix::Ones(2, 2), "x"));
    CHECK_THROWS_AS(require_finite(Matrix(0, 0), "x"), NumericError);
    Matrix m = Matrix::Ones(2, 2);
    m(1, 1) = kInfinity;
    CHECK_THROWS_AS(require_finite(m, "x"), NumericError);
}
