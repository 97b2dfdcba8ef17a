#include "oracles.hpp"

#include "sdml/errors.hpp"
#include "sdml/metric.hpp"

#include <doctest.h>

#include <cstring>
#include <filesystem>
#include <sstream>

using namespace sdml;

namespace {

double max_abs(const Matrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

struct Problem {
    Matrix x;
    Matrix y;
    Matrix b;
};

/// Random neighbourhood-style targets: each row gets k same-class (+1, Y = 1)
/// and k other-class (-1) entries.
Problem random_problem(int n, int m, int k, std::uint64_t seed) {
    Problem p;
    p.x = oracle::random_matrix(n, m, seed);
    p.y = Matrix::Zero(n, n);
    p.b = Matrix::Zero(n, n);
    std::vector<int> labels(n);
    for (int i = 0; i < n; ++i) labels[i] = i % 2;
    Rng rng(seed + 1);
    for (int i = 0; i < n; ++i) {
        int same = 0;
        int other = 0;
        for (int step = 0; step < 4 * n && (same < k || other < k); ++step) {
            const int j = static_cast<int>(rng.below(static_cast<std::size_t>(n)));
            if (j == i || p.b(i, j) != 0.0) continue;
            if (labels[j] == labels[i] && same < k) {
                p.y(i, j) = 1.0;
                p.b(i, j) = 1.0;
                ++same;
            } else if (labels[j] != labels[i] && other < k) {
                p.b(i, j) = -1.0;
                ++other;
            }
        }
    }
    return p;
}

bool non_increasing(const std::vector<double>& trace) {
    for (std::size_t i = 1; i < trace.size(); ++i) {
        if (trace[i] > trace[i - 1] + 1e-9) return false;
    }
    return true;
}

double ridge_value(const Matrix& x, const Matrix& targets, const RidgeSolution& s, double lambda) {
    return objective(x, s.w, s.t, targets, Matrix::Zero(targets.rows(), targets.cols()),
                     Matrix::Zero(targets.rows(), targets.cols()), lambda);
}

}  // namespace

TEST_CASE("solve_wt limits") {
    const Matrix x = oracle::random_matrix(10, 3, 1);
    const Matrix t = oracle::random_matrix(10, 4, 2);
    const auto heavy = solve_wt(x, t, 1e12);
    CHECK(max_abs(heavy.w) <= 1e-6);
    CHECK(max_abs(heavy.t - t.colwise().mean().transpose()) <= 1e-6);

    const Matrix one = oracle::random_matrix(1, 3, 3);
    const Matrix target = oracle::random_matrix(1, 2, 4);
    const auto single = solve_wt(one, target, 1e-12);
    CHECK(max_abs(one * single.w + single.t.transpose() - target) <= 1e-12);

    CHECK_THROWS_AS(solve_wt(x, t, 0.0), ConfigError);
    CHECK_THROWS_AS(solve_wt(x, Matrix::Zero(9, 4), 0.1), DataError);
}

TEST_CASE("solve_wt matches a descent oracle and is stationary") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const Matrix x = oracle::random_matrix(10, 3, 10 * seed);
        const Matrix t = oracle::random_matrix(10, 4, 10 * seed + 1);
        const double lambda = 0.1;
        const auto s = solve_wt(x, t, lambda);
        const auto ref = oracle::descend(x, t, Matrix::Zero(10, 4), lambda, false, 10000);
        CHECK(std::abs(ridge_value(x, t, s, lambda) - ref.value) <= 1e-6);

        Matrix r = x * s.w - t;
        r.rowwise() += s.t.transpose();
        const Matrix grad_w = 2.0 * x.transpose() * r + 2.0 * lambda * s.w;
        const Vector grad_t = 2.0 * r.colwise().sum().transpose();
        const double bound = 1e-6 * (1.0 + max_abs(t));
        CHECK(max_abs(grad_w) <= bound);
        CHECK(max_abs(grad_t) <= bound);
    }
}

TEST_CASE("update_drag against a scalar grid scan") {
    auto scan = [](double r, double b) {
        double best_m = 0.0;
        double best = (r - b * 0.0) * (r - b * 0.0);
        for (int step = 1; step <= 20000; ++step) {
            const double m = step * 1e-4;
            const double v = (r - b * m) * (r - b * m);
            if (v < best) {
                best = v;
                best_m = m;
            }
        }
        return best_m;
    };
    for (double r : {0.7, -0.7, 0.0, 1.3, -0.05}) {
        for (double b : {1.0, -1.0}) {
            Matrix rm(1, 1), bm(1, 1);
            rm << r;
            bm << b;
            CHECK(update_drag(rm, bm)(0, 0) == doctest::Approx(scan(r, b)).epsilon(1e-4));
        }
    }
    Matrix r(1, 3), b(1, 3);
    r << 0.7, 0.7, 0.7;
    b << 1, -1, 0;
    const Matrix m = update_drag(r, b);
    CHECK(m(0, 0) == doctest::Approx(0.7));
    CHECK(m(0, 1) == 0.0);
    CHECK(m(0, 2) == 0.0);
}

TEST_CASE("drag updates are entrywise optimal") {
    const auto p = random_problem(12, 4, 2, 5);
    const auto fit = solve_wt(p.x, p.y, 0.1);
    Matrix r = p.x * fit.w - p.y;
    r.rowwise() += fit.t.transpose();
    const Matrix m = update_drag(r, p.b);
    CHECK((m.array() >= 0.0).all());
    CHECK(((p.b.array() == 0.0) <= (m.array() == 0.0)).all());
    const double base = objective(p.x, fit.w, fit.t, p.y, p.b, m, 0.1);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            for (double delta : {1e-3, -1e-3}) {
                if (m(i, j) + delta < 0.0) continue;
                Matrix moved = m;
                moved(i, j) += delta;
                CHECK(objective(p.x, fit.w, fit.t, p.y, p.b, moved, 0.1) >= base - 1e-12);
            }
        }
    }
}

TEST_CASE("objective") {
    const Matrix z = Matrix::Zero(3, 2);
    CHECK(objective(z, Matrix::Zero(2, 2), Vector::Zero(2), z, z, z, 0.5) == 0.0);
    const Matrix y = oracle::random_matrix(3, 2, 1);
    CHECK(objective(z, Matrix::Zero(2, 2), Vector::Zero(2), y, z, z, 0.5) == doctest::Approx(y.squaredNorm()));

    const auto p = random_problem(9, 3, 2, 7);
    const Matrix w = oracle::random_matrix(3, 9, 8);
    const Vector t = oracle::random_matrix(9, 1, 9);
    const Matrix m = oracle::random_matrix(9, 9, 10).cwiseAbs();
    CHECK(std::abs(objective(p.x, w, t, p.y, p.b, m, 0.3) - oracle::naive_objective(p.x, w, t, p.y, p.b, m, 0.3)) <=
          1e-10);
}

TEST_CASE("fit_structural") {
    SUBCASE("no drag directions") {
        const Matrix x = oracle::random_matrix(8, 3, 1);
        TargetMatrices targets;
        targets.n = 8;
        targets.y = {{0, 1, 1.0}, {3, 2, 1.0}};
        const auto model = fit_structural(x, targets, FitOptions{});
        CHECK(model.iterations_run == 1);
        CHECK(model.converged);
        const auto plain = solve_wt(x, targets.dense_y(), 0.1);
        CHECK(model.w == plain.w);
    }
    SUBCASE("empty neighbourhoods give the null model") {
        const Matrix x = oracle::random_matrix(8, 3, 2);
        TargetMatrices targets;
        targets.n = 8;
        const auto model = fit_structural(x, targets, FitOptions{});
        CHECK(max_abs(model.w) == 0.0);
        CHECK(max_abs(model.t) == 0.0);
    }
    SUBCASE("monotone traces, first iterate dominates plain ridge") {
        for (std::uint64_t seed = 1; seed <= 20; ++seed) {
            const auto p = random_problem(20, 5, 2, 100 + seed);
            FitOptions opt;
            opt.tol = 0.0;
            opt.max_iter = 200;
            const auto model = fit_dragging(p.x, p.y, p.b, opt);
            CHECK(non_increasing(model.objective_trace));
            const auto plain = solve_wt(p.x, p.y, opt.lambda);
            CHECK(model.objective_trace.back() <= ridge_value(p.x, p.y, plain, opt.lambda) + 1e-12);
            CHECK((model.drag.array() >= 0.0).all());
        }
    }
    SUBCASE("reaches the descent optimum of the profiled objective") {
        for (std::uint64_t seed = 1; seed <= 3; ++seed) {
            const auto p = random_problem(12, 3, 2, 200 + seed);
            FitOptions opt;
            opt.tol = 1e-14;
            opt.max_iter = 20000;
            const auto model = fit_dragging(p.x, p.y, p.b, opt);
            const auto ref = oracle::descend(p.x, p.y, p.b, opt.lambda, true, 30000);
            CHECK(std::abs(model.objective_trace.back() - ref.value) <= 1e-5);
        }
    }
    SUBCASE("the final drag is the update of the final residual") {
        const auto p = random_problem(10, 3, 2, 9);
        const auto model = fit_dragging(p.x, p.y, p.b, FitOptions{});
        CHECK(max_abs(update_drag(transform(model, p.x) - p.y, p.b) - model.drag) <= 1e-12);
    }
    SUBCASE("iteration cap") {
        const auto p = random_problem(15, 3, 3, 11);
        FitOptions opt;
        opt.tol = 0.0;
        opt.max_iter = 2;
        const auto model = fit_dragging(p.x, p.y, p.b, opt);
        CHECK(model.iterations_run <= 2);
        CHECK(model.objective_trace.size() == static_cast<std::size_t>(model.iterations_run));
    }
    SUBCASE("errors") {
        const Matrix x = oracle::random_matrix(4, 2, 1);
        TargetMatrices t;
        t.n = 5;
        CHECK_THROWS_AS(fit_structural(x, t, FitOptions{}), DataError);
        t.n = 4;
        FitOptions bad;
        bad.lambda = -1;
        CHECK_THROWS_AS(fit_structural(x, t, bad), ConfigError);
    }
}

TEST_CASE("original dlsr") {
    SUBCASE("separable classes are fitted perfectly") {
        Matrix x = oracle::random_matrix(30, 2, 3, 0.3);
        std::vector<int> labels(30);
        for (int i = 0; i < 30; ++i) {
            labels[i] = i % 3;
            x(i, labels[i] == 2 ? 1 : 0) += labels[i] == 1 ? -4.0 : 4.0;
        }
        const auto model = fit_dlsr_original(x, labels, 3, FitOptions{});
        const Matrix scores = transform(model, x);
        for (int i = 0; i < 30; ++i) {
            Eigen::Index arg = 0;
            scores.row(i).maxCoeff(&arg);
            CHECK(arg == labels[i]);
        }
    }
    SUBCASE("uses plus-minus one directions") {
        const Matrix x = oracle::random_matrix(12, 3, 4);
        std::vector<int> labels(12);
        for (int i = 0; i < 12; ++i) labels[i] = i % 2;
        const Matrix y = one_hot(labels, 2);
        const Matrix b = 2.0 * y.array() - 1.0;
        CHECK(((b.array() == 1.0) || (b.array() == -1.0)).all());
        const auto direct = fit_dragging(x, y, b, FitOptions{});
        const auto model = fit_dlsr_original(x, labels, 2, FitOptions{});
        CHECK(model.w == direct.w);
        CHECK(model.objective_trace == direct.objective_trace);
        CHECK_THROWS_AS(fit_dlsr_original(x, std::vector<int>(12, 0), 1, FitOptions{}), DataError);
    }
}

TEST_CASE("transform") {
    MetricModel model;
    model.w = Matrix::Zero(3, 2);
    model.t = Vector::LinSpaced(2, 1.0, 2.0);
    const Matrix out = transform(model, oracle::random_matrix(4, 3, 1));
    for (int i = 0; i < 4; ++i) CHECK(out.row(i) == model.t.transpose());
    CHECK(transform(model, Matrix(0, 3)).rows() == 0);
    CHECK_THROWS_AS(transform(model, Matrix::Zero(2, 4)), DataError);

    model.w = oracle::random_matrix(3, 5, 2);
    model.t = oracle::random_matrix(5, 1, 3);
    const Matrix a = oracle::random_matrix(6, 3, 4);
    const Matrix b = oracle::random_matrix(6, 3, 5);
    for (double alpha : {0.0, 0.3, 1.0, 2.5}) {
        const Matrix mix = transform(model, alpha * a + (1 - alpha) * b);
        CHECK(max_abs(mix - (alpha * transform(model, a) + (1 - alpha) * transform(model, b))) <= 1e-12);
    }
}

TEST_CASE("model serialization round-trips exactly") {
    const auto p = random_problem(10, 3, 2, 21);
    auto model = fit_dragging(p.x, p.y, p.b, FitOptions{});
    model.w(0, 0) = 0.1 + 0.2;
    model.t[1] = -1e-300;
    std::stringstream buffer;
    write_model(buffer, model);
    const auto back = read_model(buffer);
    CHECK(std::memcmp(back.w.data(), model.w.data(), sizeof(double) * model.w.size()) == 0);
    CHECK(std::memcmp(back.t.data(), model.t.data(), sizeof(double) * model.t.size()) == 0);
    CHECK(back.lambda == model.lambda);
    CHECK(back.iterations_run == model.iterations_run);
    CHECK(back.converged == model.converged);
    CHECK(back.objective_trace == model.objective_trace);

    const auto path = std::filesystem::temp_directory_path() / "sdml_model_roundtrip.txt";
    save_model(path, model);
    CHECK(load_model(path).w == model.w);
    std::filesystem::remove(path);

    std::istringstream truncated("sdml-metric-model 1\n3 10\n");
    CHECK_THROWS_AS(read_model(truncated), DataError);
    std::istringstream wrong("not-a-model 1\n");
    CHECK_THROWS_AS(read_model(wrong), DataError);
    CHECK_THROWS_AS(load_model("/nonexistent/model.txt"), DataError);
}
