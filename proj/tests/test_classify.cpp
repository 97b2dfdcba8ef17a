#include "oracles.hpp"

#include "sdml/classify.hpp"
#include "sdml/errors.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace sdml;

namespace {

ConfusionMatrix binary(std::int64_t tp, std::int64_t fn, std::int64_t fp, std::int64_t tn) {
    ConfusionMatrix cm;
    cm.counts.resize(2, 2);
    cm.counts << tp, fn, fp, tn;
    cm.class_names = {"pos", "neg"};
    return cm;
}

MeanConfusion kdd_average_confusion() {
    MeanConfusion cm;
    cm.counts.resize(5, 5);
    cm.counts << 391.1, 0.6, 0, 0.2, 0.1,  //
        0.2, 96.5, 0, 0.3, 0,              //
        0.1, 1.2, 2.7, 0, 0,               //
        0.1, 0.4, 0, 0.4, 0.1,             //
        0.1, 1.1, 0, 0.4, 3.4;
    cm.class_names = {"DOS", "Normal", "Probe", "R2L", "U2R"};
    return cm;
}

}  // namespace

TEST_CASE("knn basics") {
    Matrix train(4, 1);
    train << 0, 1, 2, 10;
    const std::vector<int> labels = {0, 1, 1, 0};
    Matrix test(1, 1);
    test << 2;
    CHECK(knn_predict(train, labels, test, 1) == std::vector<int>{1});

    Matrix big = oracle::random_matrix(10, 2, 1);
    std::vector<int> split = {0, 0, 0, 0, 0, 0, 1, 1, 1, 1};
    const auto all = knn_predict(big, split, oracle::random_matrix(7, 2, 2, 5.0), 10);
    CHECK(all == std::vector<int>(7, 0));

    CHECK_THROWS_AS(knn_predict(Matrix(0, 1), std::vector<int>{}, test, 1), DataError);
    CHECK_THROWS_AS(knn_predict(train, labels, test, 0), ConfigError);
    CHECK_THROWS_AS(knn_predict(train, labels, test, 5), ConfigError);
    CHECK_THROWS_AS(knn_predict(train, labels, Matrix::Zero(1, 2), 1), DataError);
    CHECK(knn_predict(train, labels, Matrix(0, 1), 1).empty());
}

TEST_CASE("knn on a hand-built line matches the exhaustive scan") {
    Matrix train(5, 1);
    train << 0, 1, 3, 4, 7;
    const std::vector<int> labels = {0, 0, 1, 1, 0};
    Matrix test(6, 1);
    test << -1, 2, 2.6, 5, 6.5, 3.5;
    CHECK(knn_predict(train, labels, test, 3) == oracle::brute_knn(train, labels, test, 3));
    CHECK(knn_predict(train, labels, test, 3) == std::vector<int>{0, 0, 1, 1, 1, 1});
}

TEST_CASE("knn tie rules") {
    SUBCASE("vote tie goes to the smaller summed distance") {
        Matrix train(2, 1);
        train << 0, 3;
        Matrix test(1, 1);
        test << 2;
        CHECK(knn_predict(train, std::vector<int>{0, 1}, test, 2) == std::vector<int>{1});
    }
    SUBCASE("full tie goes to the smaller class index") {
        Matrix train(2, 1);
        train << -1, 1;
        Matrix test(1, 1);
        test << 0;
        CHECK(knn_predict(train, std::vector<int>{1, 0}, test, 2) == std::vector<int>{0});
    }
    SUBCASE("boundary distance tie goes to the smaller training index") {
        Matrix train(3, 1);
        train << 0, -1, 1;
        Matrix test(1, 1);
        test << 0;
        // neighbours 0 and 1 (index 2 loses the tie): classes 2 and 1 each get one vote,
        // class 1 at distance 1 vs class 2 at distance 0
        CHECK(knn_predict(train, std::vector<int>{2, 1, 0}, test, 2) == std::vector<int>{2});
        CHECK(knn_predict(train, std::vector<int>{0, 1, 1}, test, 3) == std::vector<int>{1});
    }
}

TEST_CASE("knn agrees with brute force and ignores isometries") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const Matrix train = oracle::random_matrix(40, 3, seed);
        const Matrix test = oracle::random_matrix(15, 3, seed + 100);
        std::vector<int> labels(40);
        Rng rng(seed);
        for (auto& l : labels) l = static_cast<int>(rng.below(3));
        const std::size_t k = 1 + rng.below(9);
        const auto predicted = knn_predict(train, labels, test, k);
        CHECK(predicted == oracle::brute_knn(train, labels, test, static_cast<int>(k)));

        const Matrix q = oracle::random_orthogonal(3, seed + 200);
        const Eigen::RowVector3d shift = oracle::random_matrix(1, 3, seed + 300, 10.0);
        const Matrix moved_train = (train * q).rowwise() + shift;
        const Matrix moved_test = (test * q).rowwise() + shift;
        CHECK(knn_predict(moved_train, labels, moved_test, k) == predicted);
    }
}

TEST_CASE("confusion counts") {
    const std::vector<int> truth = {0, 1, 2, 2, 1};
    const auto perfect = confusion(truth, truth, 3);
    CHECK(perfect.counts.isDiagonal());
    CHECK(perfect.class_names == std::vector<std::string>{"0", "1", "2"});
    const std::vector<int> predicted = {0, 2, 2, 1, 1};
    const auto cm = confusion(truth, predicted, 3, {"a", "b", "c"});
    CHECK(cm.counts(1, 2) == 1);
    CHECK(cm.counts(2, 1) == 1);
    CHECK(cm.total() == 5);
    for (int c = 0; c < 3; ++c) {
        std::int64_t expected = 0;
        for (int t : truth) expected += t == c;
        CHECK(cm.counts.row(c).sum() == expected);
    }
    const auto single = confusion(std::vector<int>{1}, std::vector<int>{0}, 2);
    CHECK(single.counts(1, 0) == 1);
    CHECK(single.total() == 1);
    CHECK_THROWS_AS(confusion(truth, std::vector<int>{0}, 3), DataError);
    CHECK_THROWS_AS(confusion(std::vector<int>{3}, std::vector<int>{0}, 3), DataError);
}

TEST_CASE("worked metric cases") {
    const auto cm = binary(50, 5, 5, 40);
    CHECK(accuracy(cm) == doctest::Approx(0.9));
    CHECK(*sensitivity(cm, 0) == doctest::Approx(50.0 / 55.0));
    CHECK(*specificity(cm, 0) == doctest::Approx(40.0 / 45.0));
    CHECK(accuracy(confusion(std::vector<int>{0, 1}, std::vector<int>{0, 1}, 2)) == 1.0);
    CHECK(accuracy(confusion(std::vector<int>{0, 1}, std::vector<int>{1, 0}, 2)) == 0.0);
    CHECK_THROWS_AS(accuracy(ConfusionMatrix{}), DataError);
    CHECK_THROWS_AS(accuracy(binary(0, 0, 0, 0)), DataError);
}

TEST_CASE("per-class recall of an averaged five-class confusion") {
    const auto cm = kdd_average_confusion();
    CHECK(std::abs(*sensitivity(cm, 0) - 0.997704) <= 5e-7);
    CHECK(std::abs(*sensitivity(cm, 1) - 0.994845) <= 5e-7);
    CHECK(std::abs(*sensitivity(cm, 2) - 0.675) <= 5e-7);
    CHECK(std::abs(*sensitivity(cm, 3) - 0.4) <= 5e-7);
    CHECK(std::abs(*sensitivity(cm, 4) - 0.68) <= 5e-7);
}

TEST_CASE("undefined per-class values are excluded from macro means") {
    ConfusionMatrix cm;
    cm.counts.resize(3, 3);
    cm.counts << 4, 1, 0,  //
        0, 3, 0,           //
        0, 0, 0;
    CHECK_FALSE(sensitivity(cm, 2).has_value());
    const auto macro = macro_sensitivity(cm);
    CHECK(macro.excluded == std::vector<int>{2});
    CHECK(macro.value == doctest::Approx((0.8 + 1.0) / 2.0));

    const auto no_negatives = binary(3, 1, 0, 0);
    CHECK_FALSE(specificity(no_negatives, 0).has_value());

    ConfusionMatrix empty;
    empty.counts = ConfusionMatrix::Matrix_t::Zero(2, 2);
    CHECK(std::isnan(macro_sensitivity(empty).value));
}

TEST_CASE("macro extremes") {
    CHECK(macro_sensitivity(confusion(std::vector<int>{0, 1, 2}, std::vector<int>{0, 1, 2}, 3)).value == 1.0);
    CHECK(macro_specificity(confusion(std::vector<int>{0, 1, 2}, std::vector<int>{0, 1, 2}, 3)).value == 1.0);
    CHECK(macro_sensitivity(confusion(std::vector<int>{0, 1, 2}, std::vector<int>{1, 2, 0}, 3)).value == 0.0);
}

TEST_CASE("binary accuracy decomposes into sensitivity and specificity") {
    Rng rng(77);
    for (int trial = 0; trial < 200; ++trial) {
        const auto cm = binary(1 + rng.below(50), rng.below(50), rng.below(50), 1 + rng.below(50));
        const auto b = one_vs_rest(cm, 0);
        const double p = b.tp + b.fn;
        const double n = b.tn + b.fp;
        CHECK(accuracy(cm) == doctest::Approx((*sensitivity(cm, 0) * p + *specificity(cm, 0) * n) / (p + n)));
    }
}

TEST_CASE("mean confusion and csv export") {
    const auto a = binary(1, 2, 3, 4);
    const auto b = binary(3, 2, 1, 0);
    const std::vector<ConfusionMatrix> folds = {a, b};
    const auto mean = mean_confusion(folds);
    CHECK(mean.counts(0, 0) == 2.0);
    CHECK(mean.counts(1, 1) == 2.0);
    CHECK(mean.class_names == a.class_names);
    CHECK_THROWS_AS(mean_confusion(std::span<const ConfusionMatrix>{}), DataError);

    std::ostringstream out;
    write_confusion_csv(out, a);
    CHECK(out.str() == "true\\predicted,pos,neg\npos,1,2\nneg,3,4\n");

    std::ostringstream avg;
    write_confusion_csv(avg, kdd_average_confusion());
    CHECK(avg.str().find("DOS,391.1,0.6,0,0.2,0.1\n") != std::string::npos);

    auto named = a;
    named.class_names = {"x,y", "z"};
    std::ostringstream quoted;
    write_confusion_csv(quoted, named);
    CHECK(quoted.str().find("\"x,y\"") != std::string::npos);
}
