#include "oracles.hpp"

#include "pmgp/baselines.hpp"
#include "pmgp/errors.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

using namespace pmgp;

TEST_CASE("ar_features examples") {
    const std::vector<double> h3{1.0, 2.0, 3.0};
    CHECK(ar_features(h3, 2) == Eigen::Vector2d(3.0, 2.0));
    const std::vector<double> h1{5.0};
    CHECK(ar_features(h1, 2) == Eigen::Vector2d(5.0, 0.0));
    CHECK(ar_features({}, 2) == Eigen::Vector2d(0.0, 0.0));
    const ARModel m = ARModel::passive_aggressive(2, ARVariant::pa);
    CHECK(m.predict(ar_features({}, 2)) == 0.0);
}

TEST_CASE("PA regression examples") {
    const ARModel m = ARModel::passive_aggressive(2, ARVariant::pa, 100.0, 0.0);
    const ARModel next = pa_regress_update(m, Eigen::Vector2d(1.0, 0.0), 2.0);
    CHECK(next.weights == Eigen::Vector2d(2.0, 0.0));
    CHECK(pa_step_size(ARVariant::pa, 2.0, 1.0, 100.0) == 2.0);

    // Zero loss is passive for every variant.
    for (ARVariant v : {ARVariant::pa, ARVariant::pa1, ARVariant::pa2}) {
        ARModel w = ARModel::passive_aggressive(2, v, 0.5, 0.0);
        w.weights = Eigen::Vector2d(0.3, -0.4);
        const ARModel same = pa_regress_update(w, Eigen::Vector2d(1.0, 2.0), 0.3 - 0.8);
        CHECK(same.weights == w.weights);
    }

    // Inside the insensitivity band nothing moves.
    const ARModel band = ARModel::passive_aggressive(1, ARVariant::pa, 100.0, 0.5);
    CHECK(pa_regress_update(band, Eigen::VectorXd::Ones(1), 0.4).weights == band.weights);

    // Zero features with plain PA is a no-op.
    CHECK(pa_regress_update(m, Eigen::Vector2d::Zero(), 3.0).weights == m.weights);
    CHECK_THROWS_AS((void)pa_regress_update(ARModel::bayesian(2, 1.0), Eigen::Vector2d(1.0, 0.0), 1.0), InputError);
}

TEST_CASE("PA variant step sizes") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> u(0.01, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        const double loss = u(rng);
        const double x2 = u(rng);
        const double C = u(rng);
        const double pa = pa_step_size(ARVariant::pa, loss, x2, C);
        CHECK(pa_step_size(ARVariant::pa1, loss, x2, C) <= pa);
        CHECK(pa_step_size(ARVariant::pa2, loss, x2, C) <= pa);
    }
    double prev = 0.0;
    for (double C : {1.0, 1e2, 1e4, 1e8, 1e12}) {
        const double step = pa_step_size(ARVariant::pa2, 1.5, 0.7, C);
        CHECK(step >= prev);
        prev = step;
    }
    CHECK(prev == doctest::Approx(pa_step_size(ARVariant::pa, 1.5, 0.7, 1.0)).epsilon(1e-10));
}

TEST_CASE("BLR single observation") {
    for (double s : {0.1, 1.0, 3.0}) {
        const ARModel m = blr_update(ARModel::bayesian(2, s), Eigen::Vector2d(1.0, 0.0), 1.0);
        CHECK(m.weights(0) == doctest::Approx(1.0 / (1.0 + s * s)).epsilon(1e-15));
        CHECK(m.weights(1) == 0.0);
        CHECK(blr_predict(ARModel::bayesian(2, s), Eigen::Vector2d(4.0, -1.0)) == 0.0);
    }
}

TEST_CASE("BLR matches the batch posterior in any order") {
    std::mt19937_64 rng(32);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 20; ++trial) {
        const int k = 1 + static_cast<int>(rng() % 4);
        const int N = 3 + static_cast<int>(rng() % 20);
        const double s = 0.2 + std::abs(normal(rng));
        Eigen::MatrixXd X(N, k);
        Eigen::VectorXd y(N);
        for (int i = 0; i < N; ++i) {
            for (int j = 0; j < k; ++j) X(i, j) = normal(rng);
            y(i) = normal(rng);
        }
        // Batch: Sigma = (I + X'X / s^2)^-1, mu = Sigma X'y / s^2.
        const Eigen::MatrixXd precision = Eigen::MatrixXd::Identity(k, k) + X.transpose() * X / (s * s);
        const Eigen::MatrixXd cov = precision.inverse();
        const Eigen::VectorXd mean = cov * X.transpose() * y / (s * s);

        std::vector<int> order(N);
        for (int i = 0; i < N; ++i) order[i] = i;
        for (int pass = 0; pass < 2; ++pass) {
            if (pass == 1) std::shuffle(order.begin(), order.end(), rng);
            ARModel m = ARModel::bayesian(k, s);
            Eigen::VectorXd prev_diag = m.cov.diagonal();
            for (int i : order) {
                m = blr_update(m, X.row(i).transpose(), y(i));
                CHECK((m.cov.diagonal().array() <= prev_diag.array() + 1e-15).all());
                prev_diag = m.cov.diagonal();
            }
            CHECK(oracle::rel_err(m.weights, mean) <= 1e-8);
            CHECK(oracle::rel_err(m.cov, cov) <= 1e-8);
        }
    }
}

TEST_CASE("AR forecaster streams with bounded history") {
    ARForecaster f(ARModel::passive_aggressive(2, ARVariant::pa));
    CHECK(f.predict_next() == 0.0);
    f.observe(2.0);
    // The first target met an all-zero feature vector, so plain PA skipped it.
    CHECK(f.predict_next() == 0.0);
    f.observe(4.0);
    CHECK(f.model().weights == Eigen::Vector2d(2.0, 0.0));
    CHECK(f.predict_next() == doctest::Approx(8.0));
}

TEST_CASE("nmae examples") {
    const std::vector<double> actuals{0.0, 1.0, 3.0};
    const std::vector<double> preds{0.0, 0.0, 1.0};
    const NMAEResult r = nmae(preds, actuals);
    CHECK(r.nmae == doctest::Approx(3.0).epsilon(1e-15));
    REQUIRE(r.normalized_errors.size() == 2);
    CHECK(r.normalized_errors[0] == doctest::Approx(2.0));
    CHECK(r.normalized_errors[1] == doctest::Approx(4.0));
    CHECK(r.running == std::vector<double>{2.0, 3.0});
    CHECK(r.nmae_std == doctest::Approx(1.0));

    CHECK(nmae(actuals, actuals).nmae == 0.0);
    const std::vector<double> flat{2.0, 2.0, 2.0};
    CHECK_THROWS_AS((void)nmae(flat, flat), InputError);
    CHECK_THROWS_AS((void)nmae(std::vector<double>{1.0}, std::vector<double>{1.0}), InputError);
    CHECK_THROWS_AS((void)nmae(preds, std::vector<double>{0.0, 1.0}), InputError);
}

TEST_CASE("sample std") {
    const std::vector<double> v{2.0, 4.0, 4.0, 4.0, 5.0, 5.0, 7.0, 9.0};
    CHECK(sample_std(v) == doctest::Approx(std::sqrt(32.0 / 7.0)).epsilon(1e-15));
}
