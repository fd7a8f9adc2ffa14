#include "oracles.hpp"

#include "pmgp/errors.hpp"
#include "pmgp/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

using namespace pmgp;

TEST_CASE("matern_eval examples") {
    CHECK(matern_eval(0.0, {2.5, 1.0, 0.0, 2}) == doctest::Approx(2.5));

    const double ou = matern_eval(1.0, {1.0, 2.0, 0.0, 0});
    CHECK(ou == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    CHECK(ou == doctest::Approx(oracle::bessel_matern(1.0, 1.0, 2.0, 0)).epsilon(1e-12));
    CHECK(ou == doctest::Approx(0.606531).epsilon(1e-6));

    const double m32 = matern_eval(1.0, {1.0, 1.0, 0.0, 1});
    const double a = std::sqrt(3.0);
    CHECK(m32 == doctest::Approx((1.0 + a) * std::exp(-a)).epsilon(1e-14));
    CHECK(m32 == doctest::Approx(0.483356).epsilon(1e-5));  // rounded literal
}

TEST_CASE("matern_eval rejects non-finite lag") {
    CHECK_THROWS_AS((void)matern_eval(std::numeric_limits<double>::infinity(), {}), DomainError);
    CHECK_THROWS_AS((void)matern_eval(std::nan(""), {}), DomainError);
}

TEST_CASE("matern_derivative examples") {
    const KernelComponent c1{1.0, 1.0, 0.0, 1};
    const double a = std::sqrt(3.0);
    CHECK(matern_derivative(0.0, 1, c1) == 0.0);
    CHECK(matern_derivative(1.0, 1, c1) == doctest::Approx(-3.0 * std::exp(-a)).epsilon(1e-13));
    CHECK(matern_derivative(1.0, 1, c1) == doctest::Approx(-0.530763).epsilon(1e-5));
    CHECK(matern_derivative(0.0, 2, c1) == doctest::Approx(-3.0).epsilon(1e-14));

    // Finite-difference cross-checks of the same values.
    auto k = [&](double t) { return matern_eval(t, c1); };
    CHECK(oracle::central_difference(k, 1.0, 1e-5) == doctest::Approx(-3.0 * std::exp(-a)).epsilon(1e-8));
    auto dk = [&](double t) { return matern_derivative(t, 1, c1); };
    CHECK(oracle::central_difference(dk, 0.0, 1e-6) == doctest::Approx(-3.0).epsilon(1e-4));
}

TEST_CASE("matern_derivative rejects orders above 2p") {
    CHECK_THROWS_AS((void)matern_derivative(0.5, 3, {1.0, 1.0, 0.0, 1}), UnsupportedOrderError);
    CHECK_THROWS_AS((void)matern_derivative(0.5, 1, {1.0, 1.0, 0.0, 0}), UnsupportedOrderError);
    CHECK_THROWS_AS((void)matern_derivative(0.5, -1, {1.0, 1.0, 0.0, 2}), UnsupportedOrderError);
    CHECK_NOTHROW((void)matern_derivative(0.5, 4, {1.0, 1.0, 0.0, 2}));
}

TEST_CASE("odd derivatives vanish exactly at the origin") {
    for (int p = 1; p <= 3; ++p) {
        for (int m = 1; m <= 2 * p; m += 2) CHECK(matern_derivative(0.0, m, {1.7, 0.8, 0.0, p}) == 0.0);
    }
}

TEST_CASE("closed form agrees with the Bessel expression") {
    for (int p = 0; p <= 3; ++p) {
        for (double l : {0.3, 1.0, 2.5}) {
            double worst = 0.0;
            for (int i = 1; i <= 400; ++i) {
                const double tau = 10.0 * i / 400.0;
                const double closed = matern_eval(tau, {1.3, l, 0.0, p});
                const double bessel = oracle::bessel_matern(tau, 1.3, l, p);
                if (bessel < 1e-280) continue;
                worst = std::max(worst, oracle::rel_err(closed, bessel));
            }
            CAPTURE(p);
            CAPTURE(l);
            CHECK(worst <= 1e-9);
        }
    }
}

TEST_CASE("symmetry of kernel and derivatives") {
    for (int p = 0; p <= 3; ++p) {
        const KernelComponent c{0.9, 1.4, 0.0, p};
        for (int i = -20; i <= 20; ++i) {
            const double tau = 0.37 * i;
            CHECK(matern_eval(tau, c) == doctest::Approx(matern_eval(-tau, c)).epsilon(1e-15));
            for (int m = 0; m <= 2 * p; ++m) {
                const double sign = (m % 2 == 0) ? 1.0 : -1.0;
                CHECK(matern_derivative(tau, m, c) == doctest::Approx(sign * matern_derivative(-tau, m, c)).epsilon(1e-15));
            }
        }
    }
}

TEST_CASE("derivatives agree with finite differences of the previous order") {
    for (int p = 0; p <= 3; ++p) {
        const KernelComponent c{1.2, 0.9, 0.0, p};
        for (int m = 1; m <= 2 * p; ++m) {
            for (double tau : {-2.3, -0.7, 0.4, 1.1, 3.0}) {
                auto prev = [&](double t) { return matern_derivative(t, m - 1, c); };
                const double fd = oracle::central_difference(prev, tau, 1e-5);
                CAPTURE(p);
                CAPTURE(m);
                CAPTURE(tau);
                CHECK(oracle::rel_err(matern_derivative(tau, m, c), fd, 1e-8) <= 1e-5);
            }
        }
    }
}

TEST_CASE("lengthscale sensitivity agrees with finite differences in log l") {
    for (int p = 0; p <= 3; ++p) {
        for (int m = 0; m <= 2 * p; ++m) {
            for (double tau : {0.0, -1.3, 0.25, 2.0}) {
                auto f = [&](double log_l) { return matern_derivative(tau, m, {1.1, std::exp(log_l), 0.0, p}); };
                const double fd = oracle::central_difference(f, std::log(0.8), 1e-5);
                const double analytic = matern_derivative_dlog_l(tau, m, {1.1, 0.8, 0.0, p});
                CAPTURE(p);
                CAPTURE(m);
                CAPTURE(tau);
                CHECK(oracle::rel_err(analytic, fd, 1e-7) <= 1e-6);
            }
        }
    }
}

TEST_CASE("spectral_matern_eval examples") {
    const SpectralMaternKernel one({{1.0, 2.0, 0.0, 0}});
    CHECK(spectral_matern_eval(1.0, one) == doctest::Approx(std::exp(-0.5)).epsilon(1e-14));
    const SpectralMaternKernel shifted({{1.0, 2.0, std::numbers::pi, 0}});
    CHECK(spectral_matern_eval(1.0, shifted) == doctest::Approx(-std::exp(-0.5)).epsilon(1e-14));

    const SpectralMaternKernel three({{0.5, 1.0, 0.3, 2}, {1.5, 0.4, 2.0, 2}, {0.25, 3.0, 7.0, 2}});
    CHECK(spectral_matern_eval(0.0, three) == doctest::Approx(2.25).epsilon(1e-15));
    CHECK(three.total_amplitude() == doctest::Approx(2.25));
}

TEST_CASE("spectral kernel validation") {
    CHECK_THROWS_AS(SpectralMaternKernel({}), DomainError);
    CHECK_THROWS_AS(SpectralMaternKernel({{1.0, 1.0, 0.0, 1}, {1.0, 1.0, 0.0, 2}}), DomainError);
    CHECK_THROWS_AS(SpectralMaternKernel({{-1.0, 1.0, 0.0, 1}}), DomainError);
    CHECK_THROWS_AS(SpectralMaternKernel({{1.0, 0.0, 0.0, 1}}), DomainError);
    CHECK_THROWS_AS(SpectralMaternKernel({{1.0, 1.0, -0.1, 1}}), DomainError);
}

TEST_CASE("Gram matrices are positive semi-definite") {
    std::mt19937_64 rng(7);
    for (int trial = 0; trial < 200; ++trial) {
        const int p = static_cast<int>(rng() % 4);
        const int n_comp = 1 + static_cast<int>(rng() % 3);
        const SpectralMaternKernel kern = oracle::random_theta(rng, TrendKind::constant, n_comp).kernel(p);
        const int N = 1 + static_cast<int>(rng() % 12);
        std::uniform_real_distribution<double> u(0.0, 5.0);
        std::vector<double> ts;
        while (static_cast<int>(ts.size()) < N) {
            const double t = u(rng);
            bool distinct = true;
            for (double s : ts) distinct &= std::abs(s - t) > 1e-9;
            if (distinct) ts.push_back(t);
        }
        Eigen::MatrixXd G(N, N);
        for (int i = 0; i < N; ++i) {
            for (int j = 0; j < N; ++j) G(i, j) = spectral_matern_eval(ts[i] - ts[j], kern);
        }
        const double min_eig = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(G).eigenvalues().minCoeff();
        CHECK(min_eig > -1e-8 * G.trace());
    }
}

TEST_CASE("hyperparameter packing") {
    const HyperParams z = HyperParams::unpack(Eigen::VectorXd::Zero(9), TrendKind::linear, 2);
    CHECK(z.beta.isZero());
    CHECK(z.sigma() == 1.0);
    const SpectralMaternKernel k = z.kernel(2);
    for (const auto& c : k.components()) {
        CHECK(c.k0 == 1.0);
        CHECK(c.l == 1.0);
        CHECK(c.omega == 1.0);
    }
    CHECK(HyperParams::flat_size(TrendKind::linear, 2) == 9);
    CHECK(HyperParams::flat_size(TrendKind::constant, 3) == 11);
    CHECK_THROWS_AS((void)HyperParams::unpack(Eigen::VectorXd::Zero(8), TrendKind::linear, 2), DimensionError);

    std::mt19937_64 rng(11);
    std::normal_distribution<double> normal;
    for (int trial = 0; trial < 50; ++trial) {
        const int n_comp = 1 + static_cast<int>(rng() % 4);
        const TrendKind kind = (trial % 2) ? TrendKind::linear : TrendKind::constant;
        Eigen::VectorXd v(static_cast<Eigen::Index>(HyperParams::flat_size(kind, n_comp)));
        for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = normal(rng);
        const HyperParams h = HyperParams::unpack(v, kind, n_comp);
        CHECK(h.pack() == v);
        CHECK(h.sigma() > 0.0);
        CHECK(h.pack()(static_cast<Eigen::Index>(h.log_l_index(n_comp - 1))) == v(v.size() - 2));
    }
}

TEST_CASE("trend model") {
    const TrendModel lin{TrendKind::linear, Eigen::Vector2d(0.5, -2.0)};
    CHECK(lin(3.0) == doctest::Approx(-5.5));
    CHECK(lin.gradient(3.0) == Eigen::Vector2d(1.0, 3.0));
    const TrendModel cst{TrendKind::constant, Eigen::VectorXd::Constant(1, 4.0)};
    CHECK(cst(100.0) == 4.0);
    CHECK(cst.gradient(100.0).size() == 1);
}
