#include <doctest.h>

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "confaudit/confound_regression.hpp"
#include "confaudit/error.hpp"
#include "confaudit/rng.hpp"
#include "oracles.hpp"

using namespace confaudit;

namespace {

Matrix random_matrix(std::size_t n, std::size_t p, std::uint64_t seed) {
    Rng rng(seed);
    Matrix m(n, p);
    for (std::size_t j = 0; j < p; ++j) {
        for (double& v : m.col(j)) v = rng.normal();
    }
    return m;
}

}  // namespace

TEST_CASE("exact linear relation is recovered with zero residuals") {
    Rng rng(1);
    Matrix c(30, 1), x(30, 1);
    for (std::size_t i = 0; i < 30; ++i) {
        c(i, 0) = rng.normal();
        x(i, 0) = 2.0 * c(i, 0) + 1.0;
    }
    const auto m = fit_cr(x, c);
    CHECK(m.intercepts[0] == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(m.coefficients(0, 0) == doctest::Approx(2.0).epsilon(1e-10));
    const auto t = transform_cr(m, x, c);
    for (std::size_t i = 0; i < 30; ++i) CHECK(std::abs(t.x_cr(i, 0)) < 1e-9);
}

TEST_CASE("binary confound fits group means exactly") {
    Matrix x(4, 1), c(4, 1);
    const double xs[] = {1, 2, 3, 4};
    const double cs[] = {0, 0, 1, 1};
    for (std::size_t i = 0; i < 4; ++i) {
        x(i, 0) = xs[i];
        c(i, 0) = cs[i];
    }
    const auto m = fit_cr(x, c);
    const auto t = transform_cr(m, x, c);
    CHECK(t.x_hat(0, 0) == doctest::Approx(1.5).epsilon(1e-14));
    CHECK(t.x_hat(2, 0) == doctest::Approx(3.5).epsilon(1e-14));
    CHECK(t.x_cr(0, 0) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(t.x_cr(1, 0) == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(t.x_cr(2, 0) == doctest::Approx(-0.5).epsilon(1e-14));
    CHECK(t.x_cr(3, 0) == doctest::Approx(0.5).epsilon(1e-14));
}

TEST_CASE("coefficients match the normal-equations oracle on random data") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
        const auto c = random_matrix(50, 3, 100 + seed);
        const auto x = random_matrix(50, 4, 200 + seed);
        const auto m = fit_cr(x, c);
        for (std::size_t f = 0; f < 4; ++f) {
            std::vector<double> col(x.col(f).begin(), x.col(f).end());
            const auto beta = oracle::ols_gram_solve(c, col);
            CHECK(m.intercepts[f] == doctest::Approx(beta[0]).epsilon(1e-8));
            for (std::size_t q = 0; q < 3; ++q)
                CHECK(m.coefficients(q, f) == doctest::Approx(beta[q + 1]).epsilon(1e-8));
        }
    }
}

TEST_CASE("x_cr + x_hat reconstructs the features") {
    const auto c = random_matrix(80, 2, 7);
    const auto x = random_matrix(80, 5, 8);
    const auto t = transform_cr(fit_cr(x, c), x, c);
    for (std::size_t j = 0; j < 5; ++j) {
        for (std::size_t i = 0; i < 80; ++i) {
            CHECK(std::abs(t.x_cr(i, j) + t.x_hat(i, j) - x(i, j)) <= 1e-10);
        }
    }
}

TEST_CASE("training residuals are orthogonal to confounds and intercept") {
    const auto c = random_matrix(120, 3, 17);
    const auto x = random_matrix(120, 6, 18);
    const auto t = transform_cr(fit_cr(x, c), x, c);
    for (std::size_t j = 0; j < 6; ++j) {
        const auto res = t.x_cr.col(j);
        double res_norm = 0.0;
        for (double v : res) res_norm += v * v;
        res_norm = std::sqrt(res_norm);

        double dot1 = 0.0;
        for (double v : res) dot1 += v;
        CHECK(std::abs(dot1) <= 1e-8 * 120.0 * std::max(res_norm, 1.0));
        for (std::size_t q = 0; q < 3; ++q) {
            const auto conf = c.col(q);
            double dot = 0.0, cn = 0.0;
            for (std::size_t i = 0; i < 120; ++i) {
                dot += res[i] * conf[i];
                cn += conf[i] * conf[i];
            }
            CHECK(std::abs(dot) <= 1e-8 * 120.0 * std::max(res_norm * std::sqrt(cn), 1.0));
        }
    }
}

TEST_CASE("refitting on residuals is a no-op") {
    const auto c = random_matrix(60, 2, 23);
    const auto x = random_matrix(60, 3, 24);
    const auto t = transform_cr(fit_cr(x, c), x, c);
    const auto m2 = fit_cr(t.x_cr, c);
    const auto t2 = transform_cr(m2, t.x_cr, c);
    for (std::size_t f = 0; f < 3; ++f) {
        CHECK(std::abs(m2.intercepts[f]) <= 1e-8);
        for (std::size_t q = 0; q < 2; ++q) CHECK(std::abs(m2.coefficients(q, f)) <= 1e-8);
        for (std::size_t i = 0; i < 60; ++i)
            CHECK(t2.x_cr(i, f) == doctest::Approx(t.x_cr(i, f)).epsilon(1e-8));
    }
}

TEST_CASE("single binary confound equals group-mean subtraction") {
    Rng rng(31);
    Matrix x(100, 2), c(100, 1);
    for (std::size_t i = 0; i < 100; ++i) {
        c(i, 0) = rng.bernoulli(0.4) ? 1.0 : 0.0;
        x(i, 0) = rng.normal();
        x(i, 1) = rng.normal(2.0, 3.0);
    }
    const auto t = transform_cr(fit_cr(x, c), x, c);
    for (std::size_t j = 0; j < 2; ++j) {
        double m0 = 0, m1 = 0;
        int n0 = 0, n1 = 0;
        for (std::size_t i = 0; i < 100; ++i) {
            if (c(i, 0) == 1.0) {
                m1 += x(i, j);
                ++n1;
            } else {
                m0 += x(i, j);
                ++n0;
            }
        }
        m0 /= n0;
        m1 /= n1;
        for (std::size_t i = 0; i < 100; ++i) {
            const double expect = x(i, j) - (c(i, 0) == 1.0 ? m1 : m0);
            CHECK(std::abs(t.x_cr(i, j) - expect) <= 1e-12);
        }
    }
}

TEST_CASE("binary feature with binary confound leaves at most four residual values") {
    Rng rng(37);
    Matrix x(200, 1), c(200, 1);
    for (std::size_t i = 0; i < 200; ++i) {
        x(i, 0) = rng.bernoulli(0.3) ? 1.0 : 0.0;
        c(i, 0) = rng.bernoulli(0.6) ? 1.0 : 0.0;
    }
    const auto t = transform_cr(fit_cr(x, c), x, c);
    std::set<double> values(t.x_cr.col(0).begin(), t.x_cr.col(0).end());
    CHECK(values.size() <= 4);
}

TEST_CASE("confound uncorrelated by construction leaves near-centered features") {
    // orthogonal design: confound -1/+1 alternating, feature symmetric
    Matrix x(8, 1), c(8, 1);
    const double xs[] = {1, 1, 2, 2, 3, 3, 4, 4};
    for (std::size_t i = 0; i < 8; ++i) {
        x(i, 0) = xs[i];
        c(i, 0) = (i % 2 == 0) ? -1.0 : 1.0;
    }
    const auto m = fit_cr(x, c);
    CHECK(std::abs(m.coefficients(0, 0)) <= 1e-12);
    const auto t = transform_cr(m, x, c);
    std::vector<double> col(x.col(0).begin(), x.col(0).end());
    const auto beta = oracle::ols_gram_solve(c, col);
    for (std::size_t i = 0; i < 8; ++i) {
        CHECK(t.x_cr(i, 0) ==
              doctest::Approx(x(i, 0) - beta[0] - beta[1] * c(i, 0)).epsilon(1e-12));
        CHECK(t.x_cr(i, 0) == doctest::Approx(x(i, 0) - 2.5).epsilon(1e-12));
    }
}

TEST_CASE("rank-deficient designs fall back to the minimum-norm solution") {
    Rng rng(41);
    Matrix x(50, 1), c(50, 2);
    for (std::size_t i = 0; i < 50; ++i) {
        const double v = rng.normal();
        c(i, 0) = v;
        c(i, 1) = v;  // duplicated confound column
        x(i, 0) = 3.0 * v + rng.normal(0, 0.1);
    }
    const auto m = fit_cr(x, c);
    // duplicated columns share the weight in the minimum-norm solution
    CHECK(m.coefficients(0, 0) == doctest::Approx(m.coefficients(1, 0)).epsilon(1e-6));
    const auto t = transform_cr(m, x, c);
    double dot = 0.0;
    for (std::size_t i = 0; i < 50; ++i) dot += t.x_cr(i, 0) * c(i, 0);
    CHECK(std::abs(dot) <= 1e-6);

    // constant confound duplicating the intercept also survives
    Matrix c2(50, 1, 1.0);
    CHECK_NOTHROW(fit_cr(x, c2));
}

TEST_CASE("underdetermined design is an error") {
    const auto x = random_matrix(3, 1, 43);
    const auto c = random_matrix(3, 5, 44);
    CHECK_THROWS_AS(fit_cr(x, c), DataError);
}

TEST_CASE("dimension mismatches are errors") {
    const auto x = random_matrix(20, 2, 47);
    const auto c = random_matrix(20, 2, 48);
    const auto m = fit_cr(x, c);
    const auto bad_c = random_matrix(20, 3, 49);
    CHECK_THROWS_AS(transform_cr(m, x, bad_c), InvalidArgument);
    const auto bad_x = random_matrix(20, 5, 50);
    CHECK_THROWS_AS(transform_cr(m, bad_x, c), InvalidArgument);
}

TEST_CASE("confound model serializes to json") {
    const auto x = random_matrix(30, 2, 51);
    const auto c = random_matrix(30, 1, 52);
    const auto m = fit_cr(x, c, {"age"});
    const auto j = m.to_json();
    CHECK(j["confound_names"][0] == "age");
    CHECK(j["intercepts"].size() == 2);
    CHECK(j["coefficients"].size() == 2);
    CHECK(j["coefficients"][0].size() == 1);
    CHECK(j["fitted_rows"] == 30);
}
