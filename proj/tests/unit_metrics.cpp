#include <doctest.h>

#include <cmath>
#include <vector>

#include "confaudit/error.hpp"
#include "confaudit/metrics.hpp"
#include "confaudit/rng.hpp"
#include "oracles.hpp"

using namespace confaudit;

TEST_CASE("aucroc is 1 for a perfect ranking and 0.5 for all ties") {
    const std::vector<double> labels{0, 0, 1, 1};
    CHECK(aucroc(labels, std::vector<double>{0.1, 0.2, 0.8, 0.9}) == 1.0);
    CHECK(aucroc(labels, std::vector<double>{0.5, 0.5, 0.5, 0.5}) == 0.5);
    CHECK(aucroc(labels, std::vector<double>{0.9, 0.8, 0.2, 0.1}) == 0.0);
}

TEST_CASE("aucroc equals the pair-counting oracle exactly on tied instances") {
    Rng rng(11);
    for (int trial = 0; trial < 200; ++trial) {
        const auto n = static_cast<std::size_t>(5 + rng.below(46));
        std::vector<double> labels(n), scores(n);
        bool has0 = false, has1 = false;
        for (std::size_t i = 0; i < n; ++i) {
            labels[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
            has0 |= labels[i] == 0.0;
            has1 |= labels[i] == 1.0;
            // draw from a small grid to force heavy ties
            scores[i] = static_cast<double>(rng.below(5)) / 4.0;
        }
        if (!has0 || !has1) continue;
        CHECK(aucroc(labels, scores) == oracle::auc_pair_count(labels, scores));
    }
}

TEST_CASE("aucroc rejects single-class labels") {
    const std::vector<double> labels{1, 1, 1};
    CHECK_THROWS_AS(aucroc(labels, std::vector<double>{0.1, 0.2, 0.3}), UndefinedMetric);
}

TEST_CASE("aucroc complement and monotone-transform invariance") {
    Rng rng(13);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> labels(30), scores(30), neg(30), warped(30);
        bool both = false;
        for (std::size_t i = 0; i < 30; ++i) {
            labels[i] = rng.bernoulli(0.4) ? 1.0 : 0.0;
            scores[i] = rng.normal();  // continuous, tie-free
            neg[i] = -scores[i];
            warped[i] = std::exp(2.0 * scores[i]) + 3.0;
        }
        for (double l : labels) both |= l == 1.0;
        bool any0 = false;
        for (double l : labels) any0 |= l == 0.0;
        if (!both || !any0) continue;
        CHECK(aucroc(labels, scores) + aucroc(labels, neg) == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(aucroc(labels, scores) == doctest::Approx(aucroc(labels, warped)).epsilon(1e-12));
    }
}

TEST_CASE("r2 hits the fixed points") {
    const std::vector<double> y{1.0, 2.0, 3.0, 4.0};
    CHECK(r2(y, y) == 1.0);
    const std::vector<double> mean(4, 2.5);
    CHECK(r2(y, mean) == 0.0);
}

TEST_CASE("r2 matches direct recomputation and goes negative for bad predictions") {
    Rng rng(17);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> y(25), pred(25);
        for (std::size_t i = 0; i < 25; ++i) {
            y[i] = rng.normal();
            pred[i] = rng.normal(1.0, 2.0);  // systematically off
        }
        double mean = 0;
        for (double v : y) mean += v;
        mean /= 25.0;
        double ss_tot = 0, ss_res = 0;
        for (std::size_t i = 0; i < 25; ++i) {
            ss_tot += (y[i] - mean) * (y[i] - mean);
            ss_res += (y[i] - pred[i]) * (y[i] - pred[i]);
        }
        CHECK(r2(y, pred) == doctest::Approx(1.0 - ss_res / ss_tot).epsilon(1e-12));
    }
    const std::vector<double> y{0.0, 1.0, 2.0};
    CHECK(r2(y, std::vector<double>{10.0, 10.0, 10.0}) < 0.0);
    CHECK_THROWS_AS(r2(std::vector<double>{1.0, 1.0}, std::vector<double>{1.0, 2.0}),
                    UndefinedMetric);
}

TEST_CASE("pearson endpoints, symmetry, affine invariance") {
    const std::vector<double> a{1, 2, 3, 4, 5};
    std::vector<double> b{2, 4, 6, 8, 10};
    CHECK(pearson(a, b) == doctest::Approx(1.0).epsilon(1e-12));
    for (double& v : b) v = -v;
    CHECK(pearson(a, b) == doctest::Approx(-1.0).epsilon(1e-12));

    Rng rng(19);
    std::vector<double> u(20), v(20), v_affine(20);
    for (std::size_t i = 0; i < 20; ++i) {
        u[i] = rng.normal();
        v[i] = rng.normal() + 0.5 * u[i];
        v_affine[i] = 3.0 * v[i] + 7.0;
    }
    CHECK(pearson(u, v) == doctest::Approx(pearson(v, u)).epsilon(1e-12));
    CHECK(pearson(u, v) == doctest::Approx(pearson(u, v_affine)).epsilon(1e-10));
    CHECK_THROWS_AS(pearson(std::vector<double>{1, 1, 1}, std::vector<double>{1, 2, 3}),
                    UndefinedMetric);
}

TEST_CASE("point_biserial equals pearson on the 0/1 coding") {
    const std::vector<double> g{0, 0, 1, 1};
    const std::vector<double> v{1, 2, 3, 4};
    CHECK(point_biserial(g, v) == pearson(g, v));
    // direct formula: (m1 - m0)/s * sqrt(p*(1-p)) with population moments
    const double m0 = 1.5, m1 = 3.5;
    const double mean = 2.5;
    double ss = 0;
    for (double x : v) ss += (x - mean) * (x - mean);
    const double sd = std::sqrt(ss / 4.0);
    const double expect = (m1 - m0) / sd * std::sqrt(0.25);
    CHECK(point_biserial(g, v) == doctest::Approx(expect).epsilon(1e-12));
    CHECK_THROWS_AS(point_biserial(std::vector<double>{0, 2, 1}, v), InvalidArgument);
}

TEST_CASE("score summary reports mean and sample sd") {
    const std::vector<double> s{0.5, 0.7, 0.6};
    const auto sum = ScoreSummary::of(s);
    CHECK(sum.mean == doctest::Approx(0.6).epsilon(1e-12));
    CHECK(sum.sd == doctest::Approx(0.1).epsilon(1e-12));
    CHECK(sum.fold_scores == s);
}
