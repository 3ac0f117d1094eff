#include <doctest.h>

#include <cmath>
#include <vector>

#include "confaudit/error.hpp"
#include "confaudit/rng.hpp"
#include "confaudit/rope.hpp"
#include "oracles.hpp"

using namespace confaudit;

TEST_CASE("identical score vectors are practically equivalent with all mass in the rope") {
    const std::vector<double> a{0.6, 0.7, 0.65, 0.71};
    const auto r = rope_compare(a, a);
    CHECK(r.p_rope == 1.0);
    CHECK(r.p_left == 0.0);
    CHECK(r.p_right == 0.0);
    CHECK(r.decision == RopeDecision::practically_equivalent);
}

TEST_CASE("constant positive difference is a point mass on the right") {
    const std::vector<double> a{0.8, 0.9, 0.85};
    const std::vector<double> b{0.5, 0.6, 0.55};
    const auto r = rope_compare(a, b);
    CHECK(r.p_right == 1.0);
    CHECK(r.decision == RopeDecision::meaningfully_higher);
    const auto rev = rope_compare(b, a);
    CHECK(rev.p_left == 1.0);
    CHECK(rev.decision == RopeDecision::meaningfully_lower);
}

TEST_CASE("point mass on the rope boundary counts as inside") {
    // exactly representable values so mean(d) equals the halfwidth bitwise
    const std::vector<double> a{1.5, 1.5};
    const std::vector<double> b{1.0, 1.0};
    RopeConfig cfg;
    cfg.halfwidth = 0.5;
    const auto r = rope_compare(a, b, cfg);
    CHECK(r.p_rope == 1.0);
}

TEST_CASE("antisymmetry is exact: swapping arguments swaps the tail masses") {
    Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const auto n = static_cast<std::size_t>(5 + rng.below(30));
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = rng.normal(0.6, 0.1);
            b[i] = rng.normal(0.6, 0.1);
        }
        const auto fwd = rope_compare(a, b);
        const auto rev = rope_compare(b, a);
        CHECK(fwd.p_left == rev.p_right);   // bitwise
        CHECK(fwd.p_right == rev.p_left);   // bitwise
    }
}

TEST_CASE("probabilities sum to one and lie in [0,1]") {
    Rng rng(5);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> a(10), b(10);
        for (std::size_t i = 0; i < 10; ++i) {
            a[i] = rng.normal();
            b[i] = rng.normal();
        }
        const auto r = rope_compare(a, b);
        CHECK(r.p_left >= 0.0);
        CHECK(r.p_rope >= 0.0);
        CHECK(r.p_right >= 0.0);
        CHECK(std::abs(r.p_left + r.p_rope + r.p_right - 1.0) <= 1e-9);
    }
}

TEST_CASE("posterior masses agree with a Monte Carlo sample of the same Student-t") {
    Rng rng(7);
    for (int trial = 0; trial < 5; ++trial) {
        const std::size_t n = 8 + rng.below(20);
        std::vector<double> a(n), b(n);
        for (std::size_t i = 0; i < n; ++i) {
            a[i] = rng.normal(0.62, 0.08);
            b[i] = rng.normal(0.60, 0.08);
        }
        RopeConfig cfg;
        cfg.rho = 0.2;
        const auto r = rope_compare(a, b, cfg);

        double mean = 0;
        for (std::size_t i = 0; i < n; ++i) mean += a[i] - b[i];
        mean /= static_cast<double>(n);
        double ss = 0;
        for (std::size_t i = 0; i < n; ++i) {
            const double d = a[i] - b[i] - mean;
            ss += d * d;
        }
        const double var = ss / static_cast<double>(n - 1);
        const double scale = std::sqrt((1.0 / n + cfg.rho / (1 - cfg.rho)) * var);

        oracle::StudentTSampler sampler(900 + trial, static_cast<double>(n - 1), mean, scale);
        const int draws = 100000;
        int left = 0, rope = 0, right = 0;
        for (int k = 0; k < draws; ++k) {
            const double v = sampler.draw();
            if (v < -cfg.halfwidth) ++left;
            else if (v > cfg.halfwidth) ++right;
            else ++rope;
        }
        CHECK(std::abs(r.p_left - left / static_cast<double>(draws)) <= 0.01);
        CHECK(std::abs(r.p_rope - rope / static_cast<double>(draws)) <= 0.01);
        CHECK(std::abs(r.p_right - right / static_cast<double>(draws)) <= 0.01);
    }
}

TEST_CASE("rope input validation") {
    const std::vector<double> a{1.0, 2.0};
    CHECK_THROWS_AS(rope_compare(a, std::vector<double>{1.0}), InvalidArgument);
    CHECK_THROWS_AS(rope_compare(std::vector<double>{1.0}, std::vector<double>{1.0}),
                    InvalidArgument);
}
