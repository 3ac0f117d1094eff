#include <doctest.h>

#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "confaudit/error.hpp"
#include "confaudit/metrics.hpp"
#include "confaudit/rng.hpp"
#include "confaudit/simgen.hpp"

using namespace confaudit;

TEST_CASE("walkthrough regression: confounding structure by construction") {
    const auto d = gen_walkthrough_regression(1000, 3);
    REQUIRE(d.n_confounds() == 1);
    std::vector<double> conf(d.confounds.col(0).begin(), d.confounds.col(0).end());
    CHECK(point_biserial(conf, d.target) > 0.5);

    double m0 = 0, m1 = 0;
    int n0 = 0, n1 = 0;
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
        if (conf[i] == 1.0) {
            m1 += d.target[i];
            ++n1;
        } else {
            m0 += d.target[i];
            ++n0;
        }
    }
    CHECK(std::abs(m1 / n1 - m0 / n0 - 1.0) <= 0.1);

    const auto d2 = gen_walkthrough_regression(1000, 3);
    CHECK(d.features == d2.features);
    CHECK(d.target == d2.target);
}

TEST_CASE("opposing extremes: balanced classes, identical bulks, flagged extremes") {
    const auto sim = gen_opposing_extremes(2000, 5);
    const auto& d = sim.data;
    int pos = 0;
    for (double t : d.target) pos += t == 1.0 ? 1 : 0;
    CHECK(pos == 1000);

    double bulk0 = 0, bulk1 = 0;
    int n0 = 0, n1 = 0, extreme_count = 0;
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
        if (sim.extreme_rows[i]) {
            ++extreme_count;
            continue;
        }
        if (d.target[i] == 1.0) {
            bulk1 += d.features(i, 0);
            ++n1;
        } else {
            bulk0 += d.features(i, 0);
            ++n0;
        }
    }
    CHECK(std::abs(bulk1 / n1 - bulk0 / n0) <= 0.15);
    CHECK(extreme_count == 100);  // 2 * round(0.05 * 1000)

    // extreme clusters sit where they were put
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
        if (!sim.extreme_rows[i]) continue;
        const double expected_center = d.target[i] == 1.0 ? 4.0 : -4.0;
        CHECK(std::abs(d.features(i, 0) - expected_center) < 1.5);
    }
}

TEST_CASE("skewed features: chi-squared columns are right-skewed, normal are not") {
    const auto d = gen_skewed_features(2000, 3, FeatureDist::chi2_df3, 7);
    for (std::size_t j = 0; j < 3; ++j) {
        const auto col = d.features.col(j);
        double mean = 0;
        for (double v : col) mean += v;
        mean /= 2000.0;
        double m2 = 0, m3 = 0;
        for (double v : col) {
            const double c = v - mean;
            m2 += c * c;
            m3 += c * c * c;
        }
        m2 /= 2000.0;
        m3 /= 2000.0;
        const double skew = m3 / std::pow(m2, 1.5);
        CHECK(skew > 1.0);  // chi2(3) theory: 2*sqrt(2/3) ~ 1.63
    }
}

TEST_CASE("skewed features: the target is independent of every column") {
    const auto d = gen_skewed_features(2000, 40, FeatureDist::chi2_df3, 11);
    int within = 0;
    for (std::size_t j = 0; j < 40; ++j) {
        std::vector<double> col(d.features.col(j).begin(), d.features.col(j).end());
        if (std::abs(pearson(col, d.target)) < 3.0 / std::sqrt(2000.0)) ++within;
    }
    CHECK(within >= 38);  // at least 95% of columns
}

TEST_CASE("binary balanced: exact cell counts and validation of n") {
    const auto d = gen_binary_balanced(400, 13);
    int cells[2][2] = {{0, 0}, {0, 0}};
    for (std::size_t i = 0; i < d.n_rows(); ++i) {
        cells[static_cast<int>(d.target[i])][static_cast<int>(d.features(i, 0))] += 1;
    }
    CHECK(cells[0][0] == 100);
    CHECK(cells[0][1] == 100);
    CHECK(cells[1][0] == 100);
    CHECK(cells[1][1] == 100);

    SimSpec bad;
    bad.kind = SimKind::binary_balanced;
    bad.n = 402;
    CHECK_THROWS_AS(generate(bad), InvalidArgument);
}

TEST_CASE("swap_two_values preserves the column multiset, mean and variance exactly") {
    Rng rng(17);
    std::vector<double> column(100);
    std::vector<double> groups(100);
    for (std::size_t i = 0; i < 100; ++i) {
        column[i] = static_cast<double>(i % 2);
        groups[i] = static_cast<double>((i / 2) % 2);
    }
    const std::multiset<double> before(column.begin(), column.end());
    double mean_before = 0, ss_before = 0;
    for (double v : column) mean_before += v;
    for (double v : column) ss_before += v * v;

    std::vector<int> scope(100);
    for (int i = 0; i < 100; ++i) scope[static_cast<std::size_t>(i)] = i;
    std::vector<double> swapped = column;
    swap_two_values(swapped, scope, groups, rng);

    const std::multiset<double> after(swapped.begin(), swapped.end());
    CHECK(before == after);
    double mean_after = 0, ss_after = 0;
    for (double v : swapped) mean_after += v;
    for (double v : swapped) ss_after += v * v;
    CHECK(mean_before == mean_after);
    CHECK(ss_before == ss_after);
    // exactly two rows changed, and they belong to different groups
    std::vector<std::size_t> changed;
    for (std::size_t i = 0; i < 100; ++i) {
        if (column[i] != swapped[i]) changed.push_back(i);
    }
    REQUIRE(changed.size() == 2);
    CHECK(groups[changed[0]] != groups[changed[1]]);
}

TEST_CASE("swap_two_values without two distinct values is an error") {
    Rng rng(19);
    std::vector<double> column(10, 1.0);
    std::vector<double> groups(10, 0.0);
    for (std::size_t i = 5; i < 10; ++i) groups[i] = 1.0;
    std::vector<int> scope(10);
    for (int i = 0; i < 10; ++i) scope[static_cast<std::size_t>(i)] = i;
    CHECK_THROWS_AS(swap_two_values(column, scope, groups, rng), DataError);
}

TEST_CASE("rounded feature: grid bound and half-to-even rounding") {
    CHECK(round_half_even(0.25, 1) == 0.2);
    CHECK(round_half_even(0.35, 1) == 0.4);
    CHECK(round_half_even(-0.25, 1) == -0.2);
    CHECK(round_half_even(2.5, 0) == 2.0);
    CHECK(round_half_even(3.5, 0) == 4.0);

    const auto [raw, rounded] = gen_rounded_feature(2000, 23);
    CHECK(raw.target == rounded.target);
    double max_abs = 0;
    for (double v : rounded.features.col(0)) max_abs = std::max(max_abs, std::abs(v));
    const std::set<double> distinct(rounded.features.col(0).begin(),
                                    rounded.features.col(0).end());
    CHECK(static_cast<double>(distinct.size()) <= 2.0 * max_abs * 10.0 + 1.0);
    for (std::size_t i = 0; i < raw.n_rows(); ++i)
        CHECK(std::abs(raw.features(i, 0) - rounded.features(i, 0)) <= 0.05 + 1e-12);
}

TEST_CASE("generators are pure functions of their parameters") {
    for (const auto kind : {SimKind::walkthrough_regression, SimKind::opposing_extremes,
                            SimKind::skewed_features, SimKind::binary_balanced,
                            SimKind::rounded_feature}) {
        SimSpec spec;
        spec.kind = kind;
        spec.n = 200;
        spec.seed = 31;
        spec.p = 4;
        const auto a = generate(spec);
        const auto b = generate(spec);
        CHECK(a.data.features == b.data.features);
        CHECK(a.data.target == b.data.target);
        CHECK(a.extreme_rows == b.extreme_rows);
    }
}

TEST_CASE("sim spec round-trips through json") {
    SimSpec spec;
    spec.kind = SimKind::opposing_extremes;
    spec.n = 500;
    spec.seed = 77;
    spec.extreme_fraction = 0.08;
    spec.extreme_center = 3.5;
    const auto j = spec.to_json();
    const auto back = SimSpec::from_json(j);
    CHECK(back.kind == spec.kind);
    CHECK(back.n == spec.n);
    CHECK(back.seed == spec.seed);
    CHECK(back.extreme_fraction == spec.extreme_fraction);
    CHECK(back.extreme_center == spec.extreme_center);
    CHECK(back.to_json() == j);
}

TEST_CASE("sim kind aliases resolve") {
    CHECK(sim_kind_from_string("swap") == SimKind::binary_balanced);
    CHECK(sim_kind_from_string("walkthrough") == SimKind::walkthrough_regression);
    CHECK(sim_kind_from_string("rounded") == SimKind::rounded_feature);
    CHECK(!sim_kind_from_string("nope").has_value());
}
