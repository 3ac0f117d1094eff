#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>

#include "confaudit/dataset.hpp"
#include "confaudit/error.hpp"
#include "confaudit/rng.hpp"

using namespace confaudit;

namespace {

std::string write_temp(const std::string& name, const std::string& content) {
    const auto path = std::filesystem::temp_directory_path() / name;
    std::ofstream out(path);
    out << content;
    return path.string();
}

Dataset tiny_classification(int n, std::uint64_t seed) {
    Rng rng(seed);
    Dataset d;
    d.features = Matrix(static_cast<std::size_t>(n), 2);
    d.feature_names = {"a", "b"};
    d.feature_kinds = {ColumnKind::continuous, ColumnKind::continuous};
    d.feature_levels.resize(2);
    d.target.resize(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        d.features(static_cast<std::size_t>(i), 0) = rng.normal();
        d.features(static_cast<std::size_t>(i), 1) = rng.normal(1.0, 2.0);
        d.target[static_cast<std::size_t>(i)] = static_cast<double>(i % 2);
    }
    d.target_kind = TargetKind::classification;
    d.class_labels = {"0", "1"};
    d.confounds = Matrix(static_cast<std::size_t>(n), 0);
    return d;
}

}  // namespace

TEST_CASE("load_csv codes classification labels lexicographically") {
    const auto path = write_temp("ca_load1.csv", "x,y\n1.5,b\n2.5,a\n3.5,b\n4.5,a\n");
    LoadOptions opts;
    opts.target_col = "y";
    const auto d = load_csv(path, opts);
    CHECK(d.target_kind == TargetKind::classification);
    CHECK(d.class_labels == std::vector<std::string>{"a", "b"});
    CHECK(d.target == std::vector<double>{1.0, 0.0, 1.0, 0.0});
}

TEST_CASE("load_csv infers binary kind from two distinct numeric values") {
    const auto path = write_temp("ca_load2.csv", "x,flag,y\n1,0,0.3\n2,1,0.5\n3,0,0.9\n4,1,1.2\n");
    LoadOptions opts;
    opts.target_col = "y";
    const auto d = load_csv(path, opts);
    REQUIRE(d.n_features() == 2);
    CHECK(d.feature_kinds[0] == ColumnKind::continuous);
    CHECK(d.feature_kinds[1] == ColumnKind::binary);
    CHECK(d.target_kind == TargetKind::regression);
}

TEST_CASE("load_csv rejects unparseable cell naming row and column") {
    const auto path = write_temp("ca_load3.csv", "x,y\n1,0.1\noops,0.2\n3,0.3\n");
    LoadOptions opts;
    opts.target_col = "y";
    opts.kind_overrides["x"] = ColumnKind::continuous;
    try {
        load_csv(path, opts);
        FAIL("expected DataError");
    } catch (const DataError& e) {
        const std::string msg = e.what();
        CHECK(msg.find("row 3") != std::string::npos);
        CHECK(msg.find("'x'") != std::string::npos);
    }
}

TEST_CASE("load_csv missing column is a named error") {
    const auto path = write_temp("ca_load4.csv", "x,y\n1,2\n3,4\n");
    LoadOptions opts;
    opts.target_col = "nope";
    CHECK_THROWS_AS(load_csv(path, opts), DataError);
}

TEST_CASE("load_csv drop_rows policy removes incomplete rows") {
    const auto path = write_temp("ca_load5.csv", "x,y\n1,0.1\n,0.2\n3,0.3\n4,0.4\n");
    LoadOptions opts;
    opts.target_col = "y";
    opts.missing = MissingPolicy::drop_rows;
    const auto d = load_csv(path, opts);
    CHECK(d.n_rows() == 3);
}

TEST_CASE("load_csv single-class classification target is rejected") {
    const auto path = write_temp("ca_load6.csv", "x,y\n1,a\n2,a\n3,a\n");
    LoadOptions opts;
    opts.target_col = "y";
    opts.target_kind = TargetKind::classification;
    CHECK_THROWS_AS(load_csv(path, opts), DataError);
}

TEST_CASE("one_hot_encode expands a three-level categorical") {
    const auto path = write_temp("ca_enc1.csv", "c,y\nred,0.1\nblue,0.2\ngreen,0.3\nred,0.4\n");
    LoadOptions opts;
    opts.target_col = "y";
    const auto d = load_csv(path, opts);
    REQUIRE(d.feature_kinds[0] == ColumnKind::categorical);
    const auto e = one_hot_encode(d);
    REQUIRE(e.n_features() == 3);
    CHECK(e.feature_names == std::vector<std::string>{"c=blue", "c=green", "c=red"});
    // rows: red, blue, green, red
    CHECK(e.features(0, 2) == 1.0);
    CHECK(e.features(1, 0) == 1.0);
    CHECK(e.features(2, 1) == 1.0);
    CHECK(e.features(3, 2) == 1.0);
    for (std::size_t j = 0; j < 3; ++j) CHECK(e.feature_kinds[j] == ColumnKind::binary);
}

TEST_CASE("one_hot_encode is the identity without categorical columns") {
    const auto d = tiny_classification(10, 1);
    const auto e = one_hot_encode(d);
    CHECK(e.features == d.features);
    CHECK(e.feature_names == d.feature_names);
}

TEST_CASE("one_hot_encode indicators per source column sum to one in every row") {
    const auto path = write_temp("ca_enc2.csv",
                                 "c,d,y\nx,u,0\nyy,v,1\nz,u,0\nx,w,1\nz,v,0\nyy,w,1\n");
    LoadOptions opts;
    opts.target_col = "y";
    const auto e = one_hot_encode(load_csv(path, opts));
    REQUIRE(e.n_features() == 6);
    for (std::size_t i = 0; i < e.n_rows(); ++i) {
        double s1 = e.features(i, 0) + e.features(i, 1) + e.features(i, 2);
        double s2 = e.features(i, 3) + e.features(i, 4) + e.features(i, 5);
        CHECK(s1 == 1.0);
        CHECK(s2 == 1.0);
    }
}

TEST_CASE("standardizer matches the forced arithmetic example") {
    Dataset d;
    d.features = Matrix(3, 1);
    d.features(0, 0) = 1.0;
    d.features(1, 0) = 3.0;
    d.features(2, 0) = 2.0;
    d.feature_names = {"x"};
    d.feature_kinds = {ColumnKind::continuous};
    d.feature_levels.resize(1);
    d.target = {0.0, 1.0, 0.5};
    d.target_kind = TargetKind::regression;
    d.confounds = Matrix(3, 0);

    const std::vector<int> train{0, 1};
    const auto s = Standardizer::fit(d, train);
    REQUIRE(s.feature_stats.size() == 1);
    CHECK(s.feature_stats[0].mean == 2.0);
    CHECK(s.feature_stats[0].scale == 1.0);  // population sd of {1,3}
    const auto applied = s.apply(d);
    CHECK(applied.features(2, 0) == 0.0);
}

TEST_CASE("standardizer centers constant columns with scale one") {
    Dataset d;
    d.features = Matrix(3, 1, 5.0);
    d.feature_names = {"x"};
    d.feature_kinds = {ColumnKind::continuous};
    d.feature_levels.resize(1);
    d.target = {0.0, 1.0, 0.5};
    d.target_kind = TargetKind::regression;
    d.confounds = Matrix(3, 0);
    const std::vector<int> rows{0, 1, 2};
    const auto s = Standardizer::fit(d, rows);
    CHECK(s.feature_stats[0].scale == 1.0);
    const auto applied = s.apply(d);
    for (std::size_t i = 0; i < 3; ++i) CHECK(applied.features(i, 0) == 0.0);
}

TEST_CASE("standardizer fitted on train rows normalizes exactly those rows") {
    auto d = tiny_classification(40, 3);
    std::vector<int> train, test;
    for (int i = 0; i < 40; ++i) (i < 28 ? train : test).push_back(i);
    const auto s = Standardizer::fit(d, train);
    const auto a = s.apply(d);
    for (std::size_t j = 0; j < 2; ++j) {
        double mean = 0.0, test_mean = 0.0;
        for (int i : train) mean += a.features(static_cast<std::size_t>(i), j);
        mean /= static_cast<double>(train.size());
        double ss = 0.0;
        for (int i : train) {
            const double v = a.features(static_cast<std::size_t>(i), j) - mean;
            ss += v * v;
        }
        const double sd = std::sqrt(ss / static_cast<double>(train.size()));
        CHECK(std::abs(mean) <= 1e-10);
        CHECK(std::abs(sd - 1.0) <= 1e-10);
        for (int i : test) test_mean += a.features(static_cast<std::size_t>(i), j);
        test_mean /= static_cast<double>(test.size());
        CHECK(std::abs(test_mean) > 1e-6);  // held-out rows are not recentered
    }
}

TEST_CASE("balance_classes undersamples the majority to the minority count") {
    Dataset d = tiny_classification(16, 5);
    for (int i = 0; i < 10; ++i) d.target[static_cast<std::size_t>(i)] = 1.0;
    for (int i = 10; i < 16; ++i) d.target[static_cast<std::size_t>(i)] = 0.0;
    const auto b = balance_classes(d, 7);
    int pos = 0, neg = 0;
    for (double t : b.target) (t == 1.0 ? pos : neg) += 1;
    CHECK(pos == 6);
    CHECK(neg == 6);

    // output rows are a subset of the input rows
    std::multiset<double> in(d.features.col(0).begin(), d.features.col(0).end());
    for (double v : b.features.col(0)) CHECK(in.count(v) > 0);

    // determinism and identity on balanced input
    const auto b2 = balance_classes(d, 7);
    CHECK(b.features == b2.features);
    const auto same = balance_classes(b, 11);
    CHECK(same.features == b.features);
}

TEST_CASE("train_test_split sizes follow round(n * fraction)") {
    const auto d = tiny_classification(10, 9);
    const auto [train, test] = train_test_split(d, 0.3, 4, false);
    CHECK(train.n_rows() == 7);
    CHECK(test.n_rows() == 3);
}

TEST_CASE("stratified split preserves class proportions") {
    const auto d = tiny_classification(12, 13);  // 6/6 balanced
    const auto [train, test] = train_test_split(d, 0.5, 4, true);
    int pos = 0;
    for (double t : test.target) pos += t == 1.0 ? 1 : 0;
    CHECK(test.n_rows() == 6);
    CHECK(pos == 3);
}

TEST_CASE("split is a partition of the rows") {
    const auto d = tiny_classification(23, 17);
    const auto [train_idx, test_idx] = split_indices(d, 0.4, 21, true);
    std::set<int> seen(train_idx.begin(), train_idx.end());
    for (int t : test_idx) {
        CHECK(seen.count(t) == 0);
        seen.insert(t);
    }
    CHECK(seen.size() == 23);
}

TEST_CASE("stratified split failing a class is an error") {
    Dataset d = tiny_classification(10, 23);
    for (std::size_t i = 0; i < 9; ++i) d.target[i] = 0.0;
    d.target[9] = 1.0;
    CHECK_THROWS_AS(train_test_split(d, 0.9, 3, true), DataError);
}

TEST_CASE("shuffle_features permutes columns independently and preserves multisets") {
    const auto d = tiny_classification(50, 31);
    const auto s = shuffle_features(d, 77);
    for (std::size_t j = 0; j < d.n_features(); ++j) {
        std::multiset<double> before(d.features.col(j).begin(), d.features.col(j).end());
        std::multiset<double> after(s.features.col(j).begin(), s.features.col(j).end());
        CHECK(before == after);
    }
    CHECK(s.target == d.target);
    // same seed reproduces, different seed differs
    const auto s2 = shuffle_features(d, 77);
    CHECK(s.features == s2.features);
    const auto s3 = shuffle_features(d, 78);
    CHECK(!(s3.features == s.features));
    // column-wise means unchanged
    for (std::size_t j = 0; j < d.n_features(); ++j) {
        double before = 0.0, after = 0.0;
        for (std::size_t i = 0; i < d.n_rows(); ++i) {
            before += d.features(i, j);
            after += s.features(i, j);
        }
        CHECK(before == doctest::Approx(after).epsilon(1e-12));
    }
}

TEST_CASE("single-level categorical becomes one constant indicator") {
    const auto path = write_temp("ca_enc3.csv", "c,x,y\nonly,1,0.1\nonly,2,0.2\nonly,3,0.3\n");
    LoadOptions opts;
    opts.target_col = "y";
    opts.kind_overrides["c"] = ColumnKind::categorical;
    const auto e = one_hot_encode(load_csv(path, opts));
    REQUIRE(e.n_features() == 2);
    CHECK(e.feature_names[0] == "c=only");
    for (std::size_t i = 0; i < e.n_rows(); ++i) CHECK(e.features(i, 0) == 1.0);
}

TEST_CASE("binary kind override keeps the original values and caps distinct counts") {
    const auto path = write_temp("ca_load7.csv", "f,y\n5,0.1\n7,0.2\n5,0.3\n7,0.4\n");
    LoadOptions opts;
    opts.target_col = "y";
    opts.kind_overrides["f"] = ColumnKind::binary;
    const auto d = load_csv(path, opts);
    CHECK(d.feature_kinds[0] == ColumnKind::binary);
    CHECK(d.features(0, 0) == 5.0);
    CHECK(d.features(1, 0) == 7.0);

    const auto path3 = write_temp("ca_load8.csv", "f,y\n5,0.1\n6,0.2\n7,0.3\n");
    CHECK_THROWS_AS(load_csv(path3, opts), DataError);
}
