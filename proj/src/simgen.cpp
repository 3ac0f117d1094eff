#include "confaudit/simgen.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "confaudit/error.hpp"

namespace confaudit {

std::string to_string(SimKind k) {
    switch (k) {
        case SimKind::walkthrough_regression: return "walkthrough_regression";
        case SimKind::opposing_extremes: return "opposing_extremes";
        case SimKind::skewed_features: return "skewed_features";
        case SimKind::binary_balanced: return "binary_balanced";
        case SimKind::rounded_feature: return "rounded_feature";
    }
    return "?";
}

std::optional<SimKind> sim_kind_from_string(const std::string& s) {
    if (s == "walkthrough_regression" || s == "walkthrough")
        return SimKind::walkthrough_regression;
    if (s == "opposing_extremes" || s == "extremes") return SimKind::opposing_extremes;
    if (s == "skewed_features" || s == "skewed") return SimKind::skewed_features;
    if (s == "binary_balanced" || s == "swap") return SimKind::binary_balanced;
    if (s == "rounded_feature" || s == "rounded") return SimKind::rounded_feature;
    return std::nullopt;
}

std::string to_string(FeatureDist d) {
    return d == FeatureDist::normal ? "normal" : "chi2_df3";
}

void SimSpec::validate() const {
    if (n < 20) throw InvalidArgument("simulation needs n >= 20");
    if (kind == SimKind::skewed_features && (p < 1 || p > 100))
        throw InvalidArgument("skewed_features supports 1 to 100 features");
    if (kind == SimKind::binary_balanced && n % 4 != 0)
        throw InvalidArgument("binary_balanced needs n divisible by 4");
    if (kind == SimKind::opposing_extremes &&
        !(extreme_fraction > 0.0 && extreme_fraction < 0.5))
        throw InvalidArgument("extreme_fraction must be in (0, 0.5)");
    if (kind == SimKind::rounded_feature && decimals < 0)
        throw InvalidArgument("decimals must be >= 0");
}

nlohmann::json SimSpec::to_json() const {
    nlohmann::json j;
    j["kind"] = to_string(kind);
    j["n"] = n;
    j["seed"] = seed;
    switch (kind) {
        case SimKind::skewed_features:
            j["p"] = p;
            j["dist"] = to_string(dist);
            break;
        case SimKind::walkthrough_regression:
            j["noise_sd"] = noise_sd;
            j["mix_center_low"] = mix_center_low;
            j["mix_center_high"] = mix_center_high;
            j["mix_sd"] = mix_sd;
            break;
        case SimKind::opposing_extremes:
            j["extreme_fraction"] = extreme_fraction;
            j["extreme_center"] = extreme_center;
            j["extreme_sd"] = extreme_sd;
            break;
        case SimKind::rounded_feature:
            j["decimals"] = decimals;
            break;
        case SimKind::binary_balanced:
            break;
    }
    return j;
}

SimSpec SimSpec::from_json(const nlohmann::json& j) {
    SimSpec s;
    const auto kind = sim_kind_from_string(j.at("kind").get<std::string>());
    if (!kind) throw InvalidArgument("unknown simulation kind in spec");
    s.kind = *kind;
    s.n = j.at("n").get<int>();
    s.seed = j.at("seed").get<std::uint64_t>();
    if (j.contains("p")) s.p = j["p"].get<int>();
    if (j.contains("dist"))
        s.dist = j["dist"].get<std::string>() == "chi2_df3" ? FeatureDist::chi2_df3
                                                            : FeatureDist::normal;
    if (j.contains("noise_sd")) s.noise_sd = j["noise_sd"].get<double>();
    if (j.contains("mix_center_low")) s.mix_center_low = j["mix_center_low"].get<double>();
    if (j.contains("mix_center_high")) s.mix_center_high = j["mix_center_high"].get<double>();
    if (j.contains("mix_sd")) s.mix_sd = j["mix_sd"].get<double>();
    if (j.contains("extreme_fraction")) s.extreme_fraction = j["extreme_fraction"].get<double>();
    if (j.contains("extreme_center")) s.extreme_center = j["extreme_center"].get<double>();
    if (j.contains("extreme_sd")) s.extreme_sd = j["extreme_sd"].get<double>();
    if (j.contains("decimals")) s.decimals = j["decimals"].get<int>();
    s.validate();
    return s;
}

double round_half_even(double v, int decimals) {
    const double scale = std::pow(10.0, decimals);
    const double x = v * scale;
    const double f = std::floor(x);
    const double diff = x - f;
    double r;
    if (diff > 0.5) r = f + 1.0;
    else if (diff < 0.5) r = f;
    else r = std::fmod(f, 2.0) == 0.0 ? f : f + 1.0;
    return r / scale;
}

namespace {

Dataset make_regression_dataset(Matrix features, std::vector<double> target,
                                std::vector<std::string> names,
                                std::vector<ColumnKind> kinds) {
    Dataset d;
    d.features = std::move(features);
    d.feature_names = std::move(names);
    d.feature_kinds = std::move(kinds);
    d.feature_levels.resize(d.feature_names.size());
    d.target = std::move(target);
    d.target_kind = TargetKind::regression;
    d.confounds = Matrix(d.target.size(), 0);
    return d;
}

Dataset make_classification_dataset(Matrix features, std::vector<double> target,
                                    std::vector<std::string> names,
                                    std::vector<ColumnKind> kinds) {
    Dataset d;
    d.features = std::move(features);
    d.feature_names = std::move(names);
    d.feature_kinds = std::move(kinds);
    d.feature_levels.resize(d.feature_names.size());
    d.target = std::move(target);
    d.target_kind = TargetKind::classification;
    d.class_labels = {"0", "1"};
    d.confounds = Matrix(d.target.size(), 0);
    return d;
}

SimResult gen_walkthrough(const SimSpec& s) {
    Rng rng(derive_seed(s.seed, seedtag::confound));
    const auto n = static_cast<std::size_t>(s.n);
    Matrix x(n, 1);
    Matrix conf(n, 1);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double c = rng.bernoulli(0.5) ? 1.0 : 0.0;
        conf(i, 0) = c;
        y[i] = c + rng.normal(0.0, s.noise_sd);
        if (c == 0.0) {
            x(i, 0) = rng.normal(0.0, 1.0);
        } else {
            const double center = rng.bernoulli(0.5) ? s.mix_center_low : s.mix_center_high;
            x(i, 0) = rng.normal(center, s.mix_sd);
        }
    }
    SimResult out;
    out.data = make_regression_dataset(std::move(x), std::move(y), {"x1"},
                                       {ColumnKind::continuous});
    out.data.confounds = std::move(conf);
    out.data.confound_names = {"confound"};
    out.data.confound_kinds = {ColumnKind::binary};
    out.data.confound_levels.resize(1);
    return out;
}

SimResult gen_extremes(const SimSpec& s) {
    Rng rng(s.seed);
    const auto n = static_cast<std::size_t>(s.n);
    Matrix x(n, 1);
    std::vector<double> y(n);
    std::vector<std::uint8_t> extreme(n, 0);

    // Balanced classes in a fixed alternating layout, then shuffled;
    // per-class extreme counts are exact, not sampled.
    std::vector<int> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = static_cast<int>(i);
    rng.shuffle(order);
    const auto n_class = n / 2;
    const auto n_extreme = static_cast<std::size_t>(
        std::floor(static_cast<double>(n_class) * s.extreme_fraction + 0.5));

    std::size_t assigned = 0;
    for (int cls = 0; cls < 2; ++cls) {
        const std::size_t cnt = cls == 0 ? n_class : n - n_class;
        for (std::size_t k = 0; k < cnt; ++k, ++assigned) {
            const auto row = static_cast<std::size_t>(order[assigned]);
            y[row] = static_cast<double>(cls);
            if (k < n_extreme) {
                extreme[row] = 1;
                const double center = cls == 0 ? -s.extreme_center : s.extreme_center;
                x(row, 0) = rng.normal(center, s.extreme_sd);
            } else {
                x(row, 0) = rng.normal(0.0, 1.0);
            }
        }
    }

    SimResult out;
    out.data = make_classification_dataset(std::move(x), std::move(y), {"x1"},
                                           {ColumnKind::continuous});
    out.extreme_rows = std::move(extreme);
    return out;
}

SimResult gen_skewed(const SimSpec& s) {
    const auto n = static_cast<std::size_t>(s.n);
    const auto p = static_cast<std::size_t>(s.p);
    Matrix x(n, p);
    for (std::size_t j = 0; j < p; ++j) {
        Rng rng(derive_seed(s.seed, seedtag::confound, static_cast<std::uint64_t>(j)));
        auto col = x.col(j);
        for (std::size_t i = 0; i < n; ++i) {
            col[i] = s.dist == FeatureDist::chi2_df3 ? rng.chi2(3) : rng.normal();
        }
    }
    Rng rng(derive_seed(s.seed, seedtag::model));
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) y[i] = rng.normal();

    std::vector<std::string> names(p);
    for (std::size_t j = 0; j < p; ++j) names[j] = "x" + std::to_string(j + 1);
    SimResult out;
    out.data = make_regression_dataset(std::move(x), std::move(y), std::move(names),
                                       std::vector<ColumnKind>(p, ColumnKind::continuous));
    return out;
}

SimResult gen_balanced(const SimSpec& s) {
    const auto n = static_cast<std::size_t>(s.n);
    Matrix x(n, 1);
    std::vector<double> y(n);
    // Exact cell counts n/4 for every (feature, class) cell, then shuffle.
    for (std::size_t i = 0; i < n; ++i) {
        y[i] = static_cast<double>(i % 2);
        x(i, 0) = static_cast<double>((i % 4) / 2);
    }
    Rng rng(s.seed);
    const auto perm = rng.permutation(s.n);
    Matrix xs(n, 1);
    std::vector<double> ys(n);
    for (std::size_t i = 0; i < n; ++i) {
        xs(i, 0) = x(static_cast<std::size_t>(perm[i]), 0);
        ys[i] = y[static_cast<std::size_t>(perm[i])];
    }
    SimResult out;
    out.data = make_classification_dataset(std::move(xs), std::move(ys), {"x1"},
                                           {ColumnKind::binary});
    return out;
}

SimResult gen_rounded(const SimSpec& s) {
    Rng rng(s.seed);
    const auto n = static_cast<std::size_t>(s.n);
    Matrix x(n, 1);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = rng.normal();
        y[i] = rng.normal();
    }
    SimResult out;
    out.data = make_regression_dataset(std::move(x), std::move(y), {"x1"},
                                       {ColumnKind::continuous});
    Dataset rounded = out.data;
    for (double& v : rounded.features.col(0)) v = round_half_even(v, s.decimals);
    out.rounded_twin = std::move(rounded);
    return out;
}

}  // namespace

SimResult generate(const SimSpec& spec) {
    spec.validate();
    switch (spec.kind) {
        case SimKind::walkthrough_regression: return gen_walkthrough(spec);
        case SimKind::opposing_extremes: return gen_extremes(spec);
        case SimKind::skewed_features: return gen_skewed(spec);
        case SimKind::binary_balanced: return gen_balanced(spec);
        case SimKind::rounded_feature: return gen_rounded(spec);
    }
    throw InvalidArgument("unknown simulation kind");
}

Dataset gen_walkthrough_regression(int n, std::uint64_t seed) {
    SimSpec s;
    s.kind = SimKind::walkthrough_regression;
    s.n = n;
    s.seed = seed;
    return generate(s).data;
}

SimResult gen_opposing_extremes(int n, std::uint64_t seed, double extreme_fraction,
                                double extreme_center, double extreme_sd) {
    SimSpec s;
    s.kind = SimKind::opposing_extremes;
    s.n = n;
    s.seed = seed;
    s.extreme_fraction = extreme_fraction;
    s.extreme_center = extreme_center;
    s.extreme_sd = extreme_sd;
    return generate(s);
}

Dataset gen_skewed_features(int n, int p, FeatureDist dist, std::uint64_t seed) {
    SimSpec s;
    s.kind = SimKind::skewed_features;
    s.n = n;
    s.p = p;
    s.dist = dist;
    s.seed = seed;
    return generate(s).data;
}

Dataset gen_binary_balanced(int n, std::uint64_t seed) {
    SimSpec s;
    s.kind = SimKind::binary_balanced;
    s.n = n;
    s.seed = seed;
    return generate(s).data;
}

std::pair<Dataset, Dataset> gen_rounded_feature(int n, std::uint64_t seed, int decimals) {
    SimSpec s;
    s.kind = SimKind::rounded_feature;
    s.n = n;
    s.seed = seed;
    s.decimals = decimals;
    auto r = generate(s);
    return {std::move(r.data), std::move(*r.rounded_twin)};
}

void swap_two_values(std::span<double> column, std::span<const int> scope_rows,
                     std::span<const double> groups, Rng& rng) {
    if (scope_rows.size() < 2) throw DataError("swap_two_values: scope has fewer than 2 rows");

    bool groups_vary = false;
    bool values_vary = false;
    for (std::size_t k = 1; k < scope_rows.size(); ++k) {
        const auto a = static_cast<std::size_t>(scope_rows[0]);
        const auto b = static_cast<std::size_t>(scope_rows[k]);
        if (!groups.empty() && groups[b] != groups[a]) groups_vary = true;
        if (column[b] != column[a]) values_vary = true;
    }
    if (!values_vary) throw DataError("swap_two_values: no two distinct values in scope");

    // A cross-group pair guarantees the conditional distributions actually
    // shift; same-group exchanges would be no-ops for the leakage mechanism.
    for (int attempt = 0; attempt < 100000; ++attempt) {
        const auto ia = scope_rows[rng.below(scope_rows.size())];
        const auto ib = scope_rows[rng.below(scope_rows.size())];
        const auto a = static_cast<std::size_t>(ia);
        const auto b = static_cast<std::size_t>(ib);
        if (column[a] == column[b]) continue;
        if (groups_vary && !groups.empty() && groups[a] == groups[b]) continue;
        std::swap(column[a], column[b]);
        return;
    }
    throw DataError("swap_two_values: no eligible pair found");
}

}  // namespace confaudit
