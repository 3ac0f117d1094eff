#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "confaudit/dataset.hpp"
#include "confaudit/rng.hpp"

namespace confaudit {

enum class SimKind {
    walkthrough_regression,
    opposing_extremes,
    skewed_features,
    binary_balanced,
    rounded_feature,
};

enum class FeatureDist { normal, chi2_df3 };

std::string to_string(SimKind k);
std::optional<SimKind> sim_kind_from_string(const std::string& s);
std::string to_string(FeatureDist d);

// Fully seeded generator description. Every under-specified distribution
// parameter is a named field with a default, surfaced through the CLI; two
// calls with equal specs agree bit for bit.
struct SimSpec {
    SimKind kind = SimKind::walkthrough_regression;
    int n = 1000;
    std::uint64_t seed = 0;

    // skewed_features
    int p = 1;
    FeatureDist dist = FeatureDist::normal;

    // walkthrough_regression: target = confound + Normal(0, noise_sd);
    // feature | confound=0 ~ Normal(0, 1); feature | confound=1 an even
    // mixture of Normal(mix_center_low, mix_sd) and Normal(mix_center_high,
    // mix_sd). The asymmetric default centers put one mixture lobe on top
    // of the confound=0 bulk, so the confound signal only becomes
    // tree-separable after the group means are removed.
    double noise_sd = 0.5;
    double mix_center_low = 0.0;
    double mix_center_high = 6.0;
    double mix_sd = 0.5;

    // opposing_extremes
    double extreme_fraction = 0.05;
    double extreme_center = 4.0;
    double extreme_sd = 0.2;

    // rounded_feature
    int decimals = 1;

    void validate() const;
    nlohmann::json to_json() const;
    static SimSpec from_json(const nlohmann::json& j);
};

struct SimResult {
    Dataset data;
    // opposing_extremes: per-row flag marking rows drawn from the extreme
    // clusters, so an extreme-free holdout can be formed.
    std::vector<std::uint8_t> extreme_rows;
    // rounded_feature: the same dataset with the feature rounded
    // half-to-even to `decimals`.
    std::optional<Dataset> rounded_twin;
};

SimResult generate(const SimSpec& spec);

// Named wrappers with the documented defaults.
Dataset gen_walkthrough_regression(int n, std::uint64_t seed);
SimResult gen_opposing_extremes(int n, std::uint64_t seed, double extreme_fraction = 0.05,
                                double extreme_center = 4.0, double extreme_sd = 0.2);
Dataset gen_skewed_features(int n, int p, FeatureDist dist, std::uint64_t seed);
Dataset gen_binary_balanced(int n, std::uint64_t seed);
std::pair<Dataset, Dataset> gen_rounded_feature(int n, std::uint64_t seed, int decimals = 1);

// Exchanges the feature values of two randomly chosen rows within the given
// scope. The rows must differ in value and, when the group vector
// distinguishes them, in group as well, so the marginal distribution is
// preserved while the distribution conditional on the group shifts.
// Throws DataError when no such pair exists.
void swap_two_values(std::span<double> column, std::span<const int> scope_rows,
                     std::span<const double> groups, Rng& rng);

// Half-to-even rounding to a number of decimal digits.
double round_half_even(double v, int decimals);

}  // namespace confaudit
