#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "confaudit/confound_regression.hpp"
#include "confaudit/dataset.hpp"
#include "confaudit/metrics.hpp"
#include "confaudit/models.hpp"
#include "confaudit/rope.hpp"

namespace confaudit {

enum class CrVariant { none, confounds, taco };
enum class ShuffleMode { none, per_repeat, single };
enum class FeatureMode { normal, x_hat_only };
enum class SwapScope { train_only, train_and_test };

std::string to_string(CrVariant v);

// Declarative description of one evaluation pipeline. The base fields are
// preprocessing, CR variant and model; the remaining fields drive the audit
// transformation chains (shuffle-before-CR, X-hat-only features, per-fold
// value swaps).
struct PipelineSpec {
    bool standardize = true;
    bool encode = true;
    CrVariant cr_variant = CrVariant::none;
    ModelSpec model;

    ShuffleMode shuffle = ShuffleMode::none;
    FeatureMode feature_mode = FeatureMode::normal;
    bool swap_per_fold = false;
    SwapScope swap_scope = SwapScope::train_only;
};

// Optional inner-CV grid search over numeric hyperparameters. Off by
// default: the defaults are fixed, documented values and the leakage
// phenomena do not need tuning.
struct InnerSearch {
    std::map<std::string, std::vector<double>> grid;
    int inner_folds = 5;
};

struct CVScheme {
    int repeats = 10;
    int folds = 5;
    bool stratified = true;  // classification only; strata default to the class labels
    std::uint64_t seed = 0;
    std::optional<InnerSearch> inner_search;

    // Optional explicit stratification labels (one per row). Used where a
    // fold partition must preserve finer cell balance than class labels
    // give, e.g. target-by-binary-feature cells in the swap simulations.
    std::vector<int> strata;
};

struct FoldScore {
    int repeat = 0;
    int fold = 0;
    double score = 0.0;
    bool valid = false;
    std::string error;
    int tree_nodes = -1;  // fitted-artifact metadata, set for tree models
};

struct CvResult {
    std::vector<FoldScore> scores;  // ordered by (repeat, fold)
    TargetKind task = TargetKind::regression;
    std::string metric_name;

    std::vector<double> valid_scores() const;
    ScoreSummary summary() const;
};

// Everything a fold computed, handed to the probe for inspection. Also the
// CV-consistency audit hook: tests use it to check that no statistic
// crosses from test rows into any fit step.
struct FoldContext {
    int repeat;
    int fold;
    std::span<const int> train_rows;  // row ids into the (encoded) dataset
    std::span<const int> test_rows;
    const Matrix& train_x;  // features as seen by the model
    const Matrix& test_x;
    std::span<const double> train_y;
    std::span<const double> test_y;
    const FittedModel& model;
    const ConfoundModel* cr;  // null when the pipeline has no CR step
};

using FoldProbe = std::function<void(const FoldContext&)>;

// Partition rows into test folds. Returns folds[f] = sorted test row
// indices. Unstratified when strata is empty and stratified=false.
std::vector<std::vector<int>> kfold_partition(int n, int folds, std::span<const int> strata,
                                              std::uint64_t seed);

// Repeated k-fold evaluation of a pipeline, CV-consistent: standardizer, CR
// and model are fitted on training rows only, per fold. Fold cells run in
// parallel; per-cell seeds derive from (scheme seed, repeat, fold) so
// results are identical for any worker count. Scores are AUCROC for
// classification, R^2 for regression. Folds whose metric is undefined are
// recorded as invalid and skipped.
CvResult run_cv(const Dataset& d, const PipelineSpec& p, const CVScheme& s,
                const FoldProbe& probe = nullptr);

struct HoldoutResult {
    double score = 0.0;
    bool valid = false;
    std::string error;
    std::string metric_name;
    FittedModel model;
    std::optional<ConfoundModel> cr;
    std::vector<int> train_rows;
    std::vector<int> test_rows;       // into the original dataset
    std::vector<double> test_scores;  // model scores for test rows, same order
    std::vector<double> test_y;
};

// Single-split analogue of run_cv, used by the walk-through reproductions;
// exposes the fitted artifacts for tree-structure inspection and for
// rescoring subsets of the test rows.
HoldoutResult run_holdout(const Dataset& d, const PipelineSpec& p, double test_fraction,
                          std::uint64_t seed);

}  // namespace confaudit
