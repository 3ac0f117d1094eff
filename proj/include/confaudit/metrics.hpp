#pragma once

#include <span>
#include <vector>

namespace confaudit {

// Area under the ROC curve, Mann-Whitney formulation with midranks so that
// tied scores get half credit. Labels must be 0/1 with both classes
// present; throws UndefinedMetric otherwise.
double aucroc(std::span<const double> labels, std::span<const double> scores);

// Coefficient of determination, 1 - SS_res / SS_tot. May be negative
// out-of-sample. Throws UndefinedMetric when y_true has zero variance.
double r2(std::span<const double> y_true, std::span<const double> y_pred);

// Product-moment correlation. Throws UndefinedMetric on constant input.
double pearson(std::span<const double> a, std::span<const double> b);

// Pearson correlation with a 0/1 group coding on the first argument.
double point_biserial(std::span<const double> group, std::span<const double> values);

struct ScoreSummary {
    double mean = 0.0;
    double sd = 0.0;  // sample standard deviation of the fold scores
    std::vector<double> fold_scores;

    static ScoreSummary of(std::span<const double> scores);
};

}  // namespace confaudit
