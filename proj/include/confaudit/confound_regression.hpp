#pragma once

#include <string>
#include <vector>

#include "confaudit/matrix.hpp"

#include <nlohmann/json_fwd.hpp>

namespace confaudit {

// Featurewise linear confound model: for every feature column j, intercept
// and one coefficient per confound, fitted by least squares on training
// rows only.
struct ConfoundModel {
    std::vector<double> intercepts;  // p
    Matrix coefficients;             // q x p, column j belongs to feature j
    std::vector<std::string> confound_names;
    std::size_t fitted_rows = 0;

    std::size_t n_features() const { return intercepts.size(); }
    std::size_t n_confounds() const { return coefficients.rows(); }

    nlohmann::json to_json() const;
};

// Ordinary least squares of each feature on [1 | confounds]. Rank-deficient
// designs (constant or duplicated confound columns) resolve to the
// minimum-norm solution instead of aborting. Parallel across features.
ConfoundModel fit_cr(const Matrix& features_train, const Matrix& confounds_train,
                     const std::vector<std::string>& confound_names = {});

struct CrTransform {
    Matrix x_cr;   // features - x_hat
    Matrix x_hat;  // intercept + confounds * coefficients
};

// Applies a fitted model to any rows; x_cr + x_hat == features exactly.
CrTransform transform_cr(const ConfoundModel& m, const Matrix& features,
                         const Matrix& confounds);

}  // namespace confaudit
