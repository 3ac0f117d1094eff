#pragma once

#include <span>
#include <vector>

#include "confaudit/models.hpp"

namespace confaudit {

double predict_tree(const std::vector<TreeNode>& nodes, const Matrix& x, std::size_t row);

FittedModel fit_tree_model(const ModelSpec& spec, const Matrix& x, std::span<const double> y,
                           TargetKind task);
FittedModel fit_forest_model(const ModelSpec& spec, const Matrix& x, std::span<const double> y,
                             TargetKind task);
FittedModel fit_mlp_model(const ModelSpec& spec, const Matrix& x, std::span<const double> y,
                          TargetKind task);

}  // namespace confaudit
