#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "confaudit/dataset.hpp"
#include "confaudit/matrix.hpp"

namespace confaudit {

enum class ModelKind { dummy, linear, logistic, tree, forest, mlp };

std::string to_string(ModelKind k);
std::optional<ModelKind> model_kind_from_string(const std::string& s);

struct ModelSpec {
    ModelKind kind = ModelKind::tree;

    // tree / forest
    std::optional<int> max_depth;    // unset = grow until pure
    int min_samples_leaf = 1;
    int n_trees = 100;
    std::optional<int> mtry;         // unset = sqrt(p) classification, p/3 regression
    bool bootstrap = true;

    // linear / logistic; tiny default ridge keeps full one-hot designs solvable
    double ridge_lambda = 1e-8;
    int max_iter = 500;
    double tol = 1e-8;

    // mlp
    int hidden_units = 100;
    int epochs = 100;
    double learning_rate = 0.01;
    int batch_size = 32;

    std::uint64_t seed = 0;

    void validate() const;
};

struct TreeNode {
    int feature = -1;      // -1 marks a leaf
    double threshold = 0;  // go left when x <= threshold
    int left = -1;
    int right = -1;
    double value = 0;      // leaf: class-1 fraction or mean target
    int samples = 0;

    friend bool operator==(const TreeNode&, const TreeNode&) = default;
};

struct MlpParams {
    Matrix w1;                // p x h
    std::vector<double> b1;   // h
    std::vector<double> w2;   // h
    double b2 = 0.0;
};

struct FittedModel {
    ModelKind kind = ModelKind::dummy;
    TargetKind task = TargetKind::regression;
    std::size_t n_features_in = 0;

    double constant = 0.0;                     // dummy
    std::vector<double> coefficients;          // linear/logistic: {b0, w...}
    std::vector<TreeNode> nodes;               // tree
    std::vector<std::vector<TreeNode>> trees;  // forest
    MlpParams mlp;
};

// Fits a model to a feature matrix and target vector. Classification
// targets must be coded 0/1. Throws on non-finite input and on logistic fits
// with a single class.
FittedModel fit_model(const ModelSpec& spec, const Matrix& x, std::span<const double> y,
                      TargetKind task);

// Classification: score in [0,1] (leaf class fraction, forest-averaged, or
// a sigmoid output). Regression: real-valued prediction.
std::vector<double> predict_scores(const FittedModel& m, const Matrix& x);

struct TreeNodeInfo {
    int index;
    int parent;
    int depth;
    int feature;
    double threshold;
    int samples;
    double value;
    int left;
    int right;
};

// Preorder dump of a fitted tree for structural inspection (node counts,
// thresholds). Throws InvalidArgument for non-tree models.
std::vector<TreeNodeInfo> tree_structure(const FittedModel& m);
nlohmann::json tree_structure_json(const FittedModel& m,
                                   const std::vector<std::string>& feature_names);

// Internal CART entry point, exposed so the forest and the tests share it.
// rows indexes into x/y and may contain duplicates (bootstrap samples);
// mtry features are drawn per split from the seeded stream when mtry < p.
std::vector<TreeNode> build_cart(const Matrix& x, std::span<const double> y, TargetKind task,
                                 std::span<const int> rows, const ModelSpec& spec,
                                 std::uint64_t mtry_seed, int mtry);

// Loss and analytic gradient of the MLP on a batch; the finite-difference
// gradient check drives this directly.
double mlp_loss(const MlpParams& params, const Matrix& x, std::span<const double> y,
                std::span<const int> rows, TargetKind task);
void mlp_loss_grad(const MlpParams& params, const Matrix& x, std::span<const double> y,
                   std::span<const int> rows, TargetKind task, MlpParams& grad);

// Logistic-regression loss trace recorded during fitting (one entry per
// accepted step), used to check monotone descent.
std::vector<double> logistic_fit_trace(const ModelSpec& spec, const Matrix& x,
                                       std::span<const double> y);

}  // namespace confaudit
