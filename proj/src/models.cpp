#include "confaudit/models.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include <nlohmann/json.hpp>

#include "confaudit/error.hpp"
#include "confaudit/linalg.hpp"
#include "models_internal.hpp"

namespace confaudit {

std::string to_string(ModelKind k) {
    switch (k) {
        case ModelKind::dummy: return "dummy";
        case ModelKind::linear: return "linear";
        case ModelKind::logistic: return "logistic";
        case ModelKind::tree: return "tree";
        case ModelKind::forest: return "forest";
        case ModelKind::mlp: return "mlp";
    }
    return "?";
}

std::optional<ModelKind> model_kind_from_string(const std::string& s) {
    if (s == "dummy") return ModelKind::dummy;
    if (s == "linear") return ModelKind::linear;
    if (s == "logistic") return ModelKind::logistic;
    if (s == "tree") return ModelKind::tree;
    if (s == "forest") return ModelKind::forest;
    if (s == "mlp") return ModelKind::mlp;
    return std::nullopt;
}

void ModelSpec::validate() const {
    if (max_depth && *max_depth < 1) throw InvalidArgument("max_depth must be >= 1");
    if (min_samples_leaf < 1) throw InvalidArgument("min_samples_leaf must be >= 1");
    if (n_trees < 1) throw InvalidArgument("n_trees must be >= 1");
    if (mtry && *mtry < 1) throw InvalidArgument("mtry must be >= 1");
    if (ridge_lambda < 0) throw InvalidArgument("ridge_lambda must be >= 0");
    if (hidden_units < 1) throw InvalidArgument("hidden_units must be >= 1");
    if (epochs < 1) throw InvalidArgument("epochs must be >= 1");
    if (learning_rate <= 0) throw InvalidArgument("learning_rate must be > 0");
    if (batch_size < 1) throw InvalidArgument("batch_size must be >= 1");
    if (max_iter < 1) throw InvalidArgument("max_iter must be >= 1");
}

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double linear_predict(const std::vector<double>& coef, const Matrix& x, std::size_t row) {
    double s = coef[0];
    for (std::size_t j = 0; j < x.cols(); ++j) s += coef[j + 1] * x(row, j);
    return s;
}

// Mean logistic loss plus the ridge term, and its gradient.
double logistic_loss_grad(const std::vector<double>& coef, const Matrix& x,
                          std::span<const double> y, double lambda,
                          std::vector<double>* grad) {
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    if (grad) std::fill(grad->begin(), grad->end(), 0.0);
    double loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double z = linear_predict(coef, x, i);
        // log(1 + exp(-m)) with the sign folded in, stable for large |z|
        const double m = y[i] == 1.0 ? z : -z;
        loss += m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
        if (grad) {
            const double resid = sigmoid(z) - y[i];
            (*grad)[0] += resid;
            for (std::size_t j = 0; j < p; ++j) (*grad)[j + 1] += resid * x(i, j);
        }
    }
    loss /= static_cast<double>(n);
    for (std::size_t j = 1; j <= p; ++j) loss += 0.5 * lambda * coef[j] * coef[j];
    if (grad) {
        for (double& g : *grad) g /= static_cast<double>(n);
        for (std::size_t j = 1; j <= p; ++j) (*grad)[j] += lambda * coef[j];
    }
    return loss;
}

// Gradient descent with Armijo backtracking; records the accepted-step loss
// trace when asked.
std::vector<double> fit_logistic(const ModelSpec& spec, const Matrix& x,
                                 std::span<const double> y, std::vector<double>* trace) {
    const std::size_t p = x.cols();
    std::vector<double> coef(p + 1, 0.0), grad(p + 1, 0.0), trial(p + 1, 0.0);
    double loss = logistic_loss_grad(coef, x, y, spec.ridge_lambda, &grad);
    if (trace) trace->push_back(loss);
    double step = 1.0;
    for (int it = 0; it < spec.max_iter; ++it) {
        double gnorm2 = 0.0;
        for (double g : grad) gnorm2 += g * g;
        if (std::sqrt(gnorm2) <= spec.tol) break;

        bool accepted = false;
        for (int bt = 0; bt < 60; ++bt) {
            for (std::size_t j = 0; j < coef.size(); ++j) trial[j] = coef[j] - step * grad[j];
            const double trial_loss =
                logistic_loss_grad(trial, x, y, spec.ridge_lambda, nullptr);
            if (trial_loss <= loss - 1e-4 * step * gnorm2) {
                coef = trial;
                loss = trial_loss;
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;
        if (trace) trace->push_back(loss);
        logistic_loss_grad(coef, x, y, spec.ridge_lambda, &grad);
        step = std::min(step * 2.0, 1e6);
    }
    return coef;
}

}  // namespace

std::vector<double> logistic_fit_trace(const ModelSpec& spec, const Matrix& x,
                                       std::span<const double> y) {
    std::vector<double> trace;
    fit_logistic(spec, x, y, &trace);
    return trace;
}

FittedModel fit_model(const ModelSpec& spec, const Matrix& x, std::span<const double> y,
                      TargetKind task) {
    spec.validate();
    if (x.rows() < 2) throw InvalidArgument("fit_model needs at least 2 rows");
    if (x.rows() != y.size()) throw InvalidArgument("fit_model: x/y length mismatch");
    if (!x.all_finite()) throw DataError("fit_model: non-finite feature values");
    for (double v : y) {
        if (!std::isfinite(v)) throw DataError("fit_model: non-finite target values");
    }
    if (task == TargetKind::classification) {
        for (double v : y) {
            if (v != 0.0 && v != 1.0)
                throw InvalidArgument("classification target must be coded 0/1");
        }
    }

    switch (spec.kind) {
        case ModelKind::dummy: {
            FittedModel m;
            m.kind = ModelKind::dummy;
            m.task = task;
            m.n_features_in = x.cols();
            double s = 0.0;
            for (double v : y) s += v;
            // regression: train mean; classification: positive-class prevalence
            m.constant = s / static_cast<double>(y.size());
            return m;
        }
        case ModelKind::linear: {
            if (task != TargetKind::regression)
                throw InvalidArgument("linear model requires a regression target");
            FittedModel m;
            m.kind = ModelKind::linear;
            m.task = task;
            m.n_features_in = x.cols();
            m.coefficients = ridge_solve(x, y, spec.ridge_lambda);
            return m;
        }
        case ModelKind::logistic: {
            if (task != TargetKind::classification)
                throw InvalidArgument("logistic model requires a classification target");
            const std::set<double> classes(y.begin(), y.end());
            if (classes.size() < 2)
                throw DataError("logistic fit requires both classes in the training data");
            FittedModel m;
            m.kind = ModelKind::logistic;
            m.task = task;
            m.n_features_in = x.cols();
            m.coefficients = fit_logistic(spec, x, y, nullptr);
            return m;
        }
        case ModelKind::tree:
            return fit_tree_model(spec, x, y, task);
        case ModelKind::forest:
            return fit_forest_model(spec, x, y, task);
        case ModelKind::mlp:
            return fit_mlp_model(spec, x, y, task);
    }
    throw InvalidArgument("unknown model kind");
}

std::vector<double> predict_scores(const FittedModel& m, const Matrix& x) {
    if (x.cols() != m.n_features_in)
        throw InvalidArgument("predict_scores: feature count does not match training");
    const std::size_t n = x.rows();
    std::vector<double> out(n);
    switch (m.kind) {
        case ModelKind::dummy:
            std::fill(out.begin(), out.end(), m.constant);
            break;
        case ModelKind::linear:
            for (std::size_t i = 0; i < n; ++i) out[i] = linear_predict(m.coefficients, x, i);
            break;
        case ModelKind::logistic:
            for (std::size_t i = 0; i < n; ++i)
                out[i] = sigmoid(linear_predict(m.coefficients, x, i));
            break;
        case ModelKind::tree:
            for (std::size_t i = 0; i < n; ++i) out[i] = predict_tree(m.nodes, x, i);
            break;
        case ModelKind::forest: {
            for (std::size_t i = 0; i < n; ++i) {
                double s = 0.0;
                for (const auto& tree : m.trees) s += predict_tree(tree, x, i);
                out[i] = s / static_cast<double>(m.trees.size());
            }
            break;
        }
        case ModelKind::mlp: {
            const std::size_t h = m.mlp.b1.size();
            std::vector<double> hidden(h);
            for (std::size_t i = 0; i < n; ++i) {
                for (std::size_t k = 0; k < h; ++k) {
                    double z = m.mlp.b1[k];
                    for (std::size_t j = 0; j < x.cols(); ++j) z += x(i, j) * m.mlp.w1(j, k);
                    hidden[k] = z > 0 ? z : 0.0;
                }
                double z = m.mlp.b2;
                for (std::size_t k = 0; k < h; ++k) z += hidden[k] * m.mlp.w2[k];
                out[i] = m.task == TargetKind::classification ? sigmoid(z) : z;
            }
            break;
        }
    }
    return out;
}

nlohmann::json tree_structure_json(const FittedModel& m,
                                   const std::vector<std::string>& feature_names) {
    const auto info = tree_structure(m);
    nlohmann::json nodes = nlohmann::json::array();
    for (const auto& nd : info) {
        nlohmann::json j;
        j["index"] = nd.index;
        j["parent"] = nd.parent;
        j["depth"] = nd.depth;
        j["feature"] = nd.feature;
        if (nd.feature >= 0 && static_cast<std::size_t>(nd.feature) < feature_names.size())
            j["feature_name"] = feature_names[static_cast<std::size_t>(nd.feature)];
        j["threshold"] = nd.threshold;
        j["samples"] = nd.samples;
        j["value"] = nd.value;
        j["left"] = nd.left;
        j["right"] = nd.right;
        nodes.push_back(std::move(j));
    }
    return nodes;
}

}  // namespace confaudit
