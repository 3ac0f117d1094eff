#include <algorithm>
#include <cmath>
#include <numeric>

#include "confaudit/error.hpp"
#include "confaudit/models.hpp"
#include "confaudit/rng.hpp"
#include "models_internal.hpp"

namespace confaudit {

namespace {

double sigmoid(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double forward(const MlpParams& p, const Matrix& x, std::size_t row,
               std::vector<double>& hidden) {
    const std::size_t h = p.b1.size();
    for (std::size_t k = 0; k < h; ++k) {
        double z = p.b1[k];
        for (std::size_t j = 0; j < x.cols(); ++j) z += x(row, j) * p.w1(j, k);
        hidden[k] = z > 0 ? z : 0.0;
    }
    double z = p.b2;
    for (std::size_t k = 0; k < h; ++k) z += hidden[k] * p.w2[k];
    return z;
}

}  // namespace

double mlp_loss(const MlpParams& params, const Matrix& x, std::span<const double> y,
                std::span<const int> rows, TargetKind task) {
    std::vector<double> hidden(params.b1.size());
    double loss = 0.0;
    for (int r : rows) {
        const auto i = static_cast<std::size_t>(r);
        const double z = forward(params, x, i, hidden);
        if (task == TargetKind::classification) {
            const double m = y[i] == 1.0 ? z : -z;
            loss += m > 0 ? std::log1p(std::exp(-m)) : -m + std::log1p(std::exp(m));
        } else {
            const double d = z - y[i];
            loss += 0.5 * d * d;
        }
    }
    return loss / static_cast<double>(rows.size());
}

void mlp_loss_grad(const MlpParams& params, const Matrix& x, std::span<const double> y,
                   std::span<const int> rows, TargetKind task, MlpParams& grad) {
    const std::size_t p = x.cols();
    const std::size_t h = params.b1.size();
    grad.w1 = Matrix(p, h);
    grad.b1.assign(h, 0.0);
    grad.w2.assign(h, 0.0);
    grad.b2 = 0.0;

    std::vector<double> hidden(h);
    const double inv_n = 1.0 / static_cast<double>(rows.size());
    for (int r : rows) {
        const auto i = static_cast<std::size_t>(r);
        const double z = forward(params, x, i, hidden);
        // dLoss/dz: sigmoid(z) - y for logistic loss, z - y for squared loss
        const double dz = (task == TargetKind::classification ? sigmoid(z) : z) - y[i];
        grad.b2 += dz * inv_n;
        for (std::size_t k = 0; k < h; ++k) {
            grad.w2[k] += dz * hidden[k] * inv_n;
            if (hidden[k] <= 0) continue;  // relu gate
            const double dh = dz * params.w2[k] * inv_n;
            grad.b1[k] += dh;
            for (std::size_t j = 0; j < p; ++j) grad.w1(j, k) += dh * x(i, j);
        }
    }
}

FittedModel fit_mlp_model(const ModelSpec& spec, const Matrix& x, std::span<const double> y,
                          TargetKind task) {
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    const auto h = static_cast<std::size_t>(spec.hidden_units);

    FittedModel m;
    m.kind = ModelKind::mlp;
    m.task = task;
    m.n_features_in = p;

    // Uniform init scaled by 1/sqrt(fan-in); biases start at zero.
    Rng rng(derive_seed(spec.seed, seedtag::model));
    MlpParams params;
    params.w1 = Matrix(p, h);
    params.b1.assign(h, 0.0);
    params.w2.assign(h, 0.0);
    const double s1 = 1.0 / std::sqrt(static_cast<double>(std::max<std::size_t>(p, 1)));
    for (std::size_t k = 0; k < h; ++k) {
        for (std::size_t j = 0; j < p; ++j) params.w1(j, k) = (2.0 * rng.uniform01() - 1.0) * s1;
    }
    const double s2 = 1.0 / std::sqrt(static_cast<double>(h));
    for (std::size_t k = 0; k < h; ++k) params.w2[k] = (2.0 * rng.uniform01() - 1.0) * s2;

    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    MlpParams grad;
    const auto bs = static_cast<std::size_t>(spec.batch_size);
    for (int epoch = 0; epoch < spec.epochs; ++epoch) {
        rng.shuffle(order);
        for (std::size_t start = 0; start < n; start += bs) {
            const std::size_t len = std::min(bs, n - start);
            const std::span<const int> batch{order.data() + start, len};
            mlp_loss_grad(params, x, y, batch, task, grad);
            const double lr = spec.learning_rate;
            for (std::size_t k = 0; k < h; ++k) {
                for (std::size_t j = 0; j < p; ++j) params.w1(j, k) -= lr * grad.w1(j, k);
                params.b1[k] -= lr * grad.b1[k];
                params.w2[k] -= lr * grad.w2[k];
            }
            params.b2 -= lr * grad.b2;
        }
    }
    m.mlp = std::move(params);
    return m;
}

}  // namespace confaudit
