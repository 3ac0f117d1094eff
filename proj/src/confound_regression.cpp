#include "confaudit/confound_regression.hpp"

#include <nlohmann/json.hpp>

#include "confaudit/error.hpp"
#include "confaudit/linalg.hpp"

namespace confaudit {

nlohmann::json ConfoundModel::to_json() const {
    nlohmann::json j;
    j["confound_names"] = confound_names;
    j["fitted_rows"] = fitted_rows;
    j["intercepts"] = intercepts;
    std::vector<std::vector<double>> coefs(n_features());
    for (std::size_t f = 0; f < n_features(); ++f) {
        const auto col = coefficients.col(f);
        coefs[f].assign(col.begin(), col.end());
    }
    j["coefficients"] = coefs;
    return j;
}

ConfoundModel fit_cr(const Matrix& features_train, const Matrix& confounds_train,
                     const std::vector<std::string>& confound_names) {
    const std::size_t n = features_train.rows();
    const std::size_t p = features_train.cols();
    const std::size_t q = confounds_train.cols();
    if (confounds_train.rows() != n)
        throw InvalidArgument("fit_cr: feature and confound row counts differ");
    if (n <= q)
        throw DataError("fit_cr: underdetermined design, " + std::to_string(n) +
                        " rows for " + std::to_string(q) + " confounds");
    if (!features_train.all_finite() || !confounds_train.all_finite())
        throw DataError("fit_cr: non-finite values in input");

    // Design [1 | confounds] is shared by every feature: factor once.
    Matrix design(n, q + 1);
    for (std::size_t i = 0; i < n; ++i) design(i, 0) = 1.0;
    for (std::size_t c = 0; c < q; ++c) {
        const auto src = confounds_train.col(c);
        std::copy(src.begin(), src.end(), design.col(c + 1).begin());
    }
    const NormalEquationsSolver solver(design);

    ConfoundModel model;
    model.intercepts.resize(p);
    model.coefficients = Matrix(q, p);
    model.confound_names = confound_names;
    model.fitted_rows = n;

#pragma omp parallel for schedule(static)
    for (long long fj = 0; fj < static_cast<long long>(p); ++fj) {
        const auto f = static_cast<std::size_t>(fj);
        const auto beta = solver.solve(features_train.col(f));
        model.intercepts[f] = beta[0];
        for (std::size_t c = 0; c < q; ++c) model.coefficients(c, f) = beta[c + 1];
    }
    return model;
}

CrTransform transform_cr(const ConfoundModel& m, const Matrix& features,
                         const Matrix& confounds) {
    const std::size_t n = features.rows();
    const std::size_t p = features.cols();
    const std::size_t q = confounds.cols();
    if (p != m.n_features())
        throw InvalidArgument("transform_cr: feature count does not match fitted model");
    if (q != m.n_confounds())
        throw InvalidArgument("transform_cr: confound count does not match fitted model");
    if (confounds.rows() != n)
        throw InvalidArgument("transform_cr: feature and confound row counts differ");

    CrTransform out{Matrix(n, p), Matrix(n, p)};
#pragma omp parallel for schedule(static)
    for (long long fj = 0; fj < static_cast<long long>(p); ++fj) {
        const auto f = static_cast<std::size_t>(fj);
        auto hat = out.x_hat.col(f);
        auto res = out.x_cr.col(f);
        const auto x = features.col(f);
        for (std::size_t i = 0; i < n; ++i) hat[i] = m.intercepts[f];
        for (std::size_t c = 0; c < q; ++c) {
            const double w = m.coefficients(c, f);
            if (w == 0.0) continue;
            const auto conf = confounds.col(c);
            for (std::size_t i = 0; i < n; ++i) hat[i] += w * conf[i];
        }
        for (std::size_t i = 0; i < n; ++i) res[i] = x[i] - hat[i];
    }
    return out;
}

}  // namespace confaudit
