#include "confaudit/linalg.hpp"

#include <algorithm>
#include <cmath>

#include "confaudit/error.hpp"

namespace confaudit {

bool ldl_factor(Matrix& g, double pivot_tol) {
    const std::size_t m = g.rows();
    double max_diag = 0.0;
    for (std::size_t i = 0; i < m; ++i) max_diag = std::max(max_diag, std::abs(g(i, i)));
    const double cut = pivot_tol * std::max(max_diag, 1e-300);

    for (std::size_t k = 0; k < m; ++k) {
        double d = g(k, k);
        for (std::size_t s = 0; s < k; ++s) {
            const double l = g(k, s);
            d -= l * l * g(s, s);
        }
        if (!(d > cut)) return false;
        g(k, k) = d;
        for (std::size_t i = k + 1; i < m; ++i) {
            double v = g(i, k);
            for (std::size_t s = 0; s < k; ++s) {
                v -= g(i, s) * g(k, s) * g(s, s);
            }
            g(i, k) = v / d;
        }
    }
    return true;
}

std::vector<double> ldl_solve(const Matrix& fac, std::span<const double> b) {
    const std::size_t m = fac.rows();
    std::vector<double> x(b.begin(), b.end());
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t s = 0; s < i; ++s) x[i] -= fac(i, s) * x[s];
    }
    for (std::size_t i = 0; i < m; ++i) x[i] /= fac(i, i);
    for (std::size_t ir = m; ir-- > 0;) {
        for (std::size_t s = ir + 1; s < m; ++s) x[ir] -= fac(s, ir) * x[s];
    }
    return x;
}

void jacobi_eigen(Matrix g, Matrix& vectors, std::vector<double>& values) {
    const std::size_t m = g.rows();
    vectors = Matrix(m, m);
    for (std::size_t i = 0; i < m; ++i) vectors(i, i) = 1.0;

    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (std::size_t p = 0; p < m; ++p) {
            for (std::size_t q = p + 1; q < m; ++q) off += g(p, q) * g(p, q);
        }
        if (off < 1e-300) break;
        for (std::size_t p = 0; p < m; ++p) {
            for (std::size_t q = p + 1; q < m; ++q) {
                const double apq = g(p, q);
                if (apq == 0.0) continue;
                const double theta = (g(q, q) - g(p, p)) / (2.0 * apq);
                const double t = (theta >= 0 ? 1.0 : -1.0) /
                                 (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (std::size_t i = 0; i < m; ++i) {
                    const double gip = g(i, p), giq = g(i, q);
                    g(i, p) = c * gip - s * giq;
                    g(i, q) = s * gip + c * giq;
                }
                for (std::size_t i = 0; i < m; ++i) {
                    const double gpi = g(p, i), gqi = g(q, i);
                    g(p, i) = c * gpi - s * gqi;
                    g(q, i) = s * gpi + c * gqi;
                }
                for (std::size_t i = 0; i < m; ++i) {
                    const double vip = vectors(i, p), viq = vectors(i, q);
                    vectors(i, p) = c * vip - s * viq;
                    vectors(i, q) = s * vip + c * viq;
                }
            }
        }
    }
    values.resize(m);
    for (std::size_t i = 0; i < m; ++i) values[i] = g(i, i);
}

namespace {

Matrix gram_of(const Matrix& design) {
    const std::size_t n = design.rows();
    const std::size_t m = design.cols();
    Matrix g(m, m);
    for (std::size_t a = 0; a < m; ++a) {
        const auto ca = design.col(a);
        for (std::size_t b = a; b < m; ++b) {
            const auto cb = design.col(b);
            double s = 0.0;
            for (std::size_t i = 0; i < n; ++i) s += ca[i] * cb[i];
            g(a, b) = s;
            g(b, a) = s;
        }
    }
    return g;
}

std::vector<double> design_t_times(const Matrix& design, std::span<const double> x) {
    const std::size_t n = design.rows();
    const std::size_t m = design.cols();
    std::vector<double> r(m);
    for (std::size_t a = 0; a < m; ++a) {
        const auto ca = design.col(a);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += ca[i] * x[i];
        r[a] = s;
    }
    return r;
}

constexpr double kLdlPivotTol = 1e-12;

}  // namespace

NormalEquationsSolver::NormalEquationsSolver(const Matrix& design) : design_(design) {
    if (design.cols() == 0) throw InvalidArgument("empty design matrix");
    Matrix g = gram_of(design);
    factor_ = g;
    if (ldl_factor(factor_, kLdlPivotTol)) return;

    // Rank-deficient: minimum-norm solution through the Gram eigenbasis.
    // (G^+ D^T x equals the pseudoinverse solution D^+ x.) Eigenvalues are
    // squared singular values, so the documented 1e-10 singular-value cut
    // lands below machine precision here; the effective cut is eps-scaled.
    pinv_ = true;
    jacobi_eigen(g, eigvecs_, eigvals_);
    double max_ev = 0.0;
    for (double v : eigvals_) max_ev = std::max(max_ev, v);
    eig_cut_ = std::max(max_ev * static_cast<double>(design.cols()) * 1e-14, 1e-300);
}

std::vector<double> NormalEquationsSolver::solve(std::span<const double> x) const {
    const auto rhs = design_t_times(design_, x);
    if (!pinv_) return ldl_solve(factor_, rhs);

    const std::size_t m = rhs.size();
    std::vector<double> beta(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        if (eigvals_[k] <= eig_cut_) continue;
        double proj = 0.0;
        for (std::size_t i = 0; i < m; ++i) proj += eigvecs_(i, k) * rhs[i];
        proj /= eigvals_[k];
        for (std::size_t i = 0; i < m; ++i) beta[i] += eigvecs_(i, k) * proj;
    }
    return beta;
}

std::vector<double> ridge_solve(const Matrix& x, std::span<const double> y, double lambda) {
    const std::size_t n = x.rows();
    const std::size_t p = x.cols();
    const std::size_t m = p + 1;

    // Gram of [1 | X] with lambda added to the coefficient block only.
    Matrix g(m, m);
    g(0, 0) = static_cast<double>(n);
    for (std::size_t a = 0; a < p; ++a) {
        const auto ca = x.col(a);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += ca[i];
        g(0, a + 1) = s;
        g(a + 1, 0) = s;
        for (std::size_t b = a; b < p; ++b) {
            const auto cb = x.col(b);
            double dot = 0.0;
            for (std::size_t i = 0; i < n; ++i) dot += ca[i] * cb[i];
            g(a + 1, b + 1) = dot;
            g(b + 1, a + 1) = dot;
        }
        g(a + 1, a + 1) += lambda;
    }

    std::vector<double> rhs(m, 0.0);
    for (std::size_t i = 0; i < n; ++i) rhs[0] += y[i];
    for (std::size_t a = 0; a < p; ++a) {
        const auto ca = x.col(a);
        double s = 0.0;
        for (std::size_t i = 0; i < n; ++i) s += ca[i] * y[i];
        rhs[a + 1] = s;
    }

    Matrix fac = g;
    if (ldl_factor(fac, kLdlPivotTol)) return ldl_solve(fac, rhs);

    Matrix vecs;
    std::vector<double> vals;
    jacobi_eigen(g, vecs, vals);
    double max_ev = 0.0;
    for (double v : vals) max_ev = std::max(max_ev, v);
    const double cut = std::max(max_ev * static_cast<double>(m) * 1e-14, 1e-300);
    std::vector<double> beta(m, 0.0);
    for (std::size_t k = 0; k < m; ++k) {
        if (vals[k] <= cut) continue;
        double proj = 0.0;
        for (std::size_t i = 0; i < m; ++i) proj += vecs(i, k) * rhs[i];
        proj /= vals[k];
        for (std::size_t i = 0; i < m; ++i) beta[i] += vecs(i, k) * proj;
    }
    return beta;
}

}  // namespace confaudit
