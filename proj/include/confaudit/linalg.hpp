#pragma once

#include <span>
#include <vector>

#include "confaudit/matrix.hpp"

namespace confaudit {

// LDL^T factorization of a symmetric positive (semi)definite matrix, no
// pivoting. Returns false if any pivot falls at or below pivot_tol times the
// largest diagonal entry, which is how rank deficiency is detected.
// On success `g` holds L below the diagonal and D on it.
bool ldl_factor(Matrix& g, double pivot_tol);

// Solves (L D L^T) x = b given a factorization from ldl_factor.
std::vector<double> ldl_solve(const Matrix& fac, std::span<const double> b);

// Cyclic Jacobi eigendecomposition of a symmetric matrix: g = V diag(w) V^T.
void jacobi_eigen(Matrix g, Matrix& vectors, std::vector<double>& values);

// Least-squares solver for a shared design matrix and many right-hand
// sides: factor the (m x m) normal equations once, then solve per column.
// Full-rank designs go through LDL^T, which stays exact for the small
// integer-valued Gram matrices that binary confounds produce; degenerate
// designs (constant or duplicated confound columns) fall back to the
// minimum-norm solution via an eigendecomposition pseudoinverse.
class NormalEquationsSolver {
  public:
    // design: n x m, n >= 1, m >= 1.
    explicit NormalEquationsSolver(const Matrix& design);

    // Solves min ||design * beta - x|| for one target column.
    std::vector<double> solve(std::span<const double> x) const;

    bool used_pseudoinverse() const { return pinv_; }

  private:
    const Matrix& design_;
    Matrix factor_;          // LDL factor when !pinv_
    Matrix eigvecs_;         // eigen path otherwise
    std::vector<double> eigvals_;
    double eig_cut_ = 0.0;
    bool pinv_ = false;
};

// Ridge least squares with an unpenalized intercept:
//   min ||y - b0 - X w||^2 + lambda ||w||^2
// Returns {b0, w...}. Solved through the same LDL/eigen machinery.
std::vector<double> ridge_solve(const Matrix& x, std::span<const double> y, double lambda);

}  // namespace confaudit
