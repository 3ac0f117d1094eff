#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <vector>

namespace confaudit {

// Dense column-major matrix of doubles. Column-major because nearly every
// kernel in this project walks one feature column at a time.
class Matrix {
  public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, double fill = 0.0)
        : rows_(rows), cols_(cols), d_(rows * cols, fill) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }
    bool empty() const { return d_.empty(); }

    double& operator()(std::size_t i, std::size_t j) { return d_[j * rows_ + i]; }
    double operator()(std::size_t i, std::size_t j) const { return d_[j * rows_ + i]; }

    std::span<double> col(std::size_t j) { return {d_.data() + j * rows_, rows_}; }
    std::span<const double> col(std::size_t j) const { return {d_.data() + j * rows_, rows_}; }

    double* data() { return d_.data(); }
    const double* data() const { return d_.data(); }

    bool all_finite() const {
        for (double v : d_) {
            if (!std::isfinite(v)) return false;
        }
        return true;
    }

    Matrix select_rows(std::span<const int> idx) const {
        Matrix out(idx.size(), cols_);
        for (std::size_t j = 0; j < cols_; ++j) {
            const double* src = d_.data() + j * rows_;
            double* dst = out.d_.data() + j * idx.size();
            for (std::size_t i = 0; i < idx.size(); ++i) {
                dst[i] = src[static_cast<std::size_t>(idx[i])];
            }
        }
        return out;
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.d_ == b.d_;
    }

  private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> d_;
};

inline std::vector<double> select(std::span<const double> v, std::span<const int> idx) {
    std::vector<double> out(idx.size());
    for (std::size_t i = 0; i < idx.size(); ++i) {
        out[i] = v[static_cast<std::size_t>(idx[i])];
    }
    return out;
}

}  // namespace confaudit
