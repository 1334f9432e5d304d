#include "fraccn/sparse_matrix.hpp"

#include <algorithm>
#include <cmath>

#include "fraccn/errors.hpp"

namespace fraccn {

SparseSymmetric::SparseSymmetric(std::size_t dim, std::vector<std::size_t> row_ptr,
                                 std::vector<std::size_t> col_idx, std::vector<double> values)
    : dim_(dim), row_ptr_(std::move(row_ptr)), col_idx_(std::move(col_idx)), values_(std::move(values)) {
    if (row_ptr_.size() != dim_ + 1 || col_idx_.size() != values_.size() || row_ptr_.back() != values_.size()) {
        throw DimensionError("SparseSymmetric: inconsistent CSR arrays");
    }
}

std::size_t SparseSymmetric::find(std::size_t i, std::size_t j) const {
    if (i >= dim_ || j >= dim_) return npos;
    const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
    const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return npos;
    return static_cast<std::size_t>(it - col_idx_.begin());
}

double SparseSymmetric::at(std::size_t i, std::size_t j) const {
    const std::size_t k = find(i, j);
    return k == npos ? 0.0 : values_[k];
}

std::vector<double> SparseSymmetric::diagonal() const {
    std::vector<double> d(dim_);
    for (std::size_t i = 0; i < dim_; ++i) d[i] = at(i, i);
    return d;
}

DofVector SparseSymmetric::multiply(std::span<const double> x, Exec exec) const {
    if (x.size() != dim_) throw DimensionError("SparseSymmetric::multiply: length mismatch");
    DofVector y(dim_);
    kernels::spmv(exec, row_ptr_, col_idx_, values_, x, y);
    return y;
}

double SparseSymmetric::bilinear(std::span<const double> x, std::span<const double> y, Exec exec) const {
    const DofVector ay = multiply(y, exec);
    return kernels::dot(x, ay);
}

bool SparseSymmetric::same_pattern(const SparseSymmetric& other) const {
    return dim_ == other.dim_ && row_ptr_ == other.row_ptr_ && col_idx_ == other.col_idx_;
}

bool SparseSymmetric::is_symmetric(double tol) const {
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
            const std::size_t j = col_idx_[k];
            const std::size_t kt = find(j, i);
            if (kt == npos || std::abs(values_[kt] - values_[k]) > tol) return false;
        }
    }
    return true;
}

std::vector<double> SparseSymmetric::to_dense() const {
    std::vector<double> d(dim_ * dim_, 0.0);
    for (std::size_t i = 0; i < dim_; ++i) {
        for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) d[i * dim_ + col_idx_[k]] = values_[k];
    }
    return d;
}

SparseSymmetric linear_combination(double c, const SparseSymmetric& m, double d, const SparseSymmetric& a) {
    if (!m.same_pattern(a)) throw DimensionError("linear_combination: sparsity patterns differ");
    std::vector<double> v(m.nonzeros());
    const auto mv = m.values();
    const auto av = a.values();
    for (std::size_t k = 0; k < v.size(); ++k) v[k] = c * mv[k] + d * av[k];
    return SparseSymmetric(m.dim(), {m.row_ptr().begin(), m.row_ptr().end()},
                           {m.col_idx().begin(), m.col_idx().end()}, std::move(v));
}

}  // namespace fraccn
