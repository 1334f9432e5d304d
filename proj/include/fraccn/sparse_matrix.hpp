#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fraccn/kernels.hpp"

namespace fraccn {

// Symmetric matrix in CSR form with both triangles stored and column indices
// sorted within each row.
class SparseSymmetric {
public:
    SparseSymmetric() = default;
    SparseSymmetric(std::size_t dim, std::vector<std::size_t> row_ptr, std::vector<std::size_t> col_idx,
                    std::vector<double> values);

    std::size_t dim() const { return dim_; }
    std::size_t nonzeros() const { return values_.size(); }
    std::span<const std::size_t> row_ptr() const { return row_ptr_; }
    std::span<const std::size_t> col_idx() const { return col_idx_; }
    std::span<const double> values() const { return values_; }
    std::span<double> values_mut() { return values_; }

    // Position of (i, j) in values(), or npos if structurally zero.
    std::size_t find(std::size_t i, std::size_t j) const;
    double at(std::size_t i, std::size_t j) const;
    std::vector<double> diagonal() const;

    DofVector multiply(std::span<const double> x, Exec exec = Exec::Parallel) const;
    // x' A y
    double bilinear(std::span<const double> x, std::span<const double> y, Exec exec = Exec::Parallel) const;

    bool same_pattern(const SparseSymmetric& other) const;
    bool is_symmetric(double tol = 0.0) const;

    // Dense row-major copy, for small systems and tests.
    std::vector<double> to_dense() const;

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    std::size_t dim_ = 0;
    std::vector<std::size_t> row_ptr_{0};
    std::vector<std::size_t> col_idx_;
    std::vector<double> values_;
};

// c M + d A over a shared sparsity pattern.
SparseSymmetric linear_combination(double c, const SparseSymmetric& m, double d, const SparseSymmetric& a);

}  // namespace fraccn
