#pragma once

// Data-parallel inner loops. Every kernel has an OpenMP path and a plain
// serial path; both perform the same floating-point operations in the same
// order per output entry, so results are bit-identical regardless of the
// thread count. The serial path is the reference the tests compare against.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace fraccn {

using DofVector = std::vector<double>;

enum class Exec { Serial, Parallel };

namespace kernels {

// y = A x for a CSR matrix.
void spmv(Exec exec, std::span<const std::size_t> row_ptr, std::span<const std::size_t> col_idx,
          std::span<const double> values, std::span<const double> x, std::span<double> y);

// out[i] = sum_k weights[k] * vectors[k][i], summed in increasing k.
void combine(Exec exec, std::span<const double> weights, std::span<const DofVector> vectors,
             std::span<double> out);

// y = a x + b y
void axpby(Exec exec, double a, std::span<const double> x, double b, std::span<double> y);

// Sum of item(i) for i in [0, count). Items are evaluated concurrently into a
// scratch array and then summed serially, so the result does not depend on
// the schedule.
double deterministic_sum(Exec exec, std::size_t count, const std::function<double(std::size_t)>& item);

// Runs body(i) for i in [0, count); iterations must write disjoint outputs.
void for_each(Exec exec, std::size_t count, const std::function<void(std::size_t)>& body);

// Always serial: a fixed-order dot product.
double dot(std::span<const double> x, std::span<const double> y);

int max_threads();

}  // namespace kernels
}  // namespace fraccn
