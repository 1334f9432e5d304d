#include "fraccn/kernels.hpp"

#include <omp.h>

#include "fraccn/errors.hpp"

namespace fraccn::kernels {

namespace {

using index_t = long long;  // OpenMP loop index

}  // namespace

void spmv(Exec exec, std::span<const std::size_t> row_ptr, std::span<const std::size_t> col_idx,
          std::span<const double> values, std::span<const double> x, std::span<double> y) {
    const index_t rows = static_cast<index_t>(row_ptr.size()) - 1;
    if (static_cast<index_t>(y.size()) != rows) {
        throw DimensionError("spmv: output length does not match row count");
    }
    if (exec == Exec::Serial) {
        for (index_t i = 0; i < rows; ++i) {
            double s = 0.0;
            for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += values[k] * x[col_idx[k]];
            y[i] = s;
        }
        return;
    }
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < rows; ++i) {
        double s = 0.0;
        for (std::size_t k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += values[k] * x[col_idx[k]];
        y[i] = s;
    }
}

void combine(Exec exec, std::span<const double> weights, std::span<const DofVector> vectors,
             std::span<double> out) {
    if (weights.size() != vectors.size()) {
        throw DimensionError("combine: weight count does not match vector count");
    }
    const index_t n = static_cast<index_t>(out.size());
    for (const auto& v : vectors) {
        if (static_cast<index_t>(v.size()) != n) throw DimensionError("combine: vector length mismatch");
    }
    const std::size_t count = weights.size();
    if (exec == Exec::Serial) {
        for (index_t i = 0; i < n; ++i) out[i] = 0.0;
        for (std::size_t k = 0; k < count; ++k) {
            const double w = weights[k];
            const double* v = vectors[k].data();
            for (index_t i = 0; i < n; ++i) out[i] += w * v[i];
        }
        return;
    }
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < n; ++i) {
        double s = 0.0;
        for (std::size_t k = 0; k < count; ++k) s += weights[k] * vectors[k][i];
        out[i] = s;
    }
}

void axpby(Exec exec, double a, std::span<const double> x, double b, std::span<double> y) {
    if (x.size() != y.size()) throw DimensionError("axpby: length mismatch");
    const index_t n = static_cast<index_t>(y.size());
    if (exec == Exec::Serial) {
        for (index_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
        return;
    }
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < n; ++i) y[i] = a * x[i] + b * y[i];
}

double deterministic_sum(Exec exec, std::size_t count, const std::function<double(std::size_t)>& item) {
    std::vector<double> parts(count);
    const index_t n = static_cast<index_t>(count);
    if (exec == Exec::Serial) {
        for (index_t i = 0; i < n; ++i) parts[i] = item(static_cast<std::size_t>(i));
    } else {
#pragma omp parallel for schedule(static)
        for (index_t i = 0; i < n; ++i) parts[i] = item(static_cast<std::size_t>(i));
    }
    double s = 0.0;
    for (double p : parts) s += p;
    return s;
}

void for_each(Exec exec, std::size_t count, const std::function<void(std::size_t)>& body) {
    const index_t n = static_cast<index_t>(count);
    if (exec == Exec::Serial) {
        for (index_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
        return;
    }
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < n; ++i) body(static_cast<std::size_t>(i));
}

double dot(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size()) throw DimensionError("dot: length mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) s += x[i] * y[i];
    return s;
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace fraccn::kernels
