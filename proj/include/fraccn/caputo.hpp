#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fraccn/kernels.hpp"
#include "fraccn/time_mesh.hpp"

namespace fraccn {

/**
 * Kernel moments of the L2-1sigma Caputo approximation at level n, with the
 * 1/Gamma(1-alpha) normalization folded in:
 *
 *   a_{n,j} = int_{t_{j-1}}^{t_j} (t_{n-sigma} - s)^{-alpha} ds / Gamma(1-alpha),  j < n
 *   a_{n,n} = (1-sigma)^{1-alpha} tau_n^{1-alpha} / Gamma(2-alpha)
 *   b_{n,j} = 2 / (t_{j+1} - t_{j-1}) *
 *             int_{t_{j-1}}^{t_j} (t_{n-sigma} - s)^{-alpha} (s - t_{j-1/2}) ds / Gamma(1-alpha)
 *
 * Both are evaluated from exact antiderivatives in a form that stays accurate
 * when tau_j is tiny relative to t_{n-sigma} - t_j (strongly graded meshes).
 */
struct KernelMoments {
    std::size_t n = 0;
    std::vector<double> a;  // a[j-1] = a_{n,j}, j = 1..n
    std::vector<double> b;  // b[j-1] = b_{n,j}, j = 1..n-1
};

KernelMoments kernel_moments(const TimeMesh& mesh, std::size_t n, double sigma, double alpha,
                             Exec exec = Exec::Parallel);

// Weights c_{n,1..n} of the discrete operator
//   D u^n = c_{n,n} u^n + sum_{j=1}^{n-1} (c_{n,j} - c_{n,j+1}) u^j - c_{n,1} u^0.
class CaputoRow {
public:
    CaputoRow(std::size_t n, double sigma, double alpha, std::vector<double> c);

    std::size_t level() const { return n_; }
    double sigma() const { return sigma_; }
    double alpha() const { return alpha_; }

    // c_{n,j}, 1 <= j <= n
    double weight(std::size_t j) const;
    std::span<const double> weights() const { return c_; }
    double leading() const { return c_.back(); }

    // Coefficients w_0..w_n multiplying v^0..v^n; they sum to zero.
    std::vector<double> operator_coefficients() const;

private:
    std::size_t n_;
    double sigma_;
    double alpha_;
    std::vector<double> c_;
};

CaputoRow caputo_row(const TimeMesh& mesh, std::size_t n, double sigma, double alpha,
                     Exec exec = Exec::Parallel);

// history = v^0..v^n, length n+1.
double apply_discrete_caputo(const CaputoRow& row, std::span<const double> history);
DofVector apply_discrete_caputo(const CaputoRow& row, std::span<const DofVector> history,
                                Exec exec = Exec::Parallel);

// Two-sided bracket for c_{n,n}. gamma is the step-ratio bound of the mesh.
double leading_weight_upper_bound(double tau_n, double sigma, double alpha);
double leading_weight_lower_bound(double tau_n, double sigma, double alpha, double gamma);

// Caputo derivative of t^p, p > 0, evaluated at t: Gamma(p+1)/Gamma(p+1-alpha) t^{p-alpha}.
double caputo_of_power(double p, double alpha, double t);

void check_fractional_order(double alpha);
void check_sigma(double sigma);

}  // namespace fraccn
