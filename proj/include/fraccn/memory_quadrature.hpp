#pragma once

#include <cstddef>
#include <functional>
#include <vector>

#include "fraccn/time_mesh.hpp"

namespace fraccn {

/**
 * Weights of the memory-term rule at level n.
 *
 * n = 1: right rectangle on [0, t_{1-sigma}]; the single coefficient
 *        (1-sigma) tau_1 multiplies the sigma-average of the unknown and is
 *        exposed as first_level_coeff (tau_tilde is empty).
 * n = 2: tau_tilde_1 = (1-sigma) tau_2.
 * n >= 3: composite trapezoid on [t_1, t_{n-1}] plus left rectangle on
 *        [t_{n-1}, t_{n-sigma}]:
 *          tau_tilde_1     = tau_2 / 2
 *          tau_tilde_j     = (tau_j + tau_{j+1}) / 2,       2 <= j <= n-2
 *          tau_tilde_{n-1} = tau_{n-1} / 2 + (1-sigma) tau_n
 *
 * tau_tilde[j-1] multiplies the history value at t_j.
 */
struct MemoryWeights {
    std::size_t n = 0;
    std::vector<double> tau_tilde;
    double first_level_coeff = 0.0;
};

MemoryWeights memory_weights(const TimeMesh& mesh, std::size_t n, double sigma);

// Applies the rule to a scalar history f(t_j) and compares with the exact
// integral over [t_1, t_{n-sigma}] (n >= 2) or the right-rectangle value with
// [0, t_{1-sigma}] (n = 1). The reference integral is adaptive quadrature.
double quadrature_error_probe(const TimeMesh& mesh, std::size_t n, double sigma,
                              const std::function<double(double)>& f);

}  // namespace fraccn
