#include "fraccn/memory_quadrature.hpp"

#include <cmath>
#include <string>

#include "fraccn/caputo.hpp"
#include "fraccn/errors.hpp"
#include "fraccn/quadrature.hpp"

namespace fraccn {

MemoryWeights memory_weights(const TimeMesh& mesh, std::size_t n, double sigma) {
    check_sigma(sigma);
    if (n == 0 || n > mesh.intervals()) {
        throw IndexError("memory_weights: level " + std::to_string(n) + " out of range [1, N]");
    }
    const auto tau = mesh.steps();  // tau[k-1] = tau_k
    MemoryWeights w;
    w.n = n;
    w.first_level_coeff = (1.0 - sigma) * tau[0];
    if (n == 1) return w;
    w.tau_tilde.resize(n - 1);
    if (n == 2) {
        w.tau_tilde[0] = (1.0 - sigma) * tau[1];
        return w;
    }
    w.tau_tilde[0] = 0.5 * tau[1];
    for (std::size_t j = 2; j <= n - 2; ++j) {
        w.tau_tilde[j - 1] = 0.5 * (tau[j - 1] + tau[j]);
    }
    w.tau_tilde[n - 2] = 0.5 * tau[n - 2] + (1.0 - sigma) * tau[n - 1];
    return w;
}

double quadrature_error_probe(const TimeMesh& mesh, std::size_t n, double sigma,
                              const std::function<double(double)>& f) {
    const MemoryWeights w = memory_weights(mesh, n, sigma);
    const auto t = mesh.nodes();
    const double t_star = sigma_point(mesh, n, sigma).t;
    if (n == 1) {
        const double approx = t_star * f(t_star);
        return std::abs(approx - adaptive_integrate(f, 0.0, t_star));
    }
    double approx = 0.0;
    for (std::size_t j = 1; j <= n - 1; ++j) approx += w.tau_tilde[j - 1] * f(t[j]);
    // Split at the nodes so the reference sees only smooth pieces.
    double exact = 0.0;
    for (std::size_t j = 1; j + 1 <= n - 1; ++j) exact += adaptive_integrate(f, t[j], t[j + 1]);
    exact += adaptive_integrate(f, t[n - 1], t_star);
    return std::abs(approx - exact);
}

}  // namespace fraccn
