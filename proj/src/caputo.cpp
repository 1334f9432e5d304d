#include "fraccn/caputo.hpp"

#include <cmath>
#include <string>

#include "fraccn/errors.hpp"
#include "fraccn/special_functions.hpp"

namespace fraccn {

namespace {

// x^{p} - (x(1-eps))^{p} = x^p * (1 - (1-eps)^p), no cancellation for small eps.
double power_difference(double x, double eps, double p) {
    return std::pow(x, p) * -std::expm1(p * std::log1p(-eps));
}

// J(e) = int_{-e}^{e} z (1-z)^{-alpha} dz, 0 <= e < 1.
double centered_moment(double e, double alpha) {
    if (e < 0.5) {
        // Odd terms of the binomial series (1-z)^{-alpha} = sum q_k z^k.
        double q = 1.0;
        double e_pow = e * e;  // e^{k+2} for k = 0
        double sum = 0.0;
        for (int k = 1; k < 400; ++k) {
            q *= (alpha + k - 1.0) / k;
            e_pow *= e;
            if (k % 2 == 1) {
                const double term = q * 2.0 * e_pow / (k + 2.0);
                sum += term;
                if (term < 1e-18 * sum) break;
            }
        }
        return sum;
    }
    auto antiderivative = [alpha](double w) {
        return std::pow(w, 1.0 - alpha) / (1.0 - alpha) - std::pow(w, 2.0 - alpha) / (2.0 - alpha);
    };
    return antiderivative(1.0 + e) - antiderivative(1.0 - e);
}

}  // namespace

void check_fractional_order(double alpha) {
    if (!(alpha > 0.0 && alpha < 1.0)) {
        throw ParameterError("fractional order alpha must lie in (0, 1)");
    }
}

void check_sigma(double sigma) {
    if (!(sigma >= 0.0 && sigma < 1.0)) {
        throw ParameterError("offset sigma must lie in [0, 1)");
    }
}

KernelMoments kernel_moments(const TimeMesh& mesh, std::size_t n, double sigma, double alpha, Exec exec) {
    check_fractional_order(alpha);
    check_sigma(sigma);
    if (n == 0 || n > mesh.intervals()) {
        throw IndexError("kernel_moments: level " + std::to_string(n) + " out of range [1, N]");
    }
    const auto t = mesh.nodes();
    const auto tau = mesh.steps();
    const double t_star = (1.0 - sigma) * t[n] + sigma * t[n - 1];
    const double g1 = gamma_function(1.0 - alpha);
    const double g2 = gamma_function(2.0 - alpha);

    KernelMoments m;
    m.n = n;
    m.a.resize(n);
    m.b.resize(n - 1);

    const long long count = static_cast<long long>(n) - 1;
    auto moment = [&](long long jj) {
        const std::size_t j = static_cast<std::size_t>(jj) + 1;  // 1..n-1
        const double tau_j = tau[j - 1];
        const double far = t_star - t[j - 1];
        m.a[j - 1] = power_difference(far, tau_j / far, 1.0 - alpha) / g2;
        const double mid = t_star - 0.5 * (t[j - 1] + t[j]);
        const double e = 0.5 * tau_j / mid;
        const double integral = std::pow(mid, 2.0 - alpha) * centered_moment(e, alpha);
        m.b[j - 1] = 2.0 / (t[j + 1] - t[j - 1]) * integral / g1;
    };
    if (exec == Exec::Parallel && count >= 256) {
#pragma omp parallel for schedule(static)
        for (long long jj = 0; jj < count; ++jj) moment(jj);
    } else {
        for (long long jj = 0; jj < count; ++jj) moment(jj);
    }
    m.a[n - 1] = std::pow(1.0 - sigma, 1.0 - alpha) * std::pow(tau[n - 1], 1.0 - alpha) / g2;
    return m;
}

CaputoRow::CaputoRow(std::size_t n, double sigma, double alpha, std::vector<double> c)
    : n_(n), sigma_(sigma), alpha_(alpha), c_(std::move(c)) {
    if (c_.size() != n_ || n_ == 0) throw DimensionError("CaputoRow: expected n weights");
}

double CaputoRow::weight(std::size_t j) const {
    if (j == 0 || j > n_) throw IndexError("CaputoRow: weight index out of range [1, n]");
    return c_[j - 1];
}

std::vector<double> CaputoRow::operator_coefficients() const {
    std::vector<double> w(n_ + 1);
    w[0] = -c_[0];
    for (std::size_t j = 1; j < n_; ++j) w[j] = c_[j - 1] - c_[j];
    w[n_] = c_[n_ - 1];
    return w;
}

CaputoRow caputo_row(const TimeMesh& mesh, std::size_t n, double sigma, double alpha, Exec exec) {
    const KernelMoments m = kernel_moments(mesh, n, sigma, alpha, exec);
    const auto tau = mesh.steps();
    std::vector<double> c(n);
    if (n == 1) {
        c[0] = m.a[0] / tau[0];
        return CaputoRow(n, sigma, alpha, std::move(c));
    }
    c[0] = (m.a[0] - m.b[0]) / tau[0];
    for (std::size_t j = 2; j <= n - 1; ++j) {
        c[j - 1] = (m.a[j - 1] - m.b[j - 1] + m.b[j - 2]) / tau[j - 1];
    }
    c[n - 1] = (m.a[n - 1] + m.b[n - 2]) / tau[n - 1];
    return CaputoRow(n, sigma, alpha, std::move(c));
}

double apply_discrete_caputo(const CaputoRow& row, std::span<const double> history) {
    if (history.size() != row.level() + 1) {
        throw DimensionError("apply_discrete_caputo: history must hold v^0..v^n");
    }
    const auto w = row.operator_coefficients();
    double s = 0.0;
    for (std::size_t j = 0; j < w.size(); ++j) s += w[j] * history[j];
    return s;
}

DofVector apply_discrete_caputo(const CaputoRow& row, std::span<const DofVector> history, Exec exec) {
    if (history.size() != row.level() + 1) {
        throw DimensionError("apply_discrete_caputo: history must hold v^0..v^n");
    }
    const auto w = row.operator_coefficients();
    DofVector out(history.front().size());
    kernels::combine(exec, w, history, out);
    return out;
}

double leading_weight_upper_bound(double tau_n, double sigma, double alpha) {
    const double head = std::pow(1.0 - sigma, 1.0 - alpha) / gamma_function(2.0 - alpha);
    const double tail = alpha / (6.0 * gamma_function(1.0 - alpha)) / std::pow(1.0 - sigma, 1.0 + alpha);
    return std::pow(tau_n, -alpha) * (head + tail);
}

double leading_weight_lower_bound(double tau_n, double sigma, double alpha, double gamma) {
    const double head = std::pow(1.0 - sigma, 1.0 - alpha) / gamma_function(2.0 - alpha);
    const double tail = alpha / (6.0 * gamma_function(1.0 - alpha)) / (1.0 + gamma) /
                        std::pow((1.0 - sigma) + gamma, 1.0 + alpha);
    return std::pow(tau_n, -alpha) * (head + tail);
}

double caputo_of_power(double p, double alpha, double t) {
    return gamma_function(p + 1.0) / gamma_function(p + 1.0 - alpha) * std::pow(t, p - alpha);
}

}  // namespace fraccn
