#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "fraccn/caputo.hpp"
#include "fraccn/fem2d.hpp"
#include "fraccn/memory_quadrature.hpp"
#include "fraccn/time_mesh.hpp"

namespace fraccn {

using SpaceTimeFunction = std::function<double(double, double, double)>;

struct SpaceTimeField {
    SpaceTimeFunction value;
    std::function<Gradient2(double, double, double)> gradient;

    SpatialField at(double t) const;
};

enum class SourceMode {
    L2Projection,        // (f_h, v) = (f, v): load vector by quadrature
    NodalInterpolation,  // f_h = interpolant of f, load = M f_h
};

struct NewtonOptions {
    double tol = 1e-7;
    std::size_t max_iter = 50;
};

// Kirchhoff diffusion map D(s) = 1 + s with s = ||grad u||^2.
inline double kirchhoff(double grad_sq) { return 1.0 + grad_sq; }

struct ProblemSpec {
    double alpha = 0.5;
    double sigma = 0.25;  // alpha / 2 unless overridden
    TimeMesh mesh = TimeMesh::uniform(1.0, 1);
    std::shared_ptr<const FemSpace> space;
    SpaceTimeFunction source;
    SpatialField initial;
    SourceMode source_mode = SourceMode::L2Projection;
    NewtonOptions newton;
    // When set, run() records errors against it at every level.
    std::optional<SpaceTimeField> exact;
};

void validate(const ProblemSpec& spec);

// u_h^0..u_h^n with cached ||grad u_h^j||^2. Append-only.
class StateHistory {
public:
    void push(DofVector u, const SparseSymmetric& stiffness);

    std::size_t size() const { return u_.size(); }
    const DofVector& u(std::size_t j) const { return u_.at(j); }
    double grad_sq(std::size_t j) const { return grad_sq_.at(j); }
    std::span<const DofVector> levels() const { return u_; }

private:
    std::vector<DofVector> u_;
    std::vector<double> grad_sq_;
};

struct NewtonReport {
    std::size_t iterations = 0;
    double final_residual = 0.0;
    bool converged = false;
    bool picard_fallback = false;
};

// u^{n-1} + (1-sigma)(tau_n / tau_{n-1})(u^{n-1} - u^{n-2}), n >= 2
DofVector extrapolate_tilde(const StateHistory& history, const TimeMesh& mesh, std::size_t n, double sigma);

// (1-sigma) u^n + sigma u^{n-1}
DofVector sigma_average(std::span<const double> u_n, std::span<const double> u_nm1, double sigma);

// Load vector of f(., t) according to spec.source_mode.
DofVector source_load(const ProblemSpec& spec, double t);

struct FirstStepResult {
    DofVector u1;
    NewtonReport report;
    double kirchhoff = 1.0;  // 1 + ||grad u^{1,sigma}||^2
};

/**
 * Nonlinear first level
 *
 *   c11 M (u1 - u0) + (1 + |grad v|^2) A v = load + (1-sigma) tau1 A v,
 *   v = (1-sigma) u1 + sigma u0,
 *
 * solved by Newton in v. The Jacobian is B + 2 (Av)(Av)' with
 * B = c11/(1-sigma) M + (1 + v'Av - (1-sigma) tau1) A, inverted by a
 * rank-one update. A backtracking line search guards each step; if it stalls
 * the iteration continues as a Picard sweep with |grad v|^2 frozen.
 * Throws IndefiniteSystem when (1-sigma) tau1 >= 1 or B loses definiteness.
 */
FirstStepResult solve_first_level(const FemSpace& space, std::span<const double> u0, std::span<const double> load,
                                  double c11, double sigma, double tau1, const NewtonOptions& options = {});

FirstStepResult step_first(const ProblemSpec& spec, std::span<const double> u0h);

// Linear level n >= 2:
//   [c_nn M + (1-sigma) D_n A] u^n = load - M sum_{j<n} w_j u^j
//                                   + A (sum_j tau~_j u^j - sigma D_n u^{n-1})
// with D_n = 1 + ||grad u~^{n-1,sigma}||^2 and w_j the Caputo operator coefficients.
DofVector solve_linear_level(const FemSpace& space, const StateHistory& history, const CaputoRow& row,
                             const MemoryWeights& memory, double kirchhoff_coeff, double sigma,
                             std::span<const double> load);

struct LinearStepInfo {
    double kirchhoff = 1.0;
    double leading_weight = 0.0;
};

DofVector step_linear(const ProblemSpec& spec, const StateHistory& history, std::size_t n,
                      LinearStepInfo* info = nullptr);

struct LevelDiagnostics {
    std::size_t n = 0;
    double t = 0.0;
    double norm_l2 = 0.0;
    double norm_h1 = 0.0;
    double weighted_norm = 0.0;  // ||u|| + c_nn^{-1/2} ||grad u||; ||u^0|| at n = 0
    double kirchhoff = 1.0;
    double source_l2 = 0.0;  // ||f(t_{n-sigma})||, 0 at n = 0
    double error_l2 = 0.0;   // NaN without an exact solution
    double error_h1 = 0.0;
};

struct RunReport {
    std::vector<LevelDiagnostics> levels;
    NewtonReport newton;
    double max_error_l2 = 0.0;  // max over 1 <= n <= N
    double max_error_h1 = 0.0;
    double max_weighted_norm = 0.0;
    double elapsed_seconds = 0.0;
};

struct RunResult {
    StateHistory history;
    RunReport report;
};

// Runs the whole scheme. Failures are rethrown as LevelFailure with the level.
RunResult run(const ProblemSpec& spec);

}  // namespace fraccn
