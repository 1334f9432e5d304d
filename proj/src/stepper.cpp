#include "fraccn/stepper.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <string>

#include "fraccn/errors.hpp"
#include "fraccn/sparse_linalg.hpp"

namespace fraccn {

namespace {

double norm2(std::span<const double> x) { return std::sqrt(kernels::dot(x, x)); }

void require_same_size(std::span<const double> a, std::span<const double> b, const char* what) {
    if (a.size() != b.size()) throw DimensionError(std::string(what) + ": dimension mismatch");
}

}  // namespace

SpatialField SpaceTimeField::at(double t) const {
    SpatialField f;
    f.value = [fn = value, t](double x, double y) { return fn(x, y, t); };
    f.gradient = [g = gradient, t](double x, double y) { return g(x, y, t); };
    return f;
}

void validate(const ProblemSpec& spec) {
    check_fractional_order(spec.alpha);
    check_sigma(spec.sigma);
    if (!spec.space) throw ParameterError("problem: finite element space is not set");
    if (!spec.source) throw ParameterError("problem: source function is not set");
    if (!spec.initial.value || !spec.initial.gradient) {
        throw ParameterError("problem: initial datum needs a value and a gradient");
    }
    if (!(spec.newton.tol > 0.0) || spec.newton.max_iter == 0) {
        throw ParameterError("problem: Newton tolerance and iteration cap must be positive");
    }
}

void StateHistory::push(DofVector u, const SparseSymmetric& stiffness) {
    if (!u_.empty() && u.size() != u_.front().size()) {
        throw DimensionError("StateHistory::push: level has the wrong dimension");
    }
    grad_sq_.push_back(stiffness.bilinear(u, u));
    u_.push_back(std::move(u));
}

DofVector extrapolate_tilde(const StateHistory& history, const TimeMesh& mesh, std::size_t n, double sigma) {
    if (n < 2 || n > mesh.intervals()) throw IndexError("extrapolate_tilde: level must satisfy 2 <= n <= N");
    if (history.size() < n) throw IndexError("extrapolate_tilde: history must hold u^{n-2} and u^{n-1}");
    const DofVector& u1 = history.u(n - 1);
    const DofVector& u2 = history.u(n - 2);
    const double ratio = (1.0 - sigma) * mesh.step(n) / mesh.step(n - 1);
    DofVector out(u1.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = u1[i] + ratio * (u1[i] - u2[i]);
    return out;
}

DofVector sigma_average(std::span<const double> u_n, std::span<const double> u_nm1, double sigma) {
    require_same_size(u_n, u_nm1, "sigma_average");
    DofVector out(u_n.size());
    for (std::size_t i = 0; i < out.size(); ++i) out[i] = (1.0 - sigma) * u_n[i] + sigma * u_nm1[i];
    return out;
}

DofVector source_load(const ProblemSpec& spec, double t) {
    const ScalarField f = [src = spec.source, t](double x, double y) { return src(x, y, t); };
    if (spec.source_mode == SourceMode::NodalInterpolation) {
        return spec.space->mass().multiply(interpolate(spec.space->mesh(), f));
    }
    return load_vector(spec.space->mesh(), f);
}

FirstStepResult solve_first_level(const FemSpace& space, std::span<const double> u0, std::span<const double> load,
                                  double c11, double sigma, double tau1, const NewtonOptions& options) {
    require_same_size(u0, load, "solve_first_level");
    if (u0.size() != space.num_dofs()) throw DimensionError("solve_first_level: dimension mismatch");
    const double memory = (1.0 - sigma) * tau1;
    if (memory >= 1.0) {
        throw IndefiniteSystem("first level: (1 - sigma) tau_1 = " + std::to_string(memory) +
                               " >= 1, the memory term destroys coercivity; refine the first step");
    }
    const SparseSymmetric& mass = space.mass();
    const SparseSymmetric& stiff = space.stiffness();
    const double cm = c11 / (1.0 - sigma);
    const std::size_t n = u0.size();

    // F(v) = cm M (v - u0) + (1 + v'Av - memory) A v - load
    auto residual = [&](std::span<const double> v, DofVector& av, double& kappa) {
        av = stiff.multiply(v);
        kappa = 1.0 + kernels::dot(v, av) - memory;
        DofVector diff(n);
        for (std::size_t i = 0; i < n; ++i) diff[i] = v[i] - u0[i];
        DofVector f = mass.multiply(diff);
        for (std::size_t i = 0; i < n; ++i) f[i] = cm * f[i] + kappa * av[i] - load[i];
        return f;
    };
    auto system_matrix = [&](double kappa) {
        try {
            return SpdSolver(linear_combination(cm, mass, kappa, stiff), space.solver_mode());
        } catch (const SolverBreakdown& e) {
            throw IndefiniteSystem(std::string("first level: Jacobian is not positive definite (") + e.what() + ")");
        }
    };

    FirstStepResult result;
    DofVector v(u0.begin(), u0.end());
    DofVector av;
    double kappa = 0.0;
    DofVector f = residual(v, av, kappa);
    double rnorm = norm2(f);
    NewtonReport& report = result.report;
    bool picard = false;
    DofVector picard_rhs;

    while (rnorm > options.tol) {
        if (report.iterations >= options.max_iter) {
            report.final_residual = rnorm;
            throw NotConverged("first level: Newton did not reach " + std::to_string(options.tol) + " in " +
                               std::to_string(options.max_iter) + " iterations (residual " +
                               std::to_string(rnorm) + ")");
        }
        ++report.iterations;
        const SpdSolver solver = system_matrix(kappa);
        if (picard) {
            v = solver.solve(picard_rhs);
            f = residual(v, av, kappa);
            rnorm = norm2(f);
            continue;
        }
        DofVector neg_f(n);
        for (std::size_t i = 0; i < n; ++i) neg_f[i] = -f[i];
        const DofVector delta = solve_rank_one(solver, av, 2.0, neg_f);

        double lambda = 1.0;
        bool accepted = false;
        DofVector trial(n), trial_av;
        double trial_kappa = 0.0;
        DofVector trial_f;
        for (int ls = 0; ls < 12; ++ls) {
            for (std::size_t i = 0; i < n; ++i) trial[i] = v[i] + lambda * delta[i];
            trial_f = residual(trial, trial_av, trial_kappa);
            const double trial_norm = norm2(trial_f);
            if (trial_norm <= (1.0 - 1e-4 * lambda) * rnorm || trial_norm <= options.tol) {
                v = trial;
                av = std::move(trial_av);
                kappa = trial_kappa;
                f = std::move(trial_f);
                rnorm = trial_norm;
                accepted = true;
                break;
            }
            lambda *= 0.5;
        }
        if (!accepted) {
            // Freeze |grad v|^2: B(v) v_new = load + cm M u0.
            picard = true;
            report.picard_fallback = true;
            picard_rhs = mass.multiply(u0);
            for (std::size_t i = 0; i < n; ++i) picard_rhs[i] = cm * picard_rhs[i] + load[i];
        }
    }
    report.converged = true;
    report.final_residual = rnorm;
    result.kirchhoff = kirchhoff(kernels::dot(v, av));
    result.u1.resize(n);
    for (std::size_t i = 0; i < n; ++i) result.u1[i] = (v[i] - sigma * u0[i]) / (1.0 - sigma);
    return result;
}

FirstStepResult step_first(const ProblemSpec& spec, std::span<const double> u0h) {
    validate(spec);
    const CaputoRow row = caputo_row(spec.mesh, 1, spec.sigma, spec.alpha);
    const DofVector load = source_load(spec, sigma_point(spec.mesh, 1, spec.sigma).t);
    return solve_first_level(*spec.space, u0h, load, row.leading(), spec.sigma, spec.mesh.step(1), spec.newton);
}

DofVector solve_linear_level(const FemSpace& space, const StateHistory& history, const CaputoRow& row,
                             const MemoryWeights& memory, double kirchhoff_coeff, double sigma,
                             std::span<const double> load) {
    const std::size_t n = row.level();
    if (n < 2 || history.size() != n || memory.n != n) {
        throw IndexError("solve_linear_level: history must hold exactly u^0..u^{n-1}");
    }
    const std::size_t dofs = space.num_dofs();
    if (load.size() != dofs) throw DimensionError("solve_linear_level: load has the wrong dimension");
    const auto levels = history.levels();

    // Caputo history: sum_{j=0}^{n-1} w_j u^j
    std::vector<double> w = row.operator_coefficients();
    w.pop_back();
    DofVector caputo_hist(dofs);
    kernels::combine(Exec::Parallel, w, levels.first(n), caputo_hist);

    // Memory: sum_{j=1}^{n-1} tau~_j u^j - sigma D_n u^{n-1}
    DofVector mem(dofs);
    kernels::combine(Exec::Parallel, memory.tau_tilde, levels.subspan(1, n - 1), mem);
    kernels::axpby(Exec::Parallel, -sigma * kirchhoff_coeff, levels[n - 1], 1.0, mem);

    const DofVector m_hist = space.mass().multiply(caputo_hist);
    const DofVector a_mem = space.stiffness().multiply(mem);
    DofVector rhs(dofs);
    for (std::size_t i = 0; i < dofs; ++i) rhs[i] = load[i] - m_hist[i] + a_mem[i];

    const SparseSymmetric system =
        linear_combination(row.leading(), space.mass(), (1.0 - sigma) * kirchhoff_coeff, space.stiffness());
    return solve_spd(system, rhs, space.solver_mode());
}

DofVector step_linear(const ProblemSpec& spec, const StateHistory& history, std::size_t n, LinearStepInfo* info) {
    validate(spec);
    if (n < 2 || n > spec.mesh.intervals()) throw IndexError("step_linear: level must satisfy 2 <= n <= N");
    if (history.size() != n) throw IndexError("step_linear: history must hold exactly u^0..u^{n-1}");
    const CaputoRow row = caputo_row(spec.mesh, n, spec.sigma, spec.alpha);
    const MemoryWeights memory = memory_weights(spec.mesh, n, spec.sigma);
    const DofVector tilde = extrapolate_tilde(history, spec.mesh, n, spec.sigma);
    const double d_n = kirchhoff(spec.space->stiffness().bilinear(tilde, tilde));
    const DofVector load = source_load(spec, sigma_point(spec.mesh, n, spec.sigma).t);
    if (info) {
        info->kirchhoff = d_n;
        info->leading_weight = row.leading();
    }
    return solve_linear_level(*spec.space, history, row, memory, d_n, spec.sigma, load);
}

RunResult run(const ProblemSpec& spec) {
    validate(spec);
    const auto start = std::chrono::steady_clock::now();
    const FemSpace& space = *spec.space;
    const TimeMesh& mesh = spec.mesh;
    const std::size_t N = mesh.intervals();
    const double nan = std::numeric_limits<double>::quiet_NaN();

    RunResult result;
    RunReport& report = result.report;
    StateHistory& history = result.history;

    auto record = [&](std::size_t n, double leading, double d_n) {
        const DofVector& u = history.u(n);
        LevelDiagnostics diag;
        diag.n = n;
        diag.t = mesh.node(n);
        const Norms nm = norms(space, u);
        diag.norm_l2 = nm.l2;
        diag.norm_h1 = nm.h1_semi;
        diag.weighted_norm = n == 0 ? nm.l2 : nm.l2 + nm.h1_semi / std::sqrt(leading);
        diag.kirchhoff = d_n;
        if (n > 0) {
            const double ts = sigma_point(mesh, n, spec.sigma).t;
            diag.source_l2 = l2_norm(space.mesh(), [&](double x, double y) { return spec.source(x, y, ts); });
        }
        diag.error_l2 = nan;
        diag.error_h1 = nan;
        if (spec.exact) {
            const Norms err = error_norms(space.mesh(), u, spec.exact->at(diag.t));
            diag.error_l2 = err.l2;
            diag.error_h1 = err.h1_semi;
            if (n > 0) {
                report.max_error_l2 = std::max(report.max_error_l2, err.l2);
                report.max_error_h1 = std::max(report.max_error_h1, err.h1_semi);
            }
        }
        report.max_weighted_norm = std::max(report.max_weighted_norm, diag.weighted_norm);
        report.levels.push_back(diag);
    };

    if (!spec.exact) {
        report.max_error_l2 = nan;
        report.max_error_h1 = nan;
    }

    history.push(ritz_project(space, spec.initial), space.stiffness());
    record(0, 0.0, kirchhoff(history.grad_sq(0)));

    try {
        const FirstStepResult first = step_first(spec, history.u(0));
        report.newton = first.report;
        history.push(first.u1, space.stiffness());
        record(1, caputo_row(mesh, 1, spec.sigma, spec.alpha).leading(), first.kirchhoff);
    } catch (const NumericalError& e) {
        throw LevelFailure(1, e.what());
    }

    for (std::size_t n = 2; n <= N; ++n) {
        try {
            LinearStepInfo info;
            DofVector u = step_linear(spec, history, n, &info);
            history.push(std::move(u), space.stiffness());
            record(n, info.leading_weight, info.kirchhoff);
        } catch (const NumericalError& e) {
            throw LevelFailure(n, e.what());
        }
    }
    report.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

}  // namespace fraccn
