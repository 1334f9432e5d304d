#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <random>

#include "fraccn/benchmark.hpp"
#include "fraccn/errors.hpp"
#include "fraccn/stepper.hpp"

using namespace fraccn;

namespace {

const double kPi = std::numbers::pi;

SpatialField zero_field() {
    return SpatialField{[](double, double) { return 0.0; }, [](double, double) { return Gradient2{0.0, 0.0}; }};
}

SpatialField sine_field() {
    return SpatialField{[](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); },
                        [](double x, double y) {
                            return Gradient2{kPi * std::cos(kPi * x) * std::sin(kPi * y),
                                             kPi * std::sin(kPi * x) * std::cos(kPi * y)};
                        }};
}

ProblemSpec benchmark_spec(double alpha, std::size_t M, TimeMesh mesh) {
    const ManufacturedProblem p{alpha};
    ProblemSpec spec;
    spec.alpha = alpha;
    spec.sigma = alpha / 2;
    spec.mesh = std::move(mesh);
    spec.space = std::make_shared<const FemSpace>(M);
    spec.source = p.source_function();
    spec.initial = zero_field();
    spec.exact = p.exact_field();
    return spec;
}

ProblemSpec decay_spec(double alpha, std::size_t M, TimeMesh mesh) {
    ProblemSpec spec = benchmark_spec(alpha, M, std::move(mesh));
    spec.source = [](double, double, double) { return 0.0; };
    spec.initial = sine_field();
    spec.exact.reset();
    return spec;
}

Eigen::MatrixXd dense(const SparseSymmetric& s) {
    const auto d = s.to_dense();
    const Eigen::Index n = static_cast<Eigen::Index>(s.dim());
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(d.data(), n, n);
}

Eigen::VectorXd ev(std::span<const double> v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

// Linearized level n written out densely term by term:
//   D u^n + D_n A u^{n,sigma} = load + sum_j tau~_j A u^j
// with D the L2-1sigma operator and the memory weights spelled out here.
struct DenseLevel {
    Eigen::MatrixXd lhs;
    Eigen::VectorXd rhs_without_unknown;
};

DenseLevel dense_level(const ProblemSpec& spec, const std::vector<Eigen::VectorXd>& u, std::size_t n,
                       const Eigen::VectorXd& load) {
    const Eigen::MatrixXd M = dense(spec.space->mass());
    const Eigen::MatrixXd A = dense(spec.space->stiffness());
    const TimeMesh& mesh = spec.mesh;
    const double s = spec.sigma;
    const CaputoRow row = caputo_row(mesh, n, s, spec.alpha);
    auto tau = [&](std::size_t k) { return mesh.node(k) - mesh.node(k - 1); };

    const Eigen::VectorXd tilde = u[n - 1] + (1 - s) * tau(n) / tau(n - 1) * (u[n - 1] - u[n - 2]);
    const double Dn = 1.0 + tilde.dot(A * tilde);

    std::vector<double> tt(n, 0.0);  // tt[j], j = 1..n-1
    if (n == 2) {
        tt[1] = (1 - s) * tau(2);
    } else {
        tt[1] = tau(2) / 2;
        for (std::size_t j = 2; j <= n - 2; ++j) tt[j] = (tau(j) + tau(j + 1)) / 2;
        tt[n - 1] = tau(n - 1) / 2 + (1 - s) * tau(n);
    }

    Eigen::VectorXd rhs = load;
    for (std::size_t j = 1; j <= n - 1; ++j) rhs -= (row.weight(j) - row.weight(j + 1)) * (M * u[j]);
    rhs += row.weight(1) * (M * u[0]);
    rhs -= s * Dn * (A * u[n - 1]);
    for (std::size_t j = 1; j <= n - 1; ++j) rhs += tt[j] * (A * u[j]);
    return {row.leading() * M + (1 - s) * Dn * A, rhs};
}

}  // namespace

TEST(SigmaAverage, Examples) {
    const DofVector un = {2.0, 4.0}, um = {0.0, 1.0};
    EXPECT_EQ(sigma_average(un, um, 0.0), un);
    const DofVector a = sigma_average(un, um, 0.3);
    EXPECT_DOUBLE_EQ(a[0], 1.4);
    EXPECT_DOUBLE_EQ(a[1], 0.7 * 4.0 + 0.3);
    const DofVector one = sigma_average(un, um, 1.0);
    EXPECT_EQ(one, um);
    EXPECT_THROW(sigma_average(un, DofVector{1.0}, 0.3), DimensionError);
}

TEST(Extrapolation, ConstantAndLinearHistories) {
    const FemSpace space(5);
    const TimeMesh mesh = TimeMesh::graded(1.0, 6, 2.0);
    StateHistory h;
    const DofVector c(9, 0.7);
    h.push(c, space.stiffness());
    h.push(c, space.stiffness());
    EXPECT_EQ(extrapolate_tilde(h, mesh, 2, 0.25), c);

    // u^j = t_j * v: the extrapolant is exactly t_{n-sigma} * v.
    StateHistory lin;
    DofVector v(9);
    for (std::size_t i = 0; i < 9; ++i) v[i] = 1.0 + static_cast<double>(i);
    for (std::size_t j = 0; j < 4; ++j) {
        DofVector u(9);
        for (std::size_t i = 0; i < 9; ++i) u[i] = mesh.node(j) * v[i];
        lin.push(u, space.stiffness());
    }
    const double sigma = 0.3;
    const DofVector e = extrapolate_tilde(lin, mesh, 3, sigma);  // uses u^2, u^1
    const double ts = sigma_point(mesh, 3, sigma).t;
    for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(e[i], ts * v[i], 1e-14);
}

TEST(Extrapolation, PowerHistoryErrorIsSecondOrder) {
    const double alpha = 0.5, sigma = 0.25, r = 2 / alpha;
    std::vector<double> err;
    const std::vector<std::size_t> Ns = {16, 32, 64, 128};
    const FemSpace space(3);
    for (std::size_t N : Ns) {
        const TimeMesh mesh = TimeMesh::graded(1.0, N, r);
        StateHistory h;
        for (std::size_t j = 0; j <= N; ++j) h.push(DofVector{std::pow(mesh.node(j), alpha)}, space.stiffness());
        double worst = 0.0;
        for (std::size_t n = 2; n <= N; ++n) {
            const double ts = sigma_point(mesh, n, sigma).t;
            StateHistory part;
            for (std::size_t j = 0; j < n; ++j) part.push(h.u(j), space.stiffness());
            worst = std::max(worst, std::abs(extrapolate_tilde(part, mesh, n, sigma)[0] - std::pow(ts, alpha)));
        }
        err.push_back(worst);
    }
    EXPECT_GE(fitted_order(Ns, err), 1.8);
}

TEST(Extrapolation, InsufficientHistory) {
    const FemSpace space(3);
    const TimeMesh mesh = TimeMesh::uniform(1.0, 4);
    StateHistory h;
    h.push(DofVector{1.0}, space.stiffness());
    EXPECT_THROW(extrapolate_tilde(h, mesh, 2, 0.2), IndexError);
    EXPECT_THROW(extrapolate_tilde(h, mesh, 1, 0.2), IndexError);
}

TEST(StateHistory, CachesGradientEnergy) {
    const FemSpace space(5);
    StateHistory h;
    const DofVector u = interpolate(space.mesh(), [](double x, double y) { return x * y * (1 - x) * (1 - y); });
    h.push(u, space.stiffness());
    EXPECT_EQ(h.size(), 1u);
    EXPECT_DOUBLE_EQ(h.grad_sq(0), space.stiffness().bilinear(u, u));
    EXPECT_THROW(h.push(DofVector(3, 0.0), space.stiffness()), DimensionError);
}

TEST(FirstLevel, StationaryDataConvergesImmediatelyToInitialState) {
    const FemSpace space(9);
    const DofVector u0 = interpolate(space.mesh(), sine_field().value);
    const double sigma = 0.3, tau1 = 0.01, c11 = 7.5;
    const DofVector Au0 = space.stiffness().multiply(u0);
    const double kappa = 1.0 + kernels::dot(u0, Au0) - (1 - sigma) * tau1;
    DofVector load(u0.size());
    for (std::size_t i = 0; i < load.size(); ++i) load[i] = kappa * Au0[i];
    const FirstStepResult r = solve_first_level(space, u0, load, c11, sigma, tau1);
    EXPECT_TRUE(r.report.converged);
    EXPECT_LE(r.report.iterations, 2u);
    for (std::size_t i = 0; i < u0.size(); ++i) EXPECT_NEAR(r.u1[i], u0[i], 1e-9);
}

TEST(FirstLevel, ResidualOfOriginalEquationIsSmall) {
    const FemSpace space(9);
    const DofVector u0 = interpolate(space.mesh(), sine_field().value);
    const double sigma = 0.25, tau1 = 0.05, c11 = 4.0;
    const DofVector load = load_vector(space.mesh(), [](double x, double y) { return 30.0 * x * y; });
    const FirstStepResult r = solve_first_level(space, u0, load, c11, sigma, tau1);
    ASSERT_TRUE(r.report.converged);
    EXPECT_LE(r.report.final_residual, 1e-7);
    const DofVector v = sigma_average(r.u1, u0, sigma);
    const DofVector Av = space.stiffness().multiply(v);
    DofVector diff(u0.size());
    for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = r.u1[i] - u0[i];
    const DofVector Md = space.mass().multiply(diff);
    const double coeff = 1.0 + kernels::dot(v, Av) - (1 - sigma) * tau1;
    double res = 0.0;
    for (std::size_t i = 0; i < diff.size(); ++i) res += std::pow(c11 * Md[i] + coeff * Av[i] - load[i], 2);
    EXPECT_LE(std::sqrt(res), 1e-7);
    EXPECT_NEAR(r.kirchhoff, 1.0 + kernels::dot(v, Av), 1e-12);
}

TEST(FirstLevel, BenchmarkConverges) {
    const ProblemSpec spec = benchmark_spec(0.5, 5, TimeMesh::graded(1.0, 8, 4.0));
    const FirstStepResult r = step_first(spec, DofVector(9, 0.0));
    EXPECT_TRUE(r.report.converged);
    EXPECT_LE(r.report.final_residual, 1e-7);
}

TEST(FirstLevel, LargeFirstStepIsReportedIndefinite) {
    // (1 - sigma) tau_1 >= 1
    ProblemSpec spec = decay_spec(0.5, 5, TimeMesh::uniform(10.0, 2));
    const DofVector u0 = ritz_project(*spec.space, spec.initial);
    EXPECT_THROW(step_first(spec, u0), IndefiniteSystem);
    try {
        run(spec);
        FAIL() << "expected LevelFailure";
    } catch (const LevelFailure& e) {
        EXPECT_EQ(e.level(), 1u);
    }
}

TEST(FirstLevel, IterationCapReportsNonConvergence) {
    const FemSpace space(9);
    const DofVector u0 = interpolate(space.mesh(), sine_field().value);
    const DofVector load = load_vector(space.mesh(), [](double x, double y) { return 500.0 * x * y; });
    NewtonOptions tight;
    tight.tol = 1e-30;
    tight.max_iter = 3;
    EXPECT_THROW(solve_first_level(space, u0, load, 4.0, 0.25, 0.05, tight), NotConverged);
}

TEST(LinearLevel, MatchesDenseAssemblyOracle) {
    const ProblemSpec spec = benchmark_spec(0.5, 5, TimeMesh::graded(1.0, 4, 4.0));
    std::mt19937 rng(21);
    std::normal_distribution<double> d(0.0, 0.3);
    StateHistory h;
    std::vector<Eigen::VectorXd> ue;
    for (std::size_t j = 0; j < 3; ++j) {
        DofVector u(9);
        for (double& x : u) x = d(rng);
        ue.push_back(ev(u));
        h.push(u, spec.space->stiffness());
    }
    for (std::size_t n : {2u, 3u}) {
        StateHistory part;
        for (std::size_t j = 0; j < n; ++j) part.push(h.u(j), spec.space->stiffness());
        const DofVector got = step_linear(spec, part, n);
        const DofVector load = source_load(spec, sigma_point(spec.mesh, n, spec.sigma).t);
        const DenseLevel dl = dense_level(spec, ue, n, ev(load));
        const Eigen::VectorXd ref = dl.lhs.llt().solve(dl.rhs_without_unknown);
        for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(got[i], ref[static_cast<Eigen::Index>(i)], 1e-10);
    }
}

TEST(LinearLevel, RecoversManufacturedDiscreteSolution) {
    // Build the load from a chosen u^n through the dense operator; the stepper must return u^n.
    const ProblemSpec spec = benchmark_spec(0.6, 5, TimeMesh::two_part(1.0, 4, 2.0 / 0.6));
    std::mt19937 rng(22);
    std::normal_distribution<double> d(0.0, 1.0);
    StateHistory h;
    std::vector<Eigen::VectorXd> ue;
    for (std::size_t j = 0; j < 4; ++j) {
        DofVector u(9);
        for (double& x : u) x = d(rng);
        ue.push_back(ev(u));
        if (j < 3) h.push(u, spec.space->stiffness());
    }
    const std::size_t n = 3;
    const DenseLevel dl = dense_level(spec, ue, n, Eigen::VectorXd::Zero(9));
    // lhs u^n = rhs0 + load  =>  load = lhs u^n - rhs0
    const Eigen::VectorXd load = dl.lhs * ue[n] - dl.rhs_without_unknown;
    const DofVector loadv(load.data(), load.data() + 9);
    const CaputoRow row = caputo_row(spec.mesh, n, spec.sigma, spec.alpha);
    const DofVector tilde = extrapolate_tilde(h, spec.mesh, n, spec.sigma);
    const double Dn = kirchhoff(spec.space->stiffness().bilinear(tilde, tilde));
    const DofVector got =
        solve_linear_level(*spec.space, h, row, memory_weights(spec.mesh, n, spec.sigma), Dn, spec.sigma, loadv);
    for (std::size_t i = 0; i < 9; ++i) EXPECT_NEAR(got[i], ue[n][static_cast<Eigen::Index>(i)], 1e-10);
}

TEST(LinearLevel, KirchhoffCoefficientWithConstantHistory) {
    const ProblemSpec spec = decay_spec(0.5, 5, TimeMesh::uniform(1.0, 4));
    const DofVector u = ritz_project(*spec.space, spec.initial);
    StateHistory h;
    h.push(u, spec.space->stiffness());
    h.push(u, spec.space->stiffness());
    LinearStepInfo info;
    step_linear(spec, h, 2, &info);
    EXPECT_NEAR(info.kirchhoff, 1.0 + h.grad_sq(1), 1e-14);
    EXPECT_EQ(info.leading_weight, caputo_row(spec.mesh, 2, spec.sigma, spec.alpha).leading());
}

TEST(LinearLevel, HistoryPreconditions) {
    const ProblemSpec spec = decay_spec(0.5, 5, TimeMesh::uniform(1.0, 4));
    StateHistory h;
    h.push(DofVector(9, 0.0), spec.space->stiffness());
    EXPECT_THROW(step_linear(spec, h, 2), IndexError);
    EXPECT_THROW(step_linear(spec, h, 1), IndexError);
}

TEST(Run, ZeroDataStaysZero) {
    ProblemSpec spec = decay_spec(0.4, 5, TimeMesh::graded(1.0, 6, 5.0));
    spec.initial = zero_field();
    const RunResult r = run(spec);
    ASSERT_EQ(r.history.size(), 7u);
    for (std::size_t n = 0; n < r.history.size(); ++n)
        for (double x : r.history.u(n)) EXPECT_EQ(x, 0.0);
    EXPECT_TRUE(std::isnan(r.report.max_error_l2));
}

TEST(Run, SingleIntervalIsOnlyTheNewtonStep) {
    const RunResult r = run(benchmark_spec(0.5, 5, TimeMesh::uniform(1.0, 1)));
    EXPECT_EQ(r.history.size(), 2u);
    EXPECT_EQ(r.report.levels.size(), 2u);
    EXPECT_TRUE(r.report.newton.converged);
}

TEST(Run, RitzProjectionOfNonzeroInitialData) {
    const ProblemSpec spec = decay_spec(0.5, 9, TimeMesh::uniform(1.0, 2));
    const RunResult r = run(spec);
    const DofVector ritz = ritz_project(*spec.space, spec.initial);
    EXPECT_EQ(r.history.u(0), ritz);
    EXPECT_GT(norms(*spec.space, ritz).l2, 0.2);
}

TEST(Run, DiagnosticsAreConsistent) {
    const ProblemSpec spec = benchmark_spec(0.5, 9, TimeMesh::two_part(1.0, 9, 4.0));
    const RunResult r = run(spec);
    ASSERT_EQ(r.report.levels.size(), 10u);
    double worst = 0.0;
    for (std::size_t n = 1; n <= 9; ++n) {
        const LevelDiagnostics& d = r.report.levels[n];
        EXPECT_EQ(d.n, n);
        EXPECT_EQ(d.t, spec.mesh.node(n));
        EXPECT_GE(d.kirchhoff, 1.0);
        const double lead = caputo_row(spec.mesh, n, spec.sigma, spec.alpha).leading();
        EXPECT_NEAR(d.weighted_norm, d.norm_l2 + d.norm_h1 / std::sqrt(lead), 1e-14);
        EXPECT_GT(d.source_l2, 0.0);
        worst = std::max(worst, d.error_l2);
    }
    EXPECT_EQ(worst, r.report.max_error_l2);
    EXPECT_EQ(r.report.levels[0].source_l2, 0.0);
}

TEST(Run, KirchhoffPathApproachesExactCoefficient) {
    // D at the final level against 1 + |grad u(T)|^2 = 1 + 1/45.
    const double target = 1.0 + 1.0 / 45.0;
    double prev = 1.0;
    for (std::size_t M : {5u, 9u, 17u}) {
        const RunResult r = run(benchmark_spec(0.5, M, TimeMesh::two_part(1.0, M, 4.0)));
        const double gap = std::abs(r.report.levels.back().kirchhoff - target);
        EXPECT_LT(gap, prev);
        prev = gap;
    }
    EXPECT_LT(prev, 1e-3);
}

TEST(Run, StabilityWithoutSource) {
    for (const TimeMesh& mesh : {TimeMesh::uniform(1.0, 20), TimeMesh::graded(1.0, 17, 5.0),
                                 TimeMesh::two_part(1.0, 17, 10.0 / 3.0)}) {
        const RunResult r = run(decay_spec(0.5, 9, mesh));
        const double n0 = r.report.levels[0].norm_l2;
        for (const LevelDiagnostics& d : r.report.levels) EXPECT_LE(d.norm_l2, 1.1 * n0);
    }
}

TEST(Run, WeightedNormBoundedUnderRefinement) {
    std::vector<double> w;
    for (std::size_t N : {8u, 16u, 32u}) {
        const RunResult r = run(benchmark_spec(0.5, 9, TimeMesh::graded(1.0, N, 4.0)));
        w.push_back(r.report.max_weighted_norm);
    }
    EXPECT_LT(w[2] / w[0], 1.5);
    EXPECT_LT(w[2] / w[1], 1.5);
}

TEST(Run, DeterministicAndSolverModesAgree) {
    ProblemSpec spec = benchmark_spec(0.6, 9, TimeMesh::two_part(1.0, 9, 2.0 / 0.6));
    const RunResult a = run(spec);
    const RunResult b = run(spec);
    for (std::size_t n = 0; n < a.history.size(); ++n) EXPECT_EQ(a.history.u(n), b.history.u(n));
    spec.space = std::make_shared<const FemSpace>(9, SolverMode::Iterative);
    const RunResult c = run(spec);
    for (std::size_t n = 0; n < a.history.size(); ++n)
        for (std::size_t i = 0; i < a.history.u(n).size(); ++i) EXPECT_NEAR(a.history.u(n)[i], c.history.u(n)[i], 1e-8);
}

TEST(Run, NodalSourceModeIsComparable) {
    ProblemSpec spec = benchmark_spec(0.5, 9, TimeMesh::two_part(1.0, 9, 4.0));
    const double l2 = run(spec).report.max_error_l2;
    spec.source_mode = SourceMode::NodalInterpolation;
    const double nodal = run(spec).report.max_error_l2;
    EXPECT_LT(nodal, 3.0 * l2);
    EXPECT_GT(nodal, l2 / 3.0);
}

TEST(Validate, RejectsBadSpecs) {
    ProblemSpec spec = benchmark_spec(0.5, 5, TimeMesh::uniform(1.0, 4));
    spec.alpha = 1.0;
    EXPECT_THROW(validate(spec), ParameterError);
    spec.alpha = 0.5;
    spec.sigma = 1.0;
    EXPECT_THROW(validate(spec), ParameterError);
    spec.sigma = 0.25;
    spec.space.reset();
    EXPECT_THROW(validate(spec), ParameterError);
}
