#include <gtest/gtest.h>

#include <Eigen/Dense>
#include <random>

#include "fraccn/errors.hpp"
#include "fraccn/fem2d.hpp"
#include "fraccn/sparse_linalg.hpp"

using namespace fraccn;

namespace {

SparseSymmetric dense_to_sparse(const Eigen::MatrixXd& d) {
    const std::size_t n = static_cast<std::size_t>(d.rows());
    std::vector<std::size_t> ptr{0}, col;
    std::vector<double> val;
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            col.push_back(j);
            val.push_back(d(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
        }
        ptr.push_back(col.size());
    }
    return SparseSymmetric(n, ptr, col, val);
}

Eigen::MatrixXd to_eigen(const SparseSymmetric& s) {
    const auto dense = s.to_dense();
    const Eigen::Index n = static_cast<Eigen::Index>(s.dim());
    Eigen::MatrixXd m(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < n; ++j) m(i, j) = dense[static_cast<std::size_t>(i * n + j)];
    return m;
}

Eigen::VectorXd to_eigen(std::span<const double> v) {
    return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

DofVector random_vector(std::size_t n, std::mt19937& rng) {
    std::normal_distribution<double> d(0.0, 1.0);
    DofVector v(n);
    for (double& x : v) x = d(rng);
    return v;
}

}  // namespace

TEST(SparseMatrix, AccessAndSymmetry) {
    const FemSpace space(5);
    const SparseSymmetric& A = space.stiffness();
    EXPECT_EQ(A.dim(), 9u);
    EXPECT_TRUE(A.is_symmetric());
    EXPECT_TRUE(A.same_pattern(space.mass()));
    EXPECT_DOUBLE_EQ(A.at(4, 4), 4.0);
    EXPECT_EQ(A.find(0, 8), SparseSymmetric::npos);
    EXPECT_EQ(A.at(0, 8), 0.0);
    const auto diag = A.diagonal();
    for (double d : diag) EXPECT_DOUBLE_EQ(d, 4.0);
}

TEST(SparseMatrix, LinearCombination) {
    const FemSpace space(5);
    const SparseSymmetric B = linear_combination(2.0, space.mass(), -3.0, space.stiffness());
    for (std::size_t i = 0; i < 9; ++i)
        for (std::size_t j = 0; j < 9; ++j)
            EXPECT_DOUBLE_EQ(B.at(i, j), 2.0 * space.mass().at(i, j) - 3.0 * space.stiffness().at(i, j));
}

TEST(SparseMatrix, MultiplyAndBilinear) {
    const FemSpace space(9);
    std::mt19937 rng(5);
    const DofVector x = random_vector(space.num_dofs(), rng);
    const DofVector y = space.mass().multiply(x);
    const Eigen::VectorXd ref = to_eigen(space.mass()) * to_eigen(x);
    for (std::size_t i = 0; i < y.size(); ++i) EXPECT_NEAR(y[i], ref[static_cast<Eigen::Index>(i)], 1e-15);
    EXPECT_NEAR(space.mass().bilinear(x, x), to_eigen(x).dot(ref), 1e-14);
    EXPECT_EQ(space.mass().multiply(x, Exec::Serial), space.mass().multiply(x, Exec::Parallel));
}

TEST(SpdSolver, ScaledIdentityLikeMass) {
    const FemSpace space(5);
    const SparseSymmetric B = linear_combination(3.0, space.mass(), 0.0, space.stiffness());
    std::mt19937 rng(6);
    const DofVector b = random_vector(9, rng);
    for (SolverMode mode : {SolverMode::Direct, SolverMode::Iterative}) {
        const DofVector x = solve_spd(B, b, mode);
        EXPECT_LE(relative_residual(B, x, b), mode == SolverMode::Direct ? 1e-12 : 1e-10);
    }
}

TEST(SpdSolver, RecoversOnesOnMassPlusStiffness) {
    const FemSpace space(5);
    const SparseSymmetric B = linear_combination(1.0, space.mass(), 1.0, space.stiffness());
    const DofVector ones(9, 1.0);
    const DofVector b = B.multiply(ones);
    const Eigen::VectorXd dense = to_eigen(B).llt().solve(to_eigen(b));
    for (SolverMode mode : {SolverMode::Direct, SolverMode::Iterative}) {
        const DofVector x = solve_spd(B, b, mode);
        for (std::size_t i = 0; i < 9; ++i) {
            EXPECT_NEAR(x[i], 1.0, 1e-10);
            EXPECT_NEAR(x[i], dense[static_cast<Eigen::Index>(i)], 1e-10);
        }
    }
}

TEST(SpdSolver, DirectAndIterativeAgree) {
    const FemSpace space(17);
    const SparseSymmetric B = linear_combination(40.0, space.mass(), 1.7, space.stiffness());
    std::mt19937 rng(7);
    const DofVector b = random_vector(space.num_dofs(), rng);
    const DofVector xd = solve_spd(B, b, SolverMode::Direct);
    const DofVector xi = solve_spd(B, b, SolverMode::Iterative);
    double scale = 0.0;
    for (double v : xd) scale = std::max(scale, std::abs(v));
    for (std::size_t i = 0; i < xd.size(); ++i) EXPECT_NEAR(xd[i], xi[i], 1e-8 * scale);
    EXPECT_LE(relative_residual(B, xd, b), 1e-12);
    EXPECT_LE(relative_residual(B, xi, b), 1e-10);
}

TEST(SpdSolver, BreakdownOnNegativeDefinite) {
    const FemSpace space(5);
    const SparseSymmetric B = linear_combination(-1.0, space.mass(), -1.0, space.stiffness());
    EXPECT_THROW(SpdSolver(B, SolverMode::Direct), SolverBreakdown);
    EXPECT_THROW(solve_spd(B, DofVector(9, 1.0), SolverMode::Iterative), SolverBreakdown);
}

TEST(SpdSolver, BreakdownIsNotNonConvergence) {
    // Indefinite with positive diagonal: CG detects non-positive curvature.
    Eigen::MatrixXd d(2, 2);
    d << 1.0, 2.0, 2.0, 1.0;
    const SparseSymmetric B = dense_to_sparse(d);
    try {
        solve_spd(B, DofVector{1.0, -1.0}, SolverMode::Iterative);
        FAIL() << "expected SolverBreakdown";
    } catch (const SolverBreakdown&) {
    } catch (const NotConverged&) {
        FAIL() << "breakdown reported as non-convergence";
    }
    EXPECT_THROW(SpdSolver(B, SolverMode::Direct), SolverBreakdown);
}

TEST(SpdSolver, DimensionMismatch) {
    const FemSpace space(5);
    const SpdSolver s(space.mass());
    EXPECT_THROW(s.solve(DofVector(4, 1.0)), DimensionError);
}

TEST(RankOne, ZeroBetaOrZeroVectorEqualsPlainSolve) {
    const FemSpace space(5);
    const SparseSymmetric B = linear_combination(10.0, space.mass(), 1.0, space.stiffness());
    std::mt19937 rng(8);
    const DofVector b = random_vector(9, rng);
    const DofVector g = random_vector(9, rng);
    const DofVector plain = solve_spd(B, b);
    const DofVector x0 = solve_rank_one(B, g, 0.0, b);
    const DofVector x1 = solve_rank_one(B, DofVector(9, 0.0), 2.0, b);
    for (std::size_t i = 0; i < 9; ++i) {
        EXPECT_NEAR(x0[i], plain[i], 1e-14);
        EXPECT_NEAR(x1[i], plain[i], 1e-14);
    }
}

TEST(RankOne, MatchesDenseSolveOnRandomSpdSystems) {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        Eigen::MatrixXd R = Eigen::MatrixXd::NullaryExpr(9, 9, [&] { return unit(rng); });
        const Eigen::MatrixXd B = R * R.transpose() + 0.5 * Eigen::MatrixXd::Identity(9, 9);
        const DofVector g = random_vector(9, rng);
        const DofVector b = random_vector(9, rng);
        const double beta = 3.0 * unit(rng);
        const Eigen::MatrixXd updated = B + beta * to_eigen(g) * to_eigen(g).transpose();
        if (std::abs(updated.determinant()) < 1e-6 * std::abs(B.determinant())) continue;
        const Eigen::VectorXd ref = updated.partialPivLu().solve(to_eigen(b));
        const SparseSymmetric Bs = dense_to_sparse(B);
        const DofVector x = solve_rank_one(Bs, g, beta, b);
        for (std::size_t i = 0; i < 9; ++i) {
            EXPECT_NEAR(x[i], ref[static_cast<Eigen::Index>(i)], 1e-10 * std::max(1.0, ref.cwiseAbs().maxCoeff()));
        }
        // Applying the assembled updated matrix reproduces b.
        const Eigen::VectorXd back = updated * to_eigen(x);
        EXPECT_LE((back - to_eigen(b)).norm() / to_eigen(b).norm(), 1e-10);
    }
}

TEST(RankOne, SingularUpdateDetected) {
    Eigen::MatrixXd B = Eigen::MatrixXd::Identity(3, 3);
    const SparseSymmetric Bs = dense_to_sparse(B);
    const DofVector g = {1.0, 0.0, 0.0};
    // 1 + beta g'g = 0 for beta = -1.
    EXPECT_THROW(solve_rank_one(Bs, g, -1.0, DofVector{1.0, 1.0, 1.0}), SingularUpdate);
}

TEST(SolverModeNames, RoundTrip) {
    EXPECT_EQ(parse_solver_mode(to_string(SolverMode::Direct)), SolverMode::Direct);
    EXPECT_EQ(parse_solver_mode(to_string(SolverMode::Iterative)), SolverMode::Iterative);
    EXPECT_THROW(parse_solver_mode("multigrid"), ParameterError);
}
