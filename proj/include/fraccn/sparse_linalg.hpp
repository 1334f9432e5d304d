#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>

#include "fraccn/sparse_matrix.hpp"

namespace fraccn {

enum class SolverMode { Direct, Iterative };

std::string to_string(SolverMode mode);
SolverMode parse_solver_mode(const std::string& name);

/**
 * Solver for an SPD system B x = b.
 *
 * Direct mode: sparse Cholesky with approximate minimum degree ordering,
 * followed by iterative refinement until ||Bx - b|| <= 1e-12 ||b||.
 * Iterative mode: Jacobi-preconditioned conjugate gradients, relative
 * tolerance 1e-12, at most 10 * dim iterations.
 *
 * A non-positive pivot or curvature throws SolverBreakdown; CG running out of
 * iterations throws NotConverged. The factorization is immutable after
 * construction and solve() may be called concurrently.
 */
class SpdSolver {
public:
    explicit SpdSolver(const SparseSymmetric& matrix, SolverMode mode = SolverMode::Direct);
    ~SpdSolver();
    SpdSolver(SpdSolver&&) noexcept;
    SpdSolver& operator=(SpdSolver&&) noexcept;

    DofVector solve(std::span<const double> b) const;

    SolverMode mode() const { return mode_; }
    std::size_t dim() const { return matrix_.dim(); }
    const SparseSymmetric& matrix() const { return matrix_; }

private:
    struct Factorization;

    DofVector conjugate_gradient(std::span<const double> b) const;

    SparseSymmetric matrix_;
    SolverMode mode_;
    std::unique_ptr<Factorization> factor_;
};

DofVector solve_spd(const SparseSymmetric& matrix, std::span<const double> b,
                    SolverMode mode = SolverMode::Direct);

// Solves (B + beta g g') x = b with two B-solves (Sherman-Morrison). Throws
// SingularUpdate when |1 + beta g'B^{-1}g| < 1e-14.
DofVector solve_rank_one(const SpdSolver& solver, std::span<const double> g, double beta,
                         std::span<const double> b);
DofVector solve_rank_one(const SparseSymmetric& matrix, std::span<const double> g, double beta,
                         std::span<const double> b, SolverMode mode = SolverMode::Direct);

// ||B x - b|| / ||b|| (absolute residual when b = 0).
double relative_residual(const SparseSymmetric& matrix, std::span<const double> x, std::span<const double> b);

}  // namespace fraccn
