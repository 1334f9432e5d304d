#include "fraccn/sparse_linalg.hpp"

#include <Eigen/OrderingMethods>
#include <Eigen/SparseCholesky>
#include <Eigen/SparseCore>
#include <cmath>
#include <vector>

#include "fraccn/errors.hpp"

namespace fraccn {

namespace {

constexpr double kDirectTolerance = 1e-12;
constexpr double kCgTolerance = 1e-12;
constexpr int kMaxRefinements = 3;
constexpr double kSingularUpdate = 1e-14;

using EigenSparse = Eigen::SparseMatrix<double, Eigen::ColMajor, int>;

EigenSparse to_eigen(const SparseSymmetric& m) {
    std::vector<Eigen::Triplet<double, int>> triplets;
    triplets.reserve(m.nonzeros());
    const auto rp = m.row_ptr();
    const auto ci = m.col_idx();
    const auto v = m.values();
    for (std::size_t i = 0; i < m.dim(); ++i) {
        for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) {
            triplets.emplace_back(static_cast<int>(i), static_cast<int>(ci[k]), v[k]);
        }
    }
    const int n = static_cast<int>(m.dim());
    EigenSparse out(n, n);
    out.setFromTriplets(triplets.begin(), triplets.end());
    return out;
}

double norm2(std::span<const double> x) { return std::sqrt(kernels::dot(x, x)); }

}  // namespace

std::string to_string(SolverMode mode) { return mode == SolverMode::Direct ? "direct" : "iterative"; }

SolverMode parse_solver_mode(const std::string& name) {
    if (name == "direct") return SolverMode::Direct;
    if (name == "iterative") return SolverMode::Iterative;
    throw ParameterError("unknown solver mode '" + name + "' (expected direct or iterative)");
}

struct SpdSolver::Factorization {
    Eigen::SimplicialLLT<EigenSparse, Eigen::Lower, Eigen::AMDOrdering<int>> llt;
};

SpdSolver::SpdSolver(const SparseSymmetric& matrix, SolverMode mode) : matrix_(matrix), mode_(mode) {
    if (mode_ == SolverMode::Iterative) {
        for (double d : matrix_.diagonal()) {
            if (!(d > 0.0)) throw SolverBreakdown("conjugate gradients: non-positive diagonal entry, matrix is not SPD");
        }
        return;
    }
    factor_ = std::make_unique<Factorization>();
    factor_->llt.compute(to_eigen(matrix_));
    if (factor_->llt.info() != Eigen::Success) {
        throw SolverBreakdown("sparse Cholesky: non-positive pivot, matrix is not SPD");
    }
}

SpdSolver::~SpdSolver() = default;
SpdSolver::SpdSolver(SpdSolver&&) noexcept = default;
SpdSolver& SpdSolver::operator=(SpdSolver&&) noexcept = default;

DofVector SpdSolver::solve(std::span<const double> b) const {
    const std::size_t n = matrix_.dim();
    if (b.size() != n) throw DimensionError("SpdSolver::solve: right-hand side length mismatch");
    const double bnorm = norm2(b);
    if (bnorm == 0.0) return DofVector(n, 0.0);
    if (mode_ == SolverMode::Iterative) return conjugate_gradient(b);

    Eigen::Map<const Eigen::VectorXd> rhs(b.data(), static_cast<Eigen::Index>(n));
    Eigen::VectorXd x = factor_->llt.solve(rhs);
    for (int pass = 0; pass < kMaxRefinements; ++pass) {
        const DofVector bx = matrix_.multiply(std::span<const double>(x.data(), n));
        Eigen::VectorXd r(static_cast<Eigen::Index>(n));
        for (std::size_t i = 0; i < n; ++i) r[static_cast<Eigen::Index>(i)] = b[i] - bx[i];
        if (r.norm() <= kDirectTolerance * bnorm) break;
        x += factor_->llt.solve(r);
    }
    return DofVector(x.data(), x.data() + n);
}

DofVector SpdSolver::conjugate_gradient(std::span<const double> b) const {
    const std::size_t n = matrix_.dim();
    const std::vector<double> diag = matrix_.diagonal();
    const double bnorm = norm2(b);
    DofVector x(n, 0.0);
    DofVector r(b.begin(), b.end());
    DofVector z(n);
    for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
    DofVector p = z;
    double rz = kernels::dot(r, z);
    const std::size_t max_iter = 10 * n;
    for (std::size_t it = 0; it < max_iter; ++it) {
        const DofVector q = matrix_.multiply(p);
        const double curvature = kernels::dot(p, q);
        if (!(curvature > 0.0)) {
            throw SolverBreakdown("conjugate gradients: non-positive curvature, matrix is not SPD");
        }
        const double step = rz / curvature;
        kernels::axpby(Exec::Parallel, step, p, 1.0, x);
        kernels::axpby(Exec::Parallel, -step, q, 1.0, r);
        if (norm2(r) <= kCgTolerance * bnorm) return x;
        for (std::size_t i = 0; i < n; ++i) z[i] = r[i] / diag[i];
        const double rz_next = kernels::dot(r, z);
        kernels::axpby(Exec::Parallel, 1.0, z, rz_next / rz, p);
        rz = rz_next;
    }
    throw NotConverged("conjugate gradients: no convergence in " + std::to_string(max_iter) + " iterations");
}

DofVector solve_spd(const SparseSymmetric& matrix, std::span<const double> b, SolverMode mode) {
    return SpdSolver(matrix, mode).solve(b);
}

DofVector solve_rank_one(const SpdSolver& solver, std::span<const double> g, double beta,
                         std::span<const double> b) {
    if (g.size() != solver.dim() || b.size() != solver.dim()) {
        throw DimensionError("solve_rank_one: vector length mismatch");
    }
    DofVector x = solver.solve(b);
    if (beta == 0.0) return x;
    const DofVector y = solver.solve(g);
    const double denom = 1.0 + beta * kernels::dot(g, y);
    if (std::abs(denom) < kSingularUpdate) {
        throw SingularUpdate("solve_rank_one: 1 + beta g'B^{-1}g vanishes");
    }
    const double scale = beta * kernels::dot(g, x) / denom;
    kernels::axpby(Exec::Parallel, -scale, y, 1.0, x);
    return x;
}

DofVector solve_rank_one(const SparseSymmetric& matrix, std::span<const double> g, double beta,
                         std::span<const double> b, SolverMode mode) {
    return solve_rank_one(SpdSolver(matrix, mode), g, beta, b);
}

double relative_residual(const SparseSymmetric& matrix, std::span<const double> x, std::span<const double> b) {
    const DofVector bx = matrix.multiply(x);
    double rr = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) rr += (bx[i] - b[i]) * (bx[i] - b[i]);
    const double bnorm = norm2(b);
    return bnorm > 0.0 ? std::sqrt(rr) / bnorm : std::sqrt(rr);
}

}  // namespace fraccn
