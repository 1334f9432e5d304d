#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "fraccn/kernels.hpp"
#include "fraccn/quadrature.hpp"
#include "fraccn/sparse_linalg.hpp"
#include "fraccn/sparse_matrix.hpp"

namespace fraccn {

struct Point2 {
    double x = 0.0;
    double y = 0.0;
};

using Gradient2 = std::array<double, 2>;
using ScalarField = std::function<double(double, double)>;

// A spatial function together with its gradient.
struct SpatialField {
    ScalarField value;
    std::function<Gradient2(double, double)> gradient;
};

/**
 * Structured triangulation of the unit square with M nodes per side,
 * h = 1/(M-1). Grid node (i, j) sits at (i h, j h) and has index i + M j.
 * Every cell is split along its lower-left to upper-right diagonal into two
 * counter-clockwise triangles. Interior nodes carry the degrees of freedom.
 */
class Triangulation {
public:
    static constexpr std::size_t kBoundary = static_cast<std::size_t>(-1);

    explicit Triangulation(std::size_t nodes_per_side);

    std::size_t nodes_per_side() const { return M_; }
    double mesh_size() const { return h_; }
    std::size_t num_nodes() const { return nodes_.size(); }
    std::size_t num_triangles() const { return triangles_.size(); }
    std::size_t num_dofs() const { return dof_nodes_.size(); }

    std::span<const Point2> nodes() const { return nodes_; }
    std::span<const std::array<std::size_t, 3>> triangles() const { return triangles_; }
    double area(std::size_t /*tri*/) const { return 0.5 * h_ * h_; }

    // Interior dof of a grid node, or kBoundary.
    std::size_t interior_index(std::size_t node) const { return interior_index_[node]; }
    std::size_t dof_node(std::size_t dof) const { return dof_nodes_[dof]; }

    // (triangle, local vertex) pairs touching a node, in increasing triangle order.
    std::span<const std::pair<std::size_t, int>> node_triangles(std::size_t node) const;

    // Sorted nodes sharing a triangle with `node` (including itself).
    std::span<const std::size_t> node_neighbors(std::size_t node) const;

    // Triangle containing (x, y); points on shared edges go to either side.
    std::size_t locate(double x, double y) const;
    std::array<double, 3> barycentric(std::size_t tri, double x, double y) const;
    // Gradients of the three barycentric coordinates on a triangle.
    std::array<Gradient2, 3> basis_gradients(std::size_t tri) const;

private:
    std::size_t M_;
    double h_;
    std::vector<Point2> nodes_;
    std::vector<std::array<std::size_t, 3>> triangles_;
    std::vector<std::size_t> interior_index_;
    std::vector<std::size_t> dof_nodes_;
    std::vector<std::size_t> adj_ptr_;
    std::vector<std::pair<std::size_t, int>> adj_;
    std::vector<std::size_t> nbr_ptr_;
    std::vector<std::size_t> nbr_;
};

Triangulation build_square_mesh(std::size_t nodes_per_side);

enum class DofSet { Interior, All };
enum class ElementMatrix { Mass, Stiffness };

// Assembly by scattering element matrices triangle by triangle.
SparseSymmetric assemble_serial(const Triangulation& tri, ElementMatrix kind, DofSet set);
// Assembly by gathering, one row per thread iteration. Same result bit for bit.
SparseSymmetric assemble_parallel(const Triangulation& tri, ElementMatrix kind, DofSet set);

SparseSymmetric assemble_mass(const Triangulation& tri, DofSet set = DofSet::Interior,
                              Exec exec = Exec::Parallel);
SparseSymmetric assemble_stiffness(const Triangulation& tri, DofSet set = DofSet::Interior,
                                   Exec exec = Exec::Parallel);

// Triangulation plus interior mass and stiffness matrices.
class FemSpace {
public:
    explicit FemSpace(std::size_t nodes_per_side, SolverMode mode = SolverMode::Direct);

    const Triangulation& mesh() const { return tri_; }
    const SparseSymmetric& mass() const { return mass_; }
    const SparseSymmetric& stiffness() const { return stiffness_; }
    std::size_t num_dofs() const { return tri_.num_dofs(); }
    SolverMode solver_mode() const { return mode_; }

private:
    Triangulation tri_;
    SparseSymmetric mass_;
    SparseSymmetric stiffness_;
    SolverMode mode_;
};

// (f, phi_i) for interior basis functions.
DofVector load_vector(const Triangulation& tri, const ScalarField& f,
                      const TriangleRule& rule = triangle_rule_degree4(), Exec exec = Exec::Parallel);
// (grad g, grad phi_i) for interior basis functions.
DofVector gradient_load_vector(const Triangulation& tri, const std::function<Gradient2(double, double)>& grad,
                               const TriangleRule& rule = triangle_rule_degree4(), Exec exec = Exec::Parallel);

// Values of f at interior nodes.
DofVector interpolate(const Triangulation& tri, const ScalarField& f);

DofVector l2_project(const FemSpace& space, const ScalarField& f);
DofVector ritz_project(const FemSpace& space, const SpatialField& u0);

struct Norms {
    double l2 = 0.0;
    double h1_semi = 0.0;
};

// sqrt(v'Mv), sqrt(v'Av)
Norms norms(const FemSpace& space, std::span<const double> v);
// ||u - u_h|| and ||grad(u - u_h)|| by degree-4 quadrature on every triangle.
Norms error_norms(const Triangulation& tri, std::span<const double> uh, const SpatialField& exact,
                  Exec exec = Exec::Parallel);

// ||f||_{L2} by degree-4 quadrature.
double l2_norm(const Triangulation& tri, const ScalarField& f, Exec exec = Exec::Parallel);

double evaluate(const Triangulation& tri, std::span<const double> v, double x, double y);
Gradient2 evaluate_gradient(const Triangulation& tri, std::span<const double> v, double x, double y);

// Plain-text node table "x,y,u_h[,u_exact]" over all grid nodes, boundary included.
void write_field_table(std::ostream& os, const Triangulation& tri, std::span<const double> v,
                       const std::optional<ScalarField>& exact = std::nullopt);

}  // namespace fraccn
