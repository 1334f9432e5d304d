#include "fraccn/fem2d.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "fraccn/errors.hpp"

namespace fraccn {

namespace {

using index_t = long long;

// Element matrix entry (a, b) on triangle `t`.
double element_entry(const Triangulation& tri, ElementMatrix kind, std::size_t t, int a, int b,
                     const std::array<Gradient2, 3>& grads) {
    const double area = tri.area(t);
    if (kind == ElementMatrix::Mass) {
        return area / 12.0 * (a == b ? 2.0 : 1.0);
    }
    return area * (grads[a][0] * grads[b][0] + grads[a][1] * grads[b][1]);
}

std::size_t dof_of(const Triangulation& tri, std::size_t node, DofSet set) {
    return set == DofSet::All ? node : tri.interior_index(node);
}

std::size_t dof_count(const Triangulation& tri, DofSet set) {
    return set == DofSet::All ? tri.num_nodes() : tri.num_dofs();
}

std::size_t node_of(const Triangulation& tri, std::size_t dof, DofSet set) {
    return set == DofSet::All ? dof : tri.dof_node(dof);
}

// CSR pattern from node adjacency, values zeroed.
SparseSymmetric pattern(const Triangulation& tri, DofSet set) {
    const std::size_t n = dof_count(tri, set);
    std::vector<std::size_t> row_ptr(n + 1, 0);
    std::vector<std::size_t> cols;
    for (std::size_t i = 0; i < n; ++i) {
        const std::size_t node = node_of(tri, i, set);
        std::vector<std::size_t> row;
        for (std::size_t nb : tri.node_neighbors(node)) {
            const std::size_t j = dof_of(tri, nb, set);
            if (j != Triangulation::kBoundary) row.push_back(j);
        }
        std::sort(row.begin(), row.end());
        cols.insert(cols.end(), row.begin(), row.end());
        row_ptr[i + 1] = cols.size();
    }
    std::vector<double> values(cols.size(), 0.0);
    return SparseSymmetric(n, std::move(row_ptr), std::move(cols), std::move(values));
}

}  // namespace

Triangulation::Triangulation(std::size_t nodes_per_side) : M_(nodes_per_side) {
    if (M_ < 3) {
        throw ParameterError("triangulation: need at least 3 nodes per side (one interior dof)");
    }
    h_ = 1.0 / static_cast<double>(M_ - 1);
    nodes_.resize(M_ * M_);
    interior_index_.assign(M_ * M_, kBoundary);
    for (std::size_t j = 0; j < M_; ++j) {
        for (std::size_t i = 0; i < M_; ++i) {
            const std::size_t k = i + M_ * j;
            // i / (M-1) rather than i * h keeps the last node at exactly 1.
            nodes_[k] = {static_cast<double>(i) / static_cast<double>(M_ - 1),
                         static_cast<double>(j) / static_cast<double>(M_ - 1)};
            if (i > 0 && j > 0 && i + 1 < M_ && j + 1 < M_) {
                interior_index_[k] = dof_nodes_.size();
                dof_nodes_.push_back(k);
            }
        }
    }
    triangles_.reserve(2 * (M_ - 1) * (M_ - 1));
    for (std::size_t j = 0; j + 1 < M_; ++j) {
        for (std::size_t i = 0; i + 1 < M_; ++i) {
            const std::size_t p00 = i + M_ * j;
            const std::size_t p10 = p00 + 1;
            const std::size_t p01 = p00 + M_;
            const std::size_t p11 = p01 + 1;
            triangles_.push_back({p00, p10, p11});
            triangles_.push_back({p00, p11, p01});
        }
    }
    // Node -> triangle adjacency in increasing triangle order.
    std::vector<std::size_t> counts(nodes_.size(), 0);
    for (const auto& t : triangles_) {
        for (std::size_t v : t) ++counts[v];
    }
    adj_ptr_.assign(nodes_.size() + 1, 0);
    for (std::size_t k = 0; k < nodes_.size(); ++k) adj_ptr_[k + 1] = adj_ptr_[k] + counts[k];
    adj_.resize(adj_ptr_.back());
    std::vector<std::size_t> fill(adj_ptr_.begin(), adj_ptr_.end() - 1);
    for (std::size_t t = 0; t < triangles_.size(); ++t) {
        for (int a = 0; a < 3; ++a) adj_[fill[triangles_[t][a]]++] = {t, a};
    }
    nbr_ptr_.assign(nodes_.size() + 1, 0);
    for (std::size_t k = 0; k < nodes_.size(); ++k) {
        std::vector<std::size_t> nb;
        for (std::size_t p = adj_ptr_[k]; p < adj_ptr_[k + 1]; ++p) {
            for (std::size_t v : triangles_[adj_[p].first]) nb.push_back(v);
        }
        std::sort(nb.begin(), nb.end());
        nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
        nbr_.insert(nbr_.end(), nb.begin(), nb.end());
        nbr_ptr_[k + 1] = nbr_.size();
    }
}

std::span<const std::pair<std::size_t, int>> Triangulation::node_triangles(std::size_t node) const {
    return std::span<const std::pair<std::size_t, int>>(adj_).subspan(adj_ptr_[node], adj_ptr_[node + 1] - adj_ptr_[node]);
}

std::span<const std::size_t> Triangulation::node_neighbors(std::size_t node) const {
    return std::span<const std::size_t>(nbr_).subspan(nbr_ptr_[node], nbr_ptr_[node + 1] - nbr_ptr_[node]);
}

std::size_t Triangulation::locate(double x, double y) const {
    const double sx = std::clamp(x, 0.0, 1.0) / h_;
    const double sy = std::clamp(y, 0.0, 1.0) / h_;
    const std::size_t cells = M_ - 1;
    const std::size_t i = std::min(static_cast<std::size_t>(sx), cells - 1);
    const std::size_t j = std::min(static_cast<std::size_t>(sy), cells - 1);
    const double fx = sx - static_cast<double>(i);
    const double fy = sy - static_cast<double>(j);
    return 2 * (i + cells * j) + (fx >= fy ? 0 : 1);
}

std::array<double, 3> Triangulation::barycentric(std::size_t tri, double x, double y) const {
    const auto& t = triangles_[tri];
    const Point2 p0 = nodes_[t[0]], p1 = nodes_[t[1]], p2 = nodes_[t[2]];
    const double det = (p1.x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (p1.y - p0.y);
    const double l1 = ((x - p0.x) * (p2.y - p0.y) - (p2.x - p0.x) * (y - p0.y)) / det;
    const double l2 = ((p1.x - p0.x) * (y - p0.y) - (x - p0.x) * (p1.y - p0.y)) / det;
    return {1.0 - l1 - l2, l1, l2};
}

std::array<Gradient2, 3> Triangulation::basis_gradients(std::size_t tri) const {
    const auto& t = triangles_[tri];
    const Point2 p[3] = {nodes_[t[0]], nodes_[t[1]], nodes_[t[2]]};
    const double twice_area = (p[1].x - p[0].x) * (p[2].y - p[0].y) - (p[2].x - p[0].x) * (p[1].y - p[0].y);
    std::array<Gradient2, 3> g{};
    for (int a = 0; a < 3; ++a) {
        const Point2& q1 = p[(a + 1) % 3];
        const Point2& q2 = p[(a + 2) % 3];
        g[a] = {(q1.y - q2.y) / twice_area, (q2.x - q1.x) / twice_area};
    }
    return g;
}

Triangulation build_square_mesh(std::size_t nodes_per_side) { return Triangulation(nodes_per_side); }

SparseSymmetric assemble_serial(const Triangulation& tri, ElementMatrix kind, DofSet set) {
    SparseSymmetric m = pattern(tri, set);
    auto values = m.values_mut();
    const auto tris = tri.triangles();
    for (std::size_t t = 0; t < tris.size(); ++t) {
        const auto grads = tri.basis_gradients(t);
        for (int a = 0; a < 3; ++a) {
            const std::size_t i = dof_of(tri, tris[t][a], set);
            if (i == Triangulation::kBoundary) continue;
            for (int b = 0; b < 3; ++b) {
                const std::size_t j = dof_of(tri, tris[t][b], set);
                if (j == Triangulation::kBoundary) continue;
                values[m.find(i, j)] += element_entry(tri, kind, t, a, b, grads);
            }
        }
    }
    return m;
}

SparseSymmetric assemble_parallel(const Triangulation& tri, ElementMatrix kind, DofSet set) {
    SparseSymmetric m = pattern(tri, set);
    auto values = m.values_mut();
    const auto tris = tri.triangles();
    const index_t rows = static_cast<index_t>(m.dim());
#pragma omp parallel for schedule(static)
    for (index_t ii = 0; ii < rows; ++ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        for (const auto& [t, a] : tri.node_triangles(node_of(tri, i, set))) {
            const auto grads = tri.basis_gradients(t);
            for (int b = 0; b < 3; ++b) {
                const std::size_t j = dof_of(tri, tris[t][b], set);
                if (j == Triangulation::kBoundary) continue;
                values[m.find(i, j)] += element_entry(tri, kind, t, a, b, grads);
            }
        }
    }
    return m;
}

SparseSymmetric assemble_mass(const Triangulation& tri, DofSet set, Exec exec) {
    return exec == Exec::Serial ? assemble_serial(tri, ElementMatrix::Mass, set)
                                : assemble_parallel(tri, ElementMatrix::Mass, set);
}

SparseSymmetric assemble_stiffness(const Triangulation& tri, DofSet set, Exec exec) {
    return exec == Exec::Serial ? assemble_serial(tri, ElementMatrix::Stiffness, set)
                                : assemble_parallel(tri, ElementMatrix::Stiffness, set);
}

FemSpace::FemSpace(std::size_t nodes_per_side, SolverMode mode)
    : tri_(nodes_per_side),
      mass_(assemble_mass(tri_)),
      stiffness_(assemble_stiffness(tri_)),
      mode_(mode) {}

namespace {

// Per-triangle, per-quadrature-point contributions gathered to interior dofs.
// contrib(t, q, a) is the share of vertex a at point q of triangle t.
template <typename PointValue, typename Share>
DofVector gather_load(const Triangulation& tri, const TriangleRule& rule, Exec exec, PointValue point_value,
                      Share share) {
    const index_t ntri = static_cast<index_t>(tri.num_triangles());
    using Value = decltype(point_value(std::size_t{0}, Point2{}));
    std::vector<Value> at_points(tri.num_triangles() * rule.size);
    const auto tris = tri.triangles();
    const auto nodes = tri.nodes();
    auto eval_triangle = [&](index_t tt) {
        const std::size_t t = static_cast<std::size_t>(tt);
        const Point2 p0 = nodes[tris[t][0]], p1 = nodes[tris[t][1]], p2 = nodes[tris[t][2]];
        for (std::size_t q = 0; q < rule.size; ++q) {
            const auto& l = rule.points[q];
            const Point2 x{l[0] * p0.x + l[1] * p1.x + l[2] * p2.x, l[0] * p0.y + l[1] * p1.y + l[2] * p2.y};
            at_points[t * rule.size + q] = point_value(t, x);
        }
    };
    if (exec == Exec::Serial) {
        for (index_t t = 0; t < ntri; ++t) eval_triangle(t);
    } else {
#pragma omp parallel for schedule(static)
        for (index_t t = 0; t < ntri; ++t) eval_triangle(t);
    }

    const index_t ndofs = static_cast<index_t>(tri.num_dofs());
    DofVector b(tri.num_dofs(), 0.0);
    auto gather_row = [&](index_t ii) {
        const std::size_t i = static_cast<std::size_t>(ii);
        double s = 0.0;
        for (const auto& [t, a] : tri.node_triangles(tri.dof_node(i))) {
            double local = 0.0;
            for (std::size_t q = 0; q < rule.size; ++q) {
                local += rule.weights[q] * share(t, q, a, at_points[t * rule.size + q]);
            }
            s += tri.area(t) * local;
        }
        b[i] = s;
    };
    if (exec == Exec::Serial) {
        for (index_t i = 0; i < ndofs; ++i) gather_row(i);
    } else {
#pragma omp parallel for schedule(static)
        for (index_t i = 0; i < ndofs; ++i) gather_row(i);
    }
    return b;
}

}  // namespace

DofVector load_vector(const Triangulation& tri, const ScalarField& f, const TriangleRule& rule, Exec exec) {
    return gather_load(
        tri, rule, exec, [&](std::size_t, Point2 x) { return f(x.x, x.y); },
        [&](std::size_t, std::size_t q, int a, double fx) { return fx * rule.points[q][a]; });
}

DofVector gradient_load_vector(const Triangulation& tri, const std::function<Gradient2(double, double)>& grad,
                               const TriangleRule& rule, Exec exec) {
    return gather_load(
        tri, rule, exec, [&](std::size_t, Point2 x) { return grad(x.x, x.y); },
        [&](std::size_t t, std::size_t, int a, const Gradient2& g) {
            const auto gb = tri.basis_gradients(t);
            return g[0] * gb[a][0] + g[1] * gb[a][1];
        });
}

DofVector interpolate(const Triangulation& tri, const ScalarField& f) {
    DofVector v(tri.num_dofs());
    const auto nodes = tri.nodes();
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Point2 p = nodes[tri.dof_node(i)];
        v[i] = f(p.x, p.y);
    }
    return v;
}

DofVector l2_project(const FemSpace& space, const ScalarField& f) {
    const DofVector b = load_vector(space.mesh(), f);
    return solve_spd(space.mass(), b, space.solver_mode());
}

DofVector ritz_project(const FemSpace& space, const SpatialField& u0) {
    const DofVector b = gradient_load_vector(space.mesh(), u0.gradient);
    return solve_spd(space.stiffness(), b, space.solver_mode());
}

Norms norms(const FemSpace& space, std::span<const double> v) {
    if (v.size() != space.num_dofs()) throw DimensionError("norms: vector length mismatch");
    return {std::sqrt(std::max(0.0, space.mass().bilinear(v, v))),
            std::sqrt(std::max(0.0, space.stiffness().bilinear(v, v)))};
}

namespace {

double nodal_value(const Triangulation& tri, std::span<const double> v, std::size_t node) {
    const std::size_t d = tri.interior_index(node);
    return d == Triangulation::kBoundary ? 0.0 : v[d];
}

}  // namespace

Norms error_norms(const Triangulation& tri, std::span<const double> uh, const SpatialField& exact, Exec exec) {
    if (uh.size() != tri.num_dofs()) throw DimensionError("error_norms: vector length mismatch");
    const TriangleRule& rule = triangle_rule_degree4();
    const auto tris = tri.triangles();
    const auto nodes = tri.nodes();
    std::vector<double> l2_parts(tris.size()), h1_parts(tris.size());
    auto per_triangle = [&](std::size_t t) {
        const auto grads = tri.basis_gradients(t);
        double vals[3];
        Gradient2 gh{0.0, 0.0};
        for (int a = 0; a < 3; ++a) {
            vals[a] = nodal_value(tri, uh, tris[t][a]);
            gh[0] += vals[a] * grads[a][0];
            gh[1] += vals[a] * grads[a][1];
        }
        const Point2 p0 = nodes[tris[t][0]], p1 = nodes[tris[t][1]], p2 = nodes[tris[t][2]];
        double e0 = 0.0, e1 = 0.0;
        for (std::size_t q = 0; q < rule.size; ++q) {
            const auto& l = rule.points[q];
            const double x = l[0] * p0.x + l[1] * p1.x + l[2] * p2.x;
            const double y = l[0] * p0.y + l[1] * p1.y + l[2] * p2.y;
            const double diff = exact.value(x, y) - (l[0] * vals[0] + l[1] * vals[1] + l[2] * vals[2]);
            const Gradient2 g = exact.gradient(x, y);
            const double dx = g[0] - gh[0], dy = g[1] - gh[1];
            e0 += rule.weights[q] * diff * diff;
            e1 += rule.weights[q] * (dx * dx + dy * dy);
        }
        l2_parts[t] = tri.area(t) * e0;
        h1_parts[t] = tri.area(t) * e1;
    };
    kernels::for_each(exec, tris.size(), per_triangle);
    double l2 = 0.0, h1 = 0.0;
    for (std::size_t t = 0; t < tris.size(); ++t) {
        l2 += l2_parts[t];
        h1 += h1_parts[t];
    }
    return {std::sqrt(l2), std::sqrt(h1)};
}

double l2_norm(const Triangulation& tri, const ScalarField& f, Exec exec) {
    const TriangleRule& rule = triangle_rule_degree4();
    const auto tris = tri.triangles();
    const auto nodes = tri.nodes();
    const double sq = kernels::deterministic_sum(exec, tris.size(), [&](std::size_t t) {
        const Point2 p0 = nodes[tris[t][0]], p1 = nodes[tris[t][1]], p2 = nodes[tris[t][2]];
        double s = 0.0;
        for (std::size_t q = 0; q < rule.size; ++q) {
            const auto& l = rule.points[q];
            const double v = f(l[0] * p0.x + l[1] * p1.x + l[2] * p2.x, l[0] * p0.y + l[1] * p1.y + l[2] * p2.y);
            s += rule.weights[q] * v * v;
        }
        return tri.area(t) * s;
    });
    return std::sqrt(sq);
}

double evaluate(const Triangulation& tri, std::span<const double> v, double x, double y) {
    const std::size_t t = tri.locate(x, y);
    const auto l = tri.barycentric(t, x, y);
    const auto& vs = tri.triangles()[t];
    double s = 0.0;
    for (int a = 0; a < 3; ++a) s += l[a] * nodal_value(tri, v, vs[a]);
    return s;
}

Gradient2 evaluate_gradient(const Triangulation& tri, std::span<const double> v, double x, double y) {
    const std::size_t t = tri.locate(x, y);
    const auto grads = tri.basis_gradients(t);
    const auto& vs = tri.triangles()[t];
    Gradient2 g{0.0, 0.0};
    for (int a = 0; a < 3; ++a) {
        const double val = nodal_value(tri, v, vs[a]);
        g[0] += val * grads[a][0];
        g[1] += val * grads[a][1];
    }
    return g;
}

void write_field_table(std::ostream& os, const Triangulation& tri, std::span<const double> v,
                       const std::optional<ScalarField>& exact) {
    os << (exact ? "x,y,u_h,u_exact\n" : "x,y,u_h\n");
    const auto nodes = tri.nodes();
    char buf[128];
    for (std::size_t k = 0; k < nodes.size(); ++k) {
        const Point2 p = nodes[k];
        const double uh = nodal_value(tri, v, k);
        if (exact) {
            std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.16e,%.16e\n", p.x, p.y, uh, (*exact)(p.x, p.y));
        } else {
            std::snprintf(buf, sizeof buf, "%.10g,%.10g,%.16e\n", p.x, p.y, uh);
        }
        os << buf;
    }
}

}  // namespace fraccn
