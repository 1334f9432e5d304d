#pragma once

#include <array>
#include <functional>

namespace fraccn {

// Adaptive Gauss-Kronrod (15-point) integral of f on [a, b].
double adaptive_integrate(const std::function<double(double)>& f, double a, double b,
                          double rel_tol = 1e-13);

// Symmetric quadrature rules on a triangle, in barycentric coordinates with
// weights normalized to sum to 1 (multiply by the triangle area).
struct TriangleRule {
    int degree;
    std::size_t size;
    std::array<std::array<double, 3>, 6> points;
    std::array<double, 6> weights;
};

// 3-point rule, exact for degree 2.
const TriangleRule& triangle_rule_degree2();
// 6-point Dunavant rule, exact for degree 4.
const TriangleRule& triangle_rule_degree4();

}  // namespace fraccn
