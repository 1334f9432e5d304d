#include "fraccn/quadrature.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace fraccn {

double adaptive_integrate(const std::function<double(double)>& f, double a, double b, double rel_tol) {
    if (a == b) return 0.0;
    // Map to [0, 1]: the Boost error floor scales with the interval, so tiny
    // intervals near a graded-mesh origin would otherwise never terminate.
    const double width = b - a;
    const auto unit = [&](double s) { return f(a + width * s); };
    return width * boost::math::quadrature::gauss_kronrod<double, 15>::integrate(unit, 0.0, 1.0, 20, rel_tol);
}

const TriangleRule& triangle_rule_degree2() {
    static const TriangleRule rule{
        2,
        3,
        {{{2.0 / 3.0, 1.0 / 6.0, 1.0 / 6.0},
          {1.0 / 6.0, 2.0 / 3.0, 1.0 / 6.0},
          {1.0 / 6.0, 1.0 / 6.0, 2.0 / 3.0},
          {0.0, 0.0, 0.0},
          {0.0, 0.0, 0.0},
          {0.0, 0.0, 0.0}}},
        {1.0 / 3.0, 1.0 / 3.0, 1.0 / 3.0, 0.0, 0.0, 0.0}};
    return rule;
}

const TriangleRule& triangle_rule_degree4() {
    constexpr double a1 = 0.816847572980459, b1 = 0.091576213509771;
    constexpr double a2 = 0.108103018168070, b2 = 0.445948490915965;
    constexpr double w1 = 0.109951743655322, w2 = 0.223381589678011;
    static const TriangleRule rule{
        4,
        6,
        {{{a1, b1, b1}, {b1, a1, b1}, {b1, b1, a1}, {a2, b2, b2}, {b2, a2, b2}, {b2, b2, a2}}},
        {w1, w1, w1, w2, w2, w2}};
    return rule;
}

}  // namespace fraccn
