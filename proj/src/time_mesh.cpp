#include "fraccn/time_mesh.hpp"

#include <algorithm>
#include <cmath>

#include "fraccn/errors.hpp"

namespace fraccn {

namespace {

void check_common(double T, std::size_t N) {
    if (!(T > 0.0) || !std::isfinite(T)) {
        throw ParameterError("time mesh: final time T must be positive and finite");
    }
    if (N == 0) {
        throw ParameterError("time mesh: number of intervals N must be at least 1");
    }
}

void check_grading(double r) {
    if (!(r >= 1.0) || !std::isfinite(r)) {
        throw ParameterError("time mesh: grading exponent r must satisfy r >= 1");
    }
}

}  // namespace

std::string to_string(MeshKind kind) {
    switch (kind) {
        case MeshKind::Graded: return "graded";
        case MeshKind::Uniform: return "uniform";
        case MeshKind::TwoPart: return "two-part";
    }
    return "unknown";
}

MeshKind parse_mesh_kind(const std::string& name) {
    if (name == "graded") return MeshKind::Graded;
    if (name == "uniform") return MeshKind::Uniform;
    if (name == "two-part" || name == "twopart" || name == "two_part") return MeshKind::TwoPart;
    throw ParameterError("unknown mesh kind '" + name + "' (expected graded, uniform or two-part)");
}

TwoPartParams two_part_params(double T, std::size_t N, double r) {
    check_common(T, N);
    check_grading(r);
    TwoPartParams p;
    const double two_r = std::pow(2.0, r);
    p.T0 = std::min(T / two_r, (1.0 - 1.0 / r) * T);
    p.rho0 = std::min(r / (two_r - 1.0 + r), r * (r - 1.0) / (1.0 + r * (r - 1.0)));
    p.N0 = static_cast<std::size_t>(std::ceil(p.rho0 * static_cast<double>(N)));
    p.tau0 = p.N0 < N ? (T - p.T0) / static_cast<double>(N - p.N0) : 0.0;
    return p;
}

TimeMesh::TimeMesh(MeshKind kind, double T, double r, std::vector<double> nodes)
    : kind_(kind), T_(T), r_(r), nodes_(std::move(nodes)) {
    steps_.resize(nodes_.size() - 1);
    for (std::size_t n = 1; n < nodes_.size(); ++n) {
        steps_[n - 1] = nodes_[n] - nodes_[n - 1];
    }
}

TimeMesh TimeMesh::graded(double T, std::size_t N, double r) {
    check_common(T, N);
    check_grading(r);
    std::vector<double> t(N + 1);
    const double dN = static_cast<double>(N);
    for (std::size_t n = 0; n <= N; ++n) {
        t[n] = T * std::pow(static_cast<double>(n) / dN, r);
    }
    t[N] = T;
    return TimeMesh(MeshKind::Graded, T, r, std::move(t));
}

TimeMesh TimeMesh::uniform(double T, std::size_t N) {
    check_common(T, N);
    std::vector<double> t(N + 1);
    const double dN = static_cast<double>(N);
    for (std::size_t n = 0; n <= N; ++n) {
        t[n] = T * (static_cast<double>(n) / dN);
    }
    t[N] = T;
    return TimeMesh(MeshKind::Uniform, T, 1.0, std::move(t));
}

TimeMesh TimeMesh::two_part(double T, std::size_t N, double r) {
    check_common(T, N);
    check_grading(r);
    if (r == 1.0) {
        return uniform(T, N);
    }
    const TwoPartParams p = two_part_params(T, N, r);
    if (p.N0 >= N) {
        throw ParameterError("two-part mesh: N0 = " + std::to_string(p.N0) + " >= N = " +
                             std::to_string(N) + ", no uniform part left");
    }
    std::vector<double> t(N + 1);
    const double dN0 = static_cast<double>(p.N0);
    for (std::size_t n = 0; n <= p.N0; ++n) {
        t[n] = p.T0 * std::pow(static_cast<double>(n) / dN0, r);
    }
    t[p.N0] = p.T0;
    for (std::size_t n = p.N0 + 1; n <= N; ++n) {
        t[n] = p.T0 + static_cast<double>(n - p.N0) * p.tau0;
    }
    t[N] = T;
    TimeMesh mesh(MeshKind::TwoPart, T, r, std::move(t));
    mesh.T0_ = p.T0;
    mesh.N0_ = p.N0;
    return mesh;
}

double TimeMesh::node(std::size_t n) const {
    if (n >= nodes_.size()) {
        throw IndexError("time mesh: node index " + std::to_string(n) + " out of range");
    }
    return nodes_[n];
}

double TimeMesh::step(std::size_t n) const {
    if (n == 0 || n > steps_.size()) {
        throw IndexError("time mesh: step index " + std::to_string(n) + " out of range [1, N]");
    }
    return steps_[n - 1];
}

double TimeMesh::max_step_ratio() const {
    double gamma = 1.0;
    for (std::size_t n = 1; n < steps_.size(); ++n) {
        gamma = std::max(gamma, steps_[n] / steps_[n - 1]);
    }
    return gamma;
}

SigmaPoint sigma_point(const TimeMesh& mesh, std::size_t n, double sigma) {
    if (n == 0 || n > mesh.intervals()) {
        throw IndexError("sigma_point: level " + std::to_string(n) + " out of range [1, N]");
    }
    if (!(sigma >= 0.0 && sigma < 1.0)) {
        throw ParameterError("sigma_point: sigma must lie in [0, 1)");
    }
    const auto t = mesh.nodes();
    return {n, (1.0 - sigma) * t[n] + sigma * t[n - 1]};
}

}  // namespace fraccn
