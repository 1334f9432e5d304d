#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace fraccn {

enum class MeshKind { Graded, Uniform, TwoPart };

std::string to_string(MeshKind kind);
MeshKind parse_mesh_kind(const std::string& name);

// Parameters of the graded-then-uniform mesh:
//   T0   = min{T / 2^r, (1 - 1/r) T}
//   rho0 = min{r / (2^r - 1 + r), r(r - 1) / (1 + r(r - 1))}
//   N0   = ceil(rho0 N),  tau0 = (T - T0) / (N - N0)
struct TwoPartParams {
    double T0 = 0.0;
    double rho0 = 0.0;
    std::size_t N0 = 0;
    double tau0 = 0.0;
};

TwoPartParams two_part_params(double T, std::size_t N, double r);

/**
 * Time mesh 0 = t_0 < t_1 < ... < t_N = T.
 *
 * Nodes are evaluated from their closed form (never by accumulating steps),
 * and steps are differences of stored nodes so that sum(tau_n) == T up to
 * round-off. Immutable once built.
 */
class TimeMesh {
public:
    // t_n = T (n/N)^r
    static TimeMesh graded(double T, std::size_t N, double r);
    static TimeMesh uniform(double T, std::size_t N);
    // Graded on [0, T0] with N0 intervals, uniform on [T0, T]. Falls back to
    // a uniform mesh when r == 1.
    static TimeMesh two_part(double T, std::size_t N, double r);

    MeshKind kind() const { return kind_; }
    double final_time() const { return T_; }
    std::size_t intervals() const { return nodes_.size() - 1; }
    double grading() const { return r_; }

    // Only meaningful for MeshKind::TwoPart.
    double graded_end() const { return T0_; }
    std::size_t graded_intervals() const { return N0_; }

    std::span<const double> nodes() const { return nodes_; }
    double node(std::size_t n) const;
    // tau_n = t_n - t_{n-1}, 1 <= n <= N
    double step(std::size_t n) const;
    std::span<const double> steps() const { return steps_; }

    // max_n tau_n / tau_{n-1}; the empirical gamma of the step-ratio bound.
    double max_step_ratio() const;

private:
    TimeMesh(MeshKind kind, double T, double r, std::vector<double> nodes);

    MeshKind kind_;
    double T_;
    double r_;
    double T0_ = 0.0;
    std::size_t N0_ = 0;
    std::vector<double> nodes_;
    std::vector<double> steps_;  // steps_[n-1] = tau_n
};

struct SigmaPoint {
    std::size_t n;
    double t;  // t_{n-sigma} = (1 - sigma) t_n + sigma t_{n-1}
};

SigmaPoint sigma_point(const TimeMesh& mesh, std::size_t n, double sigma);

}  // namespace fraccn
