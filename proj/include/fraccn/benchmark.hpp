#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fraccn/sparse_linalg.hpp"
#include "fraccn/stepper.hpp"
#include "fraccn/time_mesh.hpp"

namespace fraccn {

// u(x, y, t) = t^alpha (x - x^2)(y - y^2) on the unit square, T = 1, with the
// matching source for D^alpha u - (1 + |grad u|^2) lap u + int_0^t lap u = f.
struct ManufacturedProblem {
    double alpha = 0.5;

    double exact(double x, double y, double t) const;
    Gradient2 exact_gradient(double x, double y, double t) const;
    double source(double x, double y, double t) const;

    SpaceTimeField exact_field() const;
    SpaceTimeFunction source_function() const;
};

double source_eval(double alpha, double x, double y, double t);

struct ManufacturedResidual {
    double max_residual = 0.0;
    std::size_t samples = 0;
    double gradient_integral = 0.0;  // int |grad((x-x^2)(y-y^2))|^2, expect 1/45
};

// Plugs the exact solution into the PDE term by term on a 5x5x5 grid of
// interior sample points.
ManufacturedResidual verify_manufactured(double alpha);

// log(e1/e2) / log(d1/d2)
double rate(double e1, double e2, double d1, double d2);

struct RateRow {
    std::size_t M = 0;
    std::size_t N = 0;
    double alpha = 0.0;
    double r = 1.0;
    MeshKind mesh_kind = MeshKind::Uniform;
    double error_l2 = 0.0;
    double error_h1 = 0.0;
    std::optional<double> rate_l2;  // blank on the first row
    std::optional<double> rate_h1;
    double elapsed_seconds = 0.0;
};

struct RateTable {
    int id = 0;  // 1..4
    double alpha = 0.0;
    std::vector<RateRow> rows;
};

struct TableOptions {
    std::vector<std::size_t> sizes = {3, 5, 9, 17};
    std::size_t jobs = 1;  // rows solved concurrently
    SolverMode solver_mode = SolverMode::Direct;
};

// Max-over-levels errors of one manufactured run.
RateRow solve_manufactured(double alpha, std::size_t M, const TimeMesh& mesh,
                           SolverMode mode = SolverMode::Direct);

// Spatial study: uniform mesh with N fixed, rates against h = 1/(M-1).
RateTable table_space(double alpha, std::size_t N = 150, const TableOptions& options = {});
// Uniform time mesh with N = floor(M^{1/alpha}), rates against tau = 1/N.
RateTable table_time_uniform(double alpha, const TableOptions& options = {});
// Graded (kind Graded) or two-part (kind TwoPart) mesh with M = N, rates against 1/(M-1).
RateTable table_time_graded(double alpha, double r, MeshKind kind, const TableOptions& options = {});
// Table id 1..4 with the default parameters of each study.
RateTable make_table(int id, double alpha, const TableOptions& options = {});

std::size_t uniform_time_steps(std::size_t M, double alpha);

void write_csv_header(std::ostream& os);
void write_csv_rows(std::ostream& os, const RateTable& table);
void write_text(std::ostream& os, const RateTable& table);

struct CheckResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

// Tolerance checks for one table; tables 1, 3 and 4 also compare the last
// row against the reference magnitudes within a factor of two when known.
std::vector<CheckResult> check_table(const RateTable& table);

// Reference max-over-levels errors at M = 17: {L2, H1} for table 1,
// L2 for tables 3 and 4. Empty when the table/alpha pair has no reference.
std::optional<double> reference_error_l2(int id, double alpha);
std::optional<double> reference_error_h1(int id, double alpha);

// Time meshes exercised by the tables, paired with their alpha.
struct MeshCase {
    double alpha;
    TimeMesh mesh;
    std::string label;
};
std::vector<MeshCase> acceptance_time_meshes();

// Property suites shared by `verify` and the acceptance gate.
CheckResult check_manufactured_residual(const std::vector<double>& alphas = {0.4, 0.5, 0.6});
CheckResult check_weight_ordering(const std::vector<MeshCase>& cases);
CheckResult check_leading_bracket(const std::vector<MeshCase>& cases);
CheckResult check_constant_annihilation(const std::vector<MeshCase>& cases);
CheckResult check_linear_exactness(const std::vector<MeshCase>& cases);
// Slope of max_n t_{n-sigma}^alpha |D_N t^alpha - Gamma(1+alpha)| over N in {16, 32, 64, 128}.
CheckResult check_truncation_order(double alpha);
CheckResult check_positivity(std::size_t trials = 100, unsigned seed = 7);
CheckResult check_memory_constants(const std::vector<MeshCase>& cases);
// Slope of max_n quadrature_error_probe(t^alpha) over N in {16, 32, 64, 128}, r = 2/alpha.
CheckResult check_memory_order(double alpha);

// Fitted log-log slope (least squares) of err against N.
double fitted_order(const std::vector<std::size_t>& N, const std::vector<double>& err);

std::vector<CheckResult> property_suite();

}  // namespace fraccn
