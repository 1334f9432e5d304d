#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fmt/format.h>
#include <fmt/ostream.h>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "fraccn/benchmark.hpp"
#include "fraccn/errors.hpp"
#include "fraccn/kernels.hpp"
#include "fraccn/stepper.hpp"

namespace fs = std::filesystem;
using namespace fraccn;

namespace {

constexpr int kOk = 0;
constexpr int kNumericalFailure = 1;
constexpr int kConfigError = 2;

struct RunConfig {
    double alpha = 0.5;
    std::optional<double> sigma;  // alpha / 2 when unset
    double T = 1.0;
    std::size_t N = 32;
    std::size_t M = 17;
    std::optional<double> r;  // 2 / alpha when unset
    std::string mesh_kind = "two-part";
    double newton_tol = 1e-7;
    std::size_t newton_max_iter = 50;
    std::string solver_mode = "direct";
    std::string source_mode = "l2";
    std::string problem = "benchmark";
    std::string output_path = "fraccn_out";
    bool write_field = false;
};

std::string output_dir(const std::string& fallback) {
    if (const char* env = std::getenv("FRACCN_OUTPUT_DIR"); env && *env) return env;
    return fallback;
}

fs::path prepare_dir(const std::string& dir) {
    fs::path p(dir);
    fs::create_directories(p);
    return p;
}

std::ofstream open_out(const fs::path& path) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path.string() + " for writing");
    return os;
}

// Parameter-domain checks so bad input fails before any numerics run.
void check_config(const RunConfig& c) {
    check_fractional_order(c.alpha);
    if (c.sigma) check_sigma(*c.sigma);
    if (!(c.T > 0.0)) throw ParameterError("T must be positive");
    if (c.N < 1) throw ParameterError("N must be at least 1");
    if (c.M < 3) throw ParameterError("M must be at least 3");
    if (c.r && !(*c.r >= 1.0)) throw ParameterError("r must be >= 1");
    if (!(c.newton_tol > 0.0)) throw ParameterError("newton_tol must be positive");
    if (c.newton_max_iter < 1) throw ParameterError("newton_max_iter must be at least 1");
    parse_mesh_kind(c.mesh_kind);
    parse_solver_mode(c.solver_mode);
    if (c.source_mode != "l2" && c.source_mode != "nodal") throw ParameterError("source_mode must be l2 or nodal");
    if (c.problem != "benchmark" && c.problem != "decay") throw ParameterError("problem must be benchmark or decay");
}

TimeMesh build_time_mesh(const RunConfig& c) {
    const double r = c.r.value_or(2.0 / c.alpha);
    switch (parse_mesh_kind(c.mesh_kind)) {
        case MeshKind::Uniform: return TimeMesh::uniform(c.T, c.N);
        case MeshKind::Graded: return TimeMesh::graded(c.T, c.N, r);
        case MeshKind::TwoPart: return TimeMesh::two_part(c.T, c.N, r);
    }
    throw ParameterError("unknown mesh kind");
}

void write_metadata(std::ostream& os, const RunConfig& c, const TimeMesh& mesh) {
    fmt::print(os, "alpha = {}\nsigma = {}\nT = {}\nN = {}\nM = {}\nr = {}\nmesh_kind = {}\n", c.alpha,
               c.sigma.value_or(c.alpha / 2.0), c.T, c.N, c.M, mesh.grading(), to_string(mesh.kind()));
    fmt::print(os, "newton_tol = {}\nnewton_max_iter = {}\nsolver_mode = {}\nsource_mode = {}\nproblem = {}\n",
               c.newton_tol, c.newton_max_iter, c.solver_mode, c.source_mode, c.problem);
    fmt::print(os, "threads = {}\n", kernels::max_threads());
}

int cmd_solve(const RunConfig& c) {
    check_config(c);
    const double pi = std::numbers::pi;
    ProblemSpec spec;
    spec.alpha = c.alpha;
    spec.sigma = c.sigma.value_or(c.alpha / 2.0);
    spec.mesh = build_time_mesh(c);
    spec.space = std::make_shared<const FemSpace>(c.M, parse_solver_mode(c.solver_mode));
    spec.source_mode = c.source_mode == "nodal" ? SourceMode::NodalInterpolation : SourceMode::L2Projection;
    spec.newton = NewtonOptions{c.newton_tol, c.newton_max_iter};
    if (c.problem == "benchmark") {
        const ManufacturedProblem problem{c.alpha};
        spec.source = problem.source_function();
        spec.initial = SpatialField{[](double, double) { return 0.0; },
                                    [](double, double) { return Gradient2{0.0, 0.0}; }};
        spec.exact = problem.exact_field();
    } else {
        spec.source = [](double, double, double) { return 0.0; };
        spec.initial = SpatialField{
            [pi](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); },
            [pi](double x, double y) {
                return Gradient2{pi * std::cos(pi * x) * std::sin(pi * y), pi * std::sin(pi * x) * std::cos(pi * y)};
            }};
    }

    const RunResult result = run(spec);
    const fs::path dir = prepare_dir(output_dir(c.output_path));
    {
        std::ofstream os = open_out(dir / "diagnostics.csv");
        os << "n,t,norm_l2,norm_h1,weighted_norm,kirchhoff,source_l2,error_l2,error_h1\n";
        for (const LevelDiagnostics& d : result.report.levels) {
            fmt::print(os, "{},{:.17g},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e},{:.10e}\n", d.n, d.t,
                       d.norm_l2, d.norm_h1, d.weighted_norm, d.kirchhoff, d.source_l2, d.error_l2, d.error_h1);
        }
    }
    {
        std::ofstream os = open_out(dir / "run_meta.txt");
        write_metadata(os, c, spec.mesh);
        fmt::print(os, "newton_iterations = {}\nnewton_residual = {:.3e}\npicard_fallback = {}\n",
                   result.report.newton.iterations, result.report.newton.final_residual,
                   result.report.newton.picard_fallback);
    }
    if (c.write_field) {
        std::ofstream os = open_out(dir / "field.csv");
        const std::size_t last = result.history.size() - 1;
        std::optional<ScalarField> exact;
        if (spec.exact) exact = spec.exact->at(spec.mesh.node(last)).value;
        write_field_table(os, spec.space->mesh(), result.history.u(last), exact);
    }

    const RunReport& rep = result.report;
    fmt::print("levels {}  newton iterations {}  max weighted norm {:.6e}  {:.2f} s\n", rep.levels.size() - 1,
               rep.newton.iterations, rep.max_weighted_norm, rep.elapsed_seconds);
    if (spec.exact) fmt::print("max error L2 {:.6e}  H1 {:.6e}\n", rep.max_error_l2, rep.max_error_h1);
    fmt::print("wrote {}\n", (dir / "diagnostics.csv").string());
    return kOk;
}

int cmd_table(int id, const std::vector<double>& alphas, bool check, std::size_t jobs,
              const std::vector<std::size_t>& sizes, const std::string& out) {
    if (id < 1 || id > 4) throw ParameterError("--id must be 1, 2, 3 or 4");
    for (double a : alphas) check_fractional_order(a);
    for (std::size_t M : sizes) {
        if (M < 3) throw ParameterError("table sizes must be >= 3");
    }
    TableOptions options;
    options.jobs = std::max<std::size_t>(1, jobs);
    if (!sizes.empty()) options.sizes = sizes;

    const fs::path dir = prepare_dir(output_dir(out));
    const fs::path csv_path = dir / fmt::format("table{}.csv", id);
    std::ofstream csv = open_out(csv_path);
    write_csv_header(csv);
    bool all_ok = true;
    for (double alpha : alphas) {
        const RateTable table = make_table(id, alpha, options);
        write_csv_rows(csv, table);
        write_text(std::cout, table);
        if (check) {
            for (const CheckResult& r : check_table(table)) {
                fmt::print("{} {}: {}\n", r.passed ? "PASS" : "FAIL", r.name, r.detail);
                all_ok = all_ok && r.passed;
            }
        }
        std::cout << '\n';
    }
    fmt::print("wrote {}\n", csv_path.string());
    return all_ok ? kOk : kNumericalFailure;
}

int cmd_verify() {
    bool all_ok = true;
    for (const CheckResult& r : property_suite()) {
        fmt::print("{} {}: {}\n", r.passed ? "PASS" : "FAIL", r.name, r.detail);
        all_ok = all_ok && r.passed;
    }
    return all_ok ? kOk : kNumericalFailure;
}

// Subcommand-level config files are not read by CLI11, so `solve --config f`
// is expanded here: entries of f become --key=value arguments placed before
// the real ones, which therefore win under the take-last policy.
std::vector<std::string> expand_config(int argc, char** argv) {
    std::vector<std::string> args(argv + 1, argv + argc);
    if (args.empty() || args.front() != "solve") return args;
    std::string path;
    for (std::size_t i = 1; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) path = args[i + 1];
        if (args[i].starts_with("--config=")) path = args[i].substr(9);
    }
    if (path.empty()) return args;
    std::vector<std::string> from_file;
    for (const CLI::ConfigItem& item : CLI::ConfigINI().from_file(path)) {
        if (item.name == "++" || item.name == "--") continue;  // section markers
        if (!item.parents.empty() && !(item.parents.size() == 1 && item.parents.front() == "solve"))
            throw CLI::ConfigError("unexpected section in " + path);
        if (item.inputs.size() != 1) throw CLI::ConfigError("key " + item.name + " needs exactly one value");
        from_file.push_back("--" + item.name + "=" + item.inputs.front());
    }
    args.insert(args.begin() + 1, from_file.begin(), from_file.end());
    return args;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Linearized fractional Crank-Nicolson Galerkin solver for a Kirchhoff-type "
                 "time-fractional integro-differential equation"};
    app.require_subcommand(1);

    RunConfig cfg;
    CLI::App* solve = app.add_subcommand("solve", "Run one solve and write per-level diagnostics");
    std::string config_path;
    solve->add_option("--config", config_path, "Flat key = value file; command-line flags override it");
    solve->option_defaults()->multi_option_policy(CLI::MultiOptionPolicy::TakeLast);
    solve->add_option("--alpha", cfg.alpha, "Fractional order in (0, 1)");
    solve->add_option("--sigma", cfg.sigma, "Offset in [0, 1); defaults to alpha / 2");
    solve->add_option("--T", cfg.T, "Final time");
    solve->add_option("--N", cfg.N, "Time intervals");
    solve->add_option("--M", cfg.M, "Nodes per side of the square");
    solve->add_option("--r", cfg.r, "Grading exponent >= 1; defaults to 2 / alpha");
    solve->add_option("--mesh_kind", cfg.mesh_kind, "uniform, graded or two-part");
    solve->add_option("--newton_tol", cfg.newton_tol, "Newton residual tolerance");
    solve->add_option("--newton_max_iter", cfg.newton_max_iter, "Newton iteration cap");
    solve->add_option("--solver_mode", cfg.solver_mode, "direct or iterative");
    solve->add_option("--source_mode", cfg.source_mode, "l2 (projection) or nodal (interpolation)");
    solve->add_option("--problem", cfg.problem, "benchmark (manufactured) or decay (f = 0)");
    solve->add_option("--output_path", cfg.output_path, "Output directory (FRACCN_OUTPUT_DIR overrides)");
    solve->add_flag("--field", cfg.write_field, "Also write the final field as a node table");

    int table_id = 0;
    std::vector<double> alphas = {0.4, 0.6};
    bool check = false;
    std::size_t jobs = 1;
    std::vector<std::size_t> sizes;
    std::string table_out = "fraccn_out";
    CLI::App* table = app.add_subcommand("table", "Reproduce one convergence table");
    table->add_option("--id", table_id, "Table 1 (space), 2 (uniform time), 3 (graded), 4 (two-part)")->required();
    table->add_option("--alpha", alphas, "One or more fractional orders");
    table->add_flag("--check", check, "Exit nonzero if a tolerance check fails");
    table->add_option("--jobs", jobs, "Rows solved concurrently");
    table->add_option("--sizes", sizes, "Override the M list (default 3 5 9 17)");
    table->add_option("--output_path", table_out, "Output directory (FRACCN_OUTPUT_DIR overrides)");

    app.add_subcommand("verify", "Run the weight, quadrature and manufactured-solution property suites");

    try {
        std::vector<std::string> args = expand_config(argc, argv);
        std::reverse(args.begin(), args.end());  // CLI11 consumes from the back
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfigError;
    }

    try {
        if (solve->parsed()) return cmd_solve(cfg);
        if (table->parsed()) return cmd_table(table_id, alphas, check, jobs, sizes, table_out);
        return cmd_verify();
    } catch (const ParameterError& e) {
        std::cerr << "configuration error: " << e.what() << '\n';
        return kConfigError;
    } catch (const LevelFailure& e) {
        std::cerr << "numerical failure at level " << e.level() << ": " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return kNumericalFailure;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kNumericalFailure;
    }
}
