#include "plots.hpp"

#include "solution_csv.hpp"
#include "svg.hpp"

#include <psocp/basis.hpp>
#include <psocp/vv.hpp>

#include <cmath>
#include <fstream>

namespace psocp::app {

namespace {

const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b"};

void write(const std::filesystem::path& path, const Figure& fig,
           std::vector<std::filesystem::path>& written) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << render_svg(fig);
    if (!out) throw Error("failed writing " + path.string());
    written.push_back(path);
}

std::vector<double> to_std(const Eigen::VectorXd& v) { return {v.data(), v.data() + v.size()}; }

// Rebuilds the nodal trajectory from the table. The node count fixes the grid.
Trajectory table_trajectory(const SolutionTable& table, const OcpProblem& problem,
                            const std::vector<std::string>& cols) {
    const auto n = static_cast<Eigen::Index>(table.rows.size());
    Trajectory traj;
    traj.time = Eigen::Map<const Eigen::VectorXd>(table.column("t").data(), n);
    traj.states.resize(n, problem.nx);
    traj.algebraic.resize(n, problem.na);
    traj.controls.resize(n, problem.nu);
    int col = 1;
    auto fill = [&](Matrix& m) {
        for (Eigen::Index i = 0; i < m.cols(); ++i) {
            const auto v = table.column(cols[static_cast<size_t>(col++)]);
            m.col(i) = Eigen::Map<const Eigen::VectorXd>(v.data(), n);
        }
    };
    fill(traj.states);
    fill(traj.algebraic);
    fill(traj.controls);
    return traj;
}

}  // namespace

std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& csv,
                                              const std::filesystem::path& out_dir,
                                              const RunConfig& config) {
    const SolutionTable table = read_solution_csv(csv);
    const OcpProblem problem = config.build_problem();
    const auto cols = solution_columns(config.problem, problem);
    for (const auto& name : cols) {
        if (!table.has(name)) throw SchemaError("missing column '" + name + "'", name);
    }
    if (table.rows.size() < 3) {
        throw SchemaError("solution.csv needs at least 3 node rows", "t");
    }
    std::filesystem::create_directories(out_dir);

    const auto t = table.column("t");
    const Grid grid(static_cast<int>(table.rows.size()) - 1);
    const Trajectory traj = table_trajectory(table, problem, cols);
    const VvReport prop = verify_feasibility(traj, problem, grid, config.thresholds());
    const bool propagated = prop.propagation_error.empty() && prop.path_states.rows() > 0;

    std::vector<std::filesystem::path> written;
    auto path = [&](const char* name) { return out_dir / (std::string(name) + ".svg"); };

    if (config.problem == ProblemKind::Pendulum) {
        const PendulumParams p = config.effective_params();
        const auto x1 = table.column("x1");
        const auto x3 = table.column("x3");
        const auto u = table.column("u");
        const auto l1 = table.column("lam1");
        const auto l2 = table.column("lam2");
        const auto l3 = table.column("lam3");
        const auto l4 = table.column("lam4");

        write(path("phase"),
              {"State trajectory in the x1-x3 plane", "x1", "x3",
               {{"PS nodes", x1, x3, kPalette[0], true}, {"", x1, x3, kPalette[0]}}, true},
              written);
        write(path("control"), {"Control", "t", "u", {{"u", t, u, kPalette[0]}}}, written);

        std::vector<double> fine_t;
        for (int i = 0; i <= 400; ++i) fine_t.push_back(t.back() * i / 400.0);
        std::vector<double> fine1;
        std::vector<double> fine3;
        for (double s : fine_t) {
            fine1.push_back(p.L * std::sin(s + p.alpha));
            fine3.push_back(p.L * std::cos(s + p.alpha));
        }
        write(path("x1_target"),
              {"x1 and its target", "t", "x1",
               {{"x1", t, x1, kPalette[0]}, {"L sin(t + alpha)", fine_t, fine1, kPalette[1], false, true}}},
              written);
        write(path("x3_target"),
              {"x3 and its target", "t", "x3",
               {{"x3", t, x3, kPalette[0]}, {"L cos(t + alpha)", fine_t, fine3, kPalette[1], false, true}}},
              written);

        Figure overlay{"Propagated states against the PS solution", "x1", "x3", {}, true};
        Figure residual{"Length constraint along the propagated trajectory", "t",
                        "x1^2 + x3^2 - L^2", {}};
        if (propagated) {
            overlay.series.push_back(
                {"propagated", to_std(prop.path_states.col(0)), to_std(prop.path_states.col(2)),
                 kPalette[1]});
            residual.series.push_back(
                {"residual", prop.path_times, to_std(prop.path_trace.col(0)), kPalette[0]});
        }
        overlay.series.push_back({"PS nodes", x1, x3, kPalette[0], true});
        write(path("propagation"), overlay, written);
        write(path("path_residual"), residual, written);

        write(path("costates"),
              {"Costates",
               "t",
               "lambda",
               {{"lam1", t, l1, kPalette[0]},
                {"lam2", t, l2, kPalette[1]},
                {"lam3", t, l3, kPalette[2]},
                {"lam4", t, l4, kPalette[3]}}},
              written);

        std::vector<double> u_nc(t.size());
        std::vector<double> lhs(t.size());
        std::vector<double> rhs(t.size());
        for (size_t j = 0; j < t.size(); ++j) {
            u_nc[j] = (l4[j] * x1[j] - l2[j] * x3[j]) / (2.0 * p.c);
            lhs[j] = l2[j] * x1[j];
            rhs[j] = -l4[j] * x3[j];
        }
        write(path("stationarity_u"),
              {"Control stationarity",
               "t",
               "u",
               {{"u", t, u, kPalette[0]},
                {"(lam4 x1 - lam2 x3) / 2c", t, u_nc, kPalette[1], true}}},
              written);
        write(path("stationarity_x5"),
              {"Singular-arc stationarity",
               "t",
               "",
               {{"lam2 x1", t, lhs, kPalette[0]}, {"-lam4 x3", t, rhs, kPalette[1], true}}},
              written);
        return written;
    }

    Figure controls{"Control", "t", "u", {}};
    Figure states{"States", "t", "x", {}};
    Figure costates{"Costates", "t", "lambda", {}};
    Figure overlay{"Propagated states against the PS solution", "t", "x", {}};
    size_t col = 1;
    for (int i = 0; i < problem.nx; ++i, ++col) {
        const auto& name = cols[col];
        const char* color = kPalette[static_cast<size_t>(i) % 6];
        states.series.push_back({name, t, table.column(name), color});
        overlay.series.push_back({name + " nodes", t, table.column(name), color, true});
        if (propagated) {
            overlay.series.push_back({name + " propagated", prop.path_times,
                                      to_std(prop.path_states.col(i)), color});
        }
    }
    col += static_cast<size_t>(problem.na);
    for (int i = 0; i < problem.nu; ++i, ++col) {
        controls.series.push_back(
            {cols[col], t, table.column(cols[col]), kPalette[static_cast<size_t>(i) % 6]});
    }
    for (int i = 0; i < problem.nx; ++i, ++col) {
        costates.series.push_back(
            {cols[col], t, table.column(cols[col]), kPalette[static_cast<size_t>(i) % 6]});
    }
    write(path("control"), controls, written);
    write(path("states"), states, written);
    write(path("costates"), costates, written);
    write(path("propagation"), overlay, written);
    return written;
}

}  // namespace psocp::app
