#include "psocp/vv.hpp"

#include "psocp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace psocp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

Check make_check(std::string name, double value, double threshold) {
    const bool pass = std::isfinite(value) && value <= threshold;
    return {std::move(name), value, threshold, pass};
}

}  // namespace

void Thresholds::validate() const {
    if (!(state_deviation > 0.0) || !(path_residual > 0.0) || !(nc_relative > 0.0) ||
        !(oracle_cost > 0.0) || !(oracle_trajectory > 0.0) || !(rel_tol > 0.0) ||
        !(abs_tol > 0.0)) {
        throw ConfigurationError("verification thresholds must be positive");
    }
    if (path_samples < 2) throw ConfigurationError("path_samples must be at least 2");
}

bool VvReport::passed() const {
    return !checks.empty() &&
           std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

const Check* VvReport::find(const std::string& name) const {
    for (const auto& c : checks) {
        if (c.name == name) return &c;
    }
    return nullptr;
}

VvReport verify_feasibility(const Trajectory& traj, const OcpProblem& problem, const Grid& grid,
                            const Thresholds& thresholds) {
    thresholds.validate();
    VvReport report;
    report.thresholds = thresholds;
    const double T = problem.horizon;
    report.state_deviation = Vector::Constant(problem.nx, kInf);
    report.max_state_deviation = kInf;
    report.max_path_residual = problem.nh > 0 ? kInf : 0.0;

    try {
        const ControlSignal signal(traj, grid, T);
        IvpSetup setup;
        setup.rhs = [&](double t, const Vector& x) {
            const ControlSample s = signal(std::min(t, T));
            return problem.dynamics(x, s.z, s.u, t);
        };
        setup.t0 = 0.0;
        setup.tf = T;
        setup.x0 = problem.initial_state;
        setup.rel_tol = thresholds.rel_tol;
        setup.abs_tol = thresholds.abs_tol;

        // Node times and uniform path samples share one propagation.
        std::vector<double> times(traj.time.data(), traj.time.data() + traj.time.size());
        const int m = thresholds.path_samples;
        report.path_times.resize(static_cast<size_t>(m));
        for (int i = 0; i < m; ++i) {
            report.path_times[static_cast<size_t>(i)] = T * i / (m - 1);
        }
        times.insert(times.end(), report.path_times.begin(), report.path_times.end());
        std::sort(times.begin(), times.end());
        times.front() = std::max(times.front(), 0.0);
        times.back() = std::min(times.back(), T);
        setup.sample_times = times;
        const IvpResult run = propagate(setup);

        auto sample_at = [&](double t) -> Vector {
            const auto it = std::lower_bound(run.times.begin(), run.times.end(), t);
            return run.states.row(it - run.times.begin()).transpose();
        };

        report.propagated.resize(traj.states.rows(), problem.nx);
        for (Eigen::Index j = 0; j < traj.states.rows(); ++j) {
            report.propagated.row(j) = sample_at(traj.time[j]).transpose();
        }
        report.state_deviation =
            (report.propagated - traj.states).cwiseAbs().colwise().maxCoeff().transpose();
        report.max_state_deviation = report.state_deviation.maxCoeff();

        report.path_states.resize(m, problem.nx);
        report.path_trace.resize(m, problem.nh);
        for (int i = 0; i < m; ++i) {
            const double t = report.path_times[static_cast<size_t>(i)];
            const Vector x = sample_at(t);
            report.path_states.row(i) = x.transpose();
            if (problem.nh > 0) {
                const ControlSample s = signal(t);
                report.path_trace.row(i) = problem.path(x, s.z, s.u, t).transpose();
            }
        }
        if (problem.nh > 0) report.max_path_residual = report.path_trace.cwiseAbs().maxCoeff();
        if (!std::isfinite(report.max_state_deviation)) report.max_state_deviation = kInf;
        if (!std::isfinite(report.max_path_residual)) report.max_path_residual = kInf;
    } catch (const Error& e) {
        report.propagation_error = e.what();
    }

    report.checks.push_back(
        make_check("state_deviation", report.max_state_deviation, thresholds.state_deviation));
    if (problem.nh > 0) {
        report.checks.push_back(
            make_check("path_residual", report.max_path_residual, thresholds.path_residual));
    }
    return report;
}

OracleResult run_oracle(const PendulumParams& p, const Grid& grid, const SolverConfig& cfg) {
    const auto nlp = transcribe(make_reduced_pendulum_problem(p), grid);
    OracleResult out;
    out.solution = solve(*nlp, nlp->default_start(), cfg);
    if (!out.solution.ok()) {
        throw Error("oracle: reduced pendulum solve ended with status " +
                    std::string(to_string(out.solution.status)));
    }
    out.cost = out.solution.objective;
    out.reduced = nlp->trajectory(out.solution.primal);

    const auto nodes = out.reduced.states.rows();
    out.lifted.time = out.reduced.time;
    out.lifted.states.resize(nodes, 4);
    out.lifted.algebraic.resize(nodes, 1);
    out.lifted.controls = out.reduced.controls;
    for (Eigen::Index j = 0; j < nodes; ++j) {
        const auto lift = lift_reduced_state(out.reduced.states(j, 0), out.reduced.states(j, 1), p);
        out.lifted.states.row(j) = lift.x.transpose();
        out.lifted.algebraic(j, 0) = lift.x5;
    }
    return out;
}

VvReport full_report(const NlpSolution& solution, const DualTrajectory& duals,
                     const CollocationNlp& nlp, const VvConfig& cfg) {
    const OcpProblem& problem = nlp.problem();
    const Grid& grid = nlp.grid();
    const Trajectory traj = nlp.trajectory(solution.primal);
    VvReport report = verify_feasibility(traj, problem, grid, cfg.thresholds);
    const double r = cfg.thresholds.nc_relative;

    // Necessary conditions. Non-finite duals from a failed solve leave every
    // check failed rather than aborting the report.
    try {
        NcReport nc = cfg.pendulum ? pendulum_nc_report(traj, duals, grid, *cfg.pendulum)
                                   : generic_nc_report(problem, traj, duals, grid);

        // Transversality applies to the states left free at the final time.
        std::vector<bool> fixed(static_cast<size_t>(problem.nx), false);
        for (const auto& tc : problem.terminal) fixed[static_cast<size_t>(tc.channel)] = true;
        double terminal = 0.0;
        for (int i = 0; i < problem.nx; ++i) {
            if (!fixed[static_cast<size_t>(i)]) {
                terminal = std::max(terminal, nc.terminal_costates[i]);
            }
        }
        report.checks.push_back(make_check("transversality", terminal, r * nc.costate_scale));
        if (problem.nu > 0) {
            report.checks.push_back(
                make_check("stationarity_u", nc.stationarity_u, r * nc.control_scale));
        }
        if (problem.na > 0) {
            report.checks.push_back(
                make_check("stationarity_x5", nc.stationarity_x5, r * nc.algebraic_scale));
        }
        const double adjoint = nc.adjoint.size() ? nc.adjoint.maxCoeff() : 0.0;
        report.checks.push_back(make_check("adjoint", adjoint, r * nc.costate_scale));
        report.checks.push_back(
            make_check("complementarity", nc.complementarity ? 0.0 : 1.0, 0.0));
        report.nc = std::move(nc);
    } catch (const Error&) {
        for (const char* name : {"transversality", "stationarity_u", "adjoint"}) {
            report.checks.push_back({name, kInf, 0.0, false});
        }
    }

    if (cfg.pendulum) {
        try {
            const OracleResult oracle = run_oracle(*cfg.pendulum, grid, cfg.oracle_solver);
            report.oracle_cost = oracle.cost;
            const double denom = std::abs(oracle.cost) > 0.0 ? std::abs(oracle.cost) : 1.0;
            report.oracle_cost_gap = std::abs(solution.objective - oracle.cost) / denom;
            const double gap1 =
                (traj.states.col(0) - oracle.lifted.states.col(0)).cwiseAbs().maxCoeff();
            const double gap3 =
                (traj.states.col(2) - oracle.lifted.states.col(2)).cwiseAbs().maxCoeff();
            report.oracle_trajectory_gap = std::max(gap1, gap3);
        } catch (const Error& e) {
            report.oracle_error = e.what();
        }
        report.checks.push_back(make_check("oracle_cost", report.oracle_cost_gap.value_or(kInf),
                                           cfg.thresholds.oracle_cost));
        report.checks.push_back(make_check("oracle_trajectory",
                                           report.oracle_trajectory_gap.value_or(kInf),
                                           cfg.thresholds.oracle_trajectory));
    }
    return report;
}

}  // namespace psocp
