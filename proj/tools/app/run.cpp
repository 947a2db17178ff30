#include "run.hpp"

#include "plots.hpp"
#include "solution_csv.hpp"

#include <psocp/errors.hpp>
#include <psocp/transcribe.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>

namespace psocp::app {

namespace {

using nlohmann::json;

// Non-finite metrics are written as null.
json number(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json vector_json(const Vector& v) {
    json out = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(number(v[i]));
    return out;
}

json parameters_json(const RunConfig& config) {
    if (config.problem == ProblemKind::Lq) {
        return {{"T", config.effective_horizon()}, {"target", config.lq_target}};
    }
    const PendulumParams p = config.effective_params();
    return {{"a", p.a}, {"c", p.c}, {"d", p.d},         {"g", p.g},
            {"L", p.L}, {"alpha", p.alpha}, {"T", p.T}};
}

json solver_config_json(const SolverConfig& s) {
    return {{"max_iter", s.max_iter},
            {"tol_stationarity", s.tol_stationarity},
            {"tol_feasibility", s.tol_feasibility},
            {"delta_x", s.delta_x},
            {"delta_c", s.delta_c},
            {"hessian", s.hessian == HessianMode::Bfgs ? "bfgs" : "fd"}};
}

json vv_json(const VvReport& r) {
    json checks = json::array();
    for (const auto& c : r.checks) {
        checks.push_back({{"name", c.name},
                          {"value", number(c.value)},
                          {"threshold", number(c.threshold)},
                          {"pass", c.pass}});
    }
    json out = {
        {"passed", r.passed()},
        {"checks", checks},
        {"thresholds",
         {{"state_deviation", r.thresholds.state_deviation},
          {"path_residual", r.thresholds.path_residual},
          {"nc_relative", r.thresholds.nc_relative},
          {"oracle_cost", r.thresholds.oracle_cost},
          {"oracle_trajectory", r.thresholds.oracle_trajectory},
          {"path_samples", r.thresholds.path_samples},
          {"integrator_rel_tol", r.thresholds.rel_tol},
          {"integrator_abs_tol", r.thresholds.abs_tol}}},
        {"feasibility",
         {{"max_state_deviation", number(r.max_state_deviation)},
          {"state_deviation", vector_json(r.state_deviation)},
          {"max_path_residual", number(r.max_path_residual)},
          {"propagation_error", r.propagation_error}}},
    };
    if (r.nc) {
        const NcReport& nc = *r.nc;
        out["necessary_conditions"] = {
            {"stationarity_u", number(nc.stationarity_u)},
            {"stationarity_x5", number(nc.stationarity_x5)},
            {"adjoint", vector_json(nc.adjoint)},
            {"terminal_costates", vector_json(nc.terminal_costates)},
            {"complementarity", nc.complementarity},
            {"costate_scale", number(nc.costate_scale)},
            {"control_scale", number(nc.control_scale)},
            {"algebraic_scale", number(nc.algebraic_scale)},
            {"hamiltonian", vector_json(nc.hamiltonian)},
        };
    }
    if (r.oracle_cost || !r.oracle_error.empty()) {
        out["oracle"] = {
            {"cost", r.oracle_cost ? number(*r.oracle_cost) : json(nullptr)},
            {"cost_gap", r.oracle_cost_gap ? number(*r.oracle_cost_gap) : json(nullptr)},
            {"trajectory_gap",
             r.oracle_trajectory_gap ? number(*r.oracle_trajectory_gap) : json(nullptr)},
            {"error", r.oracle_error},
        };
    }
    return out;
}

}  // namespace

json report_json(const RunConfig& config, const NlpSolution& solution, const VvReport* report,
                 double seconds, int exit_code) {
    json out = {
        {"problem", std::string(to_string(config.problem))},
        {"parameters", parameters_json(config)},
        {"nodes", config.nodes},
        {"seed", config.seed},
        {"objective", number(solution.objective)},
        {"solver",
         {{"status", std::string(to_string(solution.status))},
          {"iterations", solution.iterations},
          {"objective", number(solution.objective)},
          {"infeasibility", number(solution.infeasibility)},
          {"stationarity", number(solution.stationarity)},
          {"config", solver_config_json(config.solver)}}},
        {"wall_clock_seconds", seconds},
        {"exit_code", exit_code},
    };
    out["vv"] = report ? vv_json(*report) : json(nullptr);
    return out;
}

RunResult run(const RunConfig& config) {
    RunResult result;
    try {
        config.validate();
        std::filesystem::create_directories(config.out_dir);
    } catch (const std::exception& e) {
        std::cerr << "psocp: " << e.what() << '\n';
        result.exit_code = kExitConfig;
        return result;
    }

    const auto start = std::chrono::steady_clock::now();
    const OcpProblem problem = config.build_problem();
    const auto nlp = transcribe(problem, Grid(config.nodes));
    SolverConfig solver = config.solver;
    solver.verbose = config.verbose;
    result.solution = solve(*nlp, nlp->default_start(), solver);

    const SolveStatus status = result.solution.status;
    const bool hard_failure = status == SolveStatus::LineSearchFailure ||
                              status == SolveStatus::SingularKkt ||
                              status == SolveStatus::EvaluationFailure;
    DualTrajectory duals = extract_duals(result.solution, nlp->grid(), problem);

    VvConfig vv;
    vv.thresholds = config.thresholds();
    if (config.problem == ProblemKind::Pendulum) vv.pendulum = config.effective_params();
    result.report = full_report(result.solution, duals, *nlp, vv);
    if (config.problem == ProblemKind::Lq) {
        // Closed form: constant control b/T with cost b^2/T.
        const double exact = config.lq_target * config.lq_target / config.effective_horizon();
        const double gap = std::abs(result.solution.objective - exact);
        result.report->checks.push_back({"analytic_cost", gap, 1e-8, std::isfinite(gap) && gap <= 1e-8});
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

    if (hard_failure) {
        result.exit_code = kExitSolveFailed;
    } else if (status != SolveStatus::Success || !result.report->passed()) {
        result.exit_code = kExitVerificationFailed;
    } else {
        result.exit_code = kExitOk;
    }

    try {
        write_solution_csv(config.out_dir / "solution.csv", config.problem, problem,
                           nlp->trajectory(result.solution.primal), duals);
        result.json = report_json(config, result.solution, &*result.report, result.seconds,
                                  result.exit_code);
        std::ofstream out(config.out_dir / "report.json", std::ios::binary);
        out << result.json.dump(2) << '\n';
        if (!out) throw Error("failed writing report.json");
        if (config.plots) {
            (void)emit_plots(config.out_dir / "solution.csv", config.out_dir / "figures", config);
        }
    } catch (const std::exception& e) {
        std::cerr << "psocp: " << e.what() << '\n';
        result.exit_code = kExitConfig;
    }
    return result;
}

}  // namespace psocp::app
