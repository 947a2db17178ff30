#pragma once

#include "psocp/basis.hpp"
#include "psocp/covector.hpp"
#include "psocp/integrate.hpp"
#include "psocp/ocp.hpp"
#include "psocp/sqp.hpp"
#include "psocp/transcribe.hpp"

#include <optional>
#include <string>
#include <vector>

namespace psocp {

struct Thresholds {
    double state_deviation = 1e-4;    // absolute, problem units
    double path_residual = 1e-4;      // absolute, problem units
    double nc_relative = 1e-2;        // relative to the matching scale in NcReport
    double oracle_cost = 1e-3;        // relative cost gap
    double oracle_trajectory = 1e-3;  // absolute x1, x3 gap at nodes
    int path_samples = 200;
    double rel_tol = 1e-8;  // propagation
    double abs_tol = 1e-10;

    void validate() const;
};

struct Check {
    std::string name;
    double value;
    double threshold;
    bool pass;
};

struct OracleResult {
    NlpSolution solution;
    double cost = 0.0;
    Trajectory reduced;  // phi, phi' and u
    Trajectory lifted;   // x1..x4, x5 and u
};

struct VvReport {
    // Propagation against the collocated states.
    Vector state_deviation;  // per channel, at node times
    double max_state_deviation = 0.0;
    double max_path_residual = 0.0;
    Matrix propagated;  // states at node times
    std::vector<double> path_times;  // uniform samples on [0, T]
    Matrix path_states;              // propagated states at path_times
    Matrix path_trace;               // h along the propagated trajectory
    std::string propagation_error;

    std::optional<NcReport> nc;
    std::optional<double> oracle_cost;
    std::optional<double> oracle_cost_gap;
    std::optional<double> oracle_trajectory_gap;
    std::string oracle_error;

    Thresholds thresholds;
    std::vector<Check> checks;

    [[nodiscard]] bool passed() const;
    [[nodiscard]] const Check* find(const std::string& name) const;
};

/// Propagates x' = f(x, z(t), u(t), t) from the problem's initial state with
/// the interpolated control and algebraic signals. Records the state deviation
/// at the node times and the path residual at `path_samples` uniform times.
/// A propagation failure becomes a failed check.
[[nodiscard]] VvReport verify_feasibility(const Trajectory& traj, const OcpProblem& problem,
                                          const Grid& grid, const Thresholds& thresholds = {});

/// Solves the angle form of the pendulum on `grid` from its cold start and
/// lifts the result to Cartesian coordinates. Throws Error tagged "oracle" when
/// the solve does not succeed.
[[nodiscard]] OracleResult run_oracle(const PendulumParams& p, const Grid& grid,
                                      const SolverConfig& cfg = {});

struct VvConfig {
    Thresholds thresholds;
    std::optional<PendulumParams> pendulum;  // enables the pendulum checks and the oracle
    SolverConfig oracle_solver;
};

/// Feasibility, necessary conditions and, for the pendulum, the oracle.
[[nodiscard]] VvReport full_report(const NlpSolution& solution, const DualTrajectory& duals,
                                   const CollocationNlp& nlp, const VvConfig& cfg);

}  // namespace psocp
