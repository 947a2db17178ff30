#pragma once

#include "psocp/basis.hpp"
#include "psocp/ocp.hpp"
#include "psocp/sqp.hpp"
#include "psocp/transcribe.hpp"

#include <vector>

namespace psocp {

/// Costates and path covectors at the collocation nodes. Row j holds node j.
struct DualTrajectory {
    Matrix costates;        // (N+1) x nx
    Matrix path_covectors;  // (N+1) x nh
    Vector boundary;        // initial-state rows, then terminal rows
};

/// Covector mapping for the LGL transcription with Lagrangian f + lambda^T c:
///   lambda_j = -nu_j / w_j,   mu_j = 2 eta_j / (T w_j)
/// where nu_j and eta_j are the defect and path multipliers at node j. The sign
/// is the one that gives lambda = -2b/T on min int u^2, x' = u, x(T) = b.
/// Throws MappingError when the solution does not match the grid and problem.
[[nodiscard]] DualTrajectory extract_duals(const NlpSolution& sol, const Grid& grid,
                                           const OcpProblem& problem);

/// l + lambda^T f + mu^T h at one point.
[[nodiscard]] double hamiltonian(const OcpProblem& problem, const Vector& x, const Vector& z,
                                 const Vector& u, double t, const Vector& lambda,
                                 const Vector& mu);

/// Pendulum Hamiltonian with lambda in R^4 and scalar mu.
[[nodiscard]] double hamiltonian(const Vector4& x, double x5, double u, const Vector4& lambda,
                                 double mu, double t, const PendulumParams& p);

/// Gradient of the Hamiltonian with respect to [x; z; u] at every node,
/// (N+1) x (nx+na+nu).
[[nodiscard]] Matrix hamiltonian_gradient(const OcpProblem& problem, const Trajectory& traj,
                                          const DualTrajectory& duals);

/// Hamiltonian along the nodes.
[[nodiscard]] Vector hamiltonian_trace(const OcpProblem& problem, const Trajectory& traj,
                                       const DualTrajectory& duals);

/// u_j - (lambda4 x1 - lambda2 x3) / (2c).
[[nodiscard]] Vector residual_stationarity_u(const Trajectory& traj, const DualTrajectory& duals,
                                             const PendulumParams& p);

/// lambda2 x1 + lambda4 x3.
[[nodiscard]] Vector residual_stationarity_x5(const Trajectory& traj,
                                              const DualTrajectory& duals);

/// (2/T) D lambda + dH/dx at every node, (N+1) x nx. The pendulum overload
/// writes out the adjoint right-hand sides; the generic one differentiates the
/// problem functions.
[[nodiscard]] Matrix residual_adjoint(const Trajectory& traj, const DualTrajectory& duals,
                                      const Grid& grid, const PendulumParams& p);
[[nodiscard]] Matrix residual_adjoint(const OcpProblem& problem, const Trajectory& traj,
                                      const DualTrajectory& duals, const Grid& grid);

struct TransversalityCheck {
    Vector norms;  // |lambda_i(T)|
    double tol;
    bool pass;
};

[[nodiscard]] TransversalityCheck check_transversality(const DualTrajectory& duals, double tol);

/// Per-node sign conditions on mu for bounds lower <= h <= upper. A channel is
/// at a bound when within `tol` of it; equality channels always pass.
[[nodiscard]] std::vector<bool> check_complementarity(const Matrix& h, const Matrix& mu,
                                                      const Vector& lower, const Vector& upper,
                                                      double tol);

/// Summary of the necessary-condition checks. The adjoint maximum is taken over
/// interior nodes: at both ends the discrete adjoint carries boundary terms
/// from summation by parts. The stationarity maxima cover all nodes.
struct NcReport {
    double stationarity_u = 0.0;   // max |r_u| over nodes
    double stationarity_x5 = 0.0;  // max |r_x5| over nodes (max |dH/dz| generically)
    Vector adjoint;                // per-state max residual over interior nodes
    Vector terminal_costates;      // |lambda_i(T)|
    bool complementarity = true;
    Vector hamiltonian;  // along the nodes

    double costate_scale = 0.0;    // max_t ||lambda(t)||_inf
    double control_scale = 0.0;    // pendulum: max_j |u_j|; generic: max |dl/du|
    double algebraic_scale = 0.0;  // pendulum: max_j |lambda2 x1|; generic: max |dl/dz|
};

/// Evaluates every necessary condition for a pendulum solution.
[[nodiscard]] NcReport pendulum_nc_report(const Trajectory& traj, const DualTrajectory& duals,
                                          const Grid& grid, const PendulumParams& p);

/// Problem-generic variant: stationarity residuals are max |dH/du| and
/// max |dH/dz| over nodes.
[[nodiscard]] NcReport generic_nc_report(const OcpProblem& problem, const Trajectory& traj,
                                         const DualTrajectory& duals, const Grid& grid);

}  // namespace psocp
