#pragma once

#include <Eigen/Dense>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace psocp {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

/// Pointwise problem function signature: (x, z, u, t) where z holds the
/// algebraic variables.
template <typename Result>
using PointFunction =
    std::function<Result(const Vector& x, const Vector& z, const Vector& u, double t)>;

/// Fixed value for one state channel at the final time.
struct TerminalCondition {
    int channel;
    double value;
};

/// Fixed-horizon optimal control problem with algebraic variables and path
/// constraints h^L <= h(x, z, u, t) <= h^U.
///
/// Derivative callbacks are optional. When present they return derivatives with
/// respect to the stacked point [x; z; u]; otherwise the transcription falls
/// back to central finite differences.
struct OcpProblem {
    std::string name;
    int nx = 0;
    int na = 0;
    int nu = 0;
    int nh = 0;
    double horizon = 1.0;

    PointFunction<Vector> dynamics;
    PointFunction<Vector> path;
    PointFunction<double> running_cost;
    Vector path_lower;
    Vector path_upper;
    Vector initial_state;
    std::vector<TerminalCondition> terminal;

    PointFunction<Matrix> dynamics_jacobian;  // nx x (nx+na+nu)
    PointFunction<Matrix> path_jacobian;      // nh x (nx+na+nu)
    PointFunction<Vector> cost_gradient;      // nx+na+nu

    [[nodiscard]] int point_width() const noexcept { return nx + na + nu; }

    /// Checks dimensions, bounds ordering and that the initial state satisfies
    /// the equality path constraints at t = 0. Throws ConfigurationError.
    void validate() const;
};

/// Point derivatives with respect to [x; z; u]: the problem's callback when
/// present, central differences with step max(1e-6, 1e-6|v|) otherwise.
[[nodiscard]] Matrix eval_dynamics_jacobian(const OcpProblem& problem, const Vector& x,
                                            const Vector& z, const Vector& u, double t);
[[nodiscard]] Matrix eval_path_jacobian(const OcpProblem& problem, const Vector& x,
                                        const Vector& z, const Vector& u, double t);
[[nodiscard]] Vector eval_cost_gradient(const OcpProblem& problem, const Vector& x,
                                        const Vector& z, const Vector& u, double t);

/// Parameters of the pendulum tracking problem. alpha is the phase lead of the
/// tracked circle and defaults to 0.
struct PendulumParams {
    double a = 0.5;
    double c = 1.0;
    double d = 100.0;
    double g = 4.0;
    double L = 2.0;
    double alpha = 0.0;
    double T = 2.2;

    /// Throws ConfigurationError unless L > 0, c > 0, d >= 0, T > 0.
    void validate() const;
};

using Vector4 = Eigen::Vector4d;

/// Cartesian pendulum dynamics in first-order form, x5 being the constraint
/// force multiplier. Throws EvaluationError on non-finite input.
[[nodiscard]] Vector4 pendulum_dynamics(const Vector4& x, double x5, double u, double t,
                                        const PendulumParams& p);

/// Length constraint x1^2 + x3^2 - L^2.
[[nodiscard]] double pendulum_path(const Vector4& x, const PendulumParams& p);

/// c u^2 + d (x1 - L sin(t+alpha))^2 + d (x3 - L cos(t+alpha))^2.
[[nodiscard]] double pendulum_cost(const Vector4& x, double u, double t,
                                   const PendulumParams& p);

/// The x5 that makes the second derivative of the length constraint vanish,
/// (x2^2 + x4^2 - g x3) / L^2. Requires the state to satisfy the constraint and
/// its first derivative to 1e-9, else InconsistentStateError.
[[nodiscard]] double consistent_multiplier(const Vector4& x, const PendulumParams& p);

struct ReducedPendulumEval {
    double phi_ddot;
    double running_cost;
};

/// Angle form of the pendulum with x1 = L sin(phi), x3 = L cos(phi):
///   phi'' = -a phi' + u + (g/L) sin(phi)
///   cost  = c u^2 + 2 d L^2 (1 - cos(phi - t - alpha))
[[nodiscard]] ReducedPendulumEval reduced_pendulum(double phi, double phi_dot, double u,
                                                   double t, const PendulumParams& p);

/// Cartesian lift of an angle state: returns (x1..x4) and x5 = phi'^2 - (g/L) cos(phi).
struct LiftedPendulumState {
    Vector4 x;
    double x5;
};
[[nodiscard]] LiftedPendulumState lift_reduced_state(double phi, double phi_dot,
                                                     const PendulumParams& p);

/// Index-3 pendulum tracking problem: nx=4, na=1 (x5), nu=1, one equality path
/// constraint, x(0) = (0, 0, L, 0). Supplies analytic derivatives.
[[nodiscard]] OcpProblem make_pendulum_problem(const PendulumParams& p);

/// Minimal-coordinate pendulum: state (phi, phi'), control u, phi(0)=phi'(0)=0,
/// no path constraints. Supplies analytic derivatives.
[[nodiscard]] OcpProblem make_reduced_pendulum_problem(const PendulumParams& p);

/// x' = u, minimise the integral of u^2 on [0, horizon], x(0) = 0, x(horizon) = target.
[[nodiscard]] OcpProblem make_lq_problem(double horizon = 1.0, double target = 1.0);

}  // namespace psocp
