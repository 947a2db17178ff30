#pragma once

#include "psocp/nlp.hpp"

#include <Eigen/Dense>

#include <string_view>
#include <vector>

namespace psocp {

enum class HessianMode {
    Bfgs,              // block-wise damped BFGS
    FiniteDifference,  // differences of the Lagrangian gradient, inertia-corrected
};

struct SolverConfig {
    int max_iter = 500;
    double tol_stationarity = 1e-8;  // inf-norm of the Lagrangian gradient
    double tol_feasibility = 1e-9;   // inf-norm of the constraints
    double delta_x = 1e-8;           // primal regularisation floor
    double delta_c = 1e-8;           // dual regularisation
    double penalty_growth = 2.0;
    double backtrack = 0.5;
    double min_step = 1e-12;
    HessianMode hessian = HessianMode::FiniteDifference;
    bool verbose = false;

    /// Throws ConfigurationError on non-positive tolerances or max_iter < 1.
    void validate() const;
};

enum class SolveStatus { Success, MaxIterations, LineSearchFailure, SingularKkt, EvaluationFailure };

[[nodiscard]] std::string_view to_string(SolveStatus status);

struct IterationRecord {
    int iteration;
    double objective;
    double infeasibility;  // ||c||_inf before the step
    double stationarity;   // ||grad L||_inf before the step
    double step_length;
    double penalty;
    double merit_before;  // l1 merit at the accepted step's penalty
    double merit_after;
};

/// Result of an SQP solve. Multipliers follow L = f + lambda^T c and are ordered
/// like the NLP's constraint rows.
struct NlpSolution {
    Eigen::VectorXd primal;
    Eigen::VectorXd multipliers;
    double objective = 0.0;
    double infeasibility = 0.0;
    double stationarity = 0.0;
    int iterations = 0;
    SolveStatus status = SolveStatus::MaxIterations;
    std::vector<IterationRecord> history;

    [[nodiscard]] bool ok() const noexcept { return status == SolveStatus::Success; }
};

struct KktStep {
    Eigen::VectorXd step;
    Eigen::VectorXd multipliers;
    double delta_x;
    double delta_c;
};

/// Factorised regularised saddle-point matrix
///   [ H + dx I   A^T   ]
///   [ A         -dc I  ]
/// Regularisation is escalated by x10 up to 1e-2 until the LU solve reproduces
/// its right-hand side to 1e-10 relative; beyond that SingularKktError is thrown.
class KktSystem {
public:
    KktSystem(const Eigen::MatrixXd& hessian, const Eigen::MatrixXd& jacobian, double delta_x,
              double delta_c);

    /// Solves for (p, y) with (H + dx I) p + A^T y = -g and A p - dc y = -c.
    [[nodiscard]] KktStep solve(const Eigen::VectorXd& gradient,
                                const Eigen::VectorXd& constraints) const;

    [[nodiscard]] double delta_x() const noexcept { return delta_x_; }
    [[nodiscard]] double delta_c() const noexcept { return delta_c_; }

private:
    [[nodiscard]] bool factor_and_check();
    [[nodiscard]] bool solve_checked(const Eigen::VectorXd& rhs, Eigen::VectorXd& out) const;

    Eigen::MatrixXd hessian_;
    Eigen::MatrixXd jacobian_;
    double delta_x_;
    double delta_c_;
    Eigen::MatrixXd kkt_;
    Eigen::PartialPivLU<Eigen::MatrixXd> lu_;
};

/// One regularised KKT solve. See KktSystem.
[[nodiscard]] KktStep kkt_solve(const Eigen::MatrixXd& hessian, const Eigen::MatrixXd& jacobian,
                                const Eigen::VectorXd& gradient,
                                const Eigen::VectorXd& constraints, double delta_x,
                                double delta_c);

/// Dense SQP with l1-merit backtracking and a second-order correction on
/// rejected full steps. When only short steps pass the line search the primal
/// regularisation is raised and the step recomputed. Never throws for numerical failure; the
/// outcome is reported in `status` together with the best iterate seen: the
/// least stationary feasible one, or failing that the least infeasible.
[[nodiscard]] NlpSolution solve(const NlpProblem& nlp, const Eigen::VectorXd& start,
                                const SolverConfig& cfg = {});

}  // namespace psocp
