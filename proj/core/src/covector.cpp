#include "psocp/covector.hpp"

#include "psocp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace psocp {

namespace {

Vector row_vector(const Matrix& m, int row) { return m.row(row).transpose(); }

void require_pendulum_shape(const Trajectory& traj, const DualTrajectory& duals) {
    const auto n = traj.states.rows();
    if (traj.states.cols() != 4 || traj.algebraic.cols() != 1 || traj.controls.cols() != 1 ||
        duals.costates.rows() != n || duals.costates.cols() != 4 ||
        duals.path_covectors.rows() != n || duals.path_covectors.cols() != 1) {
        throw MappingError("trajectory and duals do not have the pendulum shape");
    }
}

double interior_max(const Vector& v) {
    if (v.size() <= 2) return 0.0;
    return v.segment(1, v.size() - 2).cwiseAbs().maxCoeff();
}

Vector interior_column_max(const Matrix& m) {
    Vector out = Vector::Zero(m.cols());
    for (Eigen::Index i = 0; i < m.cols(); ++i) out[i] = interior_max(m.col(i));
    return out;
}

double abs_max(const Vector& v) { return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff(); }

}  // namespace

DualTrajectory extract_duals(const NlpSolution& sol, const Grid& grid, const OcpProblem& problem) {
    const int nodes = grid.size();
    const int n_vars = nodes * problem.point_width();
    const int n_defect = nodes * problem.nx;
    const int n_path = nodes * problem.nh;
    const int n_boundary = problem.nx + static_cast<int>(problem.terminal.size());
    if (sol.primal.size() != n_vars ||
        sol.multipliers.size() != n_defect + n_path + n_boundary) {
        throw MappingError("solution of size " + std::to_string(sol.primal.size()) + "/" +
                           std::to_string(sol.multipliers.size()) +
                           " does not match the layout of problem '" + problem.name + "'");
    }
    const auto w = grid.weights();
    const double T = problem.horizon;
    DualTrajectory out;
    out.costates.resize(nodes, problem.nx);
    out.path_covectors.resize(nodes, problem.nh);
    for (int j = 0; j < nodes; ++j) {
        const double wj = w[static_cast<size_t>(j)];
        for (int i = 0; i < problem.nx; ++i) {
            out.costates(j, i) = -sol.multipliers[j * problem.nx + i] / wj;
        }
        for (int k = 0; k < problem.nh; ++k) {
            out.path_covectors(j, k) =
                2.0 * sol.multipliers[n_defect + j * problem.nh + k] / (T * wj);
        }
    }
    out.boundary = sol.multipliers.tail(n_boundary);
    return out;
}

double hamiltonian(const OcpProblem& problem, const Vector& x, const Vector& z, const Vector& u,
                   double t, const Vector& lambda, const Vector& mu) {
    double h = problem.running_cost(x, z, u, t) + lambda.dot(problem.dynamics(x, z, u, t));
    if (problem.nh > 0) h += mu.dot(problem.path(x, z, u, t));
    return h;
}

double hamiltonian(const Vector4& x, double x5, double u, const Vector4& lambda, double mu,
                   double t, const PendulumParams& p) {
    return pendulum_cost(x, u, t, p) + lambda.dot(pendulum_dynamics(x, x5, u, t, p)) +
           mu * pendulum_path(x, p);
}

Matrix hamiltonian_gradient(const OcpProblem& problem, const Trajectory& traj,
                            const DualTrajectory& duals) {
    const auto nodes = traj.states.rows();
    Matrix out(nodes, problem.point_width());
    for (Eigen::Index j = 0; j < nodes; ++j) {
        const int jj = static_cast<int>(j);
        const Vector x = row_vector(traj.states, jj);
        const Vector z = row_vector(traj.algebraic, jj);
        const Vector u = row_vector(traj.controls, jj);
        const double t = traj.time[j];
        Vector g = eval_cost_gradient(problem, x, z, u, t);
        g.noalias() += eval_dynamics_jacobian(problem, x, z, u, t).transpose() *
                       row_vector(duals.costates, jj);
        if (problem.nh > 0) {
            g.noalias() += eval_path_jacobian(problem, x, z, u, t).transpose() *
                           row_vector(duals.path_covectors, jj);
        }
        out.row(j) = g.transpose();
    }
    return out;
}

Vector hamiltonian_trace(const OcpProblem& problem, const Trajectory& traj,
                         const DualTrajectory& duals) {
    const auto nodes = traj.states.rows();
    Vector out(nodes);
    for (Eigen::Index j = 0; j < nodes; ++j) {
        const int jj = static_cast<int>(j);
        out[j] = hamiltonian(problem, row_vector(traj.states, jj), row_vector(traj.algebraic, jj),
                             row_vector(traj.controls, jj), traj.time[j],
                             row_vector(duals.costates, jj), row_vector(duals.path_covectors, jj));
    }
    return out;
}

Vector residual_stationarity_u(const Trajectory& traj, const DualTrajectory& duals,
                               const PendulumParams& p) {
    require_pendulum_shape(traj, duals);
    const auto& x = traj.states;
    const auto& lam = duals.costates;
    return traj.controls.col(0) -
           (lam.col(3).cwiseProduct(x.col(0)) - lam.col(1).cwiseProduct(x.col(2))) / (2.0 * p.c);
}

Vector residual_stationarity_x5(const Trajectory& traj, const DualTrajectory& duals) {
    require_pendulum_shape(traj, duals);
    const auto& x = traj.states;
    const auto& lam = duals.costates;
    return lam.col(1).cwiseProduct(x.col(0)) + lam.col(3).cwiseProduct(x.col(2));
}

Matrix residual_adjoint(const Trajectory& traj, const DualTrajectory& duals, const Grid& grid,
                        const PendulumParams& p) {
    require_pendulum_shape(traj, duals);
    if (traj.states.rows() != grid.size()) throw MappingError("trajectory does not match grid");
    const auto& x = traj.states;
    const auto& lam = duals.costates;
    Matrix out = (2.0 / p.T) * (grid.diff() * lam);
    for (int j = 0; j < grid.size(); ++j) {
        const double t = traj.time[j];
        const double x5 = traj.algebraic(j, 0);
        const double u = traj.controls(j, 0);
        const double mu = duals.path_covectors(j, 0);
        const double l1 = lam(j, 0), l2 = lam(j, 1), l3 = lam(j, 2), l4 = lam(j, 3);
        const double dh1 =
            2.0 * p.d * (x(j, 0) - p.L * std::sin(t + p.alpha)) - l2 * x5 - l4 * u + 2.0 * mu * x(j, 0);
        const double dh2 = l1 - p.a * l2;
        const double dh3 =
            2.0 * p.d * (x(j, 2) - p.L * std::cos(t + p.alpha)) + l2 * u - l4 * x5 + 2.0 * mu * x(j, 2);
        const double dh4 = l3 - p.a * l4;
        out(j, 0) += dh1;
        out(j, 1) += dh2;
        out(j, 2) += dh3;
        out(j, 3) += dh4;
    }
    return out;
}

Matrix residual_adjoint(const OcpProblem& problem, const Trajectory& traj,
                        const DualTrajectory& duals, const Grid& grid) {
    if (traj.states.rows() != grid.size() || duals.costates.rows() != grid.size() ||
        duals.costates.cols() != problem.nx) {
        throw MappingError("trajectory or duals do not match grid and problem");
    }
    const Matrix grad = hamiltonian_gradient(problem, traj, duals);
    return (2.0 / problem.horizon) * (grid.diff() * duals.costates) +
           grad.leftCols(problem.nx);
}

TransversalityCheck check_transversality(const DualTrajectory& duals, double tol) {
    TransversalityCheck out;
    out.tol = tol;
    if (duals.costates.rows() == 0) {
        out.norms = Vector();
        out.pass = true;
        return out;
    }
    out.norms = duals.costates.row(duals.costates.rows() - 1).cwiseAbs().transpose();
    out.pass = out.norms.size() == 0 || out.norms.maxCoeff() <= tol;
    return out;
}

std::vector<bool> check_complementarity(const Matrix& h, const Matrix& mu, const Vector& lower,
                                        const Vector& upper, double tol) {
    if (h.rows() != mu.rows() || h.cols() != mu.cols() || lower.size() != h.cols() ||
        upper.size() != h.cols()) {
        throw MappingError("complementarity inputs have inconsistent shapes");
    }
    std::vector<bool> out(static_cast<size_t>(h.rows()), true);
    for (Eigen::Index j = 0; j < h.rows(); ++j) {
        bool ok = true;
        for (Eigen::Index k = 0; k < h.cols(); ++k) {
            if (lower[k] == upper[k]) continue;
            const double m = mu(j, k);
            if (std::abs(h(j, k) - upper[k]) <= tol) {
                ok = ok && m >= -tol;
            } else if (std::abs(h(j, k) - lower[k]) <= tol) {
                ok = ok && m <= tol;
            } else {
                ok = ok && std::abs(m) <= tol;
            }
        }
        out[static_cast<size_t>(j)] = ok;
    }
    return out;
}

NcReport pendulum_nc_report(const Trajectory& traj, const DualTrajectory& duals, const Grid& grid,
                            const PendulumParams& p) {
    NcReport r;
    r.stationarity_u = abs_max(residual_stationarity_u(traj, duals, p));
    r.stationarity_x5 = abs_max(residual_stationarity_x5(traj, duals));
    r.adjoint = interior_column_max(residual_adjoint(traj, duals, grid, p));
    r.terminal_costates = check_transversality(duals, 0.0).norms;

    const OcpProblem problem = make_pendulum_problem(p);
    Matrix h(traj.states.rows(), 1);
    for (Eigen::Index j = 0; j < h.rows(); ++j) {
        h(j, 0) = pendulum_path(traj.states.row(j).transpose(), p);
    }
    const auto comp =
        check_complementarity(h, duals.path_covectors, problem.path_lower, problem.path_upper, 1e-9);
    r.complementarity = std::all_of(comp.begin(), comp.end(), [](bool b) { return b; });
    r.hamiltonian = hamiltonian_trace(problem, traj, duals);

    r.costate_scale = duals.costates.cwiseAbs().maxCoeff();
    r.control_scale = traj.controls.cwiseAbs().maxCoeff();
    r.algebraic_scale = duals.costates.col(1).cwiseProduct(traj.states.col(0)).cwiseAbs().maxCoeff();
    return r;
}

NcReport generic_nc_report(const OcpProblem& problem, const Trajectory& traj,
                           const DualTrajectory& duals, const Grid& grid) {
    NcReport r;
    const Matrix grad = hamiltonian_gradient(problem, traj, duals);
    const int nx = problem.nx;
    const int na = problem.na;
    const int nu = problem.nu;
    if (nu > 0) r.stationarity_u = grad.rightCols(nu).cwiseAbs().maxCoeff();
    if (na > 0) r.stationarity_x5 = grad.middleCols(nx, na).cwiseAbs().maxCoeff();
    r.adjoint = interior_column_max(residual_adjoint(problem, traj, duals, grid));
    r.terminal_costates = check_transversality(duals, 0.0).norms;

    Matrix h(traj.states.rows(), problem.nh);
    for (Eigen::Index j = 0; j < h.rows() && problem.nh > 0; ++j) {
        const int jj = static_cast<int>(j);
        h.row(j) = problem
                       .path(row_vector(traj.states, jj), row_vector(traj.algebraic, jj),
                             row_vector(traj.controls, jj), traj.time[j])
                       .transpose();
    }
    const auto comp =
        check_complementarity(h, duals.path_covectors, problem.path_lower, problem.path_upper, 1e-9);
    r.complementarity = std::all_of(comp.begin(), comp.end(), [](bool b) { return b; });
    r.hamiltonian = hamiltonian_trace(problem, traj, duals);

    r.costate_scale = duals.costates.size() ? duals.costates.cwiseAbs().maxCoeff() : 0.0;
    for (Eigen::Index j = 0; j < traj.states.rows(); ++j) {
        const int jj = static_cast<int>(j);
        const Vector g = eval_cost_gradient(problem, row_vector(traj.states, jj),
                                            row_vector(traj.algebraic, jj),
                                            row_vector(traj.controls, jj), traj.time[j]);
        if (nu > 0) r.control_scale = std::max(r.control_scale, abs_max(g.tail(nu)));
        if (na > 0) r.algebraic_scale = std::max(r.algebraic_scale, abs_max(g.segment(nx, na)));
    }
    return r;
}

}  // namespace psocp
