#include "psocp/ocp.hpp"

#include "psocp/errors.hpp"
#include "psocp/nlp.hpp"

#include <cmath>
#include <string>

namespace psocp {

namespace {

Vector stack(const Vector& x, const Vector& z, const Vector& u) {
    Vector p(x.size() + z.size() + u.size());
    p << x, z, u;
    return p;
}

// Central differences of a pointwise vector function with respect to [x; z; u].
template <typename Fn>
Matrix fd_point_jacobian(const Fn& fn, const Vector& x, const Vector& z, const Vector& u,
                         double t, int rows) {
    const Eigen::Index nx = x.size();
    const Eigen::Index na = z.size();
    const Vector base = stack(x, z, u);
    Matrix jac(rows, base.size());
    for (Eigen::Index col = 0; col < base.size(); ++col) {
        const double h = fd_step(base[col]);
        Vector plus = base;
        Vector minus = base;
        plus[col] += h;
        minus[col] -= h;
        const Vector fp = fn(plus.head(nx), plus.segment(nx, na), plus.tail(u.size()), t);
        const Vector fm = fn(minus.head(nx), minus.segment(nx, na), minus.tail(u.size()), t);
        jac.col(col) = (fp - fm) / (2.0 * h);
    }
    return jac;
}

}  // namespace


void OcpProblem::validate() const {
    if (nx < 1 || na < 0 || nu < 0 || nh < 0) {
        throw ConfigurationError("problem '" + name + "': invalid channel counts");
    }
    if (!(horizon > 0.0) || !std::isfinite(horizon)) {
        throw ConfigurationError("problem '" + name + "': horizon must be positive");
    }
    if (!dynamics || !running_cost || (nh > 0 && !path)) {
        throw ConfigurationError("problem '" + name + "': missing problem function");
    }
    if (initial_state.size() != nx) {
        throw ConfigurationError("problem '" + name + "': initial_state has wrong size");
    }
    if (path_lower.size() != nh || path_upper.size() != nh) {
        throw ConfigurationError("problem '" + name + "': path bounds have wrong size");
    }
    for (int k = 0; k < nh; ++k) {
        if (path_lower[k] > path_upper[k]) {
            throw ConfigurationError("problem '" + name + "': path bound " +
                                     std::to_string(k) + " has lower > upper");
        }
    }
    for (const auto& tc : terminal) {
        if (tc.channel < 0 || tc.channel >= nx) {
            throw ConfigurationError("problem '" + name + "': terminal channel out of range");
        }
    }
    if (nh > 0) {
        // Equality rows must hold at the initial state; z and u are probed at zero.
        const Vector h = path(initial_state, Vector::Zero(na), Vector::Zero(nu), 0.0);
        for (int k = 0; k < nh; ++k) {
            if (path_lower[k] == path_upper[k] && std::abs(h[k] - path_lower[k]) > 1e-12) {
                throw ConfigurationError("problem '" + name +
                                         "': initial state violates equality path "
                                         "constraint " + std::to_string(k));
            }
        }
    }
}

void PendulumParams::validate() const {
    if (!(L > 0.0)) throw ConfigurationError("pendulum length L must be positive");
    if (!(c > 0.0)) throw ConfigurationError("control weight c must be positive");
    if (!(d >= 0.0)) throw ConfigurationError("tracking weight d must be non-negative");
    if (!(T > 0.0)) throw ConfigurationError("horizon T must be positive");
    if (!std::isfinite(a) || !std::isfinite(g) || !std::isfinite(alpha)) {
        throw ConfigurationError("pendulum parameters must be finite");
    }
}

Vector4 pendulum_dynamics(const Vector4& x, double x5, double u, double t,
                          const PendulumParams& p) {
    if (!x.allFinite() || !std::isfinite(x5) || !std::isfinite(u) || !std::isfinite(t)) {
        throw EvaluationError("pendulum dynamics evaluated at a non-finite point");
    }
    return {x[1],
            -x5 * x[0] - p.a * x[1] + u * x[2],
            x[3],
            -x5 * x[2] - p.a * x[3] - p.g - u * x[0]};
}

double pendulum_path(const Vector4& x, const PendulumParams& p) {
    return x[0] * x[0] + x[2] * x[2] - p.L * p.L;
}

double pendulum_cost(const Vector4& x, double u, double t, const PendulumParams& p) {
    const double ex = x[0] - p.L * std::sin(t + p.alpha);
    const double ey = x[2] - p.L * std::cos(t + p.alpha);
    return p.c * u * u + p.d * ex * ex + p.d * ey * ey;
}

double consistent_multiplier(const Vector4& x, const PendulumParams& p) {
    const double h = pendulum_path(x, p);
    const double h_dot = x[0] * x[1] + x[2] * x[3];
    if (std::abs(h) > 1e-9 || std::abs(h_dot) > 1e-9) {
        throw InconsistentStateError(
            "state is off the constraint manifold (|h| = " + std::to_string(std::abs(h)) +
            ", |h'| = " + std::to_string(std::abs(h_dot)) + ")");
    }
    return (x[1] * x[1] + x[3] * x[3] - p.g * x[2]) / (p.L * p.L);
}

ReducedPendulumEval reduced_pendulum(double phi, double phi_dot, double u, double t,
                                     const PendulumParams& p) {
    const double phi_ddot = -p.a * phi_dot + u + (p.g / p.L) * std::sin(phi);
    const double cost =
        p.c * u * u + 2.0 * p.d * p.L * p.L * (1.0 - std::cos(phi - t - p.alpha));
    return {phi_ddot, cost};
}

LiftedPendulumState lift_reduced_state(double phi, double phi_dot, const PendulumParams& p) {
    const double s = std::sin(phi);
    const double c = std::cos(phi);
    return {Vector4{p.L * s, p.L * phi_dot * c, p.L * c, -p.L * phi_dot * s},
            phi_dot * phi_dot - (p.g / p.L) * c};
}

OcpProblem make_pendulum_problem(const PendulumParams& p) {
    p.validate();
    OcpProblem prob;
    prob.name = "pendulum";
    prob.nx = 4;
    prob.na = 1;
    prob.nu = 1;
    prob.nh = 1;
    prob.horizon = p.T;
    prob.path_lower = Vector::Zero(1);
    prob.path_upper = Vector::Zero(1);
    // x(0) = 0, x'(0) = 0, y(0) = L, y'(0) = 0.
    prob.initial_state = Vector4{0.0, 0.0, p.L, 0.0};

    prob.dynamics = [p](const Vector& x, const Vector& z, const Vector& u, double t) {
        return Vector(pendulum_dynamics(x.head<4>(), z[0], u[0], t, p));
    };
    prob.path = [p](const Vector& x, const Vector&, const Vector&, double) {
        Vector h(1);
        h[0] = pendulum_path(x.head<4>(), p);
        return h;
    };
    prob.running_cost = [p](const Vector& x, const Vector&, const Vector& u, double t) {
        return pendulum_cost(x.head<4>(), u[0], t, p);
    };

    // Columns: x1 x2 x3 x4 x5 u.
    prob.dynamics_jacobian = [p](const Vector& x, const Vector& z, const Vector& u, double) {
        Matrix j = Matrix::Zero(4, 6);
        j(0, 1) = 1.0;
        j(1, 0) = -z[0];
        j(1, 1) = -p.a;
        j(1, 2) = u[0];
        j(1, 4) = -x[0];
        j(1, 5) = x[2];
        j(2, 3) = 1.0;
        j(3, 0) = -u[0];
        j(3, 2) = -z[0];
        j(3, 3) = -p.a;
        j(3, 4) = -x[2];
        j(3, 5) = -x[0];
        return j;
    };
    prob.path_jacobian = [](const Vector& x, const Vector&, const Vector&, double) {
        Matrix j = Matrix::Zero(1, 6);
        j(0, 0) = 2.0 * x[0];
        j(0, 2) = 2.0 * x[2];
        return j;
    };
    prob.cost_gradient = [p](const Vector& x, const Vector&, const Vector& u, double t) {
        Vector grad = Vector::Zero(6);
        grad[0] = 2.0 * p.d * (x[0] - p.L * std::sin(t + p.alpha));
        grad[2] = 2.0 * p.d * (x[2] - p.L * std::cos(t + p.alpha));
        grad[5] = 2.0 * p.c * u[0];
        return grad;
    };
    return prob;
}

OcpProblem make_reduced_pendulum_problem(const PendulumParams& p) {
    p.validate();
    OcpProblem prob;
    prob.name = "reduced-pendulum";
    prob.nx = 2;
    prob.na = 0;
    prob.nu = 1;
    prob.nh = 0;
    prob.horizon = p.T;
    prob.path_lower = Vector::Zero(0);
    prob.path_upper = Vector::Zero(0);
    prob.initial_state = Vector::Zero(2);

    prob.dynamics = [p](const Vector& x, const Vector&, const Vector& u, double t) {
        Vector f(2);
        f[0] = x[1];
        f[1] = reduced_pendulum(x[0], x[1], u[0], t, p).phi_ddot;
        return f;
    };
    prob.running_cost = [p](const Vector& x, const Vector&, const Vector& u, double t) {
        return reduced_pendulum(x[0], x[1], u[0], t, p).running_cost;
    };
    // Columns: phi phi' u.
    prob.dynamics_jacobian = [p](const Vector& x, const Vector&, const Vector&, double) {
        Matrix j = Matrix::Zero(2, 3);
        j(0, 1) = 1.0;
        j(1, 0) = (p.g / p.L) * std::cos(x[0]);
        j(1, 1) = -p.a;
        j(1, 2) = 1.0;
        return j;
    };
    prob.cost_gradient = [p](const Vector& x, const Vector&, const Vector& u, double t) {
        Vector grad = Vector::Zero(3);
        grad[0] = 2.0 * p.d * p.L * p.L * std::sin(x[0] - t - p.alpha);
        grad[2] = 2.0 * p.c * u[0];
        return grad;
    };
    return prob;
}

OcpProblem make_lq_problem(double horizon, double target) {
    OcpProblem prob;
    prob.name = "lq";
    prob.nx = 1;
    prob.na = 0;
    prob.nu = 1;
    prob.nh = 0;
    prob.horizon = horizon;
    prob.path_lower = Vector::Zero(0);
    prob.path_upper = Vector::Zero(0);
    prob.initial_state = Vector::Zero(1);
    prob.terminal = {{0, target}};

    prob.dynamics = [](const Vector&, const Vector&, const Vector& u, double) {
        return Vector(u.head<1>());
    };
    prob.running_cost = [](const Vector&, const Vector&, const Vector& u, double) {
        return u[0] * u[0];
    };
    prob.dynamics_jacobian = [](const Vector&, const Vector&, const Vector&, double) {
        Matrix j = Matrix::Zero(1, 2);
        j(0, 1) = 1.0;
        return j;
    };
    prob.cost_gradient = [](const Vector&, const Vector&, const Vector& u, double) {
        Vector grad = Vector::Zero(2);
        grad[1] = 2.0 * u[0];
        return grad;
    };
    return prob;
}

Matrix eval_dynamics_jacobian(const OcpProblem& problem, const Vector& x, const Vector& z,
                              const Vector& u, double t) {
    if (problem.dynamics_jacobian) return problem.dynamics_jacobian(x, z, u, t);
    return fd_point_jacobian(problem.dynamics, x, z, u, t, problem.nx);
}

Matrix eval_path_jacobian(const OcpProblem& problem, const Vector& x, const Vector& z,
                          const Vector& u, double t) {
    if (problem.nh == 0) return Matrix(0, problem.point_width());
    if (problem.path_jacobian) return problem.path_jacobian(x, z, u, t);
    return fd_point_jacobian(problem.path, x, z, u, t, problem.nh);
}

Vector eval_cost_gradient(const OcpProblem& problem, const Vector& x, const Vector& z,
                          const Vector& u, double t) {
    if (problem.cost_gradient) return problem.cost_gradient(x, z, u, t);
    auto wrapped = [&problem](const Vector& xs, const Vector& zs, const Vector& us, double ts) {
        Vector out(1);
        out[0] = problem.running_cost(xs, zs, us, ts);
        return out;
    };
    return fd_point_jacobian(wrapped, x, z, u, t, 1).row(0).transpose();
}

}  // namespace psocp
