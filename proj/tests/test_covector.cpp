#include <psocp/covector.hpp>
#include <psocp/errors.hpp>

#include <gtest/gtest.h>

#include <cmath>

namespace {

using psocp::DualTrajectory;
using psocp::Grid;
using psocp::Matrix;
using psocp::PendulumParams;
using psocp::Trajectory;
using psocp::Vector;
using psocp::Vector4;

struct Solved {
    std::shared_ptr<const psocp::CollocationNlp> nlp;
    psocp::NlpSolution sol;
    Trajectory traj;
    DualTrajectory duals;
};

Solved solve_problem(const psocp::OcpProblem& problem, int order) {
    Solved s;
    const Grid grid(order);
    s.nlp = psocp::transcribe(problem, grid);
    s.sol = psocp::solve(*s.nlp, s.nlp->default_start());
    s.traj = s.nlp->trajectory(s.sol.primal);
    s.duals = psocp::extract_duals(s.sol, grid, problem);
    return s;
}

Trajectory pendulum_point(const Vector4& x, double x5, double u) {
    Trajectory t;
    t.time = Vector::Zero(1);
    t.states = x.transpose();
    t.algebraic = Matrix::Constant(1, 1, x5);
    t.controls = Matrix::Constant(1, 1, u);
    return t;
}

DualTrajectory pendulum_duals(const Vector4& lambda, double mu) {
    DualTrajectory d;
    d.costates = lambda.transpose();
    d.path_covectors = Matrix::Constant(1, 1, mu);
    return d;
}

TEST(ExtractDuals, LqCostatesAreConstant) {
    // Pontryagin: 2u + lambda = 0 with u = b/T, so lambda = -2b/T.
    for (auto [T, b] : {std::pair{1.0, 1.0}, std::pair{2.0, 3.0}, std::pair{0.5, -1.0}}) {
        for (int n : {3, 4, 8}) {
            const auto s = solve_problem(psocp::make_lq_problem(T, b), n);
            ASSERT_TRUE(s.sol.ok());
            for (Eigen::Index j = 0; j < s.duals.costates.rows(); ++j) {
                EXPECT_NEAR(s.duals.costates(j, 0), -2 * b / T, 1e-5) << T << " " << b << " " << n;
            }
        }
    }
}

TEST(ExtractDuals, ZeroCostFeasibleStartGivesZeroMultipliers) {
    psocp::OcpProblem p;
    p.name = "idle";
    p.nx = 1;
    p.nu = 1;
    p.horizon = 1.0;
    p.initial_state = Vector::Ones(1);
    p.dynamics = [](const Vector&, const Vector&, const Vector& u, double) { return u; };
    p.running_cost = [](const Vector&, const Vector&, const Vector& u, double) {
        return u[0] * u[0];
    };
    const auto s = solve_problem(p, 5);
    ASSERT_TRUE(s.sol.ok());
    EXPECT_LE(s.duals.costates.cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LE(s.duals.boundary.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(ExtractDuals, SizeMismatchThrows) {
    psocp::NlpSolution sol;
    sol.primal = Vector::Zero(5);
    sol.multipliers = Vector::Zero(3);
    EXPECT_THROW((void)psocp::extract_duals(sol, Grid(4), psocp::make_lq_problem()),
                 psocp::MappingError);
}

TEST(ExtractDuals, ScalesWithObjective) {
    // Multiplying the running cost by k multiplies every multiplier by k.
    PendulumParams p;
    const auto base = solve_problem(psocp::make_pendulum_problem(p), 12);
    ASSERT_TRUE(base.sol.ok());
    const double k = 3.0;
    auto scaled_problem = psocp::make_pendulum_problem(p);
    auto cost = scaled_problem.running_cost;
    auto grad = scaled_problem.cost_gradient;
    scaled_problem.running_cost = [cost, k](const Vector& x, const Vector& z, const Vector& u,
                                            double t) { return k * cost(x, z, u, t); };
    scaled_problem.cost_gradient = [grad, k](const Vector& x, const Vector& z, const Vector& u,
                                             double t) -> Vector { return k * grad(x, z, u, t); };
    const auto scaled = solve_problem(scaled_problem, 12);
    ASSERT_TRUE(scaled.sol.ok());
    const double scale = base.duals.costates.cwiseAbs().maxCoeff();
    EXPECT_LT((scaled.duals.costates - k * base.duals.costates).cwiseAbs().maxCoeff(), 1e-5 * k * scale);
    EXPECT_LT((scaled.traj.controls - base.traj.controls).cwiseAbs().maxCoeff(), 1e-6);
}

TEST(Hamiltonian, ReducesToCost) {
    const PendulumParams p;
    const Vector4 x(0.3, -0.2, 1.1, 0.7);
    EXPECT_EQ(psocp::hamiltonian(x, 0.4, 0.9, Vector4::Zero(), 0.0, 0.5, p),
              psocp::pendulum_cost(x, 0.9, 0.5, p));
}

TEST(Hamiltonian, PathTermVanishesOnCircle) {
    const PendulumParams p;
    const Vector4 x(p.L * std::sin(0.4), 0.1, p.L * std::cos(0.4), 0.2);
    const Vector4 lambda(1, -2, 3, 0.5);
    EXPECT_NEAR(psocp::hamiltonian(x, 0.3, 0.2, lambda, 0.0, 0.1, p),
                psocp::hamiltonian(x, 0.3, 0.2, lambda, 17.0, 0.1, p), 1e-12);
}

TEST(Hamiltonian, BalancedTop) {
    const PendulumParams p;
    EXPECT_NEAR(psocp::hamiltonian(Vector4(0, 0, 2, 0), -2, 0, Vector4(0, 0, 0, 1), 0, 0, p), 0.0,
                1e-14);
}

TEST(Hamiltonian, GenericMatchesPendulum) {
    const PendulumParams p;
    const auto problem = psocp::make_pendulum_problem(p);
    const Vector4 x(0.5, 0.1, 1.4, -0.3);
    const Vector4 lambda(0.2, -1.0, 0.7, 2.0);
    Vector mu(1);
    mu << -0.6;
    EXPECT_NEAR(psocp::hamiltonian(problem, x, Vector::Constant(1, 0.8), Vector::Constant(1, -0.4),
                                   1.2, lambda, mu),
                psocp::hamiltonian(x, 0.8, -0.4, lambda, -0.6, 1.2, p), 1e-12);
}

TEST(Stationarity, ControlExamples) {
    const PendulumParams p;
    const Vector4 x(0.8, 0.0, 1.3, 0.0);
    const Vector4 lambda(0.0, 0.6, 0.0, -1.1);
    const double u = (lambda[3] * x[0] - lambda[1] * x[2]) / (2 * p.c);
    EXPECT_NEAR(psocp::residual_stationarity_u(pendulum_point(x, 0, u), pendulum_duals(lambda, 0), p)[0],
                0.0, 1e-15);
    EXPECT_EQ(psocp::residual_stationarity_u(pendulum_point(x, 0, 1.0),
                                             pendulum_duals(Vector4::Zero(), 0), p)[0],
              1.0);
}

TEST(Stationarity, ControlResidualIsHamiltonianDerivative) {
    // r_u = (dH/du) / (2c), checked against a difference of the Hamiltonian.
    const PendulumParams p;
    const Vector4 x(0.9, 0.3, 1.7, -0.2);
    const Vector4 lambda(0.4, -0.8, 1.5, 0.9);
    const double u = 0.35;
    const double h = 1e-6;
    const double dh = (psocp::hamiltonian(x, 0.1, u + h, lambda, 0.2, 0.4, p) -
                       psocp::hamiltonian(x, 0.1, u - h, lambda, 0.2, 0.4, p)) /
                      (2 * h);
    EXPECT_NEAR(psocp::residual_stationarity_u(pendulum_point(x, 0.1, u), pendulum_duals(lambda, 0.2), p)[0],
                dh / (2 * p.c), 1e-7);
}

TEST(Stationarity, AlgebraicExamples) {
    EXPECT_EQ(psocp::residual_stationarity_x5(pendulum_point(Vector4(1, 2, 3, 4), 0, 0),
                                              pendulum_duals(Vector4::Zero(), 0))[0],
              0.0);
    EXPECT_EQ(psocp::residual_stationarity_x5(pendulum_point(Vector4(1, 0, 1, 0), 0, 0),
                                              pendulum_duals(Vector4(0, 1, 0, -1), 0))[0],
              0.0);
}

TEST(Adjoint, ZeroEverythingWithoutTracking) {
    PendulumParams p;
    p.d = 0.0;
    const Grid g(5);
    Trajectory traj;
    traj.time = Vector::Zero(6);
    traj.states = Matrix::Zero(6, 4);
    traj.algebraic = Matrix::Zero(6, 1);
    traj.controls = Matrix::Zero(6, 1);
    DualTrajectory duals;
    duals.costates = Matrix::Zero(6, 4);
    duals.path_covectors = Matrix::Zero(6, 1);
    EXPECT_EQ(psocp::residual_adjoint(traj, duals, g, p).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Adjoint, LqResidualVanishes) {
    const auto problem = psocp::make_lq_problem();
    const auto s = solve_problem(problem, 6);
    ASSERT_TRUE(s.sol.ok());
    EXPECT_LE(psocp::residual_adjoint(problem, s.traj, s.duals, s.nlp->grid()).cwiseAbs().maxCoeff(),
              1e-6);
}

TEST(Adjoint, PendulumFormsAgree) {
    // The written-out adjoint and the one built from problem derivatives must
    // coincide on any input.
    const PendulumParams p;
    const auto problem = psocp::make_pendulum_problem(p);
    const Grid g(7);
    Trajectory traj;
    traj.time = Vector::LinSpaced(8, 0.0, p.T);
    traj.states = Matrix::Random(8, 4);
    traj.algebraic = Matrix::Random(8, 1);
    traj.controls = Matrix::Random(8, 1);
    for (int j = 0; j < 8; ++j) traj.time[j] = g.time_at(j, p.T);
    DualTrajectory duals;
    duals.costates = Matrix::Random(8, 4);
    duals.path_covectors = Matrix::Random(8, 1);
    const Matrix a = psocp::residual_adjoint(traj, duals, g, p);
    const Matrix b = psocp::residual_adjoint(problem, traj, duals, g);
    EXPECT_LT((a - b).cwiseAbs().maxCoeff(), 1e-6 * std::max(1.0, a.cwiseAbs().maxCoeff()));
}

TEST(Transversality, Examples) {
    DualTrajectory zero;
    zero.costates = Matrix::Zero(3, 4);
    const auto ok = psocp::check_transversality(zero, 1e-2);
    EXPECT_TRUE(ok.pass);
    EXPECT_EQ(ok.norms.maxCoeff(), 0.0);

    DualTrajectory bad = zero;
    bad.costates(2, 0) = 0.5;
    const auto fail = psocp::check_transversality(bad, 1e-2);
    EXPECT_FALSE(fail.pass);
    EXPECT_EQ(fail.norms[0], 0.5);
}

TEST(Complementarity, Examples) {
    const Matrix h = Matrix::Constant(1, 1, 0.0);
    EXPECT_TRUE(psocp::check_complementarity(h, Matrix::Constant(1, 1, -7.0), Vector::Zero(1),
                                             Vector::Zero(1), 1e-6)[0]);
    EXPECT_FALSE(psocp::check_complementarity(Matrix::Constant(1, 1, 0.5), Matrix::Constant(1, 1, 0.3),
                                              Vector::Zero(1), Vector::Ones(1), 1e-6)[0]);
    EXPECT_TRUE(psocp::check_complementarity(Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, 5.0),
                                             Vector::Zero(1), Vector::Ones(1), 1e-6)[0]);
    EXPECT_FALSE(psocp::check_complementarity(Matrix::Constant(1, 1, 1.0), Matrix::Constant(1, 1, -5.0),
                                              Vector::Zero(1), Vector::Ones(1), 1e-6)[0]);
    EXPECT_TRUE(psocp::check_complementarity(Matrix::Constant(1, 1, 0.0), Matrix::Constant(1, 1, -5.0),
                                             Vector::Zero(1), Vector::Ones(1), 1e-6)[0]);
}

TEST(NcReport, PendulumSolutionSatisfiesConditions) {
    const PendulumParams p;
    const auto s = solve_problem(psocp::make_pendulum_problem(p), 32);
    ASSERT_TRUE(s.sol.ok());
    const auto nc = psocp::pendulum_nc_report(s.traj, s.duals, s.nlp->grid(), p);
    EXPECT_LE(nc.terminal_costates.maxCoeff(), 1e-2 * nc.costate_scale);
    EXPECT_LE(nc.stationarity_u, 1e-2 * nc.control_scale);
    EXPECT_LE(nc.stationarity_x5, 1e-2 * nc.algebraic_scale);
    EXPECT_LE(nc.adjoint.maxCoeff(), 1e-2 * nc.costate_scale);
    EXPECT_TRUE(nc.complementarity);
    EXPECT_GT(nc.costate_scale, 0.0);
}

TEST(NcReport, PureFunction) {
    const PendulumParams p;
    const auto s = solve_problem(psocp::make_pendulum_problem(p), 10);
    const auto a = psocp::pendulum_nc_report(s.traj, s.duals, s.nlp->grid(), p);
    const auto b = psocp::pendulum_nc_report(s.traj, s.duals, s.nlp->grid(), p);
    EXPECT_EQ(a.adjoint, b.adjoint);
    EXPECT_EQ(a.stationarity_u, b.stationarity_u);
    EXPECT_EQ(a.hamiltonian, b.hamiltonian);
}

}  // namespace
