#include <psocp/errors.hpp>
#include <psocp/ocp.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

namespace {

using psocp::PendulumParams;
using psocp::Vector;
using psocp::Vector4;

TEST(PendulumDynamics, EquilibriumAtTop) {
    const PendulumParams p;
    const Vector4 f = psocp::pendulum_dynamics(Vector4(0, 0, 2, 0), -2.0, 0.0, 0.0, p);
    EXPECT_EQ(f, Vector4::Zero());
}

TEST(PendulumDynamics, UnitControl) {
    const PendulumParams p;
    const Vector4 f = psocp::pendulum_dynamics(Vector4(0, 0, 2, 0), 0.0, 1.0, 0.0, p);
    EXPECT_EQ(f, Vector4(0, 2, 0, -4));
}

TEST(PendulumDynamics, OriginWithoutGravity) {
    PendulumParams p;
    p.g = 0.0;
    EXPECT_EQ(psocp::pendulum_dynamics(Vector4::Zero(), 0.0, 0.0, 0.0, p), Vector4::Zero());
}

TEST(PendulumDynamics, NonFiniteInputThrows) {
    const PendulumParams p;
    EXPECT_THROW((void)psocp::pendulum_dynamics(Vector4(NAN, 0, 2, 0), 0.0, 0.0, 0.0, p),
                 psocp::EvaluationError);
    EXPECT_THROW((void)psocp::pendulum_dynamics(Vector4(0, 0, 2, 0), INFINITY, 0.0, 0.0, p),
                 psocp::EvaluationError);
}

TEST(PendulumPath, Examples) {
    const PendulumParams p;
    EXPECT_EQ(psocp::pendulum_path(Vector4(0, 5, 2, -1), p), 0.0);
    EXPECT_EQ(psocp::pendulum_path(Vector4(2, 0, 0, 3), p), 0.0);
    EXPECT_EQ(psocp::pendulum_path(Vector4(1, 0, 1, 0), p), -2.0);
}

TEST(PendulumCost, Examples) {
    const PendulumParams p;
    EXPECT_NEAR(psocp::pendulum_cost(Vector4(0, 0, 2, 0), 0.0, 0.0, p), 0.0, 1e-15);
    EXPECT_NEAR(psocp::pendulum_cost(Vector4(0, 0, 2, 0), 1.0, 0.0, p), 1.0, 1e-15);
    EXPECT_NEAR(psocp::pendulum_cost(Vector4::Zero(), 0.0, 0.0, p), 400.0, 1e-12);
}

TEST(ConsistentMultiplier, Examples) {
    const PendulumParams p;
    EXPECT_NEAR(psocp::consistent_multiplier(Vector4(0, 0, 2, 0), p), -2.0, 1e-15);
    EXPECT_NEAR(psocp::consistent_multiplier(Vector4(2, 0, 0, 0), p), 0.0, 1e-15);
    const double v = 1.7;
    EXPECT_NEAR(psocp::consistent_multiplier(Vector4(0, v, 2, 0), p), (v * v - 2 * p.g) / 4, 1e-14);
}

TEST(ConsistentMultiplier, SecondDerivativeOfConstraintVanishes) {
    // d2/dt2 (x1^2 + x3^2) = 2(x2^2 + x4^2) + 2(x1 x2' + x3 x4'), with u, a
    // dropping out on a velocity-consistent state.
    const PendulumParams p;
    const double phi = 0.7;
    const double w = -1.3;
    const Vector4 x(p.L * std::sin(phi), p.L * w * std::cos(phi), p.L * std::cos(phi),
                    -p.L * w * std::sin(phi));
    const double x5 = psocp::consistent_multiplier(x, p);
    for (double u : {0.0, 2.5}) {
        const Vector4 f = psocp::pendulum_dynamics(x, x5, u, 0.3, p);
        const double second = 2 * (x[1] * x[1] + x[3] * x[3]) + 2 * (x[0] * f[1] + x[2] * f[3]);
        EXPECT_NEAR(second, 0.0, 1e-12);
    }
}

TEST(ConsistentMultiplier, OffCircleThrows) {
    const PendulumParams p;
    EXPECT_THROW((void)psocp::consistent_multiplier(Vector4(1, 0, 1, 0), p),
                 psocp::InconsistentStateError);
    // On the circle but moving radially.
    EXPECT_THROW((void)psocp::consistent_multiplier(Vector4(0, 0, 2, 1), p),
                 psocp::InconsistentStateError);
}

TEST(ReducedPendulum, Examples) {
    const PendulumParams p;
    EXPECT_EQ(psocp::reduced_pendulum(0, 0, 0, 0, p).phi_ddot, 0.0);
    EXPECT_NEAR(psocp::reduced_pendulum(std::numbers::pi / 2, 0, 0, 0, p).phi_ddot, 2.0, 1e-15);
    const double t = 0.9;
    EXPECT_NEAR(psocp::reduced_pendulum(t + p.alpha, 0.4, 0.0, t, p).running_cost, 0.0, 1e-12);
}

TEST(ReducedPendulum, MatchesProjectedCartesianDynamics) {
    // Differentiating the lift along the Cartesian vector field must agree with
    // lifting the reduced solution, checked by finite differences.
    PendulumParams p;
    p.alpha = 0.3;
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> dist(-3.0, 3.0);
    for (int trial = 0; trial < 20; ++trial) {
        const double phi = dist(rng);
        const double w = dist(rng);
        const double u = dist(rng);
        const double t = std::abs(dist(rng));
        const auto lift = psocp::lift_reduced_state(phi, w, p);
        const Vector4 f = psocp::pendulum_dynamics(lift.x, lift.x5, u, t, p);

        const double acc = psocp::reduced_pendulum(phi, w, u, t, p).phi_ddot;
        const double h = 1e-6;
        const auto ahead = psocp::lift_reduced_state(phi + h * w, w + h * acc, p);
        const auto behind = psocp::lift_reduced_state(phi - h * w, w - h * acc, p);
        const Vector4 fd = (ahead.x - behind.x) / (2 * h);
        EXPECT_LT((fd - f).cwiseAbs().maxCoeff(), 1e-6) << trial;
        EXPECT_NEAR(psocp::pendulum_path(lift.x, p), 0.0, 1e-12);
    }
}

TEST(ReducedPendulum, CostMatchesCartesian) {
    PendulumParams p;
    p.alpha = -0.4;
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> dist(-4.0, 4.0);
    for (int trial = 0; trial < 50; ++trial) {
        const double phi = dist(rng);
        const double u = dist(rng);
        const double t = std::abs(dist(rng));
        const auto lift = psocp::lift_reduced_state(phi, 0.2, p);
        EXPECT_NEAR(psocp::reduced_pendulum(phi, 0.2, u, t, p).running_cost,
                    psocp::pendulum_cost(lift.x, u, t, p), 1e-10);
    }
}

TEST(PendulumParams, Validation) {
    PendulumParams p;
    EXPECT_NO_THROW(p.validate());
    p.L = 0.0;
    EXPECT_THROW(p.validate(), psocp::ConfigurationError);
    p = {};
    p.c = 0.0;
    EXPECT_THROW(p.validate(), psocp::ConfigurationError);
    p = {};
    p.d = -1.0;
    EXPECT_THROW(p.validate(), psocp::ConfigurationError);
    p = {};
    p.T = 0.0;
    EXPECT_THROW(p.validate(), psocp::ConfigurationError);
}

TEST(PendulumProblem, Shape) {
    const auto prob = psocp::make_pendulum_problem(PendulumParams{});
    EXPECT_EQ(prob.nx, 4);
    EXPECT_EQ(prob.na, 1);
    EXPECT_EQ(prob.nu, 1);
    EXPECT_EQ(prob.nh, 1);
    EXPECT_DOUBLE_EQ(prob.horizon, 2.2);
    EXPECT_EQ(prob.initial_state, Vector4(0, 0, 2, 0));
    EXPECT_TRUE(prob.terminal.empty());
    EXPECT_EQ(prob.path_lower[0], 0.0);
    EXPECT_EQ(prob.path_upper[0], 0.0);
    EXPECT_NO_THROW(prob.validate());
}

TEST(PendulumProblem, AnalyticDerivativesMatchDifferences) {
    PendulumParams p;
    p.alpha = 0.2;
    auto analytic = psocp::make_pendulum_problem(p);
    auto numeric = analytic;
    numeric.dynamics_jacobian = nullptr;
    numeric.path_jacobian = nullptr;
    numeric.cost_gradient = nullptr;

    std::mt19937 rng(21);
    std::uniform_real_distribution<double> dist(-2.0, 2.0);
    for (int trial = 0; trial < 25; ++trial) {
        Vector x(4), z(1), u(1);
        for (int i = 0; i < 4; ++i) x[i] = dist(rng);
        z[0] = dist(rng);
        u[0] = dist(rng);
        const double t = 1.0 + dist(rng) / 2;
        EXPECT_LT((psocp::eval_dynamics_jacobian(analytic, x, z, u, t) -
                   psocp::eval_dynamics_jacobian(numeric, x, z, u, t))
                      .cwiseAbs()
                      .maxCoeff(),
                  1e-5);
        EXPECT_LT((psocp::eval_path_jacobian(analytic, x, z, u, t) -
                   psocp::eval_path_jacobian(numeric, x, z, u, t))
                      .cwiseAbs()
                      .maxCoeff(),
                  1e-5);
        EXPECT_LT((psocp::eval_cost_gradient(analytic, x, z, u, t) -
                   psocp::eval_cost_gradient(numeric, x, z, u, t))
                      .cwiseAbs()
                      .maxCoeff(),
                  1e-5 * 400);
    }
}

TEST(PendulumProblem, PathGradientClosedForm) {
    const auto prob = psocp::make_pendulum_problem(PendulumParams{});
    Vector x(4), z(1), u(1);
    x << 0.3, -1.0, 1.9, 0.5;
    z << 0.7;
    u << -0.2;
    Eigen::RowVectorXd expected(6);
    expected << 0.6, 0, 3.8, 0, 0, 0;
    EXPECT_LT((psocp::eval_path_jacobian(prob, x, z, u, 0.0).row(0) - expected).cwiseAbs().maxCoeff(),
              1e-12);
}

TEST(ReducedProblem, AnalyticDerivativesMatchDifferences) {
    auto analytic = psocp::make_reduced_pendulum_problem(PendulumParams{});
    auto numeric = analytic;
    numeric.dynamics_jacobian = nullptr;
    numeric.cost_gradient = nullptr;
    Vector x(2), z(0), u(1);
    x << 0.8, -0.4;
    u << 1.3;
    EXPECT_LT((psocp::eval_dynamics_jacobian(analytic, x, z, u, 0.6) -
               psocp::eval_dynamics_jacobian(numeric, x, z, u, 0.6))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-6);
    EXPECT_LT((psocp::eval_cost_gradient(analytic, x, z, u, 0.6) -
               psocp::eval_cost_gradient(numeric, x, z, u, 0.6))
                  .cwiseAbs()
                  .maxCoeff(),
              1e-4);
    EXPECT_EQ(psocp::eval_path_jacobian(analytic, x, z, u, 0.6).rows(), 0);
}

TEST(OcpProblem, ValidateRejectsInconsistentInitialState) {
    auto prob = psocp::make_pendulum_problem(PendulumParams{});
    prob.initial_state << 1, 0, 1, 0;
    EXPECT_THROW(prob.validate(), psocp::ConfigurationError);
}

TEST(OcpProblem, ValidateRejectsSwappedBounds) {
    auto prob = psocp::make_pendulum_problem(PendulumParams{});
    prob.path_lower[0] = 1.0;
    EXPECT_THROW(prob.validate(), psocp::ConfigurationError);
}

}  // namespace
