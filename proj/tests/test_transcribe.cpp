#include <psocp/errors.hpp>
#include <psocp/transcribe.hpp>

#include <gtest/gtest.h>

#include <cmath>

namespace {

using psocp::Grid;
using psocp::Matrix;
using psocp::OcpProblem;
using psocp::PendulumParams;
using psocp::Vector;

// One state, one control, no path constraint; pieces are filled per test.
OcpProblem scalar_problem(double horizon) {
    OcpProblem p;
    p.name = "scalar";
    p.nx = 1;
    p.nu = 1;
    p.horizon = horizon;
    p.initial_state = Vector::Zero(1);
    p.dynamics = [](const Vector&, const Vector&, const Vector&, double) {
        return Vector::Ones(1);
    };
    p.running_cost = [](const Vector&, const Vector&, const Vector&, double) { return 1.0; };
    return p;
}

TEST(Transcribe, PendulumCountsAtOrderTwo) {
    const auto nlp = psocp::transcribe(psocp::make_pendulum_problem(PendulumParams{}), Grid(2));
    EXPECT_EQ(nlp->num_variables(), 18);
    EXPECT_EQ(nlp->num_constraints(), 19);
    EXPECT_EQ(nlp->first_path_row(), 12);
    EXPECT_EQ(nlp->first_boundary_row(), 15);
}

TEST(Transcribe, RejectsOrderOne) {
    EXPECT_THROW((void)psocp::transcribe(scalar_problem(1.0), Grid(1)), psocp::ConfigurationError);
}

TEST(Transcribe, RejectsDimensionMismatch) {
    auto p = scalar_problem(1.0);
    p.initial_state = Vector::Zero(2);
    EXPECT_THROW((void)psocp::transcribe(p, Grid(4)), psocp::ConfigurationError);
}

TEST(Transcribe, UnitCostIntegratesToHorizon) {
    for (double T : {0.5, 2.0, 7.3}) {
        const auto nlp = psocp::transcribe(scalar_problem(T), Grid(6));
        const Vector v = Vector::LinSpaced(nlp->num_variables(), -1.0, 3.0);
        EXPECT_NEAR(nlp->objective(v), T, 1e-12);
    }
}

TEST(Transcribe, ControlSquaredWithUnitControl) {
    auto p = scalar_problem(2.0);
    p.running_cost = [](const Vector&, const Vector&, const Vector& u, double) { return u[0] * u[0]; };
    const auto nlp = psocp::transcribe(p, Grid(5));
    Vector v = Vector::Zero(nlp->num_variables());
    for (int j = 0; j < 6; ++j) v[nlp->layout().control(j, 0)] = 1.0;
    EXPECT_NEAR(nlp->objective(nlp->to_scaled(v)), 2.0, 1e-12);
}

TEST(Transcribe, TimeIntegrand) {
    auto p = scalar_problem(3.0);
    p.running_cost = [](const Vector&, const Vector&, const Vector&, double t) { return t; };
    const auto nlp = psocp::transcribe(p, Grid(3));
    EXPECT_NEAR(nlp->objective(nlp->default_start()), 4.5, 1e-12);
}

TEST(Transcribe, QuadratureExactForPolynomialIntegrand) {
    // t^(2N-1) with N = 5 integrates to T^10 / 10.
    auto p = scalar_problem(1.7);
    p.running_cost = [](const Vector&, const Vector&, const Vector&, double t) {
        return std::pow(t, 9);
    };
    const auto nlp = psocp::transcribe(p, Grid(5));
    EXPECT_NEAR(nlp->objective(nlp->default_start()), std::pow(1.7, 10) / 10, 1e-12 * std::pow(1.7, 10));
}

TEST(Transcribe, ConstantStatesWithZeroDynamicsHaveZeroDefects) {
    auto p = scalar_problem(1.0);
    p.initial_state[0] = 4.0;
    p.dynamics = [](const Vector&, const Vector&, const Vector&, double) { return Vector::Zero(1); };
    const auto nlp = psocp::transcribe(p, Grid(8));
    EXPECT_LE(nlp->constraints(nlp->default_start()).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Transcribe, LinearTrajectoryHasZeroDefects) {
    const double T = 2.5;
    const auto nlp = psocp::transcribe(scalar_problem(T), Grid(7));
    Vector v = Vector::Zero(nlp->num_variables());
    for (int j = 0; j < 8; ++j) v[nlp->layout().state(j, 0)] = nlp->times()[j];
    const Vector c = nlp->constraints(nlp->to_scaled(v));
    EXPECT_LE(c.cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Transcribe, BoundaryRowsCarryInitialOffset) {
    const auto nlp = psocp::transcribe(psocp::make_pendulum_problem(PendulumParams{}), Grid(4));
    auto traj = nlp->trajectory(nlp->default_start());
    traj.states.row(0) += Eigen::RowVector4d(0.1, -0.2, 0.3, 0.4);
    const Vector c = nlp->constraints(nlp->decision(traj));
    const int b = nlp->first_boundary_row();
    EXPECT_NEAR(c[b + 0], 0.1, 1e-15);
    EXPECT_NEAR(c[b + 1], -0.2, 1e-15);
    EXPECT_NEAR(c[b + 2], 0.3, 1e-15);
    EXPECT_NEAR(c[b + 3], 0.4, 1e-15);
}

TEST(Transcribe, PathRowsVanishOnCircle) {
    const PendulumParams params;
    const auto nlp = psocp::transcribe(psocp::make_pendulum_problem(params), Grid(6));
    auto traj = nlp->trajectory(nlp->default_start());
    for (int j = 0; j < 7; ++j) {
        const double phi = 0.3 * j;
        traj.states(j, 0) = params.L * std::sin(phi);
        traj.states(j, 2) = params.L * std::cos(phi);
    }
    const Vector c = nlp->constraints(nlp->decision(traj));
    for (int r = nlp->first_path_row(); r < nlp->first_boundary_row(); ++r) {
        EXPECT_NEAR(c[r], 0.0, 1e-12);
    }
}

TEST(Transcribe, RowTagsFollowLayout) {
    const auto nlp = psocp::transcribe(psocp::make_pendulum_problem(PendulumParams{}), Grid(3));
    const auto& rows = nlp->rows();
    ASSERT_EQ(rows.size(), 4u * 4 + 4 + 4);
    EXPECT_EQ(rows[0].kind, psocp::RowKind::Defect);
    EXPECT_EQ(rows[5].node, 1);
    EXPECT_EQ(rows[5].channel, 1);
    EXPECT_EQ(rows[16].kind, psocp::RowKind::Path);
    EXPECT_EQ(rows[17].node, 1);
    EXPECT_EQ(rows[20].kind, psocp::RowKind::Boundary);
    EXPECT_EQ(rows[20].node, 0);
}

TEST(Transcribe, DefectBlockCarriesDifferentiationMatrix) {
    // With f independent of the state, the state columns of the defect block
    // are exactly D (in physical units) and the control columns vanish.
    auto p = scalar_problem(1.0);
    const Grid g(5);
    const auto nlp = psocp::transcribe(p, g);
    const Matrix j = nlp->jacobian(nlp->default_start());
    const Vector gain = nlp->scaling().gain;
    for (int r = 0; r < 6; ++r) {
        for (int k = 0; k < 6; ++k) {
            EXPECT_NEAR(j(r, nlp->layout().state(k, 0)) / gain[0], g.diff()(r, k), 1e-13);
            EXPECT_EQ(j(r, nlp->layout().control(k, 0)), 0.0);
        }
    }
}

TEST(Transcribe, JacobianMatchesFiniteDifferences) {
    PendulumParams params;
    params.alpha = 0.1;
    const auto nlp = psocp::transcribe(psocp::make_pendulum_problem(params), Grid(5));
    Vector v = Vector::LinSpaced(nlp->num_variables(), -0.8, 1.1);
    for (Eigen::Index i = 0; i < v.size(); ++i) v[i] += 0.3 * std::sin(3.0 * i);
    const Matrix analytic = nlp->jacobian(v);
    Matrix fd(analytic.rows(), analytic.cols());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double h = 1e-6;
        Vector hi = v;
        Vector lo = v;
        hi[i] += h;
        lo[i] -= h;
        fd.col(i) = (nlp->constraints(hi) - nlp->constraints(lo)) / (2 * h);
    }
    EXPECT_LT((analytic - fd).cwiseAbs().maxCoeff(), 1e-5);

    Vector grad_fd(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double h = 1e-6;
        Vector hi = v;
        Vector lo = v;
        hi[i] += h;
        lo[i] -= h;
        grad_fd[i] = (nlp->objective(hi) - nlp->objective(lo)) / (2 * h);
    }
    EXPECT_LT((nlp->objective_gradient(v) - grad_fd).cwiseAbs().maxCoeff(),
              1e-6 * std::max(1.0, grad_fd.cwiseAbs().maxCoeff()));
}

TEST(Transcribe, ConstantShiftInUnusedChannel) {
    // The control of the scalar problem enters neither f nor the boundary rows.
    const auto nlp = psocp::transcribe(scalar_problem(1.0), Grid(4));
    const auto base = nlp->trajectory(nlp->default_start());
    auto shifted = base;
    shifted.controls.array() += 2.5;
    EXPECT_EQ(nlp->constraints(nlp->decision(base)), nlp->constraints(nlp->decision(shifted)));
}

TEST(Transcribe, NonFiniteEvaluationNamesNode) {
    auto p = scalar_problem(1.0);
    p.running_cost = [](const Vector&, const Vector&, const Vector&, double t) {
        return t > 0.99 ? NAN : 0.0;
    };
    const auto nlp = psocp::transcribe(p, Grid(4));
    try {
        (void)nlp->objective(nlp->default_start());
        FAIL() << "expected an evaluation error";
    } catch (const psocp::EvaluationError& e) {
        EXPECT_EQ(e.node(), 4);
    }
}

TEST(Transcribe, TrajectoryRoundTrip) {
    const auto nlp = psocp::transcribe(psocp::make_pendulum_problem(PendulumParams{}), Grid(6));
    const Vector v = Vector::LinSpaced(nlp->num_variables(), -2.0, 2.0);
    EXPECT_LT((nlp->decision(nlp->trajectory(v)) - v).cwiseAbs().maxCoeff(), 1e-13);
}

}  // namespace
