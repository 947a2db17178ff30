#pragma once

#include "psocp/basis.hpp"
#include "psocp/ocp.hpp"
#include "psocp/transcribe.hpp"

#include <functional>
#include <vector>

namespace psocp {

using OdeRhs = std::function<Vector(double t, const Vector& x)>;

struct IvpSetup {
    OdeRhs rhs;
    double t0 = 0.0;
    double tf = 1.0;
    Vector x0;
    double rel_tol = 1e-8;
    double abs_tol = 1e-10;
    int max_steps = 100000;
    std::vector<double> sample_times;  // ascending, inside [t0, tf]

    /// Throws ConfigurationError on a missing rhs, tf <= t0, non-positive
    /// tolerances or unsorted/out-of-range sample times.
    void validate() const;
};

struct IvpResult {
    std::vector<double> times;  // the requested sample times
    Matrix states;              // one row per sample
    Vector final_state;         // x(tf)
    int accepted_steps = 0;
    int rejected_steps = 0;
    int rhs_evaluations = 0;
};

/// Dormand-Prince 5(4) with PI step-size control. A step is accepted when every
/// component of the embedded error estimate is within rel_tol |x| + abs_tol.
/// Samples come from the 4th-order continuous extension of the accepted step
/// containing them. Throws IntegrationError (MaxSteps, StepUnderflow).
[[nodiscard]] IvpResult propagate(const IvpSetup& setup);

struct ControlSample {
    Vector u;
    Vector z;
};

/// Continuous control and algebraic signals from nodal values, by barycentric
/// interpolation in tau = 2t/T - 1.
class ControlSignal {
public:
    ControlSignal(const Trajectory& traj, Grid grid, double horizon);

    /// Throws DomainError for t outside [0, T].
    [[nodiscard]] ControlSample operator()(double t) const;

private:
    Grid grid_;
    double horizon_;
    std::vector<std::vector<double>> controls_;   // per channel
    std::vector<std::vector<double>> algebraic_;  // per channel
};

[[nodiscard]] ControlSignal control_signal(const Trajectory& traj, const Grid& grid,
                                           double horizon);

}  // namespace psocp
