#include "psocp/integrate.hpp"

#include "psocp/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace psocp {

namespace {

// Dormand-Prince 5(4) tableau.
constexpr std::array<double, 7> kC = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
constexpr double kA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84},
};
// Fifth-order weights minus embedded fourth-order weights.
constexpr std::array<double, 7> kE = {71.0 / 57600,      0.0,          -71.0 / 16695,
                                      71.0 / 1920,       -17253.0 / 339200, 22.0 / 525,
                                      -1.0 / 40};
// Continuous extension: x(t + s h) = x + h sum_i k_i sum_p P[i][p] s^(p+1).
constexpr double kP[7][4] = {
    {1.0, -8048581381.0 / 2820520608, 8663915743.0 / 2820520608,
     -12715105075.0 / 11282082432},
    {0.0, 0.0, 0.0, 0.0},
    {0.0, 131558114200.0 / 32700410799, -68118460800.0 / 10900136933,
     87487479700.0 / 32700410799},
    {0.0, -1754552775.0 / 470086768, 14199869525.0 / 1410260304,
     -10690763975.0 / 1880347072},
    {0.0, 127303824393.0 / 49829197408, -318862633887.0 / 49829197408,
     701980252875.0 / 199316789632},
    {0.0, -282668133.0 / 205662961, 2019193451.0 / 616988883, -1453857185.0 / 822651844},
    {0.0, 40617522.0 / 29380423, -110615467.0 / 29380423, 69997945.0 / 29380423},
};

constexpr double kSafety = 0.9;
constexpr double kMinFactor = 0.2;
constexpr double kMaxFactor = 10.0;
constexpr double kBeta = 0.04;                   // PI gain on the previous error
constexpr double kAlpha = 0.2 - 0.75 * kBeta;  // gain on the current error

double error_ratio(const Vector& err, const Vector& x_old, const Vector& x_new, double rel,
                   double abs) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < err.size(); ++i) {
        const double scale = abs + rel * std::max(std::abs(x_old[i]), std::abs(x_new[i]));
        worst = std::max(worst, std::abs(err[i]) / scale);
    }
    return worst;
}

// Starting step from the size of the first two derivatives.
double initial_step(const IvpSetup& s, const Vector& f0, int& evals) {
    const Vector scale = (s.abs_tol + s.rel_tol * s.x0.array().abs()).matrix();
    const double d0 = (s.x0.array() / scale.array()).matrix().lpNorm<Eigen::Infinity>();
    const double d1 = (f0.array() / scale.array()).matrix().lpNorm<Eigen::Infinity>();
    const double span = s.tf - s.t0;
    double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h0 = std::min(h0, span);
    const Vector x1 = s.x0 + h0 * f0;
    const Vector f1 = s.rhs(s.t0 + h0, x1);
    ++evals;
    const double d2 = ((f1 - f0).array() / scale.array()).matrix().lpNorm<Eigen::Infinity>() / h0;
    const double h1 = std::max(d1, d2) <= 1e-15 ? std::max(1e-6, 1e-3 * h0)
                                                 : std::pow(0.01 / std::max(d1, d2), 0.2);
    return std::min({100.0 * h0, h1, span});
}

}  // namespace

void IvpSetup::validate() const {
    if (!rhs) throw ConfigurationError("initial value problem has no right-hand side");
    if (!(tf > t0) || !std::isfinite(t0) || !std::isfinite(tf)) {
        throw ConfigurationError("initial value problem needs tf > t0");
    }
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0)) {
        throw ConfigurationError("integration tolerances must be positive");
    }
    if (max_steps < 1) throw ConfigurationError("max_steps must be positive");
    if (x0.size() == 0 || !x0.allFinite()) {
        throw ConfigurationError("initial state must be non-empty and finite");
    }
    if (!std::is_sorted(sample_times.begin(), sample_times.end())) {
        throw ConfigurationError("sample times must be ascending");
    }
    if (!sample_times.empty() && (sample_times.front() < t0 || sample_times.back() > tf)) {
        throw ConfigurationError("sample times must lie in [t0, tf]");
    }
}

IvpResult propagate(const IvpSetup& s) {
    s.validate();
    const Eigen::Index n = s.x0.size();
    IvpResult out;
    out.times = s.sample_times;
    out.states.resize(static_cast<Eigen::Index>(s.sample_times.size()), n);
    size_t next_sample = 0;

    double t = s.t0;
    Vector x = s.x0;
    std::array<Vector, 7> k;
    k[0] = s.rhs(t, x);
    out.rhs_evaluations = 1;

    while (next_sample < s.sample_times.size() && s.sample_times[next_sample] <= t) {
        out.states.row(static_cast<Eigen::Index>(next_sample++)) = x.transpose();
    }

    const double span = s.tf - s.t0;
    const double min_step = 1e-14 * span;
    double h = initial_step(s, k[0], out.rhs_evaluations);
    double prev_err = 1e-4;
    bool rejected_last = false;

    while (t < s.tf) {
        if (out.accepted_steps >= s.max_steps) {
            throw IntegrationError(IntegrationError::Kind::MaxSteps,
                                   "integration exceeded " + std::to_string(s.max_steps) +
                                       " steps at t = " + std::to_string(t));
        }
        if (h < min_step) {
            throw IntegrationError(IntegrationError::Kind::StepUnderflow,
                                   "step size underflow at t = " + std::to_string(t));
        }
        // Land exactly on tf, and avoid leaving a sliver for the last step.
        bool last = false;
        if (t + h >= s.tf || t + 1.01 * h >= s.tf) {
            h = s.tf - t;
            last = true;
        }

        for (int st = 1; st < 7; ++st) {
            Vector xs = x;
            for (int j = 0; j < st; ++j) {
                if (kA[st][j] != 0.0) xs.noalias() += h * kA[st][j] * k[static_cast<size_t>(j)];
            }
            k[static_cast<size_t>(st)] = s.rhs(t + kC[static_cast<size_t>(st)] * h, xs);
        }
        out.rhs_evaluations += 6;
        // The last stage is evaluated at the fifth-order solution.
        Vector x_new = x;
        for (int j = 0; j < 6; ++j) {
            if (kA[6][j] != 0.0) x_new.noalias() += h * kA[6][j] * k[static_cast<size_t>(j)];
        }
        Vector err = Vector::Zero(n);
        for (size_t j = 0; j < 7; ++j) {
            if (kE[j] != 0.0) err.noalias() += h * kE[j] * k[j];
        }
        if (!x_new.allFinite() || !err.allFinite()) {
            ++out.rejected_steps;
            rejected_last = true;
            h *= kMinFactor;
            continue;
        }
        const double ratio = error_ratio(err, x, x_new, s.rel_tol, s.abs_tol);

        if (ratio <= 1.0) {
            const double t_new = last ? s.tf : t + h;
            while (next_sample < s.sample_times.size() &&
                   s.sample_times[next_sample] <= t_new) {
                const double sigma = (s.sample_times[next_sample] - t) / h;
                const std::array<double, 4> powers = {sigma, sigma * sigma, sigma * sigma * sigma,
                                                      sigma * sigma * sigma * sigma};
                Vector xs = x;
                for (size_t j = 0; j < 7; ++j) {
                    double coeff = 0.0;
                    for (size_t p = 0; p < 4; ++p) coeff += kP[j][p] * powers[p];
                    if (coeff != 0.0) xs.noalias() += h * coeff * k[j];
                }
                out.states.row(static_cast<Eigen::Index>(next_sample++)) = xs.transpose();
            }
            ++out.accepted_steps;
            t = t_new;
            x = std::move(x_new);
            k[0] = k[6];

            const double safe = std::max(ratio, 1e-10);
            double factor = kSafety * std::pow(safe, -kAlpha) * std::pow(prev_err, kBeta);
            factor = std::clamp(factor, kMinFactor, kMaxFactor);
            if (rejected_last) factor = std::min(factor, 1.0);
            prev_err = std::max(ratio, 1e-4);
            rejected_last = false;
            h *= factor;
        } else {
            ++out.rejected_steps;
            rejected_last = true;
            h *= std::max(kMinFactor, kSafety * std::pow(ratio, -kAlpha));
        }
    }
    out.final_state = x;
    return out;
}

ControlSignal::ControlSignal(const Trajectory& traj, Grid grid, double horizon)
    : grid_(std::move(grid)), horizon_(horizon) {
    if (!(horizon > 0.0)) throw ConfigurationError("control signal needs a positive horizon");
    if (traj.controls.rows() != grid_.size() || traj.algebraic.rows() != grid_.size()) {
        throw MappingError("trajectory does not match the grid");
    }
    auto columns = [](const Matrix& m) {
        std::vector<std::vector<double>> cols(static_cast<size_t>(m.cols()));
        for (Eigen::Index c = 0; c < m.cols(); ++c) {
            cols[static_cast<size_t>(c)].assign(m.col(c).data(), m.col(c).data() + m.rows());
        }
        return cols;
    };
    controls_ = columns(traj.controls);
    algebraic_ = columns(traj.algebraic);
}

ControlSample ControlSignal::operator()(double t) const {
    if (!(t >= 0.0 && t <= horizon_)) {
        throw DomainError("control signal queried at t = " + std::to_string(t) +
                          " outside [0, " + std::to_string(horizon_) + "]");
    }
    // Clamp the last bit of rounding so the end points map to tau = -1 and +1.
    const double tau = std::clamp(2.0 * t / horizon_ - 1.0, -1.0, 1.0);
    ControlSample out{Vector(static_cast<Eigen::Index>(controls_.size())),
                      Vector(static_cast<Eigen::Index>(algebraic_.size()))};
    for (size_t c = 0; c < controls_.size(); ++c) {
        out.u[static_cast<Eigen::Index>(c)] = grid_.interpolate(controls_[c], tau);
    }
    for (size_t c = 0; c < algebraic_.size(); ++c) {
        out.z[static_cast<Eigen::Index>(c)] = grid_.interpolate(algebraic_[c], tau);
    }
    return out;
}

ControlSignal control_signal(const Trajectory& traj, const Grid& grid, double horizon) {
    return ControlSignal(traj, grid, horizon);
}

}  // namespace psocp
