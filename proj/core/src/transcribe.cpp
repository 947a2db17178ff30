#include "psocp/transcribe.hpp"

#include "psocp/errors.hpp"

#include <cmath>
#include <string>
#include <utility>

namespace psocp {

namespace {

void require_finite(const Vector& v, const char* what, int node) {
    if (!v.allFinite()) throw EvaluationError(std::string("non-finite ") + what, node);
}

void require_finite(const Matrix& m, const char* what, int node) {
    if (!m.allFinite()) throw EvaluationError(std::string("non-finite ") + what, node);
}

}  // namespace

Vector VariableLayout::flatten(const Trajectory& traj) const {
    Vector v(size());
    for (int j = 0; j < nodes_; ++j) {
        for (int i = 0; i < nx_; ++i) v[state(j, i)] = traj.states(j, i);
        for (int i = 0; i < na_; ++i) v[algebraic(j, i)] = traj.algebraic(j, i);
        for (int i = 0; i < nu_; ++i) v[control(j, i)] = traj.controls(j, i);
    }
    return v;
}

Trajectory VariableLayout::unflatten(const Vector& v, const Vector& times) const {
    Trajectory traj;
    traj.time = times.size() == nodes_ ? times : Vector::Zero(nodes_);
    traj.states.resize(nodes_, nx_);
    traj.algebraic.resize(nodes_, na_);
    traj.controls.resize(nodes_, nu_);
    for (int j = 0; j < nodes_; ++j) {
        for (int i = 0; i < nx_; ++i) traj.states(j, i) = v[state(j, i)];
        for (int i = 0; i < na_; ++i) traj.algebraic(j, i) = v[algebraic(j, i)];
        for (int i = 0; i < nu_; ++i) traj.controls(j, i) = v[control(j, i)];
    }
    return traj;
}

CollocationNlp::CollocationNlp(OcpProblem problem, Grid grid, TranscriptionOptions options)
    : problem_(std::move(problem)), grid_(std::move(grid)) {
    problem_.validate();
    if (grid_.order() < 2) {
        throw ConfigurationError("collocation needs a grid of order >= 2, got " +
                                 std::to_string(grid_.order()));
    }
    for (int k = 0; k < problem_.nh; ++k) {
        if (problem_.path_lower[k] != problem_.path_upper[k]) {
            throw ConfigurationError("only equality path constraints are transcribed");
        }
    }
    const int width = problem_.point_width();
    scaling_ = options.scaling.value_or(ChannelScaling::identity(width));
    if (scaling_.offset.size() != width || scaling_.gain.size() != width) {
        throw ConfigurationError("channel scaling has " + std::to_string(scaling_.gain.size()) +
                                 " entries, problem has " + std::to_string(width));
    }
    for (int i = 0; i < width; ++i) {
        if (!(scaling_.gain[i] != 0.0) || !std::isfinite(scaling_.gain[i])) {
            throw ConfigurationError("channel scaling gains must be finite and non-zero");
        }
    }

    const int n_nodes = grid_.size();
    layout_ = VariableLayout(n_nodes, problem_.nx, problem_.na, problem_.nu);
    times_.resize(n_nodes);
    for (int j = 0; j < n_nodes; ++j) times_[j] = grid_.time_at(j, problem_.horizon);

    rows_.reserve(static_cast<size_t>(n_nodes * (problem_.nx + problem_.nh) + problem_.nx +
                                      static_cast<int>(problem_.terminal.size())));
    for (int j = 0; j < n_nodes; ++j) {
        for (int i = 0; i < problem_.nx; ++i) rows_.push_back({RowKind::Defect, j, i});
    }
    for (int j = 0; j < n_nodes; ++j) {
        for (int k = 0; k < problem_.nh; ++k) rows_.push_back({RowKind::Path, j, k});
    }
    for (int i = 0; i < problem_.nx; ++i) rows_.push_back({RowKind::Boundary, 0, i});
    for (const auto& tc : problem_.terminal) {
        rows_.push_back({RowKind::Boundary, n_nodes - 1, tc.channel});
    }
}

Vector CollocationNlp::to_physical(const Vector& scaled) const {
    Vector out(scaled.size());
    const int width = layout_.width();
    for (Eigen::Index idx = 0; idx < scaled.size(); ++idx) {
        const auto ch = static_cast<Eigen::Index>(idx % width);
        out[idx] = scaling_.offset[ch] + scaling_.gain[ch] * scaled[idx];
    }
    return out;
}

Vector CollocationNlp::to_scaled(const Vector& physical) const {
    Vector out(physical.size());
    const int width = layout_.width();
    for (Eigen::Index idx = 0; idx < physical.size(); ++idx) {
        const auto ch = static_cast<Eigen::Index>(idx % width);
        out[idx] = (physical[idx] - scaling_.offset[ch]) / scaling_.gain[ch];
    }
    return out;
}

Trajectory CollocationNlp::trajectory(const Vector& scaled) const {
    return layout_.unflatten(to_physical(scaled), times_);
}

Vector CollocationNlp::decision(const Trajectory& traj) const {
    return to_scaled(layout_.flatten(traj));
}

Vector CollocationNlp::default_start() const {
    Trajectory traj;
    const int n = layout_.nodes();
    traj.time = times_;
    traj.states = problem_.initial_state.transpose().replicate(n, 1);
    traj.algebraic = Matrix::Zero(n, problem_.na);
    traj.controls = Matrix::Zero(n, problem_.nu);
    return decision(traj);
}

CollocationNlp::NodePoint CollocationNlp::point(const Vector& physical, int node) const {
    const int base = layout_.state(node, 0);
    return {physical.segment(base, problem_.nx),
            physical.segment(base + problem_.nx, problem_.na),
            physical.segment(base + problem_.nx + problem_.na, problem_.nu),
            times_[node]};
}

Matrix CollocationNlp::dynamics_jacobian(const NodePoint& pt, int node) const {
    Matrix jac = eval_dynamics_jacobian(problem_, pt.x, pt.z, pt.u, pt.t);
    require_finite(jac, "dynamics Jacobian", node);
    return jac;
}

Matrix CollocationNlp::path_jacobian(const NodePoint& pt, int node) const {
    Matrix jac = eval_path_jacobian(problem_, pt.x, pt.z, pt.u, pt.t);
    require_finite(jac, "path Jacobian", node);
    return jac;
}

Vector CollocationNlp::cost_gradient(const NodePoint& pt, int node) const {
    Vector grad = eval_cost_gradient(problem_, pt.x, pt.z, pt.u, pt.t);
    require_finite(grad, "cost gradient", node);
    return grad;
}

double CollocationNlp::objective(const Vector& v) const {
    const Vector phys = to_physical(v);
    const auto w = grid_.weights();
    double sum = 0.0;
    for (int j = 0; j < layout_.nodes(); ++j) {
        const NodePoint pt = point(phys, j);
        const double l = problem_.running_cost(pt.x, pt.z, pt.u, pt.t);
        if (!std::isfinite(l)) throw EvaluationError("non-finite running cost", j);
        sum += w[static_cast<size_t>(j)] * l;
    }
    return 0.5 * problem_.horizon * sum;
}

Vector CollocationNlp::objective_gradient(const Vector& v) const {
    const Vector phys = to_physical(v);
    const auto w = grid_.weights();
    const double half_t = 0.5 * problem_.horizon;
    Vector grad = Vector::Zero(v.size());
    const int width = layout_.width();
    for (int j = 0; j < layout_.nodes(); ++j) {
        const NodePoint pt = point(phys, j);
        grad.segment(layout_.state(j, 0), width) =
            half_t * w[static_cast<size_t>(j)] * cost_gradient(pt, j);
    }
    for (Eigen::Index idx = 0; idx < grad.size(); ++idx) {
        grad[idx] *= scaling_.gain[idx % width];
    }
    return grad;
}

Vector CollocationNlp::constraints(const Vector& v) const {
    const Vector phys = to_physical(v);
    const int n = layout_.nodes();
    const int nx = problem_.nx;
    const int nh = problem_.nh;
    const double half_t = 0.5 * problem_.horizon;
    const Matrix& d = grid_.diff();
    const Trajectory traj = layout_.unflatten(phys, times_);
    const Matrix dx = d * traj.states;

    Vector c(num_constraints());
    for (int j = 0; j < n; ++j) {
        const NodePoint pt = point(phys, j);
        const Vector f = problem_.dynamics(pt.x, pt.z, pt.u, pt.t);
        require_finite(f, "dynamics", j);
        c.segment(j * nx, nx) = dx.row(j).transpose() - half_t * f;
        if (nh > 0) {
            const Vector h = problem_.path(pt.x, pt.z, pt.u, pt.t);
            require_finite(h, "path constraint", j);
            c.segment(first_path_row() + j * nh, nh) = h - problem_.path_lower;
        }
    }
    int row = first_boundary_row();
    for (int i = 0; i < nx; ++i) c[row++] = traj.states(0, i) - problem_.initial_state[i];
    for (const auto& tc : problem_.terminal) c[row++] = traj.states(n - 1, tc.channel) - tc.value;
    return c;
}

Matrix CollocationNlp::jacobian(const Vector& v) const {
    const Vector phys = to_physical(v);
    const int n = layout_.nodes();
    const int nx = problem_.nx;
    const int nh = problem_.nh;
    const int width = layout_.width();
    const double half_t = 0.5 * problem_.horizon;
    const Matrix& d = grid_.diff();

    Matrix jac = Matrix::Zero(num_constraints(), num_variables());
    for (int j = 0; j < n; ++j) {
        for (int i = 0; i < nx; ++i) {
            for (int k = 0; k < n; ++k) jac(j * nx + i, layout_.state(k, i)) = d(j, k);
        }
        const NodePoint pt = point(phys, j);
        jac.block(j * nx, layout_.state(j, 0), nx, width) -= half_t * dynamics_jacobian(pt, j);
        if (nh > 0) {
            jac.block(first_path_row() + j * nh, layout_.state(j, 0), nh, width) =
                path_jacobian(pt, j);
        }
    }
    int row = first_boundary_row();
    for (int i = 0; i < nx; ++i) jac(row++, layout_.state(0, i)) = 1.0;
    for (const auto& tc : problem_.terminal) jac(row++, layout_.state(n - 1, tc.channel)) = 1.0;

    for (int col = 0; col < jac.cols(); ++col) jac.col(col) *= scaling_.gain[col % width];
    return jac;
}

std::vector<std::pair<int, int>> CollocationNlp::hessian_blocks() const {
    std::vector<std::pair<int, int>> blocks;
    blocks.reserve(static_cast<size_t>(layout_.nodes()));
    for (int j = 0; j < layout_.nodes(); ++j) blocks.emplace_back(layout_.state(j, 0), layout_.width());
    return blocks;
}

std::shared_ptr<const CollocationNlp> transcribe(const OcpProblem& problem, const Grid& grid,
                                                 const TranscriptionOptions& options) {
    return std::make_shared<const CollocationNlp>(problem, grid, options);
}

}  // namespace psocp
