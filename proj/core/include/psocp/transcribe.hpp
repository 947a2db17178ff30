#pragma once

#include "psocp/basis.hpp"
#include "psocp/nlp.hpp"
#include "psocp/ocp.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace psocp {

/// Nodal values of a collocated trajectory. Row j holds node j.
struct Trajectory {
    Vector time;       // N+1
    Matrix states;     // (N+1) x nx
    Matrix algebraic;  // (N+1) x na
    Matrix controls;   // (N+1) x nu
};

/// Maps (node, channel) to the flat decision index. Variables are stored node
/// by node as [x, z, u].
class VariableLayout {
public:
    VariableLayout() = default;
    VariableLayout(int nodes, int nx, int na, int nu)
        : nodes_(nodes), nx_(nx), na_(na), nu_(nu) {}

    [[nodiscard]] int nodes() const noexcept { return nodes_; }
    [[nodiscard]] int width() const noexcept { return nx_ + na_ + nu_; }
    [[nodiscard]] int size() const noexcept { return nodes_ * width(); }
    [[nodiscard]] int state(int node, int i) const noexcept { return node * width() + i; }
    [[nodiscard]] int algebraic(int node, int i) const noexcept {
        return node * width() + nx_ + i;
    }
    [[nodiscard]] int control(int node, int i) const noexcept {
        return node * width() + nx_ + na_ + i;
    }

    [[nodiscard]] Vector flatten(const Trajectory& traj) const;
    /// Node times are filled from `times` when given.
    [[nodiscard]] Trajectory unflatten(const Vector& v, const Vector& times = {}) const;

private:
    int nodes_ = 0;
    int nx_ = 0;
    int na_ = 0;
    int nu_ = 0;
};

enum class RowKind { Defect, Path, Boundary };

/// Constraint row tag. For defects and path rows `node` is the collocation
/// node and `channel` the state/path index. Boundary rows carry the node
/// (0 or N) and the constrained state channel.
struct RowTag {
    RowKind kind;
    int node;
    int channel;
};

/// Affine map from scaled decision variables to physical values,
/// physical = offset + gain * scaled, one entry per point channel [x, z, u].
struct ChannelScaling {
    Vector offset;
    Vector gain;

    [[nodiscard]] static ChannelScaling identity(int width) {
        return {Vector::Zero(width), Vector::Ones(width)};
    }
};

struct TranscriptionOptions {
    std::optional<ChannelScaling> scaling;
};

/// Legendre-Gauss-Lobatto collocation of an OcpProblem.
///
/// Rows, in order:
///   defect(j, i)  = sum_k D_jk X_k,i - (T/2) f_i(X_j, Z_j, U_j, t_j)   for all nodes j
///   path(j, k)    = h_k(X_j, Z_j, U_j, t_j) - h^L_k                     for all nodes j
///   boundary      = X_0 - x0, then X_N,i - value for each terminal condition
/// Objective (T/2) sum_j w_j l(X_j, Z_j, U_j, t_j).
///
/// Decision vectors passed in and out are in scaled units; `layout().unflatten`
/// of `to_physical(v)` gives the physical trajectory.
class CollocationNlp final : public NlpProblem {
public:
    CollocationNlp(OcpProblem problem, Grid grid, TranscriptionOptions options = {});

    [[nodiscard]] int num_variables() const override { return layout_.size(); }
    [[nodiscard]] int num_constraints() const override {
        return static_cast<int>(rows_.size());
    }
    [[nodiscard]] double objective(const Vector& v) const override;
    [[nodiscard]] Vector objective_gradient(const Vector& v) const override;
    [[nodiscard]] Vector constraints(const Vector& v) const override;
    [[nodiscard]] Matrix jacobian(const Vector& v) const override;
    /// One block per node: every term of the Lagrangian touches a single node
    /// except the linear differentiation part.
    [[nodiscard]] std::vector<std::pair<int, int>> hessian_blocks() const override;

    [[nodiscard]] const OcpProblem& problem() const noexcept { return problem_; }
    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] const VariableLayout& layout() const noexcept { return layout_; }
    [[nodiscard]] const std::vector<RowTag>& rows() const noexcept { return rows_; }
    [[nodiscard]] const Vector& times() const noexcept { return times_; }
    [[nodiscard]] const ChannelScaling& scaling() const noexcept { return scaling_; }

    [[nodiscard]] Vector to_physical(const Vector& scaled) const;
    [[nodiscard]] Vector to_scaled(const Vector& physical) const;

    /// Physical trajectory of a scaled decision vector.
    [[nodiscard]] Trajectory trajectory(const Vector& scaled) const;
    /// Scaled decision vector of a physical trajectory.
    [[nodiscard]] Vector decision(const Trajectory& traj) const;

    /// Cold start: states held at the initial state, algebraic variables and
    /// controls zero. Returned in scaled units.
    [[nodiscard]] Vector default_start() const;

    [[nodiscard]] int first_path_row() const noexcept { return layout_.nodes() * problem_.nx; }
    [[nodiscard]] int first_boundary_row() const noexcept {
        return first_path_row() + layout_.nodes() * problem_.nh;
    }

private:
    struct NodePoint {
        Vector x;
        Vector z;
        Vector u;
        double t;
    };
    [[nodiscard]] NodePoint point(const Vector& physical, int node) const;
    [[nodiscard]] Matrix dynamics_jacobian(const NodePoint& pt, int node) const;
    [[nodiscard]] Matrix path_jacobian(const NodePoint& pt, int node) const;
    [[nodiscard]] Vector cost_gradient(const NodePoint& pt, int node) const;

    OcpProblem problem_;
    Grid grid_;
    ChannelScaling scaling_;
    VariableLayout layout_;
    std::vector<RowTag> rows_;
    Vector times_;
};

/// Builds the collocation NLP. Throws ConfigurationError on dimension mismatch
/// or a grid of order below 2.
[[nodiscard]] std::shared_ptr<const CollocationNlp> transcribe(
    const OcpProblem& problem, const Grid& grid, const TranscriptionOptions& options = {});

}  // namespace psocp
