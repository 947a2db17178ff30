#pragma once

#include <Eigen/Dense>

#include <span>
#include <vector>

namespace psocp {

/// Legendre polynomial P_n(x) and its derivative, by the three-term recurrence.
struct LegendreValue {
    double value;
    double derivative;
};
[[nodiscard]] LegendreValue legendre(int n, double x);

/// Legendre-Gauss-Lobatto nodes on [-1, 1], ascending: the endpoints plus the
/// N-1 roots of P_N'. Throws InvalidOrderError for order < 1.
[[nodiscard]] std::vector<double> lgl_nodes(int order);

/// Quadrature weights 2 / (N(N+1) P_N(tau_j)^2) for the given LGL nodes.
[[nodiscard]] std::vector<double> lgl_weights(std::span<const double> nodes);

/// Barycentric weights 1 / prod_{k != j}(tau_j - tau_k), normalised so the
/// largest magnitude is 1.
[[nodiscard]] std::vector<double> barycentric_weights(std::span<const double> nodes);

/// First-order differentiation matrix of the nodal Lagrange basis. Off-diagonal
/// entries come from the barycentric weights; each diagonal entry is the
/// negative sum of its row, so constants are annihilated exactly.
[[nodiscard]] Eigen::MatrixXd diff_matrix(std::span<const double> nodes,
                                          std::span<const double> bary_weights);

/// Barycentric Lagrange interpolation at tau in [-1, 1]. Returns the nodal value
/// when tau coincides with a node. Throws DomainError outside [-1, 1].
[[nodiscard]] double interpolate(std::span<const double> nodes,
                                 std::span<const double> bary_weights,
                                 std::span<const double> values, double tau);

/// One-segment LGL grid of polynomial order N (N+1 nodes). Immutable.
class Grid {
public:
    explicit Grid(int order);

    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] int size() const noexcept { return order_ + 1; }
    [[nodiscard]] std::span<const double> nodes() const noexcept { return nodes_; }
    [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
    [[nodiscard]] std::span<const double> bary_weights() const noexcept { return bary_; }
    [[nodiscard]] const Eigen::MatrixXd& diff() const noexcept { return diff_; }

    [[nodiscard]] double interpolate(std::span<const double> values, double tau) const {
        return psocp::interpolate(nodes_, bary_, values, tau);
    }

    /// Physical time of node j on [0, horizon]: t = horizon (tau + 1) / 2.
    [[nodiscard]] double time_at(int j, double horizon) const {
        return 0.5 * horizon * (nodes_[static_cast<size_t>(j)] + 1.0);
    }

private:
    int order_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
    std::vector<double> bary_;
    Eigen::MatrixXd diff_;
};

}  // namespace psocp
