#include "psocp/basis.hpp"

#include "psocp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace psocp {

LegendreValue legendre(int n, double x) {
    if (n == 0) return {1.0, 0.0};
    double p_prev = 1.0;
    double p = x;
    double dp_prev = 0.0;
    double dp = 1.0;
    for (int k = 2; k <= n; ++k) {
        const double p_next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
        const double dp_next = dp_prev + (2.0 * k - 1.0) * p;
        p_prev = p;
        p = p_next;
        dp_prev = dp;
        dp = dp_next;
    }
    return {p, dp};
}

std::vector<double> lgl_nodes(int order) {
    if (order < 1) {
        throw InvalidOrderError("LGL order must be >= 1, got " + std::to_string(order));
    }
    const int n = order;
    std::vector<double> nodes(static_cast<size_t>(n + 1));
    nodes.front() = -1.0;
    nodes.back() = 1.0;

    // Newton on (1 - x^2) P_N'(x) using the identity
    // (1 - x^2) P_N' = N (P_{N-1} - x P_N), started from Chebyshev-Lobatto points.
    for (int j = 1; j < n; ++j) {
        double x = -std::cos(std::numbers::pi * j / n);
        for (int it = 0; it < 100; ++it) {
            double p_prev = 1.0;
            double p = x;
            for (int k = 2; k <= n; ++k) {
                const double p_next = ((2.0 * k - 1.0) * x * p - (k - 1.0) * p_prev) / k;
                p_prev = p;
                p = p_next;
            }
            const double dx = (x * p - p_prev) / ((n + 1) * p);
            x -= dx;
            if (std::abs(dx) <= 1e-15) break;
        }
        nodes[static_cast<size_t>(j)] = x;
    }

    // Enforce exact antisymmetry so nodes[j] == -nodes[N-j].
    for (int j = 0; j <= n / 2; ++j) {
        const auto lo = static_cast<size_t>(j);
        const auto hi = static_cast<size_t>(n - j);
        const double half = 0.5 * (nodes[hi] - nodes[lo]);
        nodes[lo] = -half;
        nodes[hi] = half;
    }
    if (n % 2 == 0) nodes[static_cast<size_t>(n / 2)] = 0.0;
    return nodes;
}

std::vector<double> lgl_weights(std::span<const double> nodes) {
    const int n = static_cast<int>(nodes.size()) - 1;
    if (n < 1) throw InvalidOrderError("LGL weights need at least two nodes");
    std::vector<double> w(nodes.size());
    const double scale = 2.0 / (static_cast<double>(n) * (n + 1));
    for (size_t j = 0; j < nodes.size(); ++j) {
        const double p = legendre(n, nodes[j]).value;
        w[j] = scale / (p * p);
    }
    return w;
}

std::vector<double> barycentric_weights(std::span<const double> nodes) {
    std::vector<double> b(nodes.size(), 1.0);
    for (size_t j = 0; j < nodes.size(); ++j) {
        for (size_t k = 0; k < nodes.size(); ++k) {
            if (k != j) b[j] *= (nodes[j] - nodes[k]);
        }
        b[j] = 1.0 / b[j];
    }
    double largest = 0.0;
    for (double v : b) largest = std::max(largest, std::abs(v));
    for (double& v : b) v /= largest;
    return b;
}

Eigen::MatrixXd diff_matrix(std::span<const double> nodes,
                            std::span<const double> bary_weights) {
    const auto m = static_cast<Eigen::Index>(nodes.size());
    Eigen::MatrixXd d = Eigen::MatrixXd::Zero(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        double row_sum = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) {
            if (k == j) continue;
            const auto jj = static_cast<size_t>(j);
            const auto kk = static_cast<size_t>(k);
            d(j, k) = (bary_weights[kk] / bary_weights[jj]) / (nodes[jj] - nodes[kk]);
            row_sum += d(j, k);
        }
        d(j, j) = -row_sum;
    }
    return d;
}

double interpolate(std::span<const double> nodes, std::span<const double> bary_weights,
                   std::span<const double> values, double tau) {
    if (!(tau >= -1.0 && tau <= 1.0)) {
        throw DomainError("interpolation point " + std::to_string(tau) +
                          " outside [-1, 1]");
    }
    double num = 0.0;
    double den = 0.0;
    for (size_t j = 0; j < nodes.size(); ++j) {
        const double diff = tau - nodes[j];
        if (diff == 0.0) return values[j];
        const double t = bary_weights[j] / diff;
        num += t * values[j];
        den += t;
    }
    return num / den;
}

Grid::Grid(int order)
    : order_(order),
      nodes_(lgl_nodes(order)),
      weights_(lgl_weights(nodes_)),
      bary_(barycentric_weights(nodes_)),
      diff_(diff_matrix(nodes_, bary_)) {}

}  // namespace psocp
