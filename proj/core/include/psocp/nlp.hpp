#pragma once

#include <Eigen/Dense>

#include <functional>
#include <utility>
#include <vector>

namespace psocp {

/// Equality-constrained nonlinear program: minimise f(v) subject to c(v) = 0.
class NlpProblem {
public:
    virtual ~NlpProblem() = default;

    [[nodiscard]] virtual int num_variables() const = 0;
    [[nodiscard]] virtual int num_constraints() const = 0;
    [[nodiscard]] virtual double objective(const Eigen::VectorXd& v) const = 0;
    [[nodiscard]] virtual Eigen::VectorXd objective_gradient(const Eigen::VectorXd& v) const = 0;
    [[nodiscard]] virtual Eigen::VectorXd constraints(const Eigen::VectorXd& v) const = 0;
    [[nodiscard]] virtual Eigen::MatrixXd jacobian(const Eigen::VectorXd& v) const = 0;

    /// Contiguous variable blocks (start, size) on which the Lagrangian Hessian
    /// is block diagonal. The default is a single dense block.
    [[nodiscard]] virtual std::vector<std::pair<int, int>> hessian_blocks() const {
        return {{0, num_variables()}};
    }
};

/// NLP assembled from callables. Missing derivatives are formed by central
/// differences with step max(1e-6, 1e-6 |v_i|).
class FunctionNlp final : public NlpProblem {
public:
    using Objective = std::function<double(const Eigen::VectorXd&)>;
    using Gradient = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
    using Constraints = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
    using Jacobian = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

    FunctionNlp(int n_vars, int n_cons, Objective f, Constraints c, Gradient grad = {},
                Jacobian jac = {})
        : n_vars_(n_vars),
          n_cons_(n_cons),
          f_(std::move(f)),
          c_(std::move(c)),
          grad_(std::move(grad)),
          jac_(std::move(jac)) {}

    [[nodiscard]] int num_variables() const override { return n_vars_; }
    [[nodiscard]] int num_constraints() const override { return n_cons_; }
    [[nodiscard]] double objective(const Eigen::VectorXd& v) const override { return f_(v); }
    [[nodiscard]] Eigen::VectorXd objective_gradient(const Eigen::VectorXd& v) const override;
    [[nodiscard]] Eigen::VectorXd constraints(const Eigen::VectorXd& v) const override;
    [[nodiscard]] Eigen::MatrixXd jacobian(const Eigen::VectorXd& v) const override;

private:
    int n_vars_;
    int n_cons_;
    Objective f_;
    Constraints c_;
    Gradient grad_;
    Jacobian jac_;
};

/// Central-difference step used throughout the library.
[[nodiscard]] inline double fd_step(double v) {
    const double scaled = 1e-6 * (v < 0 ? -v : v);
    return scaled > 1e-6 ? scaled : 1e-6;
}

}  // namespace psocp
