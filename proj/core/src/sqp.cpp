#include "psocp/sqp.hpp"

#include "psocp/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <utility>
#include <vector>

namespace psocp {

using Eigen::MatrixXd;
using Eigen::VectorXd;

void SolverConfig::validate() const {
    if (max_iter < 1) throw ConfigurationError("max_iter must be >= 1");
    if (!(tol_stationarity > 0.0) || !(tol_feasibility > 0.0) || !(delta_x > 0.0) ||
        !(delta_c > 0.0) || !(min_step > 0.0)) {
        throw ConfigurationError("solver tolerances must be positive");
    }
    if (!(penalty_growth > 1.0)) throw ConfigurationError("penalty growth must exceed 1");
    if (!(backtrack > 0.0 && backtrack < 1.0)) {
        throw ConfigurationError("backtracking factor must lie in (0, 1)");
    }
}

std::string_view to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::Success: return "success";
        case SolveStatus::MaxIterations: return "max_iterations";
        case SolveStatus::LineSearchFailure: return "line_search_failure";
        case SolveStatus::SingularKkt: return "singular_kkt";
        case SolveStatus::EvaluationFailure: return "evaluation_failure";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// KKT system

namespace {
constexpr double kMaxRegularisation = 1e-2;
constexpr double kResidualTolerance = 1e-10;
}  // namespace

KktSystem::KktSystem(const MatrixXd& hessian, const MatrixXd& jacobian, double delta_x,
                     double delta_c)
    : hessian_(hessian), jacobian_(jacobian), delta_x_(delta_x), delta_c_(delta_c) {
    if (hessian_.rows() != hessian_.cols() ||
        (jacobian_.rows() > 0 && jacobian_.cols() != hessian_.rows())) {
        throw ConfigurationError("KKT blocks have inconsistent dimensions");
    }
    while (!factor_and_check()) {
        if (delta_x_ >= kMaxRegularisation && delta_c_ >= kMaxRegularisation) {
            throw SingularKktError("KKT matrix singular at maximum regularisation");
        }
        if (delta_x_ < kMaxRegularisation) {
            delta_x_ = std::min(kMaxRegularisation, std::max(delta_x_, 1e-16) * 10.0);
        }
        if (delta_c_ < kMaxRegularisation) {
            delta_c_ = std::min(kMaxRegularisation, std::max(delta_c_, 1e-16) * 10.0);
        }
    }
}

bool KktSystem::factor_and_check() {
    const Eigen::Index n = hessian_.rows();
    const Eigen::Index m = jacobian_.rows();
    kkt_.resize(n + m, n + m);
    kkt_.topLeftCorner(n, n) = hessian_;
    kkt_.topLeftCorner(n, n).diagonal().array() += delta_x_;
    if (m > 0) {
        kkt_.topRightCorner(n, m) = jacobian_.transpose();
        kkt_.bottomLeftCorner(m, n) = jacobian_;
        kkt_.bottomRightCorner(m, m) = -delta_c_ * MatrixXd::Identity(m, m);
    }
    if (!kkt_.allFinite()) return false;
    lu_.compute(kkt_);
    // Probe the factorisation with a generic right-hand side.
    VectorXd probe = VectorXd::LinSpaced(n + m, 1.0, 2.0);
    VectorXd out;
    return solve_checked(probe, out);
}

bool KktSystem::solve_checked(const VectorXd& rhs, VectorXd& out) const {
    out = lu_.solve(rhs);
    if (!out.allFinite()) return false;
    const double residual = (kkt_ * out - rhs).lpNorm<Eigen::Infinity>();
    const double scale = kkt_.lpNorm<Eigen::Infinity>() * out.lpNorm<Eigen::Infinity>() +
                         rhs.lpNorm<Eigen::Infinity>();
    return residual <= kResidualTolerance * std::max(scale, 1e-300);
}

KktStep KktSystem::solve(const VectorXd& gradient, const VectorXd& constraints) const {
    const Eigen::Index n = hessian_.rows();
    const Eigen::Index m = jacobian_.rows();
    VectorXd rhs(n + m);
    rhs << -gradient, -constraints;
    VectorXd sol;
    if (!solve_checked(rhs, sol)) {
        throw SingularKktError("KKT solve failed its residual check");
    }
    return {sol.head(n), sol.tail(m), delta_x_, delta_c_};
}

KktStep kkt_solve(const MatrixXd& hessian, const MatrixXd& jacobian, const VectorXd& gradient,
                  const VectorXd& constraints, double delta_x, double delta_c) {
    return KktSystem(hessian, jacobian, delta_x, delta_c).solve(gradient, constraints);
}

// ---------------------------------------------------------------------------
// SQP

namespace {

struct Point {
    VectorXd x;
    double f = 0.0;
    VectorXd grad;
    VectorXd c;
    MatrixXd jac;
};

// Objective and constraints only; used for line-search trials.
std::optional<std::pair<double, VectorXd>> try_values(const NlpProblem& nlp, const VectorXd& x) {
    try {
        double f = nlp.objective(x);
        VectorXd c = nlp.constraints(x);
        if (!std::isfinite(f) || !c.allFinite()) return std::nullopt;
        return std::make_pair(f, std::move(c));
    } catch (const EvaluationError&) {
        return std::nullopt;
    }
}

Point evaluate(const NlpProblem& nlp, VectorXd x) {
    Point p;
    p.f = nlp.objective(x);
    p.grad = nlp.objective_gradient(x);
    p.c = nlp.constraints(x);
    p.jac = nlp.jacobian(x);
    if (!std::isfinite(p.f) || !p.grad.allFinite() || !p.c.allFinite() || !p.jac.allFinite()) {
        throw EvaluationError("non-finite NLP evaluation");
    }
    p.x = std::move(x);
    return p;
}

constexpr double kMaxStabilisation = 1e-2;
constexpr double kShortStep = 1e-2;
constexpr int kMaxDampingAttempts = 8;

// Directional derivative of ||c||_1 along a step with linearised change dc.
double l1_directional_derivative(const VectorXd& c, const VectorXd& dc) {
    double sum = 0.0;
    for (Eigen::Index i = 0; i < c.size(); ++i) {
        if (c[i] > 0.0) {
            sum += dc[i];
        } else if (c[i] < 0.0) {
            sum -= dc[i];
        } else {
            sum += std::abs(dc[i]);
        }
    }
    return sum;
}

double inf_norm(const VectorXd& v) { return v.size() ? v.lpNorm<Eigen::Infinity>() : 0.0; }
double one_norm(const VectorXd& v) { return v.size() ? v.lpNorm<1>() : 0.0; }

// Powell-damped BFGS update. Returns false when the pair carries no usable
// curvature, in which case the caller resets the approximation.
bool damped_bfgs(MatrixXd& b, const VectorXd& s, const VectorXd& y) {
    const VectorXd bs = b * s;
    const double sbs = s.dot(bs);
    if (!(sbs > 0.0) || !std::isfinite(sbs)) return false;
    double sy = s.dot(y);
    VectorXd r = y;
    if (sy < 0.2 * sbs) {
        const double theta = 0.8 * sbs / (sbs - sy);
        r = theta * y + (1.0 - theta) * bs;
        sy = s.dot(r);
    }
    if (!(sy > 0.0)) return false;
    MatrixXd next = b - (bs * bs.transpose()) / sbs + (r * r.transpose()) / sy;
    if (!next.allFinite()) return false;
    b = 0.5 * (next + next.transpose());
    return true;
}

// Lagrangian Hessian approximation kept as independent damped-BFGS blocks.
class BlockBfgs {
public:
    explicit BlockBfgs(std::vector<std::pair<int, int>> blocks) : blocks_(std::move(blocks)) {
        for (const auto& [start, size] : blocks_) {
            (void)start;
            mats_.push_back(MatrixXd::Identity(size, size));
            scaled_.push_back(false);
        }
    }

    [[nodiscard]] MatrixXd dense(int n) const {
        MatrixXd h = MatrixXd::Zero(n, n);
        for (size_t b = 0; b < blocks_.size(); ++b) {
            const auto [start, size] = blocks_[b];
            h.block(start, start, size, size) = mats_[b];
        }
        return h;
    }

    void update(const VectorXd& s, const VectorXd& y) {
        for (size_t b = 0; b < blocks_.size(); ++b) {
            const auto [start, size] = blocks_[b];
            const VectorXd sb = s.segment(start, size);
            const VectorXd yb = y.segment(start, size);
            if (sb.squaredNorm() == 0.0) continue;
            if (!scaled_[b]) {
                const double sy = sb.dot(yb);
                if (sy > 0.0) {
                    mats_[b] = MatrixXd::Identity(size, size) * (yb.squaredNorm() / sy);
                    scaled_[b] = true;
                }
            }
            if (!damped_bfgs(mats_[b], sb, yb)) {
                mats_[b] = MatrixXd::Identity(size, size);
                scaled_[b] = false;
            }
        }
    }

private:
    std::vector<std::pair<int, int>> blocks_;
    std::vector<MatrixXd> mats_;
    std::vector<bool> scaled_;
};

// Lagrangian Hessian by central differences of grad f + A^T lambda. Blocks are
// independent, so coordinate k of every block is perturbed at once.
MatrixXd fd_lagrangian_hessian(const NlpProblem& nlp, const VectorXd& x, const VectorXd& lambda,
                               const std::vector<std::pair<int, int>>& blocks) {
    const Eigen::Index n = x.size();
    int widest = 0;
    for (const auto& [start, size] : blocks) widest = std::max(widest, size);
    auto grad_l = [&](const VectorXd& v) {
        VectorXd g = nlp.objective_gradient(v);
        if (lambda.size() > 0) g.noalias() += nlp.jacobian(v).transpose() * lambda;
        return g;
    };
    MatrixXd h = MatrixXd::Zero(n, n);
    for (int k = 0; k < widest; ++k) {
        VectorXd plus = x;
        VectorXd minus = x;
        VectorXd step = VectorXd::Zero(n);
        for (const auto& [start, size] : blocks) {
            if (k >= size) continue;
            const int idx = start + k;
            step[idx] = fd_step(x[idx]);
            plus[idx] += step[idx];
            minus[idx] -= step[idx];
        }
        const VectorXd diff = grad_l(plus) - grad_l(minus);
        for (const auto& [start, size] : blocks) {
            if (k >= size) continue;
            const int idx = start + k;
            h.block(start, idx, size, 1) = diff.segment(start, size) / (2.0 * step[idx]);
        }
    }
    return 0.5 * (h + h.transpose());
}

// Shift making the Hessian positive definite on the null space of the Jacobian.
double inertia_shift(const MatrixXd& h, const MatrixXd& jac) {
    const Eigen::Index n = h.rows();
    MatrixXd reduced;
    if (jac.rows() == 0) {
        reduced = h;
    } else {
        Eigen::ColPivHouseholderQR<MatrixXd> qr(jac.transpose());
        const Eigen::Index rank = qr.rank();
        if (rank >= n) return 0.0;
        const MatrixXd q = qr.householderQ();
        const MatrixXd z = q.rightCols(n - rank);
        reduced = z.transpose() * h * z;
    }
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(reduced, Eigen::EigenvaluesOnly);
    const double floor = 1e-4 * std::max(1.0, h.cwiseAbs().maxCoeff());
    const double smallest = eig.eigenvalues().minCoeff();
    return smallest < floor ? floor - smallest : 0.0;
}

}  // namespace

NlpSolution solve(const NlpProblem& nlp, const VectorXd& start, const SolverConfig& cfg) {
    cfg.validate();
    const int n = nlp.num_variables();
    const int m = nlp.num_constraints();
    if (start.size() != n) throw ConfigurationError("start vector has wrong size");
    if (!start.allFinite()) throw ConfigurationError("start vector must be finite");

    NlpSolution out;
    out.primal = start;
    out.multipliers = VectorXd::Zero(m);

    Point cur;
    try {
        cur = evaluate(nlp, start);
    } catch (const EvaluationError&) {
        out.status = SolveStatus::EvaluationFailure;
        return out;
    }

    VectorXd lambda = VectorXd::Zero(m);
    const auto blocks = nlp.hessian_blocks();
    BlockBfgs hess(blocks);
    double rho = 1.0;
    double primal_reg = cfg.delta_x;

    // Best iterate: feasible ones rank by stationarity and beat any infeasible
    // one; infeasible ones rank by infeasibility.
    std::pair<int, double> best_score{2, 0.0};
    auto record_best = [&](const Point& p, const VectorXd& lam, double infeas, double stat) {
        const bool feasible = infeas <= cfg.tol_feasibility;
        const std::pair<int, double> score{feasible ? 0 : 1, feasible ? stat : infeas};
        if (score <= best_score) {
            best_score = score;
            out.primal = p.x;
            out.multipliers = lam;
            out.objective = p.f;
            out.infeasibility = infeas;
            out.stationarity = stat;
        }
    };

    auto finish = [&](SolveStatus status, int iterations) {
        out.status = status;
        out.iterations = iterations;
        return out;
    };

    if (cfg.verbose) {
        std::fprintf(stderr, "%5s %16s %11s %11s %10s %10s\n", "iter", "objective", "|c|",
                     "|gradL|", "step", "rho");
    }

    for (int iter = 0; iter < cfg.max_iter; ++iter) {
        VectorXd grad_l = cur.grad;
        if (m > 0) grad_l.noalias() += cur.jac.transpose() * lambda;
        const double infeas = inf_norm(cur.c);
        const double stat = inf_norm(grad_l);
        record_best(cur, lambda, infeas, stat);
        if (infeas <= cfg.tol_feasibility && stat <= cfg.tol_stationarity) {
            out.primal = cur.x;
            out.multipliers = lambda;
            out.objective = cur.f;
            out.infeasibility = infeas;
            out.stationarity = stat;
            return finish(SolveStatus::Success, iter);
        }

        // Dual regularisation grows with the KKT error far from a solution and
        // falls back to the configured floor when it would stall feasibility.
        const double c_one = one_norm(cur.c);
        MatrixXd hess_dense;
        if (cfg.hessian == HessianMode::FiniteDifference) {
            hess_dense = fd_lagrangian_hessian(nlp, cur.x, lambda, blocks);
            hess_dense.diagonal().array() += inertia_shift(hess_dense, cur.jac);
        } else {
            hess_dense = hess.dense(n);
        }
        std::optional<KktSystem> kkt;
        KktStep qp;
        double feas_slope = 0.0;
        double merit0 = 0.0;
        double alpha = 1.0;
        VectorXd trial_x;
        std::optional<std::pair<double, VectorXd>> trial;
        double merit_trial = 0.0;
        bool accepted = false;
        double rho_try = rho;
        // Only short steps are accepted: the model is poor this far out, so
        // damp the primal block and recompute a shorter, better scaled step.
        double reg_x = primal_reg;
        const double hess_scale = std::max(1.0, hess_dense.diagonal().cwiseAbs().maxCoeff());
        for (int attempt = 0;; ++attempt) {
            double dc = c_one == 0.0 ? cfg.delta_c
                                     : std::max(cfg.delta_c,
                                                std::min(kMaxStabilisation, std::max(infeas, stat)));
            for (;;) {
                try {
                    kkt.emplace(hess_dense, cur.jac, reg_x, dc);
                    qp = kkt->solve(grad_l, cur.c);
                } catch (const SingularKktError&) {
                    return finish(SolveStatus::SingularKkt, iter);
                }
                feas_slope = l1_directional_derivative(cur.c, cur.jac * qp.step);
                if (c_one == 0.0 || feas_slope < 0.0 || dc <= cfg.delta_c) break;
                dc = std::max(cfg.delta_c, 0.1 * dc);
            }
            const VectorXd& p = qp.step;
            const VectorXd lambda_plus = lambda + qp.multipliers;

            // Penalty: above the multiplier norm, and large enough that the step
            // is a descent direction of the merit function.
            const double lam_norm = inf_norm(lambda_plus);
            double rho_needed = 1.1 * lam_norm;
            if (feas_slope < 0.0) {
                const double model = cur.grad.dot(p) + 0.5 * p.dot(hess_dense * p);
                rho_needed = std::max(rho_needed, model / (-0.5 * feas_slope));
            }
            rho_try = rho;
            if (rho_try < rho_needed) rho_try = std::max(cfg.penalty_growth * rho_try, rho_needed);

            merit0 = cur.f + rho_try * c_one;
            // Decreases below this are indistinguishable from rounding in the merit.
            const double noise = 10.0 * std::numeric_limits<double>::epsilon() *
                                 (std::abs(cur.f) + rho_try * c_one + 1.0);
            double slope = cur.grad.dot(p) + rho_try * feas_slope;
            if (!(slope < 0.0)) slope = -std::max(p.dot(hess_dense * p), 1e-16);

            // Backtracking with one second-order correction on the full step.
            alpha = 1.0;
            merit_trial = std::numeric_limits<double>::infinity();
            accepted = false;
            bool tried_soc = false;
            while (alpha >= cfg.min_step) {
                trial_x = cur.x + alpha * p;
                trial = try_values(nlp, trial_x);
                if (trial) {
                    merit_trial = trial->first + rho_try * one_norm(trial->second);
                    if (merit_trial <= merit0 + 1e-4 * alpha * slope + noise) {
                        accepted = true;
                        break;
                    }
                    if (alpha == 1.0 && !tried_soc && m > 0) {
                        tried_soc = true;
                        try {
                            const KktStep corr = kkt->solve(VectorXd::Zero(n), trial->second);
                            const VectorXd soc_x = trial_x + corr.step;
                            if (auto soc = try_values(nlp, soc_x)) {
                                const double merit_soc = soc->first + rho_try * one_norm(soc->second);
                                if (merit_soc <= merit0 + 1e-4 * slope + noise) {
                                    trial_x = soc_x;
                                    trial = std::move(soc);
                                    merit_trial = merit_soc;
                                    accepted = true;
                                    break;
                                }
                            }
                        } catch (const SingularKktError&) {
                        }
                    }
                }
                alpha *= cfg.backtrack;
            }
            if ((accepted && alpha >= kShortStep) || attempt >= kMaxDampingAttempts) break;
            reg_x = std::max(10.0 * reg_x, 1e-4 * hess_scale);
        }
        rho = rho_try;
        primal_reg = (accepted && alpha == 1.0) ? std::max(cfg.delta_x, 0.1 * reg_x) : reg_x;

        if (cfg.verbose) {
            std::fprintf(stderr, "%5d %16.9e %11.4e %11.4e %10.3e %10.3e\n", iter, cur.f, infeas,
                         stat, accepted ? alpha : 0.0, rho);
        }

        if (!accepted) {
            // A stalled line search at a point that already meets the looser
            // stationarity bound is still a solution.
            if (infeas <= cfg.tol_feasibility && stat <= 10.0 * cfg.tol_stationarity) {
                out.primal = cur.x;
                out.multipliers = lambda;
                out.objective = cur.f;
                out.infeasibility = infeas;
                out.stationarity = stat;
                return finish(SolveStatus::Success, iter);
            }
            return finish(SolveStatus::LineSearchFailure, iter);
        }

        Point next;
        try {
            next = evaluate(nlp, trial_x);
        } catch (const EvaluationError&) {
            return finish(SolveStatus::EvaluationFailure, iter);
        }
        const VectorXd lambda_next = lambda + alpha * qp.multipliers;

        out.history.push_back({iter, cur.f, infeas, stat, alpha, rho, merit0, merit_trial});

        // Curvature pair of the Lagrangian at the new multiplier estimate.
        const VectorXd s = next.x - cur.x;
        VectorXd y = next.grad - cur.grad;
        if (m > 0) y.noalias() += (next.jac - cur.jac).transpose() * lambda_next;
        hess.update(s, y);

        // Stalled step: no measurable progress in the iterate.
        const double move = inf_norm(s);
        cur = std::move(next);
        lambda = lambda_next;
        if (move <= 1e-14 * (1.0 + inf_norm(cur.x))) {
            VectorXd g = cur.grad;
            if (m > 0) g.noalias() += cur.jac.transpose() * lambda;
            const double i2 = inf_norm(cur.c);
            const double s2 = inf_norm(g);
            record_best(cur, lambda, i2, s2);
            if (i2 <= cfg.tol_feasibility && s2 <= 10.0 * cfg.tol_stationarity) {
                out.primal = cur.x;
                out.multipliers = lambda;
                out.objective = cur.f;
                out.infeasibility = i2;
                out.stationarity = s2;
                return finish(SolveStatus::Success, iter + 1);
            }
            return finish(SolveStatus::LineSearchFailure, iter + 1);
        }
    }

    VectorXd grad_l = cur.grad;
    if (m > 0) grad_l.noalias() += cur.jac.transpose() * lambda;
    const double infeas = inf_norm(cur.c);
    const double stat = inf_norm(grad_l);
    record_best(cur, lambda, infeas, stat);
    if (infeas <= cfg.tol_feasibility && stat <= cfg.tol_stationarity) {
        out.primal = cur.x;
        out.multipliers = lambda;
        out.objective = cur.f;
        out.infeasibility = infeas;
        out.stationarity = stat;
        return finish(SolveStatus::Success, cfg.max_iter);
    }
    return finish(SolveStatus::MaxIterations, cfg.max_iter);
}

// ---------------------------------------------------------------------------
// FunctionNlp

VectorXd FunctionNlp::objective_gradient(const VectorXd& v) const {
    if (grad_) return grad_(v);
    VectorXd g(v.size());
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double h = fd_step(v[i]);
        VectorXd plus = v;
        VectorXd minus = v;
        plus[i] += h;
        minus[i] -= h;
        g[i] = (f_(plus) - f_(minus)) / (2.0 * h);
    }
    return g;
}

VectorXd FunctionNlp::constraints(const VectorXd& v) const {
    if (n_cons_ == 0) return VectorXd::Zero(0);
    return c_(v);
}

MatrixXd FunctionNlp::jacobian(const VectorXd& v) const {
    if (jac_) return jac_(v);
    MatrixXd j(n_cons_, v.size());
    if (n_cons_ == 0) return j;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double h = fd_step(v[i]);
        VectorXd plus = v;
        VectorXd minus = v;
        plus[i] += h;
        minus[i] -= h;
        j.col(i) = (c_(plus) - c_(minus)) / (2.0 * h);
    }
    return j;
}

}  // namespace psocp
