#include "run_config.hpp"

#include <psocp/errors.hpp>

#include <string>

namespace psocp::app {

std::string_view to_string(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::Pendulum: return "pendulum";
        case ProblemKind::Lq: return "lq";
        case ProblemKind::ReducedPendulum: return "reduced-pendulum";
    }
    return "unknown";
}

ProblemKind parse_problem(std::string_view name) {
    if (name == "pendulum") return ProblemKind::Pendulum;
    if (name == "lq") return ProblemKind::Lq;
    if (name == "reduced-pendulum") return ProblemKind::ReducedPendulum;
    throw ConfigurationError("unknown problem '" + std::string(name) + "'");
}

void RunConfig::validate() const {
    const int min_nodes = problem == ProblemKind::Pendulum ? 4 : 2;
    if (nodes < min_nodes) {
        throw ConfigurationError("--nodes must be at least " + std::to_string(min_nodes) +
                                 " for problem " + std::string(to_string(problem)));
    }
    effective_params().validate();
    solver.validate();
    if (out_dir.empty()) throw ConfigurationError("output directory must not be empty");
}

double RunConfig::effective_horizon() const {
    if (horizon) return *horizon;
    return problem == ProblemKind::Lq ? 1.0 : params.T;
}

PendulumParams RunConfig::effective_params() const {
    PendulumParams p = params;
    p.T = effective_horizon();
    return p;
}

OcpProblem RunConfig::build_problem() const {
    switch (problem) {
        case ProblemKind::Pendulum: return make_pendulum_problem(effective_params());
        case ProblemKind::ReducedPendulum: return make_reduced_pendulum_problem(effective_params());
        case ProblemKind::Lq: return make_lq_problem(effective_horizon(), lq_target);
    }
    throw ConfigurationError("unknown problem");
}

Thresholds RunConfig::thresholds() const {
    Thresholds t;
    if (problem == ProblemKind::Lq) {
        t.state_deviation = 1e-6;
        t.path_residual = 1e-6;
        t.nc_relative = 1e-6;
    }
    return t;
}

}  // namespace psocp::app
