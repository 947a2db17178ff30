#pragma once

#include <psocp/ocp.hpp>
#include <psocp/sqp.hpp>
#include <psocp/vv.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

namespace psocp::app {

enum ExitCode : int {
    kExitOk = 0,
    kExitSolveFailed = 1,
    kExitVerificationFailed = 2,
    kExitConfig = 64,
    kExitSchema = 65,
};

enum class ProblemKind { Pendulum, Lq, ReducedPendulum };

[[nodiscard]] std::string_view to_string(ProblemKind kind);
/// Throws ConfigurationError for an unknown name.
[[nodiscard]] ProblemKind parse_problem(std::string_view name);

struct RunConfig {
    ProblemKind problem = ProblemKind::Pendulum;
    PendulumParams params;
    std::optional<double> horizon;  // overrides params.T; the LQ default is 1
    double lq_target = 1.0;
    int nodes = 32;
    SolverConfig solver;
    std::filesystem::path out_dir = "run";
    bool plots = false;
    bool verbose = false;
    std::uint64_t seed = 0;  // reserved; no algorithm draws random numbers

    /// Throws ConfigurationError. `nodes` is the polynomial order N; pendulum
    /// runs need N >= 4, the others N >= 2.
    void validate() const;

    [[nodiscard]] double effective_horizon() const;
    [[nodiscard]] PendulumParams effective_params() const;
    [[nodiscard]] OcpProblem build_problem() const;
    /// Thresholds used for this problem: the defaults, tightened to 1e-6 for LQ.
    [[nodiscard]] Thresholds thresholds() const;
};

}  // namespace psocp::app
