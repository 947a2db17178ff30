#pragma once

#include "run_config.hpp"

#include <psocp/covector.hpp>
#include <psocp/sqp.hpp>
#include <psocp/vv.hpp>

#include <nlohmann/json.hpp>

#include <optional>

namespace psocp::app {

struct RunResult {
    int exit_code = kExitOk;
    NlpSolution solution;
    std::optional<VvReport> report;
    nlohmann::json json;
    double seconds = 0.0;
};

/// transcribe -> solve -> extract_duals -> full_report, then writes
/// solution.csv, report.json and, when requested, figures/*.svg under
/// `config.out_dir`. Exit code: 0 solve succeeded and every check passed;
/// 1 the solver failed (line search, singular KKT, evaluation); 2 the solver
/// hit max_iter or a check failed; 64 invalid configuration. The report is
/// written in every case past configuration.
[[nodiscard]] RunResult run(const RunConfig& config);

/// The report as written to report.json.
[[nodiscard]] nlohmann::json report_json(const RunConfig& config, const NlpSolution& solution,
                                         const VvReport* report, double seconds, int exit_code);

}  // namespace psocp::app
