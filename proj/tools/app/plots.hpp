#pragma once

#include "run_config.hpp"

#include <filesystem>
#include <vector>

namespace psocp::app {

/// Renders the figure set for a solution.csv into `out_dir`:
///   pendulum: phase, control, x1_target, x3_target, propagation,
///             path_residual, costates, stationarity_u, stationarity_x5
///   others:   control, states, costates, propagation
/// Throws SchemaError naming the first missing column.
std::vector<std::filesystem::path> emit_plots(const std::filesystem::path& csv,
                                              const std::filesystem::path& out_dir,
                                              const RunConfig& config);

}  // namespace psocp::app
