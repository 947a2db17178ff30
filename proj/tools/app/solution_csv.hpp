#pragma once

#include "run_config.hpp"

#include <psocp/covector.hpp>
#include <psocp/errors.hpp>
#include <psocp/transcribe.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace psocp::app {

/// A required column is missing or a row does not parse.
class SchemaError : public Error {
public:
    SchemaError(const std::string& what, std::string column)
        : Error(what), column_(std::move(column)) {}

    [[nodiscard]] const std::string& column() const noexcept { return column_; }

private:
    std::string column_;
};

/// Column names of solution.csv for a problem. The pendulum uses
///   t, x1, x2, x3, x4, x5, u, lam1, lam2, lam3, lam4, mu
/// and the other problems follow the same pattern with their own channel
/// counts: t, x1..xn, z1..zm, u (or u1..), lam1..lamn, mu (or mu1..).
[[nodiscard]] std::vector<std::string> solution_columns(ProblemKind kind,
                                                        const OcpProblem& problem);

struct SolutionTable {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    /// Throws SchemaError naming the column when it is absent.
    [[nodiscard]] std::vector<double> column(const std::string& name) const;
    [[nodiscard]] bool has(const std::string& name) const;
};

/// One row per node, every value printed with 17 significant digits.
void write_solution_csv(const std::filesystem::path& path, ProblemKind kind,
                        const OcpProblem& problem, const Trajectory& traj,
                        const DualTrajectory& duals);

/// Throws SchemaError on malformed content and Error when unreadable.
[[nodiscard]] SolutionTable read_solution_csv(const std::filesystem::path& path);

}  // namespace psocp::app
