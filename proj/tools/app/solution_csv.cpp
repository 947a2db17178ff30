#include "solution_csv.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace psocp::app {

namespace {

void append_channels(std::vector<std::string>& out, const std::string& stem, int count,
                     bool bare_when_single) {
    if (count == 1 && bare_when_single) {
        out.push_back(stem);
        return;
    }
    for (int i = 1; i <= count; ++i) out.push_back(stem + std::to_string(i));
}

std::string format_value(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::vector<std::string> split(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string trim(std::string s) {
    const auto not_space = [](unsigned char c) { return !std::isspace(c); };
    s.erase(s.begin(), std::find_if(s.begin(), s.end(), not_space));
    s.erase(std::find_if(s.rbegin(), s.rend(), not_space).base(), s.end());
    return s;
}

}  // namespace

std::vector<std::string> solution_columns(ProblemKind kind, const OcpProblem& problem) {
    std::vector<std::string> cols{"t"};
    append_channels(cols, "x", problem.nx, false);
    if (kind == ProblemKind::Pendulum) {
        cols.emplace_back("x5");
    } else {
        append_channels(cols, "z", problem.na, false);
    }
    append_channels(cols, "u", problem.nu, true);
    append_channels(cols, "lam", problem.nx, false);
    append_channels(cols, "mu", problem.nh, true);
    return cols;
}

bool SolutionTable::has(const std::string& name) const {
    return std::find(columns.begin(), columns.end(), name) != columns.end();
}

std::vector<double> SolutionTable::column(const std::string& name) const {
    const auto it = std::find(columns.begin(), columns.end(), name);
    if (it == columns.end()) throw SchemaError("missing column '" + name + "'", name);
    const auto idx = static_cast<size_t>(it - columns.begin());
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& r : rows) out.push_back(r[idx]);
    return out;
}

void write_solution_csv(const std::filesystem::path& path, ProblemKind kind,
                        const OcpProblem& problem, const Trajectory& traj,
                        const DualTrajectory& duals) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    const auto cols = solution_columns(kind, problem);
    for (size_t i = 0; i < cols.size(); ++i) out << (i ? "," : "") << cols[i];
    out << '\n';
    for (Eigen::Index j = 0; j < traj.states.rows(); ++j) {
        std::vector<double> row{traj.time[j]};
        for (Eigen::Index i = 0; i < traj.states.cols(); ++i) row.push_back(traj.states(j, i));
        for (Eigen::Index i = 0; i < traj.algebraic.cols(); ++i) {
            row.push_back(traj.algebraic(j, i));
        }
        for (Eigen::Index i = 0; i < traj.controls.cols(); ++i) row.push_back(traj.controls(j, i));
        for (Eigen::Index i = 0; i < duals.costates.cols(); ++i) {
            row.push_back(duals.costates(j, i));
        }
        for (Eigen::Index i = 0; i < duals.path_covectors.cols(); ++i) {
            row.push_back(duals.path_covectors(j, i));
        }
        for (size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_value(row[i]);
        out << '\n';
    }
    if (!out) throw Error("failed writing " + path.string());
}

SolutionTable read_solution_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot read " + path.string());
    SolutionTable table;
    std::string line;
    if (!std::getline(in, line)) throw SchemaError("empty csv " + path.string(), "t");
    for (auto& name : split(line)) table.columns.push_back(trim(name));
    int line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split(line);
        if (fields.size() != table.columns.size()) {
            throw SchemaError("line " + std::to_string(line_no) + " has " +
                                  std::to_string(fields.size()) + " fields, header has " +
                                  std::to_string(table.columns.size()),
                              "");
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (size_t i = 0; i < fields.size(); ++i) {
            const std::string f = trim(fields[i]);
            char* end = nullptr;
            const double v = std::strtod(f.c_str(), &end);
            if (f.empty() || end != f.c_str() + f.size()) {
                throw SchemaError("line " + std::to_string(line_no) + ": column '" +
                                      table.columns[i] + "' is not a number",
                                  table.columns[i]);
            }
            row.push_back(v);
        }
        table.rows.push_back(std::move(row));
    }
    return table;
}

}  // namespace psocp::app
