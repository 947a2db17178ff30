#include "cli.hpp"

#include "plots.hpp"
#include "run.hpp"
#include "solution_csv.hpp"

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <fstream>
#include <iostream>

namespace psocp::app {

namespace {

// Flat key=value files: every top-level key belongs to the solve command.
class FlatConfig : public CLI::ConfigINI {
public:
    std::vector<CLI::ConfigItem> from_config(std::istream& input) const override {
        auto items = CLI::ConfigINI::from_config(input);
        for (auto& item : items) {
            if (item.parents.empty()) item.parents = {"solve"};
        }
        return items;
    }
};

struct Overrides {
    std::optional<double> a, c, d, g, L, alpha, T, target;
    std::string problem;
};

void add_problem_options(CLI::App& cmd, Overrides& o) {
    cmd.add_option("--problem", o.problem, "pendulum | lq | reduced-pendulum")
        ->check(CLI::IsMember({"pendulum", "lq", "reduced-pendulum"}));
    cmd.add_option("--a", o.a, "damping");
    cmd.add_option("--c", o.c, "control weight");
    cmd.add_option("--d", o.d, "tracking weight");
    cmd.add_option("--g", o.g, "gravity");
    cmd.add_option("--L", o.L, "pendulum length");
    cmd.add_option("--alpha", o.alpha, "phase lead of the target (rad)");
    cmd.add_option("--T", o.T, "horizon (s); LQ default 1");
    cmd.add_option("--target", o.target, "LQ terminal value");
}

void apply(const Overrides& o, RunConfig& cfg) {
    if (!o.problem.empty()) cfg.problem = parse_problem(o.problem);
    if (o.a) cfg.params.a = *o.a;
    if (o.c) cfg.params.c = *o.c;
    if (o.d) cfg.params.d = *o.d;
    if (o.g) cfg.params.g = *o.g;
    if (o.L) cfg.params.L = *o.L;
    if (o.alpha) cfg.params.alpha = *o.alpha;
    if (o.T) cfg.horizon = *o.T;
    if (o.target) cfg.lq_target = *o.target;
}

// Problem and parameters recorded by an earlier solve.
void apply_report(const std::filesystem::path& path, RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) return;
    const auto j = nlohmann::json::parse(in, nullptr, false);
    if (j.is_discarded() || !j.is_object()) return;
    if (j.contains("problem") && j["problem"].is_string()) {
        cfg.problem = parse_problem(j["problem"].get<std::string>());
    }
    if (!j.contains("parameters") || !j["parameters"].is_object()) return;
    const auto& p = j["parameters"];
    auto read = [&p](const char* key, double& field) {
        if (p.contains(key) && p[key].is_number()) field = p[key].get<double>();
    };
    read("a", cfg.params.a);
    read("c", cfg.params.c);
    read("d", cfg.params.d);
    read("g", cfg.params.g);
    read("L", cfg.params.L);
    read("alpha", cfg.params.alpha);
    read("target", cfg.lq_target);
    if (p.contains("T") && p["T"].is_number()) cfg.horizon = p["T"].get<double>();
}

}  // namespace

int run_cli(int argc, const char* const* argv) {
    CLI::App app{"Pseudospectral optimal control solver with independent verification", "psocp"};
    app.require_subcommand(1);

    RunConfig solve_cfg;
    Overrides solve_over;
    std::string hessian = "fd";
    std::string out_dir = "run";
    app.set_config("--config", "", "flat key=value file of solve options; flags win");
    app.config_formatter(std::make_shared<FlatConfig>());
    app.allow_config_extras(CLI::config_extras_mode::error);
    auto* solve_cmd = app.add_subcommand("solve", "transcribe, solve, verify and write the run");
    solve_cmd->fallthrough();
    add_problem_options(*solve_cmd, solve_over);
    solve_cmd->add_option("--nodes", solve_cfg.nodes, "polynomial order N")->capture_default_str();
    solve_cmd->add_option("--max-iter", solve_cfg.solver.max_iter)->capture_default_str();
    solve_cmd->add_option("--tol-stationarity", solve_cfg.solver.tol_stationarity)
        ->capture_default_str();
    solve_cmd->add_option("--tol-feasibility", solve_cfg.solver.tol_feasibility)
        ->capture_default_str();
    solve_cmd->add_option("--delta-x", solve_cfg.solver.delta_x)->capture_default_str();
    solve_cmd->add_option("--delta-c", solve_cfg.solver.delta_c)->capture_default_str();
    solve_cmd->add_option("--hessian", hessian, "fd | bfgs")
        ->check(CLI::IsMember({"fd", "bfgs"}))
        ->capture_default_str();
    solve_cmd->add_option("--out", out_dir, "output directory")->capture_default_str();
    solve_cmd->add_flag("--plots", solve_cfg.plots, "write figures/*.svg");
    solve_cmd->add_flag("--verbose", solve_cfg.verbose, "iteration log on stderr");
    solve_cmd->add_option("--seed", solve_cfg.seed, "reserved")->capture_default_str();

    RunConfig plot_cfg;
    Overrides plot_over;
    std::string csv_path;
    std::string plot_out;
    auto* plot_cmd = app.add_subcommand("plot", "render figures from a solution.csv");
    plot_cmd->add_option("csv", csv_path, "solution.csv")->required();
    plot_cmd->add_option("--out", plot_out, "figure directory (default: <csv dir>/figures)");
    add_problem_options(*plot_cmd, plot_over);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        (void)app.exit(e);
        return kExitConfig;
    }

    try {
        if (*solve_cmd) {
            apply(solve_over, solve_cfg);
            solve_cfg.solver.hessian =
                hessian == "bfgs" ? HessianMode::Bfgs : HessianMode::FiniteDifference;
            solve_cfg.out_dir = out_dir;
            const RunResult result = run(solve_cfg);
            if (result.exit_code != kExitConfig) {
                std::cout << "status " << to_string(result.solution.status) << ", objective "
                          << result.solution.objective << ", checks "
                          << (result.report && result.report->passed() ? "passed" : "failed")
                          << ", exit " << result.exit_code << '\n';
            }
            return result.exit_code;
        }
        const std::filesystem::path csv(csv_path);
        apply_report(csv.parent_path() / "report.json", plot_cfg);
        apply(plot_over, plot_cfg);
        plot_cfg.validate();
        const auto dir = plot_out.empty() ? csv.parent_path() / "figures"
                                          : std::filesystem::path(plot_out);
        for (const auto& f : emit_plots(csv, dir, plot_cfg)) std::cout << f.string() << '\n';
        return kExitOk;
    } catch (const SchemaError& e) {
        std::cerr << "psocp: schema error: " << e.what() << '\n';
        return kExitSchema;
    } catch (const std::exception& e) {
        std::cerr << "psocp: " << e.what() << '\n';
        return kExitConfig;
    }
}

int run_cli(const std::vector<std::string>& args) {
    std::vector<const char*> argv{"psocp"};
    for (const auto& a : args) argv.push_back(a.c_str());
    return run_cli(static_cast<int>(argv.size()), argv.data());
}

}  // namespace psocp::app
