#include "app/cli.hpp"
#include "app/run_config.hpp"
#include "app/solution_csv.hpp"

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

namespace {

namespace fs = std::filesystem;
using psocp::app::run_cli;

class CliTest : public ::testing::Test {
protected:
    void SetUp() override {
        const auto* info = ::testing::UnitTest::GetInstance()->current_test_info();
        dir_ = fs::temp_directory_path() / (std::string("psocp_cli_") + info->name());
        fs::remove_all(dir_);
        fs::create_directories(dir_);
    }
    void TearDown() override { fs::remove_all(dir_); }

    [[nodiscard]] std::string out(const std::string& leaf) const { return (dir_ / leaf).string(); }

    fs::path dir_;
};

std::string slurp(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

nlohmann::json read_json(const fs::path& path) { return nlohmann::json::parse(slurp(path)); }

TEST_F(CliTest, PendulumSolveWritesArtifacts) {
    ASSERT_EQ(run_cli({"solve", "--nodes", "24", "--out", out("run"), "--plots"}), psocp::app::kExitOk);
    EXPECT_TRUE(fs::exists(dir_ / "run" / "solution.csv"));
    const auto report = read_json(dir_ / "run" / "report.json");
    EXPECT_EQ(report["problem"], "pendulum");
    EXPECT_EQ(report["nodes"], 24);
    EXPECT_EQ(report["exit_code"], 0);
    EXPECT_TRUE(report["vv"]["passed"].get<bool>());
    EXPECT_EQ(report["solver"]["status"], "success");
    int svgs = 0;
    for (const auto& e : fs::directory_iterator(dir_ / "run" / "figures")) {
        svgs += e.path().extension() == ".svg" ? 1 : 0;
    }
    EXPECT_EQ(svgs, 9);

    const auto table = psocp::app::read_solution_csv((dir_ / "run" / "solution.csv").string());
    EXPECT_EQ(table.rows.size(), 25u);
    for (const char* col : {"t", "x1", "x2", "x3", "x4", "x5", "u", "lam1", "lam2", "lam3", "lam4", "mu"}) {
        EXPECT_TRUE(table.has(col)) << col;
    }
}

TEST_F(CliTest, DeterministicCsv) {
    ASSERT_EQ(run_cli({"solve", "--nodes", "16", "--out", out("a")}), 0);
    ASSERT_EQ(run_cli({"solve", "--nodes", "16", "--out", out("b")}), 0);
    EXPECT_EQ(slurp(dir_ / "a" / "solution.csv"), slurp(dir_ / "b" / "solution.csv"));
}

TEST_F(CliTest, UnconvergedRunExitsTwoWithReport) {
    EXPECT_EQ(run_cli({"solve", "--nodes", "24", "--max-iter", "1", "--out", out("r")}),
              psocp::app::kExitVerificationFailed);
    const auto report = read_json(dir_ / "r" / "report.json");
    EXPECT_EQ(report["solver"]["status"], "max_iterations");
    EXPECT_FALSE(report["vv"]["passed"].get<bool>());
    EXPECT_FALSE(report["vv"]["checks"].empty());
}

TEST_F(CliTest, LqProblem) {
    ASSERT_EQ(run_cli({"solve", "--problem", "lq", "--nodes", "4", "--out", out("lq")}), 0);
    const auto report = read_json(dir_ / "lq" / "report.json");
    EXPECT_NEAR(report["objective"].get<double>(), 1.0, 1e-8);
    const auto table = psocp::app::read_solution_csv((dir_ / "lq" / "solution.csv").string());
    for (double lam : table.column("lam1")) EXPECT_NEAR(lam, -2.0, 1e-5);
}

TEST_F(CliTest, ReducedPendulum) {
    EXPECT_EQ(run_cli({"solve", "--problem", "reduced-pendulum", "--nodes", "20", "--out", out("rp")}), 0);
}

TEST_F(CliTest, ConfigurationErrors) {
    EXPECT_EQ(run_cli({"solve", "--nodes", "2", "--out", out("x")}), psocp::app::kExitConfig);
    EXPECT_EQ(run_cli({"solve", "--problem", "bogus", "--out", out("x")}), psocp::app::kExitConfig);
    EXPECT_EQ(run_cli({"solve", "--L", "-1", "--out", out("x")}), psocp::app::kExitConfig);
    EXPECT_EQ(run_cli({"solve", "--no-such-flag"}), psocp::app::kExitConfig);
    EXPECT_EQ(run_cli({}), psocp::app::kExitConfig);
}

TEST_F(CliTest, ConfigFileAndOverride) {
    {
        std::ofstream cfg(dir_ / "run.ini");
        cfg << "problem = lq\nnodes = 5\ntarget = 2\n";
    }
    ASSERT_EQ(run_cli({"--config", out("run.ini"), "solve", "--out", out("c")}), 0);
    auto report = read_json(dir_ / "c" / "report.json");
    EXPECT_EQ(report["problem"], "lq");
    EXPECT_EQ(report["nodes"], 5);
    EXPECT_NEAR(report["objective"].get<double>(), 4.0, 1e-7);

    ASSERT_EQ(run_cli({"--config", out("run.ini"), "solve", "--nodes", "7", "--out", out("d")}), 0);
    report = read_json(dir_ / "d" / "report.json");
    EXPECT_EQ(report["nodes"], 7);
}

TEST_F(CliTest, ConfigFileUnknownKey) {
    {
        std::ofstream cfg(dir_ / "bad.ini");
        cfg << "colour = blue\n";
    }
    EXPECT_EQ(run_cli({"--config", out("bad.ini"), "solve", "--out", out("c")}), psocp::app::kExitConfig);
}

TEST_F(CliTest, PlotFromSavedSolution) {
    ASSERT_EQ(run_cli({"solve", "--nodes", "20", "--out", out("s")}), 0);
    ASSERT_EQ(run_cli({"plot", out("s/solution.csv"), "--out", out("p")}), 0);
    EXPECT_TRUE(fs::exists(dir_ / "p" / "phase.svg"));
    const std::string svg = slurp(dir_ / "p" / "phase.svg");
    EXPECT_NE(svg.find("<svg"), std::string::npos);
    EXPECT_NE(svg.find("</svg>"), std::string::npos);
}

TEST_F(CliTest, PlotRejectsMissingColumn) {
    ASSERT_EQ(run_cli({"solve", "--nodes", "16", "--out", out("s")}), 0);
    std::ifstream in(dir_ / "s" / "solution.csv");
    std::ofstream cut(dir_ / "s" / "cut.csv");
    std::string line;
    // Drop the lam4 column (index 10).
    while (std::getline(in, line)) {
        std::stringstream ss(line);
        std::string cell;
        std::vector<std::string> cells;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        cells.erase(cells.begin() + 10);
        for (size_t i = 0; i < cells.size(); ++i) cut << (i ? "," : "") << cells[i];
        cut << "\n";
    }
    cut.close();
    EXPECT_EQ(run_cli({"plot", out("s/cut.csv"), "--out", out("p")}), psocp::app::kExitSchema);
}

TEST_F(CliTest, PlotMissingFile) {
    EXPECT_NE(run_cli({"plot", out("nothing.csv"), "--out", out("p")}), 0);
}

}  // namespace
