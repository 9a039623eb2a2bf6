#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wsnopt/commands.hpp"

namespace wsnopt::cli {
namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Drops the trailing wall_time field of every CSV line.
std::string without_wall_time(const std::string& csv) {
  std::istringstream in(csv);
  std::string line, out;
  while (std::getline(in, line)) out += line.substr(0, line.rfind(',')) + "\n";
  return out;
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("wsnopt_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  std::string write_config(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p.string();
  }

  GlobalOptions globals(const std::string& sub) {
    GlobalOptions g;
    g.out_dir = dir_ / sub;
    return g;
  }

  template <class Fn>
  int run(Fn&& fn) {
    log_.str("");
    err_.str("");
    return run_command(std::forward<Fn>(fn), err_);
  }

  fs::path dir_;
  std::ostringstream log_, err_;
};

constexpr const char* kConfig = R"({
  "scenarios": [
    {"id": "s20", "area": [100, 100], "rs": 20},
    {"id": "s25", "area": [100, 100], "rs": 25},
    {"id": "short", "area": [100, 100], "rs": 20, "rc": 30}
  ],
  "seeds": [1]
})";

TEST_F(CliTest, OptimizeWritesFourFiles) {
  const std::string cfg = write_config("c.json", kConfig);
  OptimizeOptions o{cfg, "s20", "hybrid", 12};
  EXPECT_EQ(run([&] { return cmd_optimize(globals("out"), o, log_); }), 0) << err_.str();
  for (const char* f : {"hybrid_s20_n12_s1.json", "hybrid_s20_n12_s1.history.csv", "hybrid_s20_n12_s1.svg", "runs.csv"})
    EXPECT_TRUE(fs::exists(dir_ / "out" / f)) << f;
  const Deployment d = deployment_from_json(nlohmann::json::parse(slurp(dir_ / "out/hybrid_s20_n12_s1.json")));
  EXPECT_EQ(d.size(), 12u);
  const auto rows = parse_run_records(slurp(dir_ / "out/runs.csv"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].n_nodes, 12u);
  EXPECT_EQ(rows[0].algorithm, "hybrid");
}

TEST_F(CliTest, OptimizeRerunIsByteIdentical) {
  const std::string cfg = write_config("c.json", kConfig);
  for (const char* alg : {"ga", "pso", "hybrid", "random"}) {
    OptimizeOptions o{cfg, "s25", alg, 9};
    GlobalOptions a = globals("a"), b = globals("b");
    a.seed = b.seed = 7;
    ASSERT_EQ(run([&] { return cmd_optimize(a, o, log_); }), 0) << err_.str();
    ASSERT_EQ(run([&] { return cmd_optimize(b, o, log_); }), 0) << err_.str();
    const std::string stem = std::string(alg) + "_s25_n9_s7";
    for (const std::string ext : {".json", ".history.csv", ".svg"})
      EXPECT_EQ(slurp(dir_ / "a" / (stem + ext)), slurp(dir_ / "b" / (stem + ext))) << stem << ext;
  }
  EXPECT_EQ(without_wall_time(slurp(dir_ / "a/runs.csv")), without_wall_time(slurp(dir_ / "b/runs.csv")));
}

TEST_F(CliTest, MalformedConfigFailsWithoutOutputs) {
  const std::string cfg = write_config("bad.json", "{\"scenarios\": [ {\"area\": [100, 100], \"rs\": 20,, } ]}");
  OptimizeOptions o{cfg, "0", "hybrid", 12};
  EXPECT_EQ(run([&] { return cmd_optimize(globals("out"), o, log_); }), 2);
  EXPECT_NE(err_.str().find("line 1"), std::string::npos) << err_.str();
  EXPECT_FALSE(fs::exists(dir_ / "out"));
}

TEST_F(CliTest, ConfigErrorsExitTwo) {
  const std::string cfg = write_config("c.json", kConfig);
  EXPECT_EQ(run([&] { return cmd_optimize(globals("o"), OptimizeOptions{cfg, "s20", "annealing", 5}, log_); }), 2);
  EXPECT_EQ(run([&] { return cmd_optimize(globals("o"), OptimizeOptions{cfg, "nope", "ga", 5}, log_); }), 2);
  EXPECT_EQ(run([&] { return cmd_optimize(globals("o"), OptimizeOptions{cfg, "s20", "ga", 0}, log_); }), 2);
  EXPECT_EQ(run([&] { return cmd_optimize(globals("o"), OptimizeOptions{(dir_ / "missing.json").string(), "0", "ga", 5}, log_); }), 2);
  const std::string empty = write_config("empty.json", R"({"scenarios": []})");
  EXPECT_EQ(run([&] { return cmd_sweep(globals("o"), SweepOptions{empty, {"ga"}, 1, false}, log_); }), 2);
}

TEST_F(CliTest, ShortCommunicationRangeIsAnInvalidScenario) {
  const std::string cfg = write_config("c.json", kConfig);
  OptimizeOptions o{cfg, "short", "ga", 5};
  EXPECT_EQ(run([&] { return cmd_optimize(globals("o"), o, log_); }), 3);
  GlobalOptions g = globals("o");
  g.override_rc_check = true;
  EXPECT_EQ(run([&] { return cmd_optimize(g, o, log_); }), 0) << err_.str();
}

TEST_F(CliTest, StarvedSearchExitsFour) {
  const std::string cfg = write_config("c.json", R"({
    "scenarios": [{"area": [100, 100], "rs": 10, "coverage_target": 1.0}],
    "optimizer": {"population_size": 2, "max_generations": 1},
    "search": {"retries_per_n": 1, "mc_tolerance": 0.0}
  })");
  EXPECT_EQ(run([&] { return cmd_min_nodes(globals("o"), MinNodesOptions{cfg, "0", "ga"}, log_); }), 4);
  EXPECT_EQ(run([&] { return cmd_sweep(globals("o"), SweepOptions{cfg, {"ga"}, 1, false}, log_); }), 4);
  const auto rows = parse_run_records(slurp(dir_ / "o/sweep.csv"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].status, "exhausted");
}

TEST_F(CliTest, UnwritableOutputExitsSix) {
  const std::string cfg = write_config("c.json", kConfig);
  GlobalOptions g;
  g.out_dir = "/proc/wsnopt-cannot-write";
  EXPECT_EQ(run([&] { return cmd_optimize(g, OptimizeOptions{cfg, "s25", "ga", 6}, log_); }), 6);
  const std::string dep = write_config("d.json", "[[50, 50]]");
  EXPECT_EQ(run([&] { return cmd_plot(globals("o"), PlotOptions{cfg, "s25", dep, "/proc/x/y.svg"}, log_); }), 6);
}

TEST_F(CliTest, MinNodesReportReverifiesIdentically) {
  const std::string cfg = write_config("c.json", kConfig);
  ASSERT_EQ(run([&] { return cmd_min_nodes(globals("o"), MinNodesOptions{cfg, "s25", "hybrid"}, log_); }), 0)
      << err_.str();
  const fs::path report_path = dir_ / "o/hybrid_s25_s1.report.json";
  const auto report = nlohmann::json::parse(slurp(report_path));
  EXPECT_GE(report.at("n").get<std::size_t>(), 5u);
  EXPECT_LE(report.at("n").get<std::size_t>(), 10u);

  VerifyOptions v;
  v.config_path = cfg;
  v.scenario = "s25";
  v.deployment_path = report_path.string();
  v.out_path = (dir_ / "o/verify.json").string();
  ASSERT_EQ(run([&] { return cmd_verify(globals("o"), v, log_); }), 0) << err_.str();
  const auto verified = nlohmann::json::parse(slurp(v.out_path));
  EXPECT_EQ(verified.at("coverage").get<double>(), report.at("verified_coverage").get<double>());
  EXPECT_EQ(verified.at("is_connected").get<bool>(), report.at("is_connected").get<bool>());
  EXPECT_EQ(verified.at("n"), report.at("n"));

  const auto rows = parse_run_records(slurp(dir_ / "o/min_nodes.csv"));
  ASSERT_EQ(rows.size(), 1u);
  EXPECT_EQ(rows[0].n_nodes, report.at("n").get<std::size_t>());
}

TEST_F(CliTest, CompareSyntheticUnitShift) {
  std::vector<RunRecord> rows;
  for (int i = 0; i < 8; ++i)
    for (const char* alg : {"ga", "hybrid"}) {
      RunRecord r;
      r.scenario = "sc" + std::to_string(i);
      r.algorithm = alg;
      r.seed = 1;
      r.n_nodes = 10 + i + (std::string(alg) == "ga" ? 1 : 0);
      rows.push_back(r);
    }
  const fs::path csv = dir_ / "rows.csv";
  write_file(csv, format_run_records(rows));
  CompareOptions o;
  o.csv_path = csv.string();
  o.algorithm_a = "ga";
  o.algorithm_b = "hybrid";
  o.out_path = (dir_ / "cmp.json").string();
  ASSERT_EQ(run([&] { return cmd_compare(GlobalOptions{}, o, log_); }), 0) << err_.str();
  const auto j = nlohmann::json::parse(slurp(o.out_path));
  EXPECT_NEAR(j.at("p_value").get<double>(), 2.0 / 256, 1e-15);
  EXPECT_EQ(j.at("method"), "exact");
  EXPECT_NE(log_.str().find("ga higher"), std::string::npos);

  o.alternative = "greater";
  ASSERT_EQ(run([&] { return cmd_compare(GlobalOptions{}, o, log_); }), 0);
  EXPECT_NEAR(nlohmann::json::parse(slurp(o.out_path)).at("p_value").get<double>(), 1.0 / 256, 1e-15);
}

TEST_F(CliTest, CompareErrorsExitFive) {
  std::vector<RunRecord> rows;
  for (int i = 0; i < 4; ++i) {
    RunRecord r;
    r.scenario = "sc";
    r.algorithm = "ga";
    r.seed = i;
    r.n_nodes = 10;
    rows.push_back(r);
    if (i < 3) {
      r.algorithm = "pso";
      rows.push_back(r);
    }
  }
  const fs::path csv = dir_ / "rows.csv";
  write_file(csv, format_run_records(rows));
  CompareOptions o;
  o.csv_path = csv.string();
  o.algorithm_a = "ga";
  o.algorithm_b = "pso";
  EXPECT_EQ(run([&] { return cmd_compare(GlobalOptions{}, o, log_); }), 5);
  o.algorithm_b = "ga";
  EXPECT_EQ(run([&] { return cmd_compare(GlobalOptions{}, o, log_); }), 5);
  EXPECT_NE(err_.str().find("zero"), std::string::npos) << err_.str();
}

TEST_F(CliTest, SweepWritesLongPivotAndSummaryDeterministically) {
  const std::string cfg = write_config("c.json", R"({
    "scenarios": [{"id": "a", "area": [100, 100], "rs": 25}, {"id": "b", "area": [100, 100], "rs": 20}],
    "optimizer": {"population_size": 20, "max_generations": 20},
    "seeds": [1, 2]
  })");
  ASSERT_EQ(run([&] { return cmd_sweep(globals("x"), SweepOptions{cfg, {"ga", "hybrid"}, 2, false}, log_); }), 0)
      << err_.str();
  ASSERT_EQ(run([&] { return cmd_sweep(globals("y"), SweepOptions{cfg, {"ga", "hybrid"}, 1, true}, log_); }), 0);
  const std::string sweep = slurp(dir_ / "x/sweep.csv");
  EXPECT_EQ(parse_run_records(sweep).size(), 8u);
  EXPECT_EQ(without_wall_time(sweep), without_wall_time(slurp(dir_ / "y/sweep.csv")));
  EXPECT_EQ(slurp(dir_ / "x/pivot.csv"), slurp(dir_ / "y/pivot.csv"));
  const auto pivot = csv::parse(slurp(dir_ / "x/pivot.csv"));
  ASSERT_EQ(pivot.size(), 3u);
  EXPECT_EQ(pivot[0], (std::vector<std::string>{"scenario", "ga", "hybrid"}));
  EXPECT_EQ(pivot[1][0], "a");
  EXPECT_TRUE(fs::exists(dir_ / "x/summary.csv"));
}

TEST_F(CliTest, PlotAcceptsBareArrayAndReport) {
  const std::string cfg = write_config("c.json", kConfig);
  const std::string dep = write_config("d.json", "[[50, 50], [10, 90]]");
  const std::string out = (dir_ / "p.svg").string();
  ASSERT_EQ(run([&] { return cmd_plot(globals("o"), PlotOptions{cfg, "s20", dep, out}, log_); }), 0) << err_.str();
  EXPECT_NE(slurp(out).find("cx=\"400.000\" cy=\"400.000\""), std::string::npos);
  const std::string outside = write_config("e.json", "[[150, 50]]");
  VerifyOptions v;
  v.config_path = cfg;
  v.scenario = "s20";
  v.deployment_path = outside;
  EXPECT_EQ(run([&] { return cmd_verify(globals("o"), v, log_); }), 2);
}

TEST_F(CliTest, BinaryRejectsBadArgumentsWithTwo) {
  const std::string cli = WSNOPT_CLI_PATH;
  auto status = [&](const std::string& args) {
    const int raw = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
    return WEXITSTATUS(raw);
  };
  EXPECT_EQ(status(""), 2);
  EXPECT_EQ(status("optimize --scenario 0"), 2);
  EXPECT_EQ(status("frobnicate"), 2);
  EXPECT_EQ(status("--help"), 0);
  const std::string cfg = write_config("c.json", kConfig);
  EXPECT_EQ(status("--out-dir " + (dir_ / "bin").string() + " --seed 3 optimize --config " + cfg +
                   " --scenario s25 --algorithm pso --nodes 8"),
            0);
  EXPECT_TRUE(fs::exists(dir_ / "bin/pso_s25_n8_s3.json"));
}

}  // namespace
}  // namespace wsnopt::cli
