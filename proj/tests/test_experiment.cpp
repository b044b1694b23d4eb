#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "scinv/experiment.hpp"
#include "support.hpp"

namespace scinv {
namespace {

namespace fs = std::filesystem;
using test::vec;

Json load_json(const fs::path& p) {
  std::ifstream in(p);
  return Json::parse(in);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Json di_config() { return load_json(fs::path(SCINV_SOURCE_DIR) / "configs" / "double_integrator.json"); }

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("scinv_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string config_error(const Json& j) {
  try {
    parse_config(j, "cfg");
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

TEST(Config, BundledDoubleIntegratorParses) {
  const ExperimentConfig c = parse_config(di_config());
  EXPECT_EQ(c.state_dim(), 2);
  EXPECT_EQ(c.input_dim(), 1);
  EXPECT_EQ(c.fail.max_iterations, 20);
  EXPECT_EQ(c.fail.horizon, 15);
  EXPECT_EQ(c.fail.certification_rollouts, 1200);
  ASSERT_EQ(c.schedule.size(), 3u);
  EXPECT_EQ(c.schedule[0].value, vec({-5}));
  EXPECT_EQ(c.schedule[2].kind, ControllerKind::random_admissible);
  EXPECT_TRUE(c.ground_truth);
}

TEST(Config, FieldErrorsNameTheirPath) {
  Json j = di_config();
  j["system"]["B"] = Json::array({Json::array({0.0}), Json::array({1.0}), Json::array({2.0})});
  EXPECT_NE(config_error(j).find("/system/B"), std::string::npos);

  j = di_config();
  j["fail"].erase("seed");
  EXPECT_NE(config_error(j).find("/fail/seed"), std::string::npos);

  j = di_config();
  j["fail"]["horizon"] = 0;
  EXPECT_NE(config_error(j).find("/fail/horizon"), std::string::npos);

  j = di_config();
  j["fail"]["schedule"][0]["u"] = Json::array({6.0});
  EXPECT_NE(config_error(j).find("/fail/schedule/0/u"), std::string::npos);

  j = di_config();
  j["fail"]["schedule"][0]["kind"] = "random";
  j["fail"]["schedule"][0].erase("u");
  EXPECT_NE(config_error(j).find("last schedule entry"), std::string::npos);

  j = di_config();
  j["constraints"]["state_box"]["lower"] = Json::array({-15.0});
  EXPECT_NE(config_error(j).find("/constraints/state_box/lower"), std::string::npos);

  j = di_config();
  j["extra"] = 1;
  EXPECT_NE(config_error(j).find("/extra"), std::string::npos);
}

TEST(Config, SyntaxErrorsGiveLineNumbers) {
  const fs::path dir = scratch("syntax");
  fs::create_directories(dir);
  std::ofstream(dir / "bad.json") << "{\n  \"system\": {\n    \"A\": [[1, 1], [0, 1]],,\n  }\n}\n";
  try {
    load_config((dir / "bad.json").string());
    FAIL() << "expected a config error";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(load_config((dir / "missing.json").string()), ConfigError);
}

TEST(Config, DefaultScheduleUsesInputBounds) {
  Json j = di_config();
  j["fail"].erase("schedule");
  const ExperimentConfig c = parse_config(j);
  ASSERT_EQ(c.schedule.size(), 3u);
  EXPECT_EQ(c.schedule[0].value, vec({-5}));
  EXPECT_EQ(c.schedule[1].value, vec({5}));
}

TEST(Experiment, DoubleIntegratorReport) {
  const fs::path out = scratch("di");
  RunOptions o;
  o.out_dir = out.string();
  const ExperimentResult r = run_experiment(parse_config(di_config()), o, [](std::string_view) {});
  const ValidationReport& rep = r.report;
  EXPECT_EQ(rep.msci_rows, 14);
  EXPECT_EQ(rep.mci_rows, 8);
  EXPECT_EQ(rep.msci_iterations, 3);
  EXPECT_EQ(rep.mci_iterations, 2);
  EXPECT_LE(rep.projection_hausdorff, 1e-6);
  EXPECT_EQ(rep.learned_rows, 8);
  EXPECT_EQ(rep.certification.violations, 0);
  EXPECT_TRUE(rep.passed());

  const Json j = load_json(out / "report.json");
  EXPECT_EQ(j["schema_version"], kReportSchemaVersion);
  EXPECT_EQ(j["msci_rows"], 14);
  EXPECT_TRUE(j["passed"].get<bool>());
  EXPECT_EQ(j["learned_row_match_errors"].size(), 8u);

  for (int k = 0; k <= 3; ++k) {
    EXPECT_TRUE(fs::exists(out / "msci" / ("iterate_" + std::to_string(k) + "_vertices.csv")));
    EXPECT_TRUE(fs::exists(out / "msci" / ("iterate_" + std::to_string(k) + "_projection_vertices.csv")));
  }
  EXPECT_TRUE(fs::exists(out / "mci" / "trace.json"));
  EXPECT_TRUE(fs::exists(out / "fail" / "transcript.json"));
  EXPECT_TRUE(fs::exists(out / "fail" / "polytope_8_vertices.csv"));

  // 22 vertices of Z_inf plus the header.
  std::ifstream in(out / "msci" / "iterate_3_vertices.csv");
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) ++lines;
  EXPECT_EQ(lines, 23);

  // One id per certification rollout in the concatenated file.
  std::ifstream cert(out / "certification" / "trajectories.csv");
  std::getline(cert, line);
  EXPECT_EQ(line.substr(0, 13), "trajectory,k,");
  std::set<std::string> ids;
  while (std::getline(cert, line)) ids.insert(line.substr(0, line.find(',')));
  EXPECT_EQ(ids.size(), 1200u);
}

TEST(Experiment, ReportsAreBitIdentical) {
  const fs::path a = scratch("repeat_a");
  const fs::path b = scratch("repeat_b");
  const ExperimentConfig c = parse_config(di_config());
  RunOptions o;
  o.out_dir = a.string();
  run_experiment(c, o, [](std::string_view) {});
  o.out_dir = b.string();
  run_experiment(c, o, [](std::string_view) {});
  for (const auto& e : fs::recursive_directory_iterator(a)) {
    if (!e.is_regular_file()) continue;
    const fs::path rel = fs::relative(e.path(), a);
    EXPECT_EQ(slurp(e.path()), slurp(b / rel)) << rel;
  }
}

TEST(Experiment, SeedOverrideChangesOnlyTheLearner) {
  const ExperimentConfig c = parse_config(di_config());
  RunOptions o;
  o.write_artifacts = false;
  o.seed = 99;
  o.rollouts = 300;
  const ExperimentResult r = run_experiment(c, o, [](std::string_view) {});
  EXPECT_EQ(r.report.seed, 99u);
  EXPECT_EQ(r.report.certification.n_rollouts, 300);
  EXPECT_TRUE(r.report.passed());
}

TEST(Experiment, ZeroSystem) {
  const ExperimentConfig c = load_config((fs::path(SCINV_SOURCE_DIR) / "configs" / "zero_system.json").string());
  RunOptions o;
  o.write_artifacts = false;
  const ExperimentResult r = run_experiment(c, o, [](std::string_view) {});
  EXPECT_EQ(r.report.learned_rows, 0);
  EXPECT_EQ(r.report.certification.violations, 0);
  EXPECT_TRUE(r.report.passed());
}

TEST(Experiment, WithoutValidationSkipsGroundTruth) {
  Json j = di_config();
  j.erase("validation");
  RunOptions o;
  o.write_artifacts = false;
  const ExperimentResult r = run_experiment(parse_config(j), o, [](std::string_view) {});
  EXPECT_FALSE(r.msci.has_value());
  EXPECT_FALSE(r.report.ground_truth);
  EXPECT_EQ(r.report.pass.count("fail_equals_msci"), 0u);
  EXPECT_TRUE(r.report.passed());
  EXPECT_FALSE(r.report.to_json().contains("msci_rows"));
}

TEST(Experiment, FailedExpectationFailsTheReport) {
  Json j = di_config();
  j["validation"]["expect"]["msci_rows"] = 13;
  RunOptions o;
  o.write_artifacts = false;
  const ExperimentResult r = run_experiment(parse_config(j), o, [](std::string_view) {});
  EXPECT_FALSE(r.report.pass.at("msci_rows"));
  EXPECT_FALSE(r.report.passed());
}

TEST(Experiment, StagesTagTheirModule) {
  const ExperimentConfig c = parse_config(di_config());
  // Drop the upper bound on x1 so the state projection is unbounded.
  const Polytope& z = test::double_integrator().Z;
  Polytope open(3);
  for (std::size_t i = 0; i < z.size(); ++i) {
    if (z.row(i).normal[0] < 0.5) open.add(z.row(i));
  }
  RunOptions o;
  o.rollouts = 10;
  try {
    run_certify(c, open, o, std::nullopt, [](std::string_view) {});
    FAIL() << "expected a stage error";
  } catch (const StageError& e) {
    EXPECT_EQ(e.module(), "fail");
    EXPECT_EQ(std::string(e.what()).rfind("fail: ", 0), 0u) << e.what();
  }
}

TEST(PlotData, EmptyLearnStateWritesHeaders) {
  const fs::path out = scratch("empty_state");
  emit_plot_data(LearnState{}, out);
  EXPECT_EQ(slurp(out / "trajectories.csv"), "trajectory,k,failing\n");
  EXPECT_EQ(slurp(out / "learned_rows.csv"), "iteration,trajectory,step,projected_row,offset\n");
  EXPECT_TRUE(fs::exists(out / "transcript.json"));
}

TEST(PlotData, HighDimensionFallsBackToJson) {
  const fs::path out = scratch("high_dim");
  const Polytope cube = Polytope::box(Eigen::VectorXd::Constant(4, 1.0));
  emit_plot_data({cube}, 0, out);
  EXPECT_TRUE(fs::exists(out / "trace.json"));
  EXPECT_FALSE(fs::exists(out / "iterate_0_vertices.csv"));
  const Json j = load_json(out / "trace.json");
  EXPECT_EQ(j["iterates"][0]["rows"].size(), 8u);
}

TEST(Compare, ContainmentAndDistance) {
  const auto& di = test::double_integrator();
  const Comparison same = compare(di.z_inf(), di.z_inf());
  EXPECT_TRUE(same.equal());
  EXPECT_NEAR(*same.hausdorff, 0.0, 1e-9);
  const Comparison sub = compare(di.z_inf(), di.Z);
  EXPECT_TRUE(sub.p_in_q);
  EXPECT_FALSE(sub.q_in_p);
  EXPECT_GT(*sub.hausdorff, 0.0);
  EXPECT_THROW(compare(di.X, di.Z), DimensionMismatch);
}

/// The CLI exits 2 on a config error and leaves no output behind.
TEST(Cli, ConfigErrorLeavesNoArtifacts) {
  const fs::path dir = scratch("cli_bad");
  fs::create_directories(dir);
  Json j = di_config();
  j["system"]["B"] = Json::array({Json::array({0.0}), Json::array({1.0}), Json::array({2.0})});
  j["output"]["dir"] = (dir / "out").string();
  std::ofstream(dir / "bad.json") << j.dump();
  const std::string cmd = std::string(SCINV_CLI) + " run --quiet --config " + (dir / "bad.json").string() + " 2>/dev/null";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), 2);
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Cli, ExitStatusFollowsVerdict) {
  const fs::path dir = scratch("cli_verdict");
  fs::create_directories(dir);
  Json j = di_config();
  j["fail"]["certification_rollouts"] = 200;
  std::ofstream(dir / "good.json") << j.dump();
  j["validation"]["expect"]["mci_rows"] = 9;
  std::ofstream(dir / "bad.json") << j.dump();
  const std::string base = std::string(SCINV_CLI) + " run --quiet --out " + (dir / "out").string() + " --config ";
  int status = std::system((base + (dir / "good.json").string()).c_str());
  EXPECT_EQ(WEXITSTATUS(status), 0);
  status = std::system((base + (dir / "bad.json").string()).c_str());
  EXPECT_EQ(WEXITSTATUS(status), 1);
}

}  // namespace
}  // namespace scinv
