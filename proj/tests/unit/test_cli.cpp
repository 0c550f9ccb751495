#include <gtest/gtest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const std::string kCli = CFRAG_CLI;
const fs::path kConfigs = CFRAG_CONFIG_DIR;
const fs::path kGolden = CFRAG_GOLDEN_DIR;

struct Result {
  int status = -1;
  std::string err;
};

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("cfrag_cli_test_" + std::to_string(::getpid())) / name;
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Result run(const std::string& args, const std::string& env = "") {
  const fs::path err = scratch("stderr") / "err.txt";
  const std::string cmd = env + " \"" + kCli + "\" " + args + " >/dev/null 2>\"" + err.string() + "\"";
  const int raw = std::system(cmd.c_str());
  Result r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.err = slurp(err);
  return r;
}

std::string config(const std::string& name) { return "\"" + (kConfigs / name).string() + "\""; }

std::string first_line(const std::string& text) { return text.substr(0, text.find('\n')); }

}  // namespace

TEST(Cli, SimulateIsByteIdenticalAndMatchesGolden) {
  const auto a = scratch("sim_a"), b = scratch("sim_b");
  ASSERT_EQ(run("simulate --config " + config("model4_all_ones.json") + " --seed 0 --out " + a.string()).status, 0);
  ASSERT_EQ(run("simulate --config " + config("model4_all_ones.json") + " --seed 0 --out " + b.string()).status, 0);
  const std::string csv = slurp(a / "trajectory.csv");
  EXPECT_EQ(csv, slurp(b / "trajectory.csv"));
  EXPECT_EQ(slurp(a / "summary.json"), slurp(b / "summary.json"));
  EXPECT_EQ(first_line(csv), "time,event_kind,C,S");
  EXPECT_EQ(csv, slurp(kGolden / "model4_all_ones_seed0.csv"));
}

TEST(Cli, EnzymeModelAddsSubstrateWithoutEnzymeColumn) {
  const auto d = scratch("sim_enzyme");
  ASSERT_EQ(run("simulate --config " + config("enzyme_substrate.json") + " --out " + d.string()).status, 0);
  const std::string csv = slurp(d / "trajectory.csv");
  EXPECT_EQ(first_line(csv), "time,event_kind,C,E,S,S_hat");
  EXPECT_EQ(csv, slurp(kGolden / "enzyme_substrate_seed0.csv"));
}

TEST(Cli, SummaryMirrorsReport) {
  const auto d = scratch("sim_summary");
  ASSERT_EQ(run("simulate --config " + config("model4_all_ones.json") + " --t-max 3 --grid 0,1.5,3 --out " +
                d.string())
                .status,
            0);
  const json s = json::parse(slurp(d / "summary.json"));
  for (const char* key : {"final_state", "final_time", "event_count", "stop_reason", "suspected_explosion", "grid",
                          "hits", "seed"}) {
    EXPECT_TRUE(s.contains(key)) << key;
  }
  EXPECT_EQ(s["grid"].size(), 3u);
  EXPECT_EQ(s["final_time"], 3.0);
}

TEST(Cli, BelowThresholdReturnsToEmpty) {
  const auto d = scratch("sim_kf19");
  ASSERT_EQ(run("simulate --config " + config("threshold_kf19.json") + " --out " + d.string()).status, 0);
  const json s = json::parse(slurp(d / "summary.json"));
  EXPECT_GE(s["hits"][0]["visits"].get<int>(), 1);
}

TEST(Cli, MalformedKeyIsAUsageError) {
  const auto r = run("simulate --config " + config("malformed_key.json") + " --out " + scratch("bad").string());
  EXPECT_EQ(r.status, 2);
  EXPECT_NE(r.err.find("kapa_F"), std::string::npos) << r.err;
}

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run("simulate").status, 2);
  EXPECT_EQ(run("frobnicate").status, 2);
  EXPECT_EQ(run("simulate --config /nonexistent/model.json").status, 2);
  EXPECT_EQ(run("experiment no-such-preset --out " + scratch("x").string()).status, 2);
  EXPECT_EQ(run("drift-check --config " + config("model4_all_ones.json") + " --function nonsense --bound ge_zero")
                .status,
            2);
}

TEST(Cli, DriftCheckExitCodes) {
  auto d = scratch("drift_pw");
  EXPECT_EQ(run("drift-check --config " + config("model4_all_ones.json") +
                " --function population_weighted --bound le_minus_one --out " + d.string())
                .status,
            0);
  EXPECT_TRUE(json::parse(slurp(d / "drift_report.json"))["passed"].get<bool>());

  d = scratch("drift_linear");
  EXPECT_EQ(run("drift-check --config " + config("prop_linear_fails.json") +
                " --function linear_crn:w=1,1 --bound le_cv_plus_d:c=1,d=1 --region box=200 --out " + d.string())
                .status,
            1);
  const json r = json::parse(slurp(d / "drift_report.json"));
  EXPECT_GT(r["violation_count"].get<int>(), 0);
  ASSERT_TRUE(r["first_diagonal_violation"].is_number());
  EXPECT_LE(r["first_diagonal_violation"].get<int>(), 200);

  d = scratch("drift_const");
  EXPECT_EQ(run("drift-check --config " + config("model4_all_ones.json") +
                " --function constant:value=2 --bound le_cv_plus_d:c=0,d=0 --out " + d.string())
                .status,
            0);
  EXPECT_TRUE(fs::exists(d / "drift_report.json"));
}

TEST(Cli, ClassifyExamples) {
  auto d = scratch("classify");
  ASSERT_EQ(run("classify --config " + config("model4_all_ones.json") + " --out " + d.string()).status, 0);
  json c = json::parse(slurp(d / "classification.json"));
  EXPECT_EQ(c["regime"], "positive_recurrent");
  EXPECT_EQ(c["condition"], "a");

  ASSERT_EQ(run("classify --config " + config("threshold_kf21.json") + " --out " + d.string()).status, 0);
  c = json::parse(slurp(d / "classification.json"));
  EXPECT_EQ(c["regime"], "unknown_gap");
  EXPECT_NE(c["tags"].dump().find("conjectured_transient"), std::string::npos);

  ASSERT_EQ(run("classify --config " + config("model4_no_inflow.json") + " --out " + d.string()).status, 0);
  c = json::parse(slurp(d / "classification.json"));
  EXPECT_EQ(c["condition"], "a");
  EXPECT_NE(c["subcases"].dump().find("absorbed by the state with zero compartments"), std::string::npos);
}

TEST(Cli, OutputDirectoryFromEnvironment) {
  const auto d = scratch("env_out");
  ASSERT_EQ(run("classify --config " + config("model4_all_ones.json"), "CFRAG_OUT_DIR=\"" + d.string() + "\"").status,
            0);
  EXPECT_TRUE(fs::exists(d / "classification.json"));
}

TEST(Cli, ExperimentWritesCsvAndJson) {
  const auto d = scratch("experiment");
  ASSERT_EQ(run("experiment duso-zechner --seed 0 --threads 1 --out " + d.string()).status, 0);
  EXPECT_TRUE(fs::exists(d / "duso-zechner.csv"));
  const json j = json::parse(slurp(d / "duso-zechner.json"));
  EXPECT_TRUE(j["outcome"]["passed"].get<bool>());
}
