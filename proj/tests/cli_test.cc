#include <gtest/gtest.h>
#include <sys/wait.h>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "divkecm/errors.h"
#include "divkecm/runner.h"

using namespace divkecm;
namespace fs = std::filesystem;

namespace {

struct CliRun {
  int status;
  std::string out;
};

CliRun run(const std::string& args) {
  std::string cmd = std::string(DIVKECM_CLI_PATH) + " " + args + " 2>/dev/null";
  FILE* pipe = popen(cmd.c_str(), "r");
  std::string out;
  char buf[4096];
  std::size_t n;
  while ((n = fread(buf, 1, sizeof buf, pipe)) > 0) out.append(buf, n);
  int st = pclose(pipe);
  return {WIFEXITED(st) ? WEXITSTATUS(st) : -1, out};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / "divkecm_cli_test";
  fs::create_directories(dir);
  fs::path p = dir / name;
  fs::remove(p);
  return p;
}

}  // namespace

TEST(Cli, ClassicalChshRow) {
  CliRun r = run("game-value --game chsh-classical");
  ASSERT_EQ(r.status, 0);
  EXPECT_EQ(r.out.rfind("experiment,metric,value,kind,ci95\n", 0), 0u);
  EXPECT_NE(r.out.find("chsh-classical,value,0.75,exact,\n"), std::string::npos) << r.out;
  EXPECT_NE(r.out.find("config,strict_valid,1,exact,\n"), std::string::npos);
}

TEST(Cli, BoundsRow) {
  CliRun r = run("bounds");
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("bounds,t_over_lambda,0.9999997813"), std::string::npos) << r.out;
}

TEST(Cli, DeterministicOutput) {
  fs::path a = scratch("a.csv"), b = scratch("b.csv");
  ASSERT_EQ(run("pipeline --trials 200 --seed 7 --out " + a.string()).status, 0);
  ASSERT_EQ(run("pipeline --trials 200 --seed 7 --threads 1 --out " + b.string()).status, 0);
  EXPECT_EQ(slurp(a), slurp(b));
  EXPECT_FALSE(fs::exists(a.string() + ".tmp"));
}

TEST(Cli, ConfigFileAndOverride) {
  fs::path cfg = scratch("exp.cfg");
  std::ofstream(cfg) << "# comment\nsubcommand = game-value\ngame = chsh\n";
  CliRun r = run("--config " + cfg.string() + " --game chsh-classical");
  ASSERT_EQ(r.status, 0);
  EXPECT_NE(r.out.find("chsh-classical,value"), std::string::npos);
  EXPECT_EQ(r.out.find("chsh,value"), std::string::npos);
}

TEST(Cli, ExitCodes) {
  fs::path out = scratch("bad.csv");
  EXPECT_EQ(run("game-value --gamma 2 --out " + out.string()).status, kExitConfig);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(run("attack --attack leaky:9 --lambda 64 --nu 0.125 --variant ip2 --out " + out.string()).status,
            kExitConfig);
  EXPECT_FALSE(fs::exists(out));
  EXPECT_EQ(run("pipeline --trials abc").status, kExitConfig);
  EXPECT_EQ(run("game-value --out /nonexistent_dir/x.csv").status, kExitRuntime);
}

TEST(Cli, StrictModeRefuses) {
  EXPECT_EQ(run("pipeline --mode strict --q 0.004 --trials 10").status, kExitConfig);
  CliRun demo = run("pipeline --q 0.004 --trials 10");
  ASSERT_EQ(demo.status, 0);
  EXPECT_NE(demo.out.find("config,strict_valid,0,exact,"), std::string::npos);
}

TEST(Cli, JsonEchoRoundTrips) {
  CliRun r = run("attack --attack forward_to_bob --lambda 32 --trials 20 --format json");
  ASSERT_EQ(r.status, 0);
  auto j = nlohmann::ordered_json::parse(r.out);
  EXPECT_EQ(j["schema_version"], kReportSchemaVersion);
  ExperimentConfig cfg = config_from_echo(j["config"]);
  EXPECT_EQ(cfg.params.lambda, 32);
  EXPECT_EQ(cfg.attack, "forward_to_bob");
  EXPECT_EQ(config_echo(cfg).dump(), j["config"].dump());
  EXPECT_EQ(j["provenance"]["seed"], 1);
  bool saw_mc = false;
  for (const auto& m : j["metrics"]) {
    if (m["kind"] == "monte_carlo") {
      saw_mc = true;
      EXPECT_TRUE(m["ci95"].is_number());
    } else {
      EXPECT_TRUE(m["ci95"].is_null());
    }
  }
  EXPECT_TRUE(saw_mc);
}

TEST(Report, EmptyReportIsHeaderOnly) {
  Report r;
  EXPECT_EQ(emit_csv(r), "experiment,metric,value,kind,ci95\n");
}

TEST(Report, IntervalRule) {
  Report r;
  r.metrics.push_back(mc_metric("x", "y", 0.5, 0.01));
  EXPECT_NO_THROW(emit_csv(r));
  Report bad;
  Metric m = exact_metric("x", "y", 1);
  m.ci95 = 0.1;
  bad.metrics.push_back(m);
  EXPECT_THROW(emit_csv(bad), StructuralError);
  EXPECT_THROW(emit_json(bad), StructuralError);
  Report missing;
  Metric mc = mc_metric("x", "y", 0.5, 0.01);
  mc.ci95.reset();
  missing.metrics.push_back(mc);
  EXPECT_THROW(emit_csv(missing), StructuralError);
}

TEST(Report, ValueFormatting) {
  EXPECT_EQ(format_value(0.75), "0.75");
  EXPECT_EQ(format_value(22), "22");
  EXPECT_EQ(std::stod(format_value(0.1 + 0.2)), 0.1 + 0.2);
}

TEST(Config, TextRoundTrip) {
  ExperimentConfig cfg;
  cfg.params.q = 0.004;
  cfg.params.variant = Variant::kIp3;
  cfg.trials = 77;
  std::vector<std::string> v;
  ExperimentConfig back;
  apply_config_text(back, config_to_text(cfg), v);
  EXPECT_TRUE(v.empty());
  EXPECT_EQ(config_to_text(back), config_to_text(cfg));
  apply_setting(back, "nonsense", "1", v);
  apply_setting(back, "trials", "-5x", v);
  EXPECT_EQ(v.size(), 2u);
}
