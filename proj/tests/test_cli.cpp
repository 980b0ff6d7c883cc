#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

#include <nlohmann/json.hpp>

namespace fs = std::filesystem;

namespace {

struct Run {
  int code = -1;
  std::string out;
};

Run run(const std::string& args) {
  const std::string cmd = std::string(LCC_CLI_PATH) + " " + args + " 2>/dev/null";
  Run r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string config(const std::string& name) { return std::string(LCC_CONFIG_DIR) + "/" + name + ".json"; }

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("lcc_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

std::string read(const fs::path& p) {
  std::ifstream in(p);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(run("--help").code, 0);
  EXPECT_EQ(run("").code, 2);
  EXPECT_EQ(run("steady").code, 2);
  EXPECT_EQ(run("steady --config /nonexistent.json").code, 2);
  EXPECT_EQ(run("frobnicate").code, 2);
}

TEST(Cli, SteadyReportsOccupancies) {
  const auto r = run("steady --config " + config("reference") + " --no-header-timestamp");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_GT(j["n_lc_eff"].get<double>(), 0.55);
  EXPECT_LT(j["n_lc_eff"].get<double>(), 0.85);
  EXPECT_FALSE(j.contains("generated_at"));
  EXPECT_TRUE(j.contains("provenance"));
}

TEST(Cli, OutputIsDeterministicWithoutTimestamp) {
  for (const char* cmd : {"workpoint", "steady", "sideband", "stability"}) {
    const std::string args = std::string(cmd) + " --config " + config("reference") + " --no-header-timestamp";
    const auto a = run(args);
    const auto b = run(args);
    EXPECT_EQ(a.code, 0) << cmd;
    EXPECT_EQ(a.out, b.out) << cmd;
  }
  const auto stamped = run("steady --config " + config("reference"));
  EXPECT_TRUE(nlohmann::json::parse(stamped.out).contains("generated_at"));
}

TEST(Cli, PhysicalWorkpoint) {
  const auto r = run("workpoint --config " + config("physical") + " --no-header-timestamp");
  ASSERT_EQ(r.code, 0);
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_TRUE(j.contains("omega_m_squared_terms"));
}

TEST(Cli, PullInAndInstabilityExitWithThree) {
  EXPECT_EQ(run("steady --config " + config("pull_in")).code, 3);
  EXPECT_EQ(run("workpoint --config " + config("pull_in")).code, 3);
  EXPECT_EQ(run("steady --config " + config("blue_detuned")).code, 3);
  EXPECT_EQ(run("stability --config " + config("blue_detuned")).code, 3);
}

TEST(Cli, UnknownFieldIsAConfigError) {
  const auto dir = scratch("unknown");
  fs::create_directories(dir);
  auto doc = nlohmann::json::parse(read(config("reference")));
  doc["optics"]["finess_F"] = 1.0;
  std::ofstream(dir / "bad.json") << doc.dump();
  EXPECT_EQ(run("steady --config " + (dir / "bad.json").string()).code, 2);
  std::ofstream(dir / "broken.json") << "{ not json";
  EXPECT_EQ(run("steady --config " + (dir / "broken.json").string()).code, 2);
  fs::remove_all(dir);
}

TEST(Cli, SpectrumAndProbeWriteCsvWithSidecars) {
  const auto dir = scratch("spectrum");
  ASSERT_EQ(run("spectrum --config " + config("reference") + " --out " + dir.string()).code, 0);
  const auto csv = read(dir / "spectrum.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "omega_rad_s,S_dq,S_dVC,S_dVL,abs_chi_LC_eff,abs_chi_mc");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 402);
  const auto side = nlohmann::json::parse(read(dir / "spectrum.json"));
  EXPECT_GT(side["var_q"].get<double>(), 0.0);
  EXPECT_TRUE(side.contains("generated_at"));
  ASSERT_EQ(run("probe --config " + config("reference") + " --out " + dir.string()).code, 0);
  EXPECT_TRUE(fs::exists(dir / "probe.csv"));
  EXPECT_TRUE(fs::exists(dir / "probe.json"));
  fs::remove_all(dir);
}

TEST(Cli, SweepWritesHeaderAndSidecar) {
  const auto dir = scratch("sweep");
  ASSERT_EQ(run("sweep --config " + config("sweep_g") + " --threads 2 --out " + dir.string()).code, 0);
  const auto csv = read(dir / "sweep.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')),
            "coupling_mode.g_over_kappa,n_lc_eff,approx_n_lc_eff,n_m_eff,eta,V_DC,status");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 26);
  EXPECT_TRUE(nlohmann::json::parse(read(dir / "sweep.json")).contains("sweep"));
  EXPECT_EQ(run("sweep --config " + config("reference")).code, 2);
  fs::remove_all(dir);
}

TEST(Cli, FigureWritesFiles) {
  const auto dir = scratch("figure");
  ASSERT_EQ(run("figure fig3d --no-header-timestamp --out " + dir.string()).code, 0);
  EXPECT_TRUE(fs::exists(dir / "fig3d.csv"));
  const auto side = nlohmann::json::parse(read(dir / "fig3d.json"));
  EXPECT_EQ(side["figure"], "fig3d");
  EXPECT_FALSE(side.contains("generated_at"));
  EXPECT_EQ(run("figure fig9 --out " + dir.string()).code, 2);
  fs::remove_all(dir);
}
