#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::stringstream s;
  s << f.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("nlsw_cli_" + name);
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

fs::path write_config(const fs::path& dir, const std::string& text) {
  const auto p = dir / "run.cfg";
  std::ofstream(p) << text;
  return p;
}

int run(const std::string& args, const fs::path& out, const fs::path& err = {}) {
  std::string cmd = std::string(NLSW_CLI) + " " + args + " --out " + out.string() + " > " + (out / "stdout.txt").string();
  if (!err.empty()) cmd += " 2> " + err.string();
  const int s = std::system(cmd.c_str());
  return WIFEXITED(s) ? WEXITSTATUS(s) : -1;
}

const std::string gp_cfg = std::string(NLSW_CONFIGS) + "/gp.cfg";

}  // namespace

TEST(Cli, KinkReport) {
  const auto d = scratch("kink");
  ASSERT_EQ(run("kink --config " + gp_cfg, d), 0);
  const auto j = nlohmann::json::parse(slurp(d / "kink.json"));
  EXPECT_NEAR(j["E_kink"].get<double>(), 4 * std::sqrt(2.0) / 3, 1e-9);
  EXPECT_NEAR(j["dPdc0"].get<double>(), -2 * std::sqrt(2.0), 1e-8);
  EXPECT_NEAR(j["VK0"].get<double>(), -1.0, 1e-8);
  EXPECT_EQ(j["verdict"], "stable");
}

TEST(Cli, GrossPitaevskiiDiagramAllStable) {
  const auto d = scratch("diagram");
  ASSERT_EQ(run("diagram --config " + gp_cfg, d), 0);
  std::istringstream in(slurp(d / "diagram.csv"));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "# diagram v1");
  std::getline(in, line);
  EXPECT_EQ(line, "c,status,E,P,dPdc,d2Pdc2,hamilton_residual,verdict");
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(line.substr(line.rfind(',') + 1), "stable") << line;
    const double c = std::stod(line.substr(0, line.find(',')));
    EXPECT_GE(c, 0.05 - 1e-12);
    EXPECT_LE(c, 1.40 + 1e-12);
  }
  EXPECT_EQ(rows, 28);
}

TEST(Cli, ProfileAboveSoundSpeedFails) {
  const auto d = scratch("nowave");
  const auto cfg = write_config(d, "[model]\nkind = gross_pitaevskii\nr0 = 1\n[profile]\nc = 1.5\n");
  const auto err = d / "err.json";
  EXPECT_NE(run("profile --config " + cfg.string(), d, err), 0);
  const auto j = nlohmann::json::parse(slurp(err));
  EXPECT_EQ(j["error"], "no_wave");
  EXPECT_TRUE(j.contains("message"));
}

TEST(Cli, ConfigErrorReportsLine) {
  const auto d = scratch("badcfg");
  const auto cfg = write_config(d, "[model]\nkind = gross_pitaevskii\nspeed = 1\n");
  const auto err = d / "err.json";
  EXPECT_NE(run("classify --config " + cfg.string(), d, err), 0);
  const auto j = nlohmann::json::parse(slurp(err));
  EXPECT_EQ(j["error"], "config");
  EXPECT_NE(j["message"].get<std::string>().find("line 3"), std::string::npos);
}

TEST(Cli, GoldenDeterminism) {
  const auto a = scratch("gold_a"), b = scratch("gold_b");
  const auto cfg = write_config(a,
                                "[run]\nseed = 3\n[model]\nkind = gross_pitaevskii\nr0 = 1\n"
                                "[grid]\nh = 0.1\nL = 30\n[profile]\nc = 0.7\n"
                                "[evolve]\nc = 0.7\ninitial = random\namplitude = 0.01\nT = 1\ndt = 0.02\n"
                                "out_dt = 0.2\ndistances = true\n[distances]\ntest = equivalence\nc = 0.7\nsamples = 5\n");
  for (const char* cmd : {"profile", "evolve", "distances"}) {
    ASSERT_EQ(run(std::string(cmd) + " --config " + cfg.string(), a), 0) << cmd;
    ASSERT_EQ(run(std::string(cmd) + " --config " + cfg.string(), b), 0) << cmd;
  }
  for (const char* f : {"profile.csv", "profile.json", "evolve.csv", "evolve.json", "distances.json"})
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  // the seed flag overrides the config and changes the random draw
  const auto c = scratch("gold_c");
  ASSERT_EQ(run("evolve --seed 4 --config " + cfg.string(), c), 0);
  EXPECT_NE(slurp(a / "evolve.csv"), slurp(c / "evolve.csv"));
}

TEST(Cli, ClassifyAndSpectrum) {
  const auto d = scratch("spec");
  const auto cfg = write_config(d,
                                "[model]\nkind = polynomial\nr0 = 1\ncoeffs = [-1, -3]\n"
                                "[classify]\nc = 0.1\n[spectrum]\nc = 0\nN = 512\nd_order = 8\nmode = true\nmode_L = 40\n");
  ASSERT_EQ(run("classify --config " + cfg.string(), d), 0);
  auto j = nlohmann::json::parse(slurp(d / "classify.json"));
  EXPECT_EQ(j["verdict"], "unstable");
  ASSERT_EQ(run("spectrum --config " + cfg.string(), d), 0);
  j = nlohmann::json::parse(slurp(d / "spectrum.json"));
  EXPECT_GT(j["gamma0"].get<double>(), 0.4);
  EXPECT_NEAR(j["gamma0_refined"].get<double>(), j["gamma0"].get<double>(), 0.01 * j["gamma0"].get<double>());
  EXPECT_EQ(slurp(d / "mode.csv").substr(0, 38), "# mode v1\nx,zeta,upsilon,re_w,im_w\n-40");
}

TEST(Cli, EveryBuiltinDiagramRuns) {
  for (const auto& f : fs::directory_iterator(NLSW_CONFIGS)) {
    const auto d = scratch("builtin_" + f.path().stem().string());
    EXPECT_EQ(run("diagram --threads 2 --config " + f.path().string(), d), 0) << f.path();
    EXPECT_TRUE(fs::exists(d / "diagram.csv")) << f.path();
  }
}
