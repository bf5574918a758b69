// Runs the qwsqueeze executable end to end.

#include <sys/wait.h>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "json.hpp"

#ifndef QWSQUEEZE_CLI
#error "QWSQUEEZE_CLI must point at the command-line executable"
#endif

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CliRun {
  int code = -1;
  std::string out;
};

CliRun run(const std::string& args) {
  const std::string cmd = std::string(QWSQUEEZE_CLI) + " " + args + " 2>/dev/null";
  CliRun r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  char buf[4096];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) r.out.append(buf, n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CliTest : public ::testing::Test {
protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("qwsqueeze_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write(const std::string& name, const std::string& text) {
    const fs::path p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  static std::string point_config(const std::string& drive, const std::string& extra_system = "\"kappa\": 0.1,") {
    return "{\n  \"system\": {\n    " + extra_system +
           "\n    \"gamma_m\": 1e-5, \"n_th\": 0, \"gamma\": 2,\n"
           "    \"excitons\": [ { \"g\": 2, \"delta_ex\": 1 }, { \"g\": 2, \"delta_ex\": -1 } ]\n  },\n"
           "  \"drive\": " + drive + "\n}\n";
  }

  fs::path dir_;
};

TEST_F(CliTest, PointAtZeroRatioIsVacuum) {
  const auto cfg = write("p.json", point_config("{ \"G_minus\": 0.1, \"ratio\": 0 }"));
  const CliRun r = run("point --config " + cfg.string());
  ASSERT_EQ(r.code, 0) << r.out;
  const json j = json::parse(r.out);
  EXPECT_TRUE(j.at("stable").get<bool>());
  EXPECT_NEAR(j.at("dB").get<double>(), 0.0, 1e-4);
  EXPECT_EQ(j.at("eigen_real_parts").size(), 8u);
  for (const char* key : {"S_min", "V_q", "V_p", "V_qp", "theta_opt"}) EXPECT_TRUE(j.contains(key)) << key;
}

TEST_F(CliTest, PointPastInstabilityExitsTwo) {
  const auto cfg = write("p.json", point_config("{ \"G_minus\": 0.1, \"ratio\": 3 }"));
  const CliRun r = run("point --config " + cfg.string());
  EXPECT_EQ(r.code, 2);
  const json j = json::parse(r.out);
  EXPECT_FALSE(j.at("stable").get<bool>());
  EXPECT_FALSE(j.contains("S_min"));
}

TEST_F(CliTest, MissingKappaExitsOneAndNamesField) {
  const auto cfg = write("p.json", point_config("{ \"G_minus\": 0.1, \"ratio\": 0 }", ""));
  const std::string cmd = std::string(QWSQUEEZE_CLI) + " point --config " + cfg.string() + " 2>&1";
  FILE* pipe = popen(cmd.c_str(), "r");
  ASSERT_NE(pipe, nullptr);
  std::string err;
  char buf[1024];
  for (std::size_t n; (n = fread(buf, 1, sizeof buf, pipe)) > 0;) err.append(buf, n);
  const int status = pclose(pipe);
  EXPECT_EQ(WEXITSTATUS(status), 1);
  EXPECT_NE(err.find("\"kappa\""), std::string::npos) << err;
  EXPECT_NE(err.find("line "), std::string::npos) << err;
}

TEST_F(CliTest, UsageErrorsExitOne) {
  EXPECT_EQ(run("").code, 1);
  EXPECT_EQ(run("sweep").code, 1);
  EXPECT_EQ(run("sweep --figure fig9z --out " + dir_.string()).code, 1);
  EXPECT_EQ(run("point --config " + (dir_ / "missing.json").string()).code, 1);
}

TEST_F(CliTest, Figure2aWritesCurvesAndSidecarRerunsIdentically) {
  const CliRun r = run("sweep --figure fig2a --out " + (dir_ / "a").string() + " --threads 0");
  ASSERT_EQ(r.code, 0) << r.out;
  for (const char* f : {"fig2a.csv", "fig2a.meta.json", "fig2a_kappa_0.1.dat", "fig2a_kappa_1.dat", "fig2a_kappa_5.dat"})
    EXPECT_TRUE(fs::exists(dir_ / "a" / f)) << f;

  const std::string csv = slurp(dir_ / "a" / "fig2a.csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "axis1,axis2,stable,S_min,dB,V_q,V_p,V_qp,theta_opt");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 1 + 600);

  const CliRun again = run("sweep --config " + (dir_ / "a" / "fig2a.meta.json").string() + " --out " +
                        (dir_ / "b").string() + " --threads 1");
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(slurp(dir_ / "b" / "fig2a.csv"), csv);
  EXPECT_EQ(slurp(dir_ / "b" / "fig2a_kappa_0.1.dat"), slurp(dir_ / "a" / "fig2a_kappa_0.1.dat"));
}

TEST_F(CliTest, Figure3cWritesOneMatrix) {
  const CliRun r = run("sweep --figure fig3c --format both --out " + dir_.string());
  ASSERT_EQ(r.code, 0);
  const std::string m = slurp(dir_ / "fig3c_heatmap.dat");
  std::istringstream in(m);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# x: 0 ", 0), 0u);
  std::getline(in, line);
  EXPECT_EQ(line.rfind("# y: 0.1 ", 0), 0u);
  int rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    EXPECT_EQ(std::count(line.begin(), line.end(), '\t'), 99);
  }
  EXPECT_EQ(rows, 100);
  const json meta = json::parse(slurp(dir_ / "fig3c.meta.json"));
  EXPECT_EQ(meta.at("system").at("n_th").get<double>(), 50.0);
  EXPECT_EQ(meta.at("metadata").at("points").get<int>(), 10000);
  EXPECT_TRUE(fs::exists(dir_ / "fig3c.json"));
}

TEST_F(CliTest, SinglePointGridGivesOneRow) {
  const std::string text = point_config("{ \"G_minus\": 0.1, \"ratio\": 0 }");
  const std::string sweep = text.substr(0, text.rfind('}')) +
                            ", \"sweep\": { \"axes\": [ { \"parameter\": \"ratio\", \"values\": [0.5] } ] },"
                            " \"output\": { \"prefix\": \"one\" } }\n";
  const auto cfg = write("s.json", sweep);
  const CliRun r = run("sweep --config " + cfg.string() + " --out " + (dir_ / "o").string());
  ASSERT_EQ(r.code, 0);
  const std::string csv = slurp(dir_ / "o" / "one.csv");
  EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
  EXPECT_EQ(csv.find("\n0.5,stable,"), csv.find('\n'));
}

TEST_F(CliTest, UnwritableOutputExitsOne) {
  EXPECT_EQ(run("sweep --figure fig2b --ratio-points 3 --out /proc/qwsqueeze/nope").code, 1);
}

}  // namespace
