#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <sstream>
#include <vector>

#include "cli.hpp"
#include "mecgear/io.hpp"
#include "mecgear/postproc.hpp"
#include "mecgear/solver.hpp"
#include "support.hpp"

using namespace mecgear;
using testing_support::data_path;
using testing_support::ScratchDir;

namespace {

struct CliRun {
  int code = 0;
  std::string out;
  std::string err;
};

CliRun run(std::vector<std::string> args) {
  args.insert(args.begin(), "mecgear");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out;
  std::ostringstream err;
  CliRun r;
  r.code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

std::string design(int i) { return data_path("designs/base_design_" + std::to_string(i) + ".json").string(); }

std::size_t line_count(const std::filesystem::path& p) {
  std::ifstream in(p);
  std::size_t n = 0;
  for (std::string l; std::getline(in, l);) ++n;
  return n;
}

}  // namespace

TEST(Cli, UsageErrors) {
  EXPECT_EQ(run({}).code, 2);
  EXPECT_EQ(run({"--help"}).code, 0);
  EXPECT_EQ(run({"frobnicate"}).code, 2);
  EXPECT_EQ(run({"analyze"}).code, 2);
  EXPECT_EQ(run({"analyze", "--design", "/no/such/file.json"}).code, 2);
}

TEST(Cli, AnalyzeWritesResults) {
  ScratchDir dir("cli_analyze");
  const CliRun r = run({"analyze", "--design", design(2), "--angles", "0", "--out", dir.path().string(), "-q"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  const auto doc = read_json_file(dir / "result.json");
  EXPECT_EQ(doc["mesh"]["preset"], "coarse");
  EXPECT_EQ(doc["mesh"]["symmetry"], 2);
  EXPECT_TRUE(doc["solve"]["converged"].get<bool>());
  EXPECT_FALSE(doc.contains("slip"));

  // Same numbers as the library.
  const GearDesign d = load_design(design(2));
  const PolarMesh mesh = build_mesh(d, derive_geometry(d), MeshConfig::coarse());
  const SolveResult s = solve_newton(mesh, MaterialSet::defaults());
  const TorqueReport t = torque_report(d, mesh, flux_densities(mesh, s.phi));
  EXPECT_DOUBLE_EQ(doc["torque"]["rotor3_Nm"].get<double>(), t.torque_rotor3);
  EXPECT_DOUBLE_EQ(doc["torque"]["rotor1_Nm"].get<double>(), t.torque_rotor1);
  EXPECT_EQ(doc["solve"]["iterations"], s.iterations);

  EXPECT_EQ(line_count(dir / "trace.csv"), static_cast<std::size_t>(s.iterations) + 1);
  EXPECT_EQ(line_count(dir / "profile_outer_gap.csv"), static_cast<std::size_t>(mesh.n_al) + 1);
  EXPECT_EQ(line_count(dir / "profile_inner_gap.csv"), static_cast<std::size_t>(mesh.n_al) + 1);
}

TEST(Cli, AnalyzeWithSlip) {
  ScratchDir dir("cli_slip");
  const CliRun r = run({"slip", "--design", design(1), "--angles", "3", "--refine", "1", "--out", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_NE(r.out.find("slip torque"), std::string::npos);
  const auto doc = read_json_file(dir / "result.json");
  EXPECT_EQ(doc["slip"]["samples"].size(), 4u);
  EXPECT_GT(doc["slip"]["torque_Nm"].get<double>(), 0.0);
  EXPECT_GT(doc["vtd_Nm_per_m3"].get<double>(), 0.0);
  EXPECT_FALSE(doc.contains("torque"));
}

TEST(Cli, ZeroRemanenceGivesZeroTorque) {
  ScratchDir dir("cli_br0");
  const CliRun r = run({"analyze", "--design", design(1), "--br", "0", "--angles", "0", "--out", dir.path().string()});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto doc = read_json_file(dir / "result.json");
  EXPECT_EQ(doc["torque"]["rotor3_Nm"].get<double>(), 0.0);
  EXPECT_EQ(r.out.find("-0 "), std::string::npos);
}

TEST(Cli, InputErrorsExitTwo) {
  ScratchDir dir("cli_input");
  {
    std::ofstream bad(dir / "bad.json");
    bad << R"({"p1": 4, "p3": 34})";
  }
  const CliRun r = run({"analyze", "--design", (dir / "bad.json").string(), "--out", dir.path().string()});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("'r_o': missing"), std::string::npos);
  EXPECT_EQ(run({"analyze", "--design", design(1), "--mesh", "medium"}).code, 2);
  EXPECT_EQ(run({"analyze", "--design", design(1), "--tol", "-1", "--out", dir.path().string()}).code, 2);
}

TEST(Cli, ConvergenceFailureExitsThree) {
  ScratchDir dir("cli_conv");
  const CliRun r = run({"analyze", "--design", design(1), "--max-iters", "1", "--out", dir.path().string()});
  EXPECT_EQ(r.code, 3);
  EXPECT_NE(r.err.find("iter"), std::string::npos);
  EXPECT_TRUE(std::filesystem::exists(dir / "trace.csv"));
}

TEST(Cli, SweepTrendsCompare) {
  ScratchDir dir("cli_sweep");
  const auto spec = data_path("sweeps/tiny.json").string();
  const auto out = (dir / "run").string();
  CliRun r = run({"sweep", "--spec", spec, "--out", out, "-q"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(dir / "run/results.csv"), 9u);
  r = run({"sweep", "--spec", spec, "--out", out});
  ASSERT_EQ(r.code, 0);
  EXPECT_NE(r.err.find("resumed: 8 designs"), std::string::npos);

  r = run({"trends", "--results", out + "/results.csv", "--by", "t_pm1"});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(r.out.substr(0, r.out.find('\n')), "gear_ratio,t_pm1_m,designs,max_vtd_Nm_per_m3,max_pm_vtd_Nm_per_m3");
  EXPECT_EQ(std::count(r.out.begin(), r.out.end(), '\n'), 3);
  EXPECT_EQ(run({"trends", "--results", out + "/results.csv", "--by", "colour"}).code, 2);

  r = run({"compare", "--results", out + "/results.csv", "--reference", out + "/results.csv"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto cmp = nlohmann::json::parse(r.out);
  EXPECT_EQ(cmp["matched"], 8);
  EXPECT_EQ(cmp["mean_abs_discrepancy"], 0.0);
}

TEST(Cli, Dumps) {
  ScratchDir dir("cli_dump");
  CliRun r = run({"dump-mesh", "--design", design(1), "--out", (dir / "mesh.csv").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_EQ(line_count(dir / "mesh.csv"), 25201u);
  r = run({"dump-matrix", "--design", design(1), "--out", (dir / "m.txt").string()});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_GT(line_count(dir / "m.txt"), 5u * 24640u);
}
