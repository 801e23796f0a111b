#include <gtest/gtest.h>

#include <fstream>

#include "mecgear/solver.hpp"
#include "support.hpp"

using namespace mecgear;
using testing_support::base_design;
using testing_support::hand_materials;
using testing_support::hand_mesh;
using testing_support::rel_diff;

namespace {

PolarMesh coarse_mesh(const GearDesign& d) { return build_mesh(d, derive_geometry(d), MeshConfig::coarse()); }

// Small enough for the dense oracle.
GearDesign small_design() {
  GearDesign d;
  d.p1 = 2;
  d.p3 = 5;
  d.r_o = mm(60.0);
  d.t_bi1 = mm(8.0);
  d.t_pm1 = mm(4.0);
  d.t_ag1 = mm(1.0);
  d.t_brg = mm(1.0);
  d.t_mods = mm(6.0);
  d.t_ag2 = mm(1.0);
  d.t_pm3 = mm(4.0);
  d.t_bi3 = mm(8.0);
  return d;
}

}  // namespace

TEST(Solver, ZeroSourceGivesZeroFlux) {
  GearDesign d = small_design();
  PolarMesh mesh = coarse_mesh(d);
  for (auto& c : mesh.cells) c.mmf = 0.0;
  const SolveResult r = solve_newton(mesh, MaterialSet::defaults());
  EXPECT_EQ(r.phi.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(r.torque, 0.0);
  EXPECT_EQ(r.iterations, 1);
}

TEST(Solver, SparseMatchesDense) {
  for (const PolarMesh& mesh : {hand_mesh(), coarse_mesh(small_design())}) {
    const MecSystem sys = assemble(mesh, MaterialSet::defaults(), nullptr);
    ASSERT_LE(sys.dimension(), 5000);
    const Eigen::VectorXd a = solve_linear(sys);
    const Eigen::VectorXd b = dense_oracle_solve(sys);
    EXPECT_LT((a - b).norm(), 1e-10 * b.norm());
  }
}

TEST(Solver, DenseOracleRefusesLargeSystems) {
  const MecSystem sys = assemble(coarse_mesh(base_design(1)), MaterialSet::defaults(), nullptr);
  EXPECT_THROW(dense_oracle_solve(sys), InputError);
}

TEST(Solver, LinearSteelNeedsNoNewtonStep) {
  const PolarMesh mesh = hand_mesh();
  SolveOptions opt;
  opt.init_mu_r = 1000.0;
  opt.torque_gap = Gap::kInner;
  const SolveResult r = solve_newton(mesh, hand_materials(), opt);
  EXPECT_EQ(r.iterations, 1);
  const Eigen::VectorXd exact = solve_linear(assemble(mesh, hand_materials(), nullptr, 1000.0));
  EXPECT_LT((r.phi - exact).norm(), 1e-12 * exact.norm());

  // From a wrong starting permeability one Newton step lands on the exact answer.
  opt.init_mu_r = 4000.0;
  const SolveResult s = solve_newton(mesh, hand_materials(), opt);
  EXPECT_LE(s.iterations, 2);
  EXPECT_LT((s.phi - exact).norm(), 1e-10 * exact.norm());
}

TEST(Solver, AirOnlyMeshConvergesImmediately) {
  const double radii[] = {0.03, 0.04, 0.045, 0.05, 0.055, 0.06};
  const Region regions[] = {Region::kInnerAir, Region::kMagnets1, Region::kInnerGap, Region::kOuterGap,
                            Region::kOuterAir};
  PolarMesh mesh = PolarMesh::from_layers(radii, regions, 16, 1.0);
  for (int j = 0; j < 16; ++j) {
    auto& c = mesh.cell(1, j);
    c.polarity = pole_sign(2, 0.0, c.theta_c);
    c.mmf = pm_mmf(n42_magnet(), c.r_out - c.r_in, c.polarity);
  }
  SolveOptions opt;
  opt.torque_gap = Gap::kInner;
  const SolveResult r = solve_newton(mesh, MaterialSet::defaults(), opt);
  EXPECT_EQ(r.iterations, 1);
  EXPECT_GT(r.phi.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Solver, NewtonConvergesOnBaseDesigns) {
  for (int i = 1; i <= 3; ++i) {
    const SolveResult r = solve_newton(coarse_mesh(base_design(i)), MaterialSet::defaults());
    EXPECT_LT(r.iterations, 50) << "design " << i;
    ASSERT_FALSE(r.trace.records.empty());
    const auto& last = r.trace.records.back();
    const auto& prev = r.trace.records[r.trace.records.size() - 2];
    EXPECT_LT(std::abs(last.torque - prev.torque), 1e-3 * std::abs(last.torque));
    EXPECT_EQ(last.torque, r.torque);
  }
}

TEST(Solver, DampedResidualNeverGrows) {
  const SolveResult r = solve_newton(coarse_mesh(base_design(1)), MaterialSet::defaults());
  double prev = r.trace.initial_rms;
  for (const auto& rec : r.trace.records) {
    if (rec.halvings < SolveOptions{}.max_halvings) EXPECT_LE(rec.rms_residual, prev) << "iteration " << rec.iter;
    prev = rec.rms_residual;
  }
}

TEST(Solver, TightToleranceSettles) {
  const PolarMesh mesh = coarse_mesh(base_design(1));
  SolveOptions loose;
  SolveOptions tight;
  tight.torque_tol = 1e-8;
  const SolveResult a = solve_newton(mesh, MaterialSet::defaults(), loose);
  const SolveResult b = solve_newton(mesh, MaterialSet::defaults(), tight);
  EXPECT_LT(rel_diff(a.torque, b.torque), 1e-3);
  EXPECT_GE(b.iterations, a.iterations);
}

TEST(Solver, SymmetryReductionMatchesFullSolve) {
  const PolarMesh mesh = coarse_mesh(base_design(2));
  SolveOptions opt;
  opt.torque_tol = 1e-9;
  const SolveResult red = solve_newton(mesh, MaterialSet::defaults(), opt);
  opt.use_symmetry = false;
  const SolveResult full = solve_newton(mesh, MaterialSet::defaults(), opt);
  EXPECT_EQ(red.symmetry, 2);
  EXPECT_EQ(full.symmetry, 1);
  EXPECT_LT(rel_diff(red.torque, full.torque), 1e-9);
  EXPECT_LT((red.phi - full.phi).norm(), 1e-9 * full.phi.norm());
}

TEST(Solver, Deterministic) {
  const PolarMesh mesh = coarse_mesh(base_design(3));
  const SolveResult a = solve_newton(mesh, MaterialSet::defaults());
  const SolveResult b = solve_newton(mesh, MaterialSet::defaults());
  EXPECT_EQ(a.torque, b.torque);
  EXPECT_EQ(a.iterations, b.iterations);
  EXPECT_TRUE(a.phi == b.phi);
}

TEST(Solver, WarmStartFromSolution) {
  const PolarMesh mesh = coarse_mesh(base_design(1));
  SolveOptions opt;
  const SolveResult cold = solve_newton(mesh, MaterialSet::defaults(), opt);
  opt.initial_phi = cold.phi;
  const SolveResult warm = solve_newton(mesh, MaterialSet::defaults(), opt);
  EXPECT_LE(warm.iterations, 2);
  EXPECT_LT(rel_diff(warm.torque, cold.torque), 1e-3);
  opt.initial_phi = Eigen::VectorXd::Zero(3);
  EXPECT_THROW(solve_newton(mesh, MaterialSet::defaults(), opt), InputError);
}

TEST(Solver, FrozenLinearSkipsNewton) {
  const PolarMesh mesh = coarse_mesh(base_design(1));
  SolveOptions opt;
  opt.frozen_linear = true;
  const SolveResult r = solve_newton(mesh, MaterialSet::defaults(), opt);
  EXPECT_EQ(r.iterations, 1);
  const Eigen::VectorXd lin = solve_linear(assemble(mesh, MaterialSet::defaults(), nullptr));
  EXPECT_LT((r.phi - lin).norm(), 1e-12 * lin.norm());
  // A stale starting vector must not leak into the frozen solution.
  opt.initial_phi = Eigen::VectorXd::Constant(mesh.loop_count(), 1e-3);
  const SolveResult s = solve_newton(mesh, MaterialSet::defaults(), opt);
  EXPECT_TRUE(s.phi == r.phi);
}

TEST(Solver, ConvergenceErrorCarriesTrace) {
  const PolarMesh mesh = coarse_mesh(base_design(1));
  SolveOptions opt;
  opt.max_iters = 1;
  try {
    solve_newton(mesh, MaterialSet::defaults(), opt);
    FAIL() << "expected ConvergenceError";
  } catch (const ConvergenceError& e) {
    EXPECT_EQ(e.exit_code(), 3);
    EXPECT_EQ(e.trace().records.size(), 1u);
    EXPECT_NE(std::string(e.what()).find("1 Newton iterations"), std::string::npos);
  }
}

TEST(Solver, RejectsBadOptions) {
  const PolarMesh mesh = hand_mesh();
  SolveOptions opt;
  opt.torque_tol = 0.0;
  EXPECT_THROW(solve_newton(mesh, hand_materials(), opt), InputError);
  opt = {};
  opt.max_iters = 0;
  EXPECT_THROW(solve_newton(mesh, hand_materials(), opt), InputError);
}

TEST(Solver, TraceCsv) {
  testing_support::ScratchDir dir("trace");
  const SolveResult r = solve_newton(coarse_mesh(base_design(1)), MaterialSet::defaults());
  write_trace_csv(r.trace, dir / "trace.csv");
  std::ifstream in(dir / "trace.csv");
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "iter,torque_Nm,rms_residual,cumulative_seconds,halvings");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, r.iterations);
}
