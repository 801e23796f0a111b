#include <benchmark/benchmark.h>

#include <filesystem>
#include <string>

#include "mecgear/io.hpp"
#include "mecgear/network.hpp"
#include "mecgear/postproc.hpp"
#include "mecgear/solver.hpp"

using namespace mecgear;

namespace {

GearDesign design(int i) {
  return load_design(std::filesystem::path(MECGEAR_DATA_DIR) / "designs" / ("base_design_" + std::to_string(i) + ".json"));
}

MeshConfig preset(int fine) { return fine ? MeshConfig::fine() : MeshConfig::coarse(); }

void set_label(benchmark::State& state, int i, int fine, const PolarMesh& mesh) {
  state.SetLabel("BD" + std::to_string(i) + (fine ? " fine " : " coarse ") + std::to_string(mesh.loop_count()) + " loops");
}

// Args: base design, fine flag.
void BM_BuildMesh(benchmark::State& state) {
  const int i = static_cast<int>(state.range(0));
  const int fine = static_cast<int>(state.range(1));
  const GearDesign d = design(i);
  const DerivedGeometry g = derive_geometry(d);
  PolarMesh mesh;
  for (auto _ : state) {
    mesh = build_mesh(d, g, preset(fine));
    benchmark::DoNotOptimize(mesh.cells.data());
  }
  set_label(state, i, fine, mesh);
}

void BM_AssembleNonlinear(benchmark::State& state) {
  const int i = static_cast<int>(state.range(0));
  const int fine = static_cast<int>(state.range(1));
  const GearDesign d = design(i);
  const PolarMesh mesh = build_mesh(d, derive_geometry(d), preset(fine));
  const Assembler asmb(mesh, MaterialSet::defaults(), mesh.symmetry);
  MecSystem sys = asmb.make_system();
  asmb.assemble_linear(4000.0, sys);
  const Eigen::VectorXd phi = solve_linear(sys);
  for (auto _ : state) {
    asmb.assemble(phi, sys);
    benchmark::DoNotOptimize(sys.r_diff.matrix.valuePtr());
  }
  set_label(state, i, fine, mesh);
}

void BM_LinearSolve(benchmark::State& state) {
  const int i = static_cast<int>(state.range(0));
  const int fine = static_cast<int>(state.range(1));
  const GearDesign d = design(i);
  const PolarMesh mesh = build_mesh(d, derive_geometry(d), preset(fine));
  const Assembler asmb(mesh, MaterialSet::defaults(), mesh.symmetry);
  MecSystem sys = asmb.make_system();
  asmb.assemble_linear(4000.0, sys);
  for (auto _ : state) {
    Eigen::VectorXd phi = solve_linear(sys);
    benchmark::DoNotOptimize(phi.data());
  }
  set_label(state, i, fine, mesh);
}

void BM_NewtonSolve(benchmark::State& state) {
  const int i = static_cast<int>(state.range(0));
  const int fine = static_cast<int>(state.range(1));
  const GearDesign d = design(i);
  const PolarMesh mesh = build_mesh(d, derive_geometry(d), preset(fine));
  int iterations = 0;
  for (auto _ : state) {
    const SolveResult r = solve_newton(mesh, MaterialSet::defaults());
    iterations = r.iterations;
    benchmark::DoNotOptimize(r.torque);
  }
  state.counters["iterations"] = iterations;
  set_label(state, i, fine, mesh);
}

void BM_SlipTorque(benchmark::State& state) {
  const int i = static_cast<int>(state.range(0));
  const int fine = static_cast<int>(state.range(1));
  const GearDesign d = design(i);
  SlipOptions slip;
  slip.samples = static_cast<int>(state.range(2));
  slip.refine = static_cast<int>(state.range(3));
  double torque = 0.0;
  for (auto _ : state) {
    const SlipResult r = slip_torque(d, preset(fine), MaterialSet::defaults(), {}, slip);
    torque = r.slip_torque;
    benchmark::DoNotOptimize(torque);
  }
  state.counters["slip_Nm"] = torque;
  state.SetLabel("BD" + std::to_string(i) + (fine ? " fine" : " coarse"));
}

}  // namespace

BENCHMARK(BM_BuildMesh)->ArgsProduct({{1, 2, 3}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_AssembleNonlinear)->ArgsProduct({{1, 2, 3}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LinearSolve)->ArgsProduct({{1, 2, 3}, {0, 1}})->Unit(benchmark::kMillisecond);
BENCHMARK(BM_NewtonSolve)->ArgsProduct({{1, 2, 3}, {0, 1}})->Unit(benchmark::kMillisecond)->Iterations(1);
// Sweep budget (3 samples, 1 refinement) against the interactive default (9, 3).
BENCHMARK(BM_SlipTorque)
    ->Args({1, 0, 3, 1})
    ->Args({1, 0, 9, 3})
    ->Args({2, 0, 3, 1})
    ->Args({2, 1, 3, 1})
    ->Unit(benchmark::kMillisecond)
    ->Iterations(1);

BENCHMARK_MAIN();
