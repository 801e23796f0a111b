#include "mecgear/solver.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>

namespace mecgear {

namespace {

using Factor = Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>, Eigen::Lower, Eigen::AMDOrdering<int>>;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

bool factor_ok(const Factor& f) {
  return f.info() == Eigen::Success && f.vectorD().size() > 0 && f.vectorD().minCoeff() > 0.0;
}

bool torque_settled(double torque, double previous, const GapStress& stress, double tol) {
  // The stress-magnitude floor only matters near zero torque, where a relative
  // criterion would never settle.
  const double scale = std::max(std::abs(torque), 1e-3 * stress.magnitude);
  if (scale == 0.0) return true;
  return std::abs(torque - previous) < tol * scale;
}

}  // namespace

void SolveOptions::validate() const {
  MECGEAR_REQUIRE(torque_tol > 0.0, "torque tolerance must be positive");
  MECGEAR_REQUIRE(max_iters >= 1, "max_iters must be at least 1");
  MECGEAR_REQUIRE(init_mu_r > 0.0, "initial permeability must be positive");
  MECGEAR_REQUIRE(max_halvings >= 0, "max_halvings must be non-negative");
  MECGEAR_REQUIRE(residual_floor >= 0.0, "residual floor must be non-negative");
}

double rms(const Eigen::VectorXd& v) {
  return v.size() == 0 ? 0.0 : v.norm() / std::sqrt(static_cast<double>(v.size()));
}

Eigen::VectorXd solve_linear(const MecSystem& system) {
  Factor f;
  f.compute(system.r_app.matrix);
  if (!factor_ok(f)) {
    std::ostringstream os;
    os << "reluctance matrix (n=" << system.dimension() << ") is singular or not positive definite";
    throw ConvergenceError(os.str(), {});
  }
  return f.solve(system.f);
}

Eigen::VectorXd dense_oracle_solve(const MecSystem& system) {
  MECGEAR_REQUIRE(system.dimension() <= 5000, "dense oracle limited to 5000 loops");
  const Eigen::MatrixXd dense(system.r_app.matrix);
  return dense.partialPivLu().solve(system.f);
}

SolveResult solve_newton(const PolarMesh& mesh, const MaterialSet& materials, const SolveOptions& options) {
  options.validate();
  const auto t0 = Clock::now();
  const int symmetry = options.use_symmetry ? mesh.symmetry : 1;
  const Assembler assembler(mesh, materials, symmetry);
  const LoopIndex& idx = assembler.index();

  MecSystem sys = assembler.make_system();
  MecSystem trial_sys = assembler.make_system();
  const Eigen::VectorXd& f = sys.f;
  const double f_scale = rms(f);

  SolveResult result;
  result.symmetry = symmetry;
  SolveTrace& trace = result.trace;

  Factor factor;
  Eigen::VectorXd phi;
  // A frozen-linear solve has no iterations to start, so a warm start is ignored.
  const bool warm = options.initial_phi && !options.frozen_linear;
  if (warm) {
    MECGEAR_REQUIRE(options.initial_phi->size() == mesh.loop_count(), "initial flux vector has the wrong size");
    phi = options.initial_phi->head(idx.size());
    assembler.assemble(phi, sys);
    factor.analyzePattern(sys.r_app.matrix);
  } else {
    assembler.assemble_linear(options.init_mu_r, sys);
    factor.analyzePattern(sys.r_app.matrix);
    factor.factorize(sys.r_app.matrix);
    if (!factor_ok(factor)) throw ConvergenceError("linearised reluctance matrix could not be factorised", trace);
    phi = factor.solve(f);
  }

  GapStress stress = gap_stress(mesh, idx, phi, options.torque_gap);
  trace.initial_torque = stress.torque;

  auto finish = [&](int iterations) {
    result.phi = tile_solution(phi, idx, symmetry);
    result.torque = stress.torque;
    result.iterations = iterations;
    result.seconds = seconds_since(t0);
    return result;
  };

  if (options.frozen_linear) {
    const Eigen::VectorXd r = sys.r_app.matrix * phi - f;
    trace.initial_rms = rms(r);
    trace.records.push_back({1, stress.torque, trace.initial_rms, seconds_since(t0), 0});
    return finish(1);
  }

  if (!warm) assembler.assemble(phi, sys);
  Eigen::VectorXd r = sys.r_app.matrix * phi - f;
  double r_rms = rms(r);
  trace.initial_rms = r_rms;
  double previous = stress.torque;

  Eigen::VectorXd delta;
  Eigen::VectorXd trial;
  Eigen::VectorXd r_trial;
  for (int it = 1; it <= options.max_iters; ++it) {
    if (r_rms <= options.residual_floor * f_scale) {
      trace.records.push_back({it, stress.torque, r_rms, seconds_since(t0), 0});
      return finish(it);
    }

    factor.factorize(sys.r_diff.matrix);
    if (!factor_ok(factor)) {
      std::ostringstream os;
      os << "Jacobian factorisation failed at iteration " << it;
      throw ConvergenceError(os.str(), trace);
    }
    delta = factor.solve(r);

    double step = 1.0;
    int halvings = 0;
    double trial_rms = 0.0;
    for (;;) {
      trial = phi - step * delta;
      assembler.assemble(trial, trial_sys);
      r_trial = trial_sys.r_app.matrix * trial - f;
      trial_rms = rms(r_trial);
      if (!options.damping || trial_rms <= r_rms || halvings >= options.max_halvings) break;
      step *= 0.5;
      ++halvings;
    }
    phi.swap(trial);
    std::swap(sys, trial_sys);
    r.swap(r_trial);
    r_rms = trial_rms;

    stress = gap_stress(mesh, idx, phi, options.torque_gap);
    trace.records.push_back({it, stress.torque, r_rms, seconds_since(t0), halvings});
    // A damped step barely moves the torque whether or not it has settled, so
    // only full Newton steps may end the iteration.
    if (halvings == 0 && torque_settled(stress.torque, previous, stress, options.torque_tol)) return finish(it);
    previous = stress.torque;
  }

  std::ostringstream os;
  os << "no convergence after " << options.max_iters << " Newton iterations (last RMS residual " << r_rms << ")";
  throw ConvergenceError(os.str(), trace);
}

void write_trace_csv(const SolveTrace& trace, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(12);
  out << "iter,torque_Nm,rms_residual,cumulative_seconds,halvings\n";
  for (const auto& r : trace.records) {
    out << r.iter << ',' << r.torque << ',' << r.rms_residual << ',' << r.seconds << ',' << r.halvings << '\n';
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace mecgear
