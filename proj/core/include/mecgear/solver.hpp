#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <optional>
#include <vector>

#include "mecgear/error.hpp"
#include "mecgear/materials.hpp"
#include "mecgear/mesh.hpp"
#include "mecgear/network.hpp"
#include "mecgear/postproc.hpp"

namespace mecgear {

struct SolveOptions {
  double torque_tol = 1e-3;  // relative torque change between iterations
  int max_iters = 50;
  double init_mu_r = 4000.0;  // steel permeability of the linearised starting solve
  bool damping = true;
  int max_halvings = 10;
  // Stop once RMS(residual) <= residual_floor * RMS(f).
  double residual_floor = 1e-12;
  // Keep the linearised solution; no permeability updates.
  bool frozen_linear = false;
  bool use_symmetry = true;
  Gap torque_gap = Gap::kOuter;
  // Warm start (full loop vector). When absent, the linearised solve is the start.
  // Ignored by frozen-linear solves.
  std::optional<Eigen::VectorXd> initial_phi;

  void validate() const;
};

struct IterationRecord {
  int iter = 0;
  double torque = 0.0;
  double rms_residual = 0.0;
  double seconds = 0.0;  // cumulative since the solve started
  int halvings = 0;
};

struct SolveTrace {
  double initial_torque = 0.0;
  double initial_rms = 0.0;
  std::vector<IterationRecord> records;
};

struct SolveResult {
  Eigen::VectorXd phi;  // full loop vector
  SolveTrace trace;
  double torque = 0.0;  // on the rotor of options.torque_gap
  int iterations = 0;
  int symmetry = 1;
  double seconds = 0.0;
};

class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, SolveTrace trace)
      : Error(ErrorKind::kConvergence, what), trace_(std::move(trace)) {}
  const SolveTrace& trace() const noexcept { return trace_; }

 private:
  SolveTrace trace_;
};

double rms(const Eigen::VectorXd& v);

/// Direct sparse solve of r_app * phi = f.
Eigen::VectorXd solve_linear(const MecSystem& system);

/// Newton-Raphson on r_app(phi) * phi = f with r_diff as the Jacobian, from the
/// linearised solution, until the torque settles. Throws ConvergenceError.
SolveResult solve_newton(const PolarMesh& mesh, const MaterialSet& materials, const SolveOptions& options = {});

/// Dense LU on the same r_app; for cross-checking the sparse path (n <= 5000).
Eigen::VectorXd dense_oracle_solve(const MecSystem& system);

/// Columns iter, torque_Nm, rms_residual, cumulative_seconds, halvings.
void write_trace_csv(const SolveTrace& trace, const std::filesystem::path& path);

}  // namespace mecgear
