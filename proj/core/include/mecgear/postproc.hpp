#pragma once

#include <Eigen/Core>
#include <filesystem>
#include <vector>

#include "mecgear/geometry.hpp"
#include "mecgear/materials.hpp"
#include "mecgear/mesh.hpp"
#include "mecgear/network.hpp"

namespace mecgear {

struct SolveOptions;

enum class Gap { kInner, kOuter };

/// Branch fluxes and cell flux densities of a full (untiled) loop solution.
struct FieldSolution {
  int n_rl = 0;
  int n_al = 0;
  // Radial branch (k, j) crosses the boundary between layers k and k + 1 at
  // column j: index k * n_al + j, (n_rl - 1) * n_al entries, outward positive.
  std::vector<double> radial_flux;
  // Tangential branch (m, j) joins columns j and j + 1 in layer m: index
  // m * n_al + j, n_rl * n_al entries, counter-clockwise positive.
  std::vector<double> tangential_flux;
  // Per cell, index k * n_al + j: mean of the two facing tubes. Radial tubes
  // use the area r * dtheta * L at the boundary they cross.
  std::vector<double> b_rad;
  std::vector<double> b_tan;

  double b_magnitude(int k, int j) const;
};

FieldSolution flux_densities(const PolarMesh& mesh, const Eigen::VectorXd& phi);

/// Middle radial layer of an air gap. Throws InputError when the gap collapsed.
int gap_layer(const PolarMesh& mesh, Gap gap);

struct ProfileSample {
  double theta = 0.0;  // rad
  double b_rad = 0.0;  // T
  double b_tan = 0.0;  // T
};

std::vector<ProfileSample> airgap_profile(const PolarMesh& mesh, const FieldSolution& sol, Gap gap);

/// (L r^2 / mu0) * sum_j B_rad B_tan dtheta over the cells of one layer: the
/// torque on everything inside that layer.
double layer_stress_torque(const PolarMesh& mesh, const FieldSolution& sol, int layer);

/// Torque on rotor 1 (inner gap) or rotor 3 (outer gap) with outward normals,
/// so the two rotors and the modulators sum to zero.
double maxwell_torque(const PolarMesh& mesh, const FieldSolution& sol, Gap gap);

/// Gap torque straight from a (possibly sector) loop vector, plus the unsigned
/// stress integral used as a scale for near-zero torques.
struct GapStress {
  double torque = 0.0;
  double magnitude = 0.0;
};
GapStress gap_stress(const PolarMesh& mesh, const LoopIndex& index, const Eigen::VectorXd& phi, Gap gap);

struct TorqueReport {
  double torque_rotor1 = 0.0;
  double torque_rotor3 = 0.0;
  double torque_modulators = 0.0;
  double radius_inner = 0.0;  // integration radii
  double radius_outer = 0.0;
  double vtd = 0.0;           // |T3| / active volume
  double pm_vtd = 0.0;        // |T3| / magnet volume
};

TorqueReport torque_report(const GearDesign& design, const PolarMesh& mesh, const FieldSolution& sol);

/// Writes theta_deg, B_rad_T, B_tan_T.
void write_profile_csv(const std::vector<ProfileSample>& profile, const std::filesystem::path& path);

struct SlipOptions {
  int samples = 9;  // rotor 1 angles across the half electrical period
  int refine = 3;   // one solve at the fitted peak, the rest golden-section around it
  int threads = 1;
  // Start each Newton solve from the previous angle's solution instead of the
  // linearised one.
  bool warm_start = true;
};

struct SlipSample {
  double theta1 = 0.0;
  double torque_rotor3 = 0.0;
  int iterations = 0;
};

struct SlipResult {
  double slip_torque = 0.0;  // max |T3| found [Nm]
  double angle = 0.0;        // rotor 1 angle at the maximum [rad]
  std::vector<SlipSample> samples;
  int iterations = 0;
  double seconds = 0.0;
};

/// Maximum outer-rotor torque over rotor 1 positions, with rotors 2 and 3 held
/// at the design's angles.
SlipResult slip_torque(const GearDesign& design, const MeshConfig& config, const MaterialSet& materials,
                       const SolveOptions& options, const SlipOptions& slip = {});

}  // namespace mecgear
