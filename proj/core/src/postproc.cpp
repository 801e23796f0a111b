#include "mecgear/postproc.hpp"

#include <cmath>
#include <fstream>

#include "mecgear/error.hpp"
#include "mecgear/units.hpp"

namespace mecgear {

namespace {

// B_rad, B_tan of the cells of layer m for a loop vector over `idx` (full or
// sector; columns wrap modulo idx.angular).
void layer_fields(const PolarMesh& mesh, const LoopIndex& idx, const Eigen::VectorXd& phi, int m,
                  std::vector<double>& b_rad, std::vector<double>& b_tan) {
  const int rings = idx.rings;
  const int ang = idx.angular;
  const auto& layer = mesh.layers[static_cast<std::size_t>(m)];
  const double a_in = layer.r_in * mesh.dtheta * mesh.stack_length;
  const double a_out = layer.r_out * mesh.dtheta * mesh.stack_length;
  const double a_tan = (layer.r_out - layer.r_in) * mesh.stack_length;
  auto loop = [&](int ring, int j) { return ring < 0 || ring >= rings ? 0.0 : phi[idx(ring, (j + ang) % ang)]; };
  b_rad.resize(static_cast<std::size_t>(ang));
  b_tan.resize(static_cast<std::size_t>(ang));
  for (int j = 0; j < ang; ++j) {
    const double rad_in = m > 0 ? loop(m - 1, j) - loop(m - 1, j - 1) : 0.0;
    const double rad_out = m < rings ? loop(m, j) - loop(m, j - 1) : 0.0;
    const double tan_left = loop(m - 1, j - 1) - loop(m, j - 1);
    const double tan_right = loop(m - 1, j) - loop(m, j);
    b_rad[static_cast<std::size_t>(j)] = 0.5 * (rad_in / a_in + rad_out / a_out);
    b_tan[static_cast<std::size_t>(j)] = 0.5 * (tan_left + tan_right) / a_tan;
  }
}

double stress_factor(const PolarMesh& mesh, int m) {
  const double r = mesh.layers[static_cast<std::size_t>(m)].r_c;
  return mesh.stack_length * r * r * mesh.dtheta / kMu0;
}

}  // namespace

double FieldSolution::b_magnitude(int k, int j) const {
  const std::size_t i = static_cast<std::size_t>(k) * n_al + j;
  return std::hypot(b_rad[i], b_tan[i]);
}

FieldSolution flux_densities(const PolarMesh& mesh, const Eigen::VectorXd& phi) {
  MECGEAR_REQUIRE(phi.size() == mesh.loop_count(), "flux vector does not match the mesh");
  FieldSolution sol;
  sol.n_rl = mesh.n_rl();
  sol.n_al = mesh.n_al;
  const LoopIndex idx{sol.n_rl - 1, sol.n_al};
  const std::size_t n_al = static_cast<std::size_t>(sol.n_al);

  sol.radial_flux.resize(static_cast<std::size_t>(idx.rings) * n_al);
  sol.tangential_flux.resize(static_cast<std::size_t>(sol.n_rl) * n_al);
  for (int j = 0; j < sol.n_al; ++j) {
    const int jm = (j + sol.n_al - 1) % sol.n_al;
    for (int k = 0; k < idx.rings; ++k) sol.radial_flux[k * n_al + j] = phi[idx(k, j)] - phi[idx(k, jm)];
    for (int m = 0; m < sol.n_rl; ++m) {
      const double below = m > 0 ? phi[idx(m - 1, j)] : 0.0;
      const double above = m < idx.rings ? phi[idx(m, j)] : 0.0;
      sol.tangential_flux[m * n_al + j] = below - above;
    }
  }

  sol.b_rad.resize(mesh.cell_count());
  sol.b_tan.resize(mesh.cell_count());
  std::vector<double> br;
  std::vector<double> bt;
  for (int m = 0; m < sol.n_rl; ++m) {
    layer_fields(mesh, idx, phi, m, br, bt);
    std::copy(br.begin(), br.end(), sol.b_rad.begin() + static_cast<std::ptrdiff_t>(m * n_al));
    std::copy(bt.begin(), bt.end(), sol.b_tan.begin() + static_cast<std::ptrdiff_t>(m * n_al));
  }
  return sol;
}

int gap_layer(const PolarMesh& mesh, Gap gap) {
  const auto [first, count] = mesh.region_layers(gap == Gap::kInner ? Region::kInnerGap : Region::kOuterGap);
  if (count == 0) throw InputError(std::string(gap == Gap::kInner ? "inner" : "outer") + " air gap has no layers");
  return first + count / 2;
}

std::vector<ProfileSample> airgap_profile(const PolarMesh& mesh, const FieldSolution& sol, Gap gap) {
  const int m = gap_layer(mesh, gap);
  std::vector<ProfileSample> out(static_cast<std::size_t>(mesh.n_al));
  for (int j = 0; j < mesh.n_al; ++j) {
    const std::size_t i = static_cast<std::size_t>(m) * mesh.n_al + j;
    out[static_cast<std::size_t>(j)] = {mesh.cell(m, j).theta_c, sol.b_rad[i], sol.b_tan[i]};
  }
  return out;
}

double layer_stress_torque(const PolarMesh& mesh, const FieldSolution& sol, int layer) {
  MECGEAR_REQUIRE(layer >= 0 && layer < mesh.n_rl(), "layer out of range");
  double sum = 0.0;
  const std::size_t base = static_cast<std::size_t>(layer) * mesh.n_al;
  for (int j = 0; j < mesh.n_al; ++j) sum += sol.b_rad[base + j] * sol.b_tan[base + j];
  return stress_factor(mesh, layer) * sum;
}

double maxwell_torque(const PolarMesh& mesh, const FieldSolution& sol, Gap gap) {
  const double t = layer_stress_torque(mesh, sol, gap_layer(mesh, gap));
  return gap == Gap::kInner ? t : 0.0 - t;
}

GapStress gap_stress(const PolarMesh& mesh, const LoopIndex& index, const Eigen::VectorXd& phi, Gap gap) {
  const int m = gap_layer(mesh, gap);
  thread_local std::vector<double> br;
  thread_local std::vector<double> bt;
  layer_fields(mesh, index, phi, m, br, bt);
  double sum = 0.0;
  double mag = 0.0;
  for (std::size_t j = 0; j < br.size(); ++j) {
    sum += br[j] * bt[j];
    mag += std::abs(br[j] * bt[j]);
  }
  const double scale = stress_factor(mesh, m) * (static_cast<double>(mesh.n_al) / index.angular);
  return {gap == Gap::kInner ? scale * sum : -scale * sum, scale * mag};
}

TorqueReport torque_report(const GearDesign& design, const PolarMesh& mesh, const FieldSolution& sol) {
  TorqueReport r;
  r.torque_rotor1 = maxwell_torque(mesh, sol, Gap::kInner);
  r.torque_rotor3 = maxwell_torque(mesh, sol, Gap::kOuter);
  r.torque_modulators = 0.0 - (r.torque_rotor1 + r.torque_rotor3);
  r.radius_inner = mesh.layers[static_cast<std::size_t>(gap_layer(mesh, Gap::kInner))].r_c;
  r.radius_outer = mesh.layers[static_cast<std::size_t>(gap_layer(mesh, Gap::kOuter))].r_c;
  r.vtd = std::abs(r.torque_rotor3) / active_volume(design);
  r.pm_vtd = std::abs(r.torque_rotor3) / magnet_volume(design);
  return r;
}

void write_profile_csv(const std::vector<ProfileSample>& profile, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(12);
  out << "theta_deg,B_rad_T,B_tan_T\n";
  for (const auto& s : profile) out << to_deg(s.theta) << ',' << s.b_rad << ',' << s.b_tan << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace mecgear
