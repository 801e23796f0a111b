#include "mecgear/network.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mecgear/error.hpp"
#include "mecgear/units.hpp"

namespace mecgear {

int SparseSym::row_nonzeros(int row) const {
  // Symmetric storage: row i and column i hold the same entries.
  return static_cast<int>(matrix.outerIndexPtr()[row + 1] - matrix.outerIndexPtr()[row]);
}

bool SparseSym::is_exactly_symmetric() const {
  const Eigen::SparseMatrix<double> t = matrix.transpose();
  if (t.nonZeros() != matrix.nonZeros()) return false;
  for (int c = 0; c < matrix.outerSize(); ++c) {
    Eigen::SparseMatrix<double>::InnerIterator a(matrix, c);
    Eigen::SparseMatrix<double>::InnerIterator b(t, c);
    for (; a && b; ++a, ++b) {
      if (a.row() != b.row() || a.value() != b.value()) return false;
    }
    if (a || b) return false;
  }
  return true;
}

TubeReluctances tube_reluctances(const NodeCell& cell, double mu, double dtheta, double stack_length) {
  const double r_c = std::sqrt(cell.r_in * cell.r_out);
  const double radial = mu * dtheta * stack_length;
  const double tangential = (0.5 * dtheta) / (mu * stack_length * std::log(cell.r_out / cell.r_in));
  return {std::log(r_c / cell.r_in) / radial, std::log(cell.r_out / r_c) / radial, tangential, tangential};
}

// ---------------------------------------------------------------------------

Assembler::Assembler(const PolarMesh& mesh, MaterialSet materials, int symmetry)
    : mesh_(&mesh), materials_(std::move(materials)), symmetry_(symmetry) {
  MECGEAR_REQUIRE(materials_.steel != nullptr, "material set has no steel model");
  MECGEAR_REQUIRE(mesh.n_rl() >= 2, "mesh needs at least two radial layers");
  MECGEAR_REQUIRE(symmetry >= 1 && mesh.n_al % symmetry == 0, "angular layers not divisible by symmetry");
  if (symmetry > 1) check_periodic(mesh, symmetry);

  index_ = {mesh.n_rl() - 1, mesh.n_al / symmetry};
  const double dth = mesh.dtheta;
  const double len = mesh.stack_length;

  tubes_.reserve(mesh.layers.size());
  for (const auto& l : mesh.layers) {
    LayerTubes t;
    t.rad_in.g = std::log(l.r_c / l.r_in) / (dth * len);
    t.rad_in.area = (l.r_c - l.r_in) / t.rad_in.g;
    t.rad_out.g = std::log(l.r_out / l.r_c) / (dth * len);
    t.rad_out.area = (l.r_out - l.r_c) / t.rad_out.g;
    t.tan.g = 0.5 * dth / (len * std::log(l.r_out / l.r_in));
    t.tan.area = (l.r_out - l.r_in) * len;
    tubes_.push_back(t);
  }

  const int n = index_.size();
  const int rings = index_.rings;
  const int ang = index_.angular;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(n) * 5);
  auto neighbours = [&](int k, int j) {
    return std::array<int, 5>{index_(k, j), index_(k, (j + ang - 1) % ang), index_(k, (j + 1) % ang),
                              k > 0 ? index_(k - 1, j) : -1, k + 1 < rings ? index_(k + 1, j) : -1};
  };
  for (int j = 0; j < ang; ++j) {
    for (int k = 0; k < rings; ++k) {
      const int col = index_(k, j);
      for (int row : neighbours(k, j)) {
        if (row >= 0) trip.emplace_back(row, col, 1.0);
      }
    }
  }
  pattern_.resize(n, n);
  pattern_.setFromTriplets(trip.begin(), trip.end());
  pattern_.makeCompressed();

  slots_.resize(static_cast<std::size_t>(n));
  const auto* outer = pattern_.outerIndexPtr();
  const auto* inner = pattern_.innerIndexPtr();
  for (int j = 0; j < ang; ++j) {
    for (int k = 0; k < rings; ++k) {
      const int col = index_(k, j);
      const auto nb = neighbours(k, j);
      auto& slot = slots_[static_cast<std::size_t>(col)];
      for (std::size_t s = 0; s < 5; ++s) {
        if (nb[s] < 0) {
          slot[s] = -1;
          continue;
        }
        const auto* pos = std::lower_bound(inner + outer[col], inner + outer[col + 1], nb[s]);
        slot[s] = static_cast<int>(pos - inner);
      }
    }
  }

  // MMF vector: sources on the radial branch at column j push flux outward,
  // which loop (k, j) traverses outward and loop (k, j - 1) inward.
  std::vector<double> branch_mmf(static_cast<std::size_t>(rings) * ang);
  for (int k = 0; k < rings; ++k) {
    const auto& lo = mesh.layers[static_cast<std::size_t>(k)];
    const auto& hi = mesh.layers[static_cast<std::size_t>(k) + 1];
    const double w_lo = (lo.r_out - lo.r_c) / (lo.r_out - lo.r_in);
    const double w_hi = (hi.r_c - hi.r_in) / (hi.r_out - hi.r_in);
    for (int j = 0; j < ang; ++j) {
      branch_mmf[static_cast<std::size_t>(k) * ang + j] = mesh.cell(k, j).mmf * w_lo + mesh.cell(k + 1, j).mmf * w_hi;
    }
  }
  f_ = Eigen::VectorXd::Zero(n);
  for (int k = 0; k < rings; ++k) {
    for (int j = 0; j < ang; ++j) {
      f_[index_(k, j)] = branch_mmf[static_cast<std::size_t>(k) * ang + j] -
                         branch_mmf[static_cast<std::size_t>(k) * ang + (j + 1) % ang];
    }
  }
}

MecSystem Assembler::make_system() const {
  MecSystem s;
  s.r_app.matrix = pattern_;
  s.r_diff.matrix = pattern_;
  s.f = f_;
  s.index = index_;
  s.sectors = symmetry_;
  return s;
}

void Assembler::branch_fluxes(const Eigen::VectorXd& phi, std::vector<double>& radial,
                              std::vector<double>& tangential) const {
  const int rings = index_.rings;
  const int ang = index_.angular;
  radial.assign(static_cast<std::size_t>(rings) * ang, 0.0);
  tangential.assign(static_cast<std::size_t>(rings + 1) * ang, 0.0);
  for (int j = 0; j < ang; ++j) {
    const int jm = (j + ang - 1) % ang;
    for (int k = 0; k < rings; ++k) {
      radial[static_cast<std::size_t>(k) * ang + j] = phi[index_(k, j)] - phi[index_(k, jm)];
    }
    for (int m = 0; m <= rings; ++m) {
      const double below = m > 0 ? phi[index_(m - 1, j)] : 0.0;
      const double above = m < rings ? phi[index_(m, j)] : 0.0;
      tangential[static_cast<std::size_t>(m) * ang + j] = below - above;
    }
  }
}

double Assembler::half_reluctance(const HalfTube& t, Material m, double flux, double* diff) const {
  switch (m) {
    case Material::kAir:
      *diff = t.g / kMu0;
      return *diff;
    case Material::kMagnet:
      *diff = t.g / materials_.magnet.permeability();
      return *diff;
    case Material::kSteel: {
      const BhModel& steel = *materials_.steel;
      const double b = flux / t.area;
      if (b == 0.0) {
        *diff = t.g / steel.initial_permeability();
        return *diff;
      }
      const HEval e = steel.h_of_b(b);
      *diff = t.g * e.dh_db;
      return t.g * e.h / b;
    }
  }
  return 0.0;
}

template <typename Reluctance>
void Assembler::assemble_with(Reluctance&& rel, const Eigen::VectorXd* phi, MecSystem& system) const {
  const PolarMesh& mesh = *mesh_;
  const int rings = index_.rings;
  const int ang = index_.angular;

  thread_local std::vector<double> rad_flux;
  thread_local std::vector<double> tan_flux;
  if (phi != nullptr) {
    branch_fluxes(*phi, rad_flux, tan_flux);
  } else {
    rad_flux.assign(static_cast<std::size_t>(rings) * ang, 0.0);
    tan_flux.assign(static_cast<std::size_t>(rings + 1) * ang, 0.0);
  }

  thread_local std::vector<double> rad_app, rad_diff, tan_app, tan_diff;
  rad_app.resize(rad_flux.size());
  rad_diff.resize(rad_flux.size());
  tan_app.resize(tan_flux.size());
  tan_diff.resize(tan_flux.size());

  double d1 = 0.0;
  double d2 = 0.0;
  for (int k = 0; k < rings; ++k) {
    const auto& lo = tubes_[static_cast<std::size_t>(k)];
    const auto& hi = tubes_[static_cast<std::size_t>(k) + 1];
    for (int j = 0; j < ang; ++j) {
      const std::size_t b = static_cast<std::size_t>(k) * ang + j;
      const double flux = rad_flux[b];
      const double a1 = rel(lo.rad_out, mesh.cell(k, j).material, flux, &d1);
      const double a2 = rel(hi.rad_in, mesh.cell(k + 1, j).material, flux, &d2);
      rad_app[b] = a1 + a2;
      rad_diff[b] = d1 + d2;
    }
  }
  for (int m = 0; m <= rings; ++m) {
    const auto& t = tubes_[static_cast<std::size_t>(m)].tan;
    for (int j = 0; j < ang; ++j) {
      const std::size_t b = static_cast<std::size_t>(m) * ang + j;
      const double flux = tan_flux[b];
      const double a1 = rel(t, mesh.cell(m, j).material, flux, &d1);
      const double a2 = rel(t, mesh.cell(m, (j + 1) % ang).material, flux, &d2);
      tan_app[b] = a1 + a2;
      tan_diff[b] = d1 + d2;
    }
  }
  fill(rad_app, rad_diff, tan_app, tan_diff, system);
}

void Assembler::fill(const std::vector<double>& rad_app, const std::vector<double>& rad_diff,
                     const std::vector<double>& tan_app, const std::vector<double>& tan_diff,
                     MecSystem& system) const {
  const int rings = index_.rings;
  const int ang = index_.angular;
  double* va = system.r_app.matrix.valuePtr();
  double* vd = system.r_diff.matrix.valuePtr();
  std::fill(va, va + system.r_app.matrix.nonZeros(), 0.0);
  std::fill(vd, vd + system.r_diff.matrix.nonZeros(), 0.0);

  auto stamp = [&](double* v, const std::array<int, 5>& s, double left, double right, double down, double up) {
    v[s[0]] += left + right + down + up;
    v[s[1]] -= left;
    v[s[2]] -= right;
    if (s[3] >= 0) v[s[3]] -= down;
    if (s[4] >= 0) v[s[4]] -= up;
  };
  for (int j = 0; j < ang; ++j) {
    const int jp = (j + 1) % ang;
    for (int k = 0; k < rings; ++k) {
      const auto& s = slots_[static_cast<std::size_t>(index_(k, j))];
      const std::size_t left = static_cast<std::size_t>(k) * ang + j;
      const std::size_t right = static_cast<std::size_t>(k) * ang + jp;
      const std::size_t down = static_cast<std::size_t>(k) * ang + j;
      const std::size_t up = static_cast<std::size_t>(k + 1) * ang + j;
      stamp(va, s, rad_app[left], rad_app[right], tan_app[down], tan_app[up]);
      stamp(vd, s, rad_diff[left], rad_diff[right], tan_diff[down], tan_diff[up]);
    }
  }
}

void Assembler::assemble_linear(double steel_mu_r, MecSystem& system) const {
  const double mu_steel = kMu0 * steel_mu_r;
  const double mu_pm = materials_.magnet.permeability();
  auto rel = [&](const HalfTube& t, Material m, double, double* diff) {
    const double mu = m == Material::kSteel ? mu_steel : (m == Material::kMagnet ? mu_pm : kMu0);
    *diff = t.g / mu;
    return *diff;
  };
  assemble_with(rel, nullptr, system);
}

void Assembler::assemble(const Eigen::VectorXd& phi, MecSystem& system) const {
  MECGEAR_REQUIRE(phi.size() == index_.size(), "flux vector does not match the system size");
  auto rel = [this](const HalfTube& t, Material m, double flux, double* diff) {
    return half_reluctance(t, m, flux, diff);
  };
  assemble_with(rel, &phi, system);
}

// ---------------------------------------------------------------------------

MecSystem assemble(const PolarMesh& mesh, const MaterialSet& materials, const Eigen::VectorXd* phi,
                   double init_mu_r) {
  const Assembler a(mesh, materials);
  MecSystem s = a.make_system();
  if (phi != nullptr) {
    a.assemble(*phi, s);
  } else {
    a.assemble_linear(init_mu_r, s);
  }
  return s;
}

void check_periodic(const PolarMesh& mesh, int symmetry) {
  MECGEAR_REQUIRE(symmetry >= 1 && mesh.n_al % symmetry == 0, "angular layers not divisible by symmetry");
  if (symmetry == 1) return;
  const int period = mesh.n_al / symmetry;
  double scale = 0.0;
  for (const auto& c : mesh.cells) scale = std::max(scale, std::abs(c.mmf));
  const double tol = 1e-9 * scale;
  for (int k = 0; k < mesh.n_rl(); ++k) {
    for (int j = period; j < mesh.n_al; ++j) {
      const auto& a = mesh.cell(k, j);
      const auto& b = mesh.cell(k, j - period);
      if (a.material != b.material || a.region != b.region || std::abs(a.mmf - b.mmf) > tol) {
        std::ostringstream os;
        os << "mesh is not " << symmetry << "-fold periodic: cell (layer " << k << ", column " << j
           << ", region " << region_name(a.region) << ") differs from column " << j - period;
        throw InputError(os.str());
      }
    }
  }
}

MecSystem reduce_symmetry(const PolarMesh& mesh, const MecSystem& full, int symmetry) {
  MECGEAR_REQUIRE(full.sectors == 1, "system is already reduced");
  MECGEAR_REQUIRE(full.index.angular == mesh.n_al, "system does not match mesh");
  check_periodic(mesh, symmetry);
  if (symmetry == 1) return full;

  const LoopIndex red{full.index.rings, full.index.angular / symmetry};
  auto fold = [&](const SparseSym& m) {
    std::vector<Eigen::Triplet<double>> trip;
    for (int col = 0; col < full.dimension(); ++col) {
      if (full.index.angle_of(col) >= red.angular) continue;
      const int rc = red(full.index.ring_of(col), full.index.angle_of(col));
      for (Eigen::SparseMatrix<double>::InnerIterator it(m.matrix, col); it; ++it) {
        const int row = static_cast<int>(it.row());
        const int rr = red(full.index.ring_of(row), full.index.angle_of(row) % red.angular);
        trip.emplace_back(rr, rc, it.value());
      }
    }
    SparseSym out;
    out.matrix.resize(red.size(), red.size());
    out.matrix.setFromTriplets(trip.begin(), trip.end());
    out.matrix.makeCompressed();
    return out;
  };

  MecSystem out;
  out.r_app = fold(full.r_app);
  out.r_diff = fold(full.r_diff);
  out.f.resize(red.size());
  for (int j = 0; j < red.angular; ++j) {
    for (int k = 0; k < red.rings; ++k) out.f[red(k, j)] = full.f[full.index(k, j)];
  }
  out.index = red;
  out.sectors = symmetry;
  return out;
}

Eigen::VectorXd tile_solution(const Eigen::VectorXd& sector, const LoopIndex& sector_index, int symmetry) {
  const LoopIndex full{sector_index.rings, sector_index.angular * symmetry};
  Eigen::VectorXd out(full.size());
  for (int j = 0; j < full.angular; ++j) {
    for (int k = 0; k < full.rings; ++k) out[full(k, j)] = sector[sector_index(k, j % sector_index.angular)];
  }
  return out;
}

void write_matrix_dump(const MecSystem& system, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out.precision(17);
  out << "# mesh-flux system: n=" << system.dimension() << " rings=" << system.index.rings
      << " angular=" << system.index.angular << " sectors=" << system.sectors << '\n';
  out << "# r_app (row col value, 0-based, loop = angular * rings + ring)\n";
  const auto& m = system.r_app.matrix;
  for (int c = 0; c < m.outerSize(); ++c) {
    for (Eigen::SparseMatrix<double>::InnerIterator it(m, c); it; ++it) {
      out << it.row() << ' ' << it.col() << ' ' << it.value() << '\n';
    }
  }
  out << "# f (row value)\n";
  for (int i = 0; i < system.f.size(); ++i) out << i << ' ' << system.f[i] << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace mecgear
