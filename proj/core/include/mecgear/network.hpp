#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <array>
#include <filesystem>
#include <vector>

#include "mecgear/materials.hpp"
#include "mecgear/mesh.hpp"

namespace mecgear {

/// Flat numbering of mesh loops. Ring k sits between radial layers k and k + 1;
/// angular index j between cell columns j and j + 1. `angular` is n_al for a
/// full system or n_al / symmetry for a sector system, which wraps around.
struct LoopIndex {
  int rings = 0;
  int angular = 0;

  int size() const noexcept { return rings * angular; }
  int operator()(int ring, int j) const noexcept { return j * rings + ring; }
  int ring_of(int flat) const noexcept { return flat % rings; }
  int angle_of(int flat) const noexcept { return flat / rings; }
};

/// Structurally symmetric sparse matrix, stored in full. Column-major storage
/// of a symmetric matrix is also its compressed-row form.
struct SparseSym {
  Eigen::SparseMatrix<double> matrix;

  int dimension() const noexcept { return static_cast<int>(matrix.rows()); }
  int row_nonzeros(int row) const;
  bool is_exactly_symmetric() const;
};

struct MecSystem {
  SparseSym r_app;
  SparseSym r_diff;  // Jacobian of r_app(phi) * phi
  Eigen::VectorXd f;
  LoopIndex index;
  int sectors = 1;  // symmetry factor folded into this system

  int dimension() const noexcept { return index.size(); }
};

/// Half-tube reluctances of one node cell with uniform permeability.
struct TubeReluctances {
  double rad_in = 0.0;
  double rad_out = 0.0;
  double tan_left = 0.0;
  double tan_right = 0.0;
};

TubeReluctances tube_reluctances(const NodeCell& cell, double mu, double dtheta, double stack_length);

/// Reusable assembler for one mesh. Steel permeability is evaluated per
/// half-tube from that tube's own flux density, which makes r_diff the exact
/// Jacobian of r_app(phi) * phi.
class Assembler {
 public:
  // symmetry > 1 assembles the first 1/symmetry sector with periodic wrap-around;
  // the mesh must be periodic with that period.
  Assembler(const PolarMesh& mesh, MaterialSet materials, int symmetry = 1);

  const LoopIndex& index() const noexcept { return index_; }
  int symmetry() const noexcept { return symmetry_; }
  const PolarMesh& mesh() const noexcept { return *mesh_; }

  /// Allocates a system with the fixed sparsity pattern and the MMF vector.
  MecSystem make_system() const;

  /// Steel at constant relative permeability (linearised system).
  void assemble_linear(double steel_mu_r, MecSystem& system) const;
  /// Steel permeabilities from the given loop fluxes.
  void assemble(const Eigen::VectorXd& phi, MecSystem& system) const;

  /// Branch fluxes for the loop vector; radial branch (k, j) between layers
  /// k and k + 1, tangential branch (m, j) in layer m between columns j and j + 1.
  void branch_fluxes(const Eigen::VectorXd& phi, std::vector<double>& radial, std::vector<double>& tangential) const;

 private:
  struct HalfTube {
    double g = 0.0;     // reluctance times permeability
    double area = 0.0;  // cross-section used for the tube's flux density
  };
  struct LayerTubes {
    HalfTube rad_in;
    HalfTube rad_out;
    HalfTube tan;
  };

  double half_reluctance(const HalfTube& t, Material m, double flux, double* diff) const;
  void fill(const std::vector<double>& rad_app, const std::vector<double>& rad_diff,
            const std::vector<double>& tan_app, const std::vector<double>& tan_diff, MecSystem& system) const;
  template <typename Reluctance>
  void assemble_with(Reluctance&& rel, const Eigen::VectorXd* phi, MecSystem& system) const;

  const PolarMesh* mesh_;
  MaterialSet materials_;
  int symmetry_ = 1;
  LoopIndex index_;
  std::vector<LayerTubes> tubes_;
  Eigen::SparseMatrix<double> pattern_;
  // Value offsets of (self, j-1, j+1, ring-1, ring+1) per loop; -1 if absent.
  std::vector<std::array<int, 5>> slots_;
  Eigen::VectorXd f_;
};

/// Convenience wrapper: full system, linearised at `init_mu_r` when phi is null.
MecSystem assemble(const PolarMesh& mesh, const MaterialSet& materials, const Eigen::VectorXd* phi,
                   double init_mu_r = 4000.0);

/// Throws InputError unless materials, regions and sources repeat every n_al / symmetry columns.
void check_periodic(const PolarMesh& mesh, int symmetry);

/// Folds a full system onto its first sector by identifying loop j with j mod (n_al / symmetry).
MecSystem reduce_symmetry(const PolarMesh& mesh, const MecSystem& full, int symmetry);

/// Expands a sector solution to the full loop vector.
Eigen::VectorXd tile_solution(const Eigen::VectorXd& sector, const LoopIndex& sector_index, int symmetry);

/// Coordinate-format dump: "row col value" per stored entry of r_app, then the f vector.
void write_matrix_dump(const MecSystem& system, const std::filesystem::path& path);

}  // namespace mecgear
