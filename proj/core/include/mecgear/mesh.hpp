#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "mecgear/geometry.hpp"
#include "mecgear/materials.hpp"
#include "mecgear/units.hpp"

namespace mecgear {

enum class Material : std::uint8_t { kAir, kSteel, kMagnet };

std::string_view material_name(Material m);

/// Radial layering rule for one region. A positive `fixed_layers` wins;
/// otherwise the count is max(min_layers, round(multiplier * thickness / reference)).
struct RegionLayering {
  int fixed_layers = 0;
  double multiplier = 0.0;
  int min_layers = 1;
};

struct MeshConfig {
  int angular_multiplier = 10;  // angular layers per modulator pitch
  std::array<RegionLayering, kRegionCount> regions{};
  double reference_thickness = mm(10.0);

  RegionLayering& operator[](Region r) { return regions[static_cast<std::size_t>(r)]; }
  const RegionLayering& operator[](Region r) const { return regions[static_cast<std::size_t>(r)]; }

  void validate() const;

  static MeshConfig coarse();
  static MeshConfig fine();
};

int radial_layer_count(const RegionLayering& rule, double thickness, double reference_thickness);
/// multiplier * q2 rounded up to a multiple of the symmetry factor.
int angular_layer_count(int q2, int multiplier, int symmetry);

struct NodeCell {
  double r_in = 0.0;
  double r_out = 0.0;
  double theta_c = 0.0;
  Region region = Region::kInnerAir;
  Material material = Material::kAir;
  // Magnetisation sign (+1 outward); 0 outside magnets.
  int polarity = 0;
  // Total MMF along +r across the cell [A]; split between the radial half-tubes
  // in proportion to their lengths.
  double mmf = 0.0;
};

struct RadialLayer {
  double r_in = 0.0;
  double r_out = 0.0;
  double r_c = 0.0;  // geometric mean radius, where the node sits
  Region region = Region::kInnerAir;
};

/// Structured polar grid of node cells: n_rl radial layers by n_al angular layers.
/// Cell (k, j) is stored at k * n_al + j; cell j spans [j, j + 1) * dtheta.
struct PolarMesh {
  std::vector<RadialLayer> layers;
  int n_al = 0;
  double dtheta = 0.0;
  double stack_length = 1.0;
  int symmetry = 1;
  std::vector<NodeCell> cells;

  int n_rl() const noexcept { return static_cast<int>(layers.size()); }
  int loop_count() const noexcept { return n_al * (n_rl() - 1); }
  std::size_t cell_count() const noexcept { return cells.size(); }
  // Each cell owns one radial and one tangential branch, less the outer ring's radial ones.
  std::size_t tube_count() const noexcept;

  NodeCell& cell(int k, int j) { return cells[static_cast<std::size_t>(k) * n_al + j]; }
  const NodeCell& cell(int k, int j) const { return cells[static_cast<std::size_t>(k) * n_al + j]; }

  /// First layer and layer count of a region; count 0 when the region collapsed.
  std::pair<int, int> region_layers(Region r) const;

  /// Cells start as air, steel in steel regions, magnet in magnet regions.
  static PolarMesh from_layers(std::span<const double> radii, std::span<const Region> regions, int n_al,
                               double stack_length, int symmetry = 1);
};

PolarMesh build_mesh(const GearDesign& design, const DerivedGeometry& derived, const MeshConfig& config,
                     const PermanentMagnet& magnet = n42_magnet());

/// Sets magnet MMFs and modulator steel for the design's rotor angles on an
/// existing grid.
void assign_sources(PolarMesh& mesh, const GearDesign& design, const PermanentMagnet& magnet = n42_magnet());

/// Sign of the pole covering `theta` for a rotor with `pole_pairs` pole pairs at
/// `rotor_angle`; pole 0 starts at the rotor angle and points outward.
int pole_sign(int pole_pairs, double rotor_angle, double theta);

/// One row per cell: k, j, r_center_m, theta_center_deg, region, material, mmf_A.
void write_mesh_csv(const PolarMesh& mesh, const std::filesystem::path& path);

}  // namespace mecgear
