#pragma once

#include <array>
#include <cstddef>
#include <string>
#include <string_view>

namespace mecgear {

// Radial regions, inside out. Zero-thickness regions collapse and get no layers.
enum class Region : int {
  kInnerAir = 0,
  kBackIron1,
  kMagnets1,
  kInnerGap,
  kBridge,
  kModulators,
  kOuterGap,
  kMagnets3,
  kBackIron3,
  kOuterAir,
};

inline constexpr std::size_t kRegionCount = 10;

std::string_view region_name(Region region);
bool is_steel_region(Region region);  // back irons and bridge; modulators are mixed

/// Parametric geometry of one radial-flux magnetic gear. Lengths in metres,
/// angles in mechanical radians.
struct GearDesign {
  int p1 = 0;  // inner rotor pole pairs
  int p3 = 0;  // outer rotor pole pairs

  double r_o = 0.0;  // active outer radius (outer edge of rotor 3 back iron)
  double t_bi1 = 0.0;
  double t_pm1 = 0.0;
  double t_ag1 = 0.0;
  double t_mods = 0.0;
  double t_brg = 0.0;  // 0 means no bridge
  double t_ag2 = 0.0;
  double t_pm3 = 0.0;
  double t_bi3 = 0.0;

  // Axial depth. 2D results are per metre; 1 m reproduces the per-metre numbers.
  double stack_length = 1.0;

  double theta1 = 0.0;
  double theta2 = 0.0;
  double theta3 = 0.0;

  // Steel share of one modulator pitch.
  double modulator_fill = 0.5;

  // Inner bore radius as a fraction of the rotor 1 back-iron inner radius, and
  // the outer air boundary as a multiple of r_o.
  double bore_fraction = 0.25;
  double outer_air_factor = 1.2;

  std::string steel_id = "m250";
  std::string pm_id = "n42";

  int q2() const noexcept { return p1 + p3; }
  double thickness_sum() const noexcept;
  void validate() const;
};

struct Rational {
  long num = 0;
  long den = 1;
  double value() const noexcept { return static_cast<double>(num) / static_cast<double>(den); }
  bool is_integer() const noexcept { return den == 1; }
};

struct DerivedGeometry {
  int q2 = 0;
  // Boundaries of the ten regions: region i spans [radii[i], radii[i + 1]].
  std::array<double, kRegionCount + 1> region_radii{};
  int symmetry = 1;
  Rational gear_ratio;

  double inner(Region r) const noexcept { return region_radii[static_cast<std::size_t>(r)]; }
  double outer(Region r) const noexcept { return region_radii[static_cast<std::size_t>(r) + 1]; }
  double thickness(Region r) const noexcept { return outer(r) - inner(r); }
  bool active(Region r) const noexcept { return thickness(r) > 0.0; }
  int active_region_count() const noexcept;
};

DerivedGeometry derive_geometry(const GearDesign& design);

/// Outer pole pairs from the integer part of the gear ratio: keeps the ratio
/// non-integer while preserving at most two-fold symmetry.
int outer_pole_pairs(int gear_ratio_int, int p1);

/// Dimensions held fixed while the coupled sweep parameters vary.
struct FixedSweepDimensions {
  double r_o = 0.0;
  double t_ag = 0.0;  // applied to both gaps
  double t_mods = 0.0;
  double t_brg = 0.0;
  double t_bi3 = 0.0;
  double stack_length = 1.0;
  double modulator_fill = 0.5;
  std::string steel_id = "m250";
  std::string pm_id = "n42";
};

/// Builds one sweep design. T_PM3 = k_pm * T_PM1; T_BI1 = k_bi1 * pi * r_BI1 / P1,
/// with r_BI1 fixed by the outer dimensions.
GearDesign couple_sweep_parameters(int gear_ratio_int, int p1, double k_bi1, double t_pm1,
                                   double k_pm, const FixedSweepDimensions& fixed);

/// Annular PM volume of both rotors.
double magnet_volume(const GearDesign& design);
double active_volume(const GearDesign& design);

}  // namespace mecgear
