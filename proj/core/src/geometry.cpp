#include "mecgear/geometry.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "mecgear/error.hpp"
#include "mecgear/units.hpp"

namespace mecgear {

std::string_view region_name(Region region) {
  switch (region) {
    case Region::kInnerAir: return "inner_air";
    case Region::kBackIron1: return "back_iron_1";
    case Region::kMagnets1: return "magnets_1";
    case Region::kInnerGap: return "inner_gap";
    case Region::kBridge: return "bridge";
    case Region::kModulators: return "modulators";
    case Region::kOuterGap: return "outer_gap";
    case Region::kMagnets3: return "magnets_3";
    case Region::kBackIron3: return "back_iron_3";
    case Region::kOuterAir: return "outer_air";
  }
  return "unknown";
}

bool is_steel_region(Region region) {
  return region == Region::kBackIron1 || region == Region::kBackIron3 || region == Region::kBridge;
}

double GearDesign::thickness_sum() const noexcept {
  return t_bi1 + t_pm1 + t_ag1 + t_mods + t_brg + t_ag2 + t_pm3 + t_bi3;
}

void GearDesign::validate() const {
  MECGEAR_REQUIRE(p1 >= 1, "p1 must be at least 1");
  MECGEAR_REQUIRE(p3 > p1, "p3 must exceed p1");
  MECGEAR_REQUIRE(std::isfinite(r_o) && r_o > 0.0, "r_o must be positive");
  const std::array<std::pair<const char*, double>, 8> t = {{{"t_bi1", t_bi1},
                                                            {"t_pm1", t_pm1},
                                                            {"t_ag1", t_ag1},
                                                            {"t_mods", t_mods},
                                                            {"t_brg", t_brg},
                                                            {"t_ag2", t_ag2},
                                                            {"t_pm3", t_pm3},
                                                            {"t_bi3", t_bi3}}};
  for (const auto& [name, value] : t) {
    MECGEAR_REQUIRE(std::isfinite(value) && value >= 0.0, std::string(name) + " must be non-negative");
  }
  if (thickness_sum() >= r_o) {
    std::ostringstream os;
    os << "radial thicknesses sum to " << to_mm(thickness_sum()) << " mm, which leaves no bore inside r_o = "
       << to_mm(r_o) << " mm";
    throw InputError(os.str());
  }
  MECGEAR_REQUIRE(std::isfinite(stack_length) && stack_length > 0.0, "stack_length must be positive");
  MECGEAR_REQUIRE(modulator_fill > 0.0 && modulator_fill < 1.0, "modulator_fill must lie in (0, 1)");
  MECGEAR_REQUIRE(bore_fraction > 0.0 && bore_fraction < 1.0, "bore_fraction must lie in (0, 1)");
  MECGEAR_REQUIRE(outer_air_factor > 1.0, "outer_air_factor must exceed 1");
  MECGEAR_REQUIRE(std::isfinite(theta1) && std::isfinite(theta2) && std::isfinite(theta3),
                  "rotor angles must be finite");
}

int DerivedGeometry::active_region_count() const noexcept {
  int n = 0;
  for (std::size_t i = 0; i < kRegionCount; ++i) n += region_radii[i + 1] > region_radii[i] ? 1 : 0;
  return n;
}

DerivedGeometry derive_geometry(const GearDesign& design) {
  design.validate();

  DerivedGeometry g;
  g.q2 = design.q2();
  g.symmetry = std::gcd(std::gcd(design.p1, design.p3), g.q2);
  const long common = std::gcd(static_cast<long>(g.q2), static_cast<long>(design.p1));
  g.gear_ratio = {g.q2 / common, design.p1 / common};

  // Walk inward from r_o so each interior boundary is r_o minus a sum of thicknesses.
  const std::array<double, 8> thick = {design.t_bi1, design.t_pm1, design.t_ag1, design.t_brg,
                                       design.t_mods, design.t_ag2, design.t_pm3, design.t_bi3};
  auto& r = g.region_radii;
  r[9] = design.r_o;
  for (int i = 7; i >= 0; --i) r[static_cast<std::size_t>(i) + 1] = r[static_cast<std::size_t>(i) + 2] - thick[static_cast<std::size_t>(i)];
  r[0] = design.bore_fraction * r[1];
  r[10] = design.outer_air_factor * design.r_o;
  return g;
}

int outer_pole_pairs(int gear_ratio_int, int p1) {
  MECGEAR_REQUIRE(gear_ratio_int >= 2, "gear ratio integer part must be at least 2");
  MECGEAR_REQUIRE(p1 >= 1, "p1 must be at least 1");
  const long product = static_cast<long>(gear_ratio_int) * p1;
  return (gear_ratio_int - 1) * p1 + (product % 2 != 0 ? 1 : 2);
}

GearDesign couple_sweep_parameters(int gear_ratio_int, int p1, double k_bi1, double t_pm1, double k_pm,
                                   const FixedSweepDimensions& fixed) {
  GearDesign d;
  d.p1 = p1;
  d.p3 = outer_pole_pairs(gear_ratio_int, p1);
  d.r_o = fixed.r_o;
  d.t_pm1 = t_pm1;
  d.t_pm3 = k_pm * t_pm1;
  d.t_ag1 = fixed.t_ag;
  d.t_ag2 = fixed.t_ag;
  d.t_mods = fixed.t_mods;
  d.t_brg = fixed.t_brg;
  d.t_bi3 = fixed.t_bi3;
  d.stack_length = fixed.stack_length;
  d.modulator_fill = fixed.modulator_fill;
  d.steel_id = fixed.steel_id;
  d.pm_id = fixed.pm_id;

  const double r_bi1 = d.r_o - d.t_bi3 - d.t_pm3 - d.t_ag2 - d.t_mods - d.t_brg - d.t_ag1 - d.t_pm1;
  MECGEAR_REQUIRE(r_bi1 > 0.0, "coupled design has no room for the rotor 1 back iron");
  d.t_bi1 = k_bi1 * kPi * r_bi1 / p1;
  if (d.t_bi1 >= r_bi1) {
    std::ostringstream os;
    os << "coupled rotor 1 back iron (" << to_mm(d.t_bi1) << " mm) leaves a negative bore";
    throw InputError(os.str());
  }
  d.validate();
  return d;
}

double magnet_volume(const GearDesign& design) {
  const DerivedGeometry g = derive_geometry(design);
  auto annulus = [&](Region r) {
    const double a = g.inner(r);
    const double b = g.outer(r);
    return kPi * (b * b - a * a);
  };
  return (annulus(Region::kMagnets1) + annulus(Region::kMagnets3)) * design.stack_length;
}

double active_volume(const GearDesign& design) {
  return kPi * design.r_o * design.r_o * design.stack_length;
}

}  // namespace mecgear
