#include "mecgear/mesh.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "mecgear/error.hpp"

namespace mecgear {

std::string_view material_name(Material m) {
  switch (m) {
    case Material::kAir: return "air";
    case Material::kSteel: return "steel";
    case Material::kMagnet: return "pm";
  }
  return "unknown";
}

void MeshConfig::validate() const {
  MECGEAR_REQUIRE(angular_multiplier >= 1, "angular multiplier must be at least 1");
  MECGEAR_REQUIRE(reference_thickness > 0.0, "reference thickness must be positive");
  for (std::size_t i = 0; i < kRegionCount; ++i) {
    const auto& r = regions[i];
    const std::string name(region_name(static_cast<Region>(i)));
    MECGEAR_REQUIRE(r.fixed_layers >= 0 && r.min_layers >= 0 && r.multiplier >= 0.0,
                    "negative layer setting for region " + name);
    MECGEAR_REQUIRE(r.fixed_layers > 0 || r.min_layers >= 1 || r.multiplier > 0.0,
                    "region " + name + " would get zero radial layers");
  }
}

namespace {

MeshConfig preset(int angular, double multiplier, int min_mods, int min_pm3) {
  MeshConfig c;
  c.angular_multiplier = angular;
  c[Region::kInnerAir] = {2, 0.0, 1};
  c[Region::kBackIron1] = {3, 0.0, 1};
  c[Region::kMagnets1] = {0, multiplier, 3};
  c[Region::kInnerGap] = {0, multiplier, 3};
  c[Region::kBridge] = {2, 0.0, 1};
  c[Region::kModulators] = {0, multiplier, min_mods};
  c[Region::kOuterGap] = {0, multiplier, 3};
  c[Region::kMagnets3] = {0, multiplier, min_pm3};
  c[Region::kBackIron3] = {3, 0.0, 1};
  c[Region::kOuterAir] = {2, 0.0, 1};
  return c;
}

}  // namespace

MeshConfig MeshConfig::coarse() { return preset(10, 10.0, 3, 3); }
MeshConfig MeshConfig::fine() { return preset(30, 20.0, 5, 5); }

int radial_layer_count(const RegionLayering& rule, double thickness, double reference_thickness) {
  if (thickness <= 0.0) return 0;
  if (rule.fixed_layers > 0) return rule.fixed_layers;
  const int scaled = static_cast<int>(std::lround(rule.multiplier * thickness / reference_thickness));
  return std::max(rule.min_layers, scaled);
}

int angular_layer_count(int q2, int multiplier, int symmetry) {
  MECGEAR_REQUIRE(q2 >= 1 && multiplier >= 1 && symmetry >= 1, "invalid angular layer inputs");
  const int raw = multiplier * q2;
  return (raw + symmetry - 1) / symmetry * symmetry;
}

std::size_t PolarMesh::tube_count() const noexcept {
  return static_cast<std::size_t>(n_al) * static_cast<std::size_t>(2 * n_rl() - 1);
}

std::pair<int, int> PolarMesh::region_layers(Region r) const {
  int first = -1;
  int count = 0;
  for (int k = 0; k < n_rl(); ++k) {
    if (layers[static_cast<std::size_t>(k)].region == r) {
      if (first < 0) first = k;
      ++count;
    }
  }
  return {first, count};
}

PolarMesh PolarMesh::from_layers(std::span<const double> radii, std::span<const Region> regions, int n_al,
                                 double stack_length, int symmetry) {
  MECGEAR_REQUIRE(radii.size() == regions.size() + 1, "need one more radius than layers");
  MECGEAR_REQUIRE(regions.size() >= 2, "mesh needs at least two radial layers");
  MECGEAR_REQUIRE(n_al >= 1 && symmetry >= 1 && n_al % symmetry == 0, "angular layers must be a multiple of symmetry");
  MECGEAR_REQUIRE(radii.front() > 0.0, "innermost radius must be positive");

  PolarMesh mesh;
  mesh.n_al = n_al;
  mesh.dtheta = 2.0 * kPi / n_al;
  mesh.stack_length = stack_length;
  mesh.symmetry = symmetry;
  mesh.layers.reserve(regions.size());
  for (std::size_t k = 0; k < regions.size(); ++k) {
    MECGEAR_REQUIRE(radii[k + 1] > radii[k], "degenerate radial layer");
    mesh.layers.push_back({radii[k], radii[k + 1], std::sqrt(radii[k] * radii[k + 1]), regions[k]});
  }

  mesh.cells.resize(regions.size() * static_cast<std::size_t>(n_al));
  for (int k = 0; k < mesh.n_rl(); ++k) {
    const auto& layer = mesh.layers[static_cast<std::size_t>(k)];
    Material m = Material::kAir;
    if (is_steel_region(layer.region)) m = Material::kSteel;
    if (layer.region == Region::kMagnets1 || layer.region == Region::kMagnets3) m = Material::kMagnet;
    for (int j = 0; j < n_al; ++j) {
      auto& c = mesh.cell(k, j);
      c.r_in = layer.r_in;
      c.r_out = layer.r_out;
      c.theta_c = (j + 0.5) * mesh.dtheta;
      c.region = layer.region;
      c.material = m;
    }
  }
  return mesh;
}

PolarMesh build_mesh(const GearDesign& design, const DerivedGeometry& derived, const MeshConfig& config,
                     const PermanentMagnet& magnet) {
  config.validate();
  std::vector<double> radii{derived.region_radii.front()};
  std::vector<Region> regions;
  for (std::size_t i = 0; i < kRegionCount; ++i) {
    const auto region = static_cast<Region>(i);
    const double t = derived.thickness(region);
    const int n = radial_layer_count(config.regions[i], t, config.reference_thickness);
    if (t > 0.0 && n == 0) {
      throw InputError("mesh config gives region " + std::string(region_name(region)) + " no radial layers");
    }
    for (int l = 0; l < n; ++l) {
      // Last boundary is taken verbatim so region radii are reproduced exactly.
      radii.push_back(l + 1 == n ? derived.outer(region) : derived.inner(region) + t * (l + 1) / n);
      regions.push_back(region);
    }
  }
  const int n_al = angular_layer_count(derived.q2, config.angular_multiplier, derived.symmetry);
  PolarMesh mesh = PolarMesh::from_layers(radii, regions, n_al, design.stack_length, derived.symmetry);
  assign_sources(mesh, design, magnet);
  return mesh;
}

namespace {

// Wrap to [-0.5, 0.5).
double centered_fraction(double x) { return x - std::floor(x + 0.5); }

}  // namespace

int pole_sign(int pole_pairs, double rotor_angle, double theta) {
  // Centres that land on a pole edge go to the upper pole; the slack keeps that
  // decision identical in every symmetry sector.
  constexpr double kTie = 1e-9;
  const double pole = std::floor(pole_pairs * (theta - rotor_angle) / kPi + kTie);
  return pole - 2.0 * std::floor(0.5 * pole) == 0.0 ? 1 : -1;
}

void assign_sources(PolarMesh& mesh, const GearDesign& design, const PermanentMagnet& magnet) {
  magnet.validate();
  const int q2 = design.q2();
  for (auto& c : mesh.cells) {
    c.polarity = 0;
    c.mmf = 0.0;
    switch (c.region) {
      case Region::kMagnets1:
      case Region::kMagnets3: {
        const bool inner = c.region == Region::kMagnets1;
        const int p = inner ? design.p1 : design.p3;
        const double angle = inner ? design.theta1 : design.theta3;
        c.material = Material::kMagnet;
        c.polarity = pole_sign(p, angle, c.theta_c);
        c.mmf = pm_mmf(magnet, c.r_out - c.r_in, c.polarity);
        break;
      }
      case Region::kModulators: {
        // Steel occupies the centred fraction of each pitch around theta2 + m * 2 pi / q2;
        // ties at the edges fall on the lower side, with slack so that rounding
        // cannot break the periodicity.
        constexpr double kTie = 1e-9;
        const double x = centered_fraction(q2 * (c.theta_c - design.theta2) / (2.0 * kPi) + kTie);
        const double h = 0.5 * design.modulator_fill;
        c.material = (x >= -h && x < h) ? Material::kSteel : Material::kAir;
        break;
      }
      default:
        break;
    }
  }
}

void write_mesh_csv(const PolarMesh& mesh, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << "k,j,r_center_m,theta_center_deg,region,material,mmf_A\n";
  out.precision(12);
  for (int k = 0; k < mesh.n_rl(); ++k) {
    for (int j = 0; j < mesh.n_al; ++j) {
      const auto& c = mesh.cell(k, j);
      out << k << ',' << j << ',' << mesh.layers[static_cast<std::size_t>(k)].r_c << ',' << to_deg(c.theta_c) << ','
          << region_name(c.region) << ',' << material_name(c.material) << ',' << c.mmf << '\n';
    }
  }
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace mecgear
