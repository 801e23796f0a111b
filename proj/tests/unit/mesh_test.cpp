#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "mecgear/error.hpp"
#include "mecgear/mesh.hpp"
#include "mecgear/network.hpp"
#include "oracle_values.hpp"
#include "support.hpp"

using namespace mecgear;
using testing_support::base_design;

namespace {

GearDesign small_design() {
  GearDesign d;
  d.p1 = 1;
  d.p3 = 2;
  d.r_o = mm(100.0);
  d.t_bi1 = mm(10.0);
  d.t_pm1 = mm(5.0);
  d.t_ag1 = mm(1.0);
  d.t_brg = mm(1.0);
  d.t_mods = mm(8.0);
  d.t_ag2 = mm(1.0);
  d.t_pm3 = mm(5.0);
  d.t_bi3 = mm(10.0);
  return d;
}

PolarMesh mesh_for(const GearDesign& d, const MeshConfig& c = MeshConfig::coarse()) {
  return build_mesh(d, derive_geometry(d), c);
}

}  // namespace

TEST(Mesh, SmallExampleAngularLayers) {
  MeshConfig c = MeshConfig::coarse();
  c.angular_multiplier = 4;
  const PolarMesh mesh = mesh_for(small_design(), c);
  EXPECT_EQ(mesh.n_al, 12);
  EXPECT_EQ(mesh.loop_count(), 12 * (mesh.n_rl() - 1));
}

TEST(Mesh, AngularCountRoundsUpToSymmetry) {
  EXPECT_EQ(angular_layer_count(7, 3, 2), 22);
  EXPECT_EQ(angular_layer_count(38, 3, 2), 114);
  EXPECT_EQ(angular_layer_count(56, 10, 1), 560);
  EXPECT_THROW(angular_layer_count(0, 3, 1), InputError);
}

TEST(Mesh, RadialLayerRule) {
  EXPECT_EQ(radial_layer_count({3, 0.0, 1}, mm(20.0), mm(10.0)), 3);
  EXPECT_EQ(radial_layer_count({0, 10.0, 3}, mm(9.0), mm(10.0)), 9);
  EXPECT_EQ(radial_layer_count({0, 10.0, 3}, mm(0.5), mm(10.0)), 3);
  EXPECT_EQ(radial_layer_count({0, 20.0, 3}, mm(11.0), mm(10.0)), 22);
  EXPECT_EQ(radial_layer_count({2, 0.0, 1}, 0.0, mm(10.0)), 0);
}

TEST(Mesh, BaseDesign1CoarseCounts) {
  const PolarMesh mesh = mesh_for(base_design(1));
  EXPECT_EQ(mesh.n_al, oracle::kBd1CoarseAngular);
  EXPECT_EQ(static_cast<long>(mesh.cell_count()), oracle::kBd1CoarseCells);
  for (std::size_t i = 0; i < kRegionCount; ++i) {
    EXPECT_EQ(mesh.region_layers(static_cast<Region>(i)).second, oracle::kBd1CoarseLayers[i])
        << region_name(static_cast<Region>(i));
  }
  EXPECT_EQ(mesh.tube_count(), static_cast<std::size_t>(560) * (2 * 45 - 1));
}

TEST(Mesh, CollapsedRegionGetsNoLayers) {
  GearDesign d = base_design(1);
  d.t_brg = 0.0;
  const PolarMesh mesh = mesh_for(d);
  EXPECT_EQ(mesh.region_layers(Region::kBridge).second, 0);
  EXPECT_EQ(static_cast<long>(mesh.cell_count()), oracle::kBd1CoarseCells - 2 * 560);
}

TEST(Mesh, RejectsConfigWithoutLayers) {
  MeshConfig c = MeshConfig::coarse();
  c[Region::kModulators] = {0, 0.0, 0};
  EXPECT_THROW(c.validate(), InputError);
  c[Region::kModulators] = {0, 0.01, 0};  // rounds to zero layers for 11 mm
  EXPECT_THROW(mesh_for(base_design(1), c), InputError);
}

TEST(Mesh, MaterialsByRegion) {
  const PolarMesh mesh = mesh_for(base_design(1));
  for (const auto& c : mesh.cells) {
    switch (c.region) {
      case Region::kBackIron1:
      case Region::kBackIron3:
      case Region::kBridge:
        EXPECT_EQ(c.material, Material::kSteel);
        break;
      case Region::kMagnets1:
      case Region::kMagnets3:
        EXPECT_EQ(c.material, Material::kMagnet);
        EXPECT_NE(c.mmf, 0.0);
        break;
      case Region::kModulators:
        EXPECT_NE(c.material, Material::kMagnet);
        break;
      default:
        EXPECT_EQ(c.material, Material::kAir);
    }
    if (c.material != Material::kMagnet) EXPECT_EQ(c.mmf, 0.0);
  }
}

TEST(Mesh, CellAreasFillTheAnnulus) {
  for (int i = 1; i <= 3; ++i) {
    const GearDesign d = base_design(i);
    const DerivedGeometry g = derive_geometry(d);
    const PolarMesh mesh = mesh_for(d);
    double area = 0.0;
    for (const auto& c : mesh.cells) area += 0.5 * mesh.dtheta * (c.r_out * c.r_out - c.r_in * c.r_in);
    const double expect = kPi * (std::pow(g.region_radii.back(), 2) - std::pow(g.region_radii.front(), 2));
    EXPECT_LT(std::abs(area - expect) / expect, 1e-12);
  }
}

TEST(Mesh, RotorOneHalfPoleShiftFlipsSources) {
  GearDesign d = base_design(1);
  PolarMesh a = mesh_for(d);
  d.theta1 += kPi / d.p1;
  PolarMesh b = mesh_for(d);
  const auto [first, count] = a.region_layers(Region::kMagnets1);
  for (int k = first; k < first + count; ++k) {
    for (int j = 0; j < a.n_al; ++j) EXPECT_EQ(a.cell(k, j).mmf, -b.cell(k, j).mmf);
  }
  // Rotor 3 untouched.
  const auto [f3, c3] = a.region_layers(Region::kMagnets3);
  for (int j = 0; j < a.n_al; ++j) EXPECT_EQ(a.cell(f3, j).mmf, b.cell(f3, j).mmf);
}

TEST(Mesh, MagnetRingsAreBalanced) {
  // Exact balance needs a whole number of cells per pole; otherwise each pole
  // pair can be off by at most one cell.
  for (int i = 1; i <= 3; ++i) {
    const GearDesign d = base_design(i);
    const PolarMesh mesh = mesh_for(d);
    for (Region r : {Region::kMagnets1, Region::kMagnets3}) {
      const int p = r == Region::kMagnets1 ? d.p1 : d.p3;
      const auto [first, count] = mesh.region_layers(r);
      for (int k = first; k < first + count; ++k) {
        double sum = 0.0;
        double mag = 0.0;
        for (int j = 0; j < mesh.n_al; ++j) {
          sum += mesh.cell(k, j).mmf;
          mag += std::abs(mesh.cell(k, j).mmf);
        }
        const double cell_mmf = mag / mesh.n_al;
        if (mesh.n_al % (2 * p) == 0) {
          EXPECT_LT(std::abs(sum), 1e-12 * mag) << "design " << i << " layer " << k;
        } else {
          EXPECT_LE(std::abs(sum), p * cell_mmf * (1.0 + 1e-12)) << "design " << i << " layer " << k;
        }
      }
    }
  }
}

TEST(Mesh, BaseDesign2OuterPoleCount) {
  const PolarMesh mesh = mesh_for(base_design(2));
  const int k = mesh.region_layers(Region::kMagnets3).first;
  int positive_runs = 0;
  for (int j = 0; j < mesh.n_al; ++j) {
    const int prev = mesh.cell(k, (j + mesh.n_al - 1) % mesh.n_al).polarity;
    if (mesh.cell(k, j).polarity > 0 && prev < 0) ++positive_runs;
  }
  EXPECT_EQ(positive_runs, 34);
}

TEST(Mesh, ModulatorFillHalf) {
  const GearDesign d = base_design(1);
  const PolarMesh mesh = mesh_for(d);
  const int k = mesh.region_layers(Region::kModulators).first;
  const int per_pitch = mesh.n_al / d.q2();
  ASSERT_EQ(per_pitch * d.q2(), mesh.n_al);
  for (int p = 0; p < d.q2(); ++p) {
    int steel = 0;
    for (int j = p * per_pitch; j < (p + 1) * per_pitch; ++j) steel += mesh.cell(k, j).material == Material::kSteel;
    EXPECT_EQ(steel, per_pitch / 2) << "pitch " << p;
  }
}

TEST(Mesh, PoleSign) {
  EXPECT_EQ(pole_sign(2, 0.0, 0.1), 1);
  EXPECT_EQ(pole_sign(2, 0.0, kPi / 2 + 0.1), -1);
  EXPECT_EQ(pole_sign(2, 0.0, kPi + 0.1), 1);
  EXPECT_EQ(pole_sign(2, 0.0, -0.1), -1);
  EXPECT_EQ(pole_sign(2, 0.3, 0.35), 1);
}

TEST(Mesh, SectorRotationIsIdentity) {
  for (int i = 1; i <= 3; ++i) {
    GearDesign d = base_design(i);
    const int s = derive_geometry(d).symmetry;
    const PolarMesh a = mesh_for(d);
    EXPECT_NO_THROW(check_periodic(a, s));
    const double turn = 2.0 * kPi / s;
    d.theta1 += turn;
    d.theta2 += turn;
    d.theta3 += turn;
    const PolarMesh b = mesh_for(d);
    const int shift = a.n_al / s;
    for (int k = 0; k < a.n_rl(); ++k) {
      for (int j = 0; j < a.n_al; ++j) {
        const auto& x = a.cell(k, j);
        const auto& y = b.cell(k, (j + shift) % a.n_al);
        ASSERT_EQ(x.material, y.material);
        ASSERT_EQ(x.mmf, y.mmf);
      }
    }
  }
}

TEST(Mesh, CsvDump) {
  testing_support::ScratchDir dir("mesh_csv");
  const PolarMesh mesh = mesh_for(base_design(2));
  write_mesh_csv(mesh, dir / "mesh.csv");
  std::ifstream in(dir / "mesh.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "k,j,r_center_m,theta_center_deg,region,material,mmf_A");
  std::size_t rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, mesh.cell_count());
}
