#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <memory>
#include <string>

#include "mecgear/geometry.hpp"
#include "mecgear/io.hpp"
#include "mecgear/materials.hpp"
#include "mecgear/mesh.hpp"

namespace testing_support {

inline std::filesystem::path data_path(const std::string& rel) { return std::filesystem::path(MECGEAR_DATA_DIR) / rel; }

inline mecgear::GearDesign base_design(int i) {
  return mecgear::load_design(data_path("designs/base_design_" + std::to_string(i) + ".json"));
}

// Fresh directory under the build tree, removed on destruction.
class ScratchDir {
 public:
  explicit ScratchDir(const std::string& name) : path_(std::filesystem::path(MECGEAR_SCRATCH_DIR) / name) {
    std::filesystem::remove_all(path_);
    std::filesystem::create_directories(path_);
  }
  ~ScratchDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  ScratchDir(const ScratchDir&) = delete;
  ScratchDir& operator=(const ScratchDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::filesystem::path operator/(const std::string& rel) const { return path_ / rel; }

 private:
  std::filesystem::path path_;
};

// Three layers by four columns: linear steel (mu_r 1000) with cell (0, 3) left
// as air, magnets polarised + + - -, then air. Matches the oracle hand network.
inline mecgear::PolarMesh hand_mesh() {
  using namespace mecgear;
  const double radii[] = {0.040, 0.050, 0.056, 0.070};
  const Region regions[] = {Region::kBackIron1, Region::kMagnets1, Region::kInnerGap};
  PolarMesh mesh = PolarMesh::from_layers(radii, regions, 4, 0.1);
  mesh.cell(0, 3).material = Material::kAir;
  const int polarity[] = {1, 1, -1, -1};
  for (int j = 0; j < 4; ++j) {
    auto& c = mesh.cell(1, j);
    c.polarity = polarity[j];
    c.mmf = pm_mmf(n42_magnet(), c.r_out - c.r_in, polarity[j]);
  }
  return mesh;
}

inline mecgear::MaterialSet hand_materials() {
  return {std::make_shared<mecgear::LinearBh>(1000.0), mecgear::n42_magnet()};
}

inline double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

}  // namespace testing_support
