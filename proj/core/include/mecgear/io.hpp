#pragma once

#include <filesystem>
#include <nlohmann/json.hpp>
#include <string>

#include "mecgear/geometry.hpp"
#include "mecgear/mesh.hpp"

namespace mecgear {

/// Design documents use the lower-case parameter symbols, lengths in mm and
/// angles in degrees; everything but the pole pairs and the eight thicknesses
/// plus r_o is optional. Unknown keys are rejected.
GearDesign parse_design(const nlohmann::json& doc);
nlohmann::json design_to_json(const GearDesign& design);
GearDesign load_design(const std::filesystem::path& path);

/// Mesh settings: {"angular_multiplier", "reference_thickness_mm", "regions": {name: {...}}}
/// where each region entry may hold fixed_layers, multiplier and min_layers.
/// Fields not given keep the value of `base`.
MeshConfig parse_mesh_config(const nlohmann::json& doc, const MeshConfig& base = MeshConfig::coarse());
nlohmann::json mesh_config_to_json(const MeshConfig& config);

/// "coarse", "fine" or "custom:<file>".
MeshConfig resolve_mesh_config(const std::string& spec);

nlohmann::json read_json_file(const std::filesystem::path& path);
void write_json_file(const nlohmann::json& doc, const std::filesystem::path& path);

}  // namespace mecgear
