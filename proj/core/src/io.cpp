#include "mecgear/io.hpp"

#include <fstream>
#include <set>

#include "mecgear/error.hpp"
#include "mecgear/units.hpp"

namespace mecgear {

namespace {

using nlohmann::json;

[[noreturn]] void field_error(const std::string& field, const std::string& what) {
  throw InputError("field '" + field + "': " + what);
}

double number(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_number()) field_error(key, "expected a number, got " + std::string(v.type_name()));
  return v.get<double>();
}

int integer(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_number_integer()) field_error(key, "expected an integer, got " + v.dump());
  return v.get<int>();
}

std::string text(const json& doc, const std::string& key) {
  const json& v = doc.at(key);
  if (!v.is_string()) field_error(key, "expected a string");
  return v.get<std::string>();
}

void reject_unknown(const json& doc, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) field_error(key, "unknown key in " + where);
  }
}

constexpr const char* kThicknessKeys[] = {"t_bi1", "t_pm1", "t_ag1", "t_mods", "t_brg", "t_ag2", "t_pm3", "t_bi3"};

template <typename Design>
auto* thickness_field(Design& d, std::string_view key) {
  if (key == "t_bi1") return &d.t_bi1;
  if (key == "t_pm1") return &d.t_pm1;
  if (key == "t_ag1") return &d.t_ag1;
  if (key == "t_mods") return &d.t_mods;
  if (key == "t_brg") return &d.t_brg;
  if (key == "t_ag2") return &d.t_ag2;
  if (key == "t_pm3") return &d.t_pm3;
  return &d.t_bi3;
}

}  // namespace

GearDesign parse_design(const json& doc) {
  if (!doc.is_object()) throw InputError("design document must be a JSON object");
  std::set<std::string> known{"name",        "p1",     "p3",        "r_o",      "stack_length",     "theta1",
                              "theta2",      "theta3", "modulator_fill", "bore_fraction", "outer_air_factor",
                              "steel_id",    "pm_id"};
  for (const char* k : kThicknessKeys) known.insert(k);
  reject_unknown(doc, known, "design");

  GearDesign d;
  for (const char* k : {"p1", "p3", "r_o"}) {
    if (!doc.contains(k)) field_error(k, "missing");
  }
  d.p1 = integer(doc, "p1");
  d.p3 = integer(doc, "p3");
  d.r_o = mm(number(doc, "r_o"));
  for (const char* k : kThicknessKeys) {
    if (!doc.contains(k)) field_error(k, "missing");
    *thickness_field(d, k) = mm(number(doc, k));
  }
  if (doc.contains("stack_length")) d.stack_length = mm(number(doc, "stack_length"));
  if (doc.contains("theta1")) d.theta1 = deg(number(doc, "theta1"));
  if (doc.contains("theta2")) d.theta2 = deg(number(doc, "theta2"));
  if (doc.contains("theta3")) d.theta3 = deg(number(doc, "theta3"));
  if (doc.contains("modulator_fill")) d.modulator_fill = number(doc, "modulator_fill");
  if (doc.contains("bore_fraction")) d.bore_fraction = number(doc, "bore_fraction");
  if (doc.contains("outer_air_factor")) d.outer_air_factor = number(doc, "outer_air_factor");
  if (doc.contains("steel_id")) d.steel_id = text(doc, "steel_id");
  if (doc.contains("pm_id")) d.pm_id = text(doc, "pm_id");
  d.validate();
  return d;
}

json design_to_json(const GearDesign& d) {
  json j;
  j["p1"] = d.p1;
  j["p3"] = d.p3;
  j["r_o"] = to_mm_text(d.r_o);
  for (const char* k : kThicknessKeys) j[k] = to_mm_text(*thickness_field(d, k));
  j["stack_length"] = to_mm_text(d.stack_length);
  j["theta1"] = to_deg_text(d.theta1);
  j["theta2"] = to_deg_text(d.theta2);
  j["theta3"] = to_deg_text(d.theta3);
  j["modulator_fill"] = d.modulator_fill;
  j["bore_fraction"] = d.bore_fraction;
  j["outer_air_factor"] = d.outer_air_factor;
  j["steel_id"] = d.steel_id;
  j["pm_id"] = d.pm_id;
  return j;
}

GearDesign load_design(const std::filesystem::path& path) {
  const json doc = read_json_file(path);
  try {
    return parse_design(doc);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

MeshConfig parse_mesh_config(const json& doc, const MeshConfig& base) {
  if (!doc.is_object()) throw InputError("mesh config must be a JSON object");
  reject_unknown(doc, {"name", "angular_multiplier", "reference_thickness_mm", "regions"}, "mesh config");
  MeshConfig c = base;
  if (doc.contains("angular_multiplier")) c.angular_multiplier = integer(doc, "angular_multiplier");
  if (doc.contains("reference_thickness_mm")) c.reference_thickness = mm(number(doc, "reference_thickness_mm"));
  if (doc.contains("regions")) {
    const json& regions = doc.at("regions");
    if (!regions.is_object()) field_error("regions", "expected an object keyed by region name");
    for (const auto& [name, entry] : regions.items()) {
      bool found = false;
      for (std::size_t i = 0; i < kRegionCount; ++i) {
        const auto r = static_cast<Region>(i);
        if (region_name(r) != name) continue;
        found = true;
        if (!entry.is_object()) field_error("regions." + name, "expected an object");
        reject_unknown(entry, {"fixed_layers", "multiplier", "min_layers"}, "regions." + name);
        auto& rule = c[r];
        if (entry.contains("fixed_layers")) rule.fixed_layers = integer(entry, "fixed_layers");
        if (entry.contains("multiplier")) rule.multiplier = number(entry, "multiplier");
        if (entry.contains("min_layers")) rule.min_layers = integer(entry, "min_layers");
      }
      if (!found) field_error("regions." + name, "unknown region");
    }
  }
  c.validate();
  return c;
}

json mesh_config_to_json(const MeshConfig& c) {
  json j;
  j["angular_multiplier"] = c.angular_multiplier;
  j["reference_thickness_mm"] = to_mm_text(c.reference_thickness);
  json regions = json::object();
  for (std::size_t i = 0; i < kRegionCount; ++i) {
    const auto r = static_cast<Region>(i);
    regions[std::string(region_name(r))] = {{"fixed_layers", c[r].fixed_layers},
                              {"multiplier", c[r].multiplier},
                              {"min_layers", c[r].min_layers}};
  }
  j["regions"] = regions;
  return j;
}

MeshConfig resolve_mesh_config(const std::string& spec) {
  if (spec == "coarse") return MeshConfig::coarse();
  if (spec == "fine") return MeshConfig::fine();
  const std::string prefix = "custom:";
  if (spec.rfind(prefix, 0) == 0) {
    const std::filesystem::path path = spec.substr(prefix.size());
    try {
      return parse_mesh_config(read_json_file(path));
    } catch (const InputError& e) {
      throw InputError(path.string() + ": " + e.what());
    }
  }
  throw InputError("unknown mesh preset '" + spec + "' (expected coarse, fine or custom:<file>)");
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

void write_json_file(const json& doc, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace mecgear
