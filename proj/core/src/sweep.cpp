#include "mecgear/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <mutex>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "mecgear/error.hpp"
#include "mecgear/io.hpp"
#include "mecgear/units.hpp"

namespace mecgear {

namespace {

using nlohmann::json;
using Clock = std::chrono::steady_clock;

// Keys ending in _mm are converted to metres.
std::vector<double> number_list(const json& doc, const std::string& key) {
  if (!doc.contains(key)) throw InputError("sweep spec: missing '" + key + "'");
  const json& v = doc.at(key);
  if (!v.is_array()) throw InputError("sweep spec: '" + key + "' must be a list");
  std::vector<double> out;
  for (const auto& x : v) {
    if (!x.is_number()) throw InputError("sweep spec: '" + key + "' holds a non-number");
    out.push_back(key.size() > 3 && key.compare(key.size() - 3, 3, "_mm") == 0 ? mm(x.get<double>())
                                                                               : x.get<double>());
  }
  return out;
}

std::vector<int> int_list(const json& v, const std::string& where) {
  std::vector<int> out;
  if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number_integer()) throw InputError("sweep spec: '" + where + "' holds a non-integer");
      out.push_back(x.get<int>());
    }
  } else if (v.is_object() && v.contains("min") && v.contains("max")) {
    const int step = v.value("step", 1);
    if (step < 1) throw InputError("sweep spec: '" + where + "' step must be positive");
    for (int x = v.at("min").get<int>(); x <= v.at("max").get<int>(); x += step) out.push_back(x);
  } else {
    throw InputError("sweep spec: '" + where + "' must be a list or {min, max[, step]}");
  }
  return out;
}

json mm_json(const std::vector<double>& v) {
  json out = json::array();
  for (double x : v) out.push_back(to_mm_text(x));
  return out;
}

std::string clean_field(std::string s) {
  for (char& c : s) {
    if (c == ',' || c == '\n' || c == '\r') c = ';';
  }
  return s;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream is(line);
  while (std::getline(is, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

// Truncates a results file after its last complete line, so an interrupted
// write does not corrupt the next append.
void drop_partial_line(const std::filesystem::path& path) {
  if (!std::filesystem::exists(path)) return;
  std::string content;
  {
    std::ifstream in(path, std::ios::binary);
    content.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
  }
  if (content.empty() || content.back() == '\n') return;
  const auto cut = content.find_last_of('\n');
  std::filesystem::resize_file(path, cut == std::string::npos ? 0 : cut + 1);
}

double group_value(const DesignResult& r, const std::string& key) {
  const GearDesign& d = r.design;
  if (key == "gear_ratio") return r.gear_ratio;
  if (key == "p1") return d.p1;
  if (key == "r_o") return d.r_o;
  if (key == "k_bi1") return r.k_bi1;
  if (key == "t_pm1") return d.t_pm1;
  if (key == "t_ag") return d.t_ag1;
  if (key == "t_mods") return d.t_mods;
  if (key == "t_brg") return d.t_brg;
  if (key == "k_pm") return r.k_pm;
  if (key == "t_bi3") return d.t_bi3;
  throw InputError("unknown trend parameter '" + key + "'");
}

}  // namespace

void SweepSpec::validate() const {
  MECGEAR_REQUIRE(!gear_ratios.empty(), "sweep spec has no gear ratios");
  for (int g : gear_ratios) {
    MECGEAR_REQUIRE(g >= 2, "gear ratio must be at least 2");
    const auto it = p1_values.find(g);
    MECGEAR_REQUIRE(it != p1_values.end() && !it->second.empty(),
                    "no P1 values for gear ratio " + std::to_string(g));
  }
  for (const auto* list : {&r_o, &k_bi1, &t_pm1, &t_ag, &t_mods, &t_brg, &k_pm, &t_bi3}) {
    MECGEAR_REQUIRE(!list->empty(), "sweep spec has an empty value list");
  }
  MECGEAR_REQUIRE(threads >= 1, "threads must be at least 1");
  MECGEAR_REQUIRE(!subsample || *subsample >= 1, "subsample must be positive");
  MECGEAR_REQUIRE(stack_length > 0.0, "stack length must be positive");
  mesh_config.validate();
  solver.validate();
}

std::size_t SweepSpec::product_size() const {
  std::size_t p1_count = 0;
  for (int g : gear_ratios) {
    const auto it = p1_values.find(g);
    if (it != p1_values.end()) p1_count += it->second.size();
  }
  return p1_count * r_o.size() * k_bi1.size() * t_pm1.size() * t_ag.size() * t_mods.size() * t_brg.size() *
         k_pm.size() * t_bi3.size();
}

namespace {

SweepSpec parse_sweep_spec_fields(const json& doc) {
  if (!doc.is_object()) throw InputError("sweep spec must be a JSON object");
  static const std::set<std::string> known{
      "name",      "gear_ratios", "p1",      "r_o_mm",     "k_bi1",   "t_pm1_mm",        "t_ag_mm",
      "t_mods_mm", "t_brg_mm",    "k_pm",    "t_bi3_mm",   "mesh",    "solver",          "slip",
      "threads",   "subsample",   "seed",    "stack_length_mm", "modulator_fill", "steel_id", "pm_id"};
  for (const auto& [key, value] : doc.items()) {
    if (!known.count(key)) throw InputError("sweep spec: unknown key '" + key + "'");
  }
  SweepSpec s;
  if (!doc.contains("gear_ratios")) throw InputError("sweep spec: missing 'gear_ratios'");
  s.gear_ratios = int_list(doc.at("gear_ratios"), "gear_ratios");
  if (!doc.contains("p1") || !doc.at("p1").is_object()) {
    throw InputError("sweep spec: 'p1' must map each gear ratio to its P1 values");
  }
  for (const auto& [key, value] : doc.at("p1").items()) {
    int g = 0;
    try {
      g = std::stoi(key);
    } catch (const std::exception&) {
      throw InputError("sweep spec: 'p1' key '" + key + "' is not a gear ratio");
    }
    s.p1_values[g] = int_list(value, "p1." + key);
  }
  s.r_o = number_list(doc, "r_o_mm");
  s.k_bi1 = number_list(doc, "k_bi1");
  s.t_pm1 = number_list(doc, "t_pm1_mm");
  s.t_ag = number_list(doc, "t_ag_mm");
  s.t_mods = number_list(doc, "t_mods_mm");
  s.t_brg = number_list(doc, "t_brg_mm");
  s.k_pm = number_list(doc, "k_pm");
  s.t_bi3 = number_list(doc, "t_bi3_mm");

  s.mesh = doc.value("mesh", std::string("coarse"));
  s.mesh_config = resolve_mesh_config(s.mesh);
  s.threads = doc.value("threads", 1);
  if (doc.contains("subsample") && !doc.at("subsample").is_null()) s.subsample = doc.at("subsample").get<int>();
  s.seed = doc.value("seed", std::uint64_t{1});
  s.stack_length = mm(doc.value("stack_length_mm", 1000.0));
  s.modulator_fill = doc.value("modulator_fill", 0.5);
  s.steel_id = doc.value("steel_id", std::string("m250"));
  s.pm_id = doc.value("pm_id", std::string("n42"));
  if (doc.contains("solver")) {
    const json& o = doc.at("solver");
    s.solver.torque_tol = o.value("torque_tol", s.solver.torque_tol);
    s.solver.max_iters = o.value("max_iters", s.solver.max_iters);
    s.solver.init_mu_r = o.value("init_mu_r", s.solver.init_mu_r);
    s.solver.damping = o.value("damping", s.solver.damping);
    s.solver.max_halvings = o.value("max_halvings", s.solver.max_halvings);
    s.solver.residual_floor = o.value("residual_floor", s.solver.residual_floor);
  }
  if (doc.contains("slip")) {
    const json& o = doc.at("slip");
    s.slip.samples = o.value("samples", s.slip.samples);
    s.slip.refine = o.value("refine", s.slip.refine);
  }
  s.validate();
  return s;
}

}  // namespace

SweepSpec parse_sweep_spec(const json& doc) {
  try {
    return parse_sweep_spec_fields(doc);
  } catch (const json::exception& e) {
    throw InputError(std::string("sweep spec: ") + e.what());
  }
}

json sweep_spec_to_json(const SweepSpec& s) {
  json j;
  j["gear_ratios"] = s.gear_ratios;
  json p1 = json::object();
  for (const auto& [g, values] : s.p1_values) p1[std::to_string(g)] = values;
  j["p1"] = p1;
  j["r_o_mm"] = mm_json(s.r_o);
  j["k_bi1"] = s.k_bi1;
  j["t_pm1_mm"] = mm_json(s.t_pm1);
  j["t_ag_mm"] = mm_json(s.t_ag);
  j["t_mods_mm"] = mm_json(s.t_mods);
  j["t_brg_mm"] = mm_json(s.t_brg);
  j["k_pm"] = s.k_pm;
  j["t_bi3_mm"] = mm_json(s.t_bi3);
  j["mesh"] = s.mesh;
  j["solver"] = {{"torque_tol", s.solver.torque_tol},     {"max_iters", s.solver.max_iters},
                 {"init_mu_r", s.solver.init_mu_r},       {"damping", s.solver.damping},
                 {"max_halvings", s.solver.max_halvings}, {"residual_floor", s.solver.residual_floor}};
  j["slip"] = {{"samples", s.slip.samples}, {"refine", s.slip.refine}};
  j["threads"] = s.threads;
  j["subsample"] = s.subsample ? json(*s.subsample) : json(nullptr);
  j["seed"] = s.seed;
  j["stack_length_mm"] = to_mm_text(s.stack_length);
  j["modulator_fill"] = s.modulator_fill;
  j["steel_id"] = s.steel_id;
  j["pm_id"] = s.pm_id;
  return j;
}

SweepSpec load_sweep_spec(const std::filesystem::path& path) {
  json doc = read_json_file(path);
  // Custom mesh files are relative to the spec.
  if (doc.is_object() && doc.contains("mesh") && doc.at("mesh").is_string()) {
    const std::string m = doc.at("mesh").get<std::string>();
    const std::string prefix = "custom:";
    if (m.rfind(prefix, 0) == 0) {
      std::filesystem::path p = m.substr(prefix.size());
      if (p.is_relative()) doc["mesh"] = prefix + (path.parent_path() / p).string();
    }
  }
  try {
    return parse_sweep_spec(doc);
  } catch (const InputError& e) {
    throw InputError(path.string() + ": " + e.what());
  }
}

Enumeration enumerate(const SweepSpec& spec) {
  spec.validate();
  Enumeration out;
  FixedSweepDimensions fixed;
  fixed.stack_length = spec.stack_length;
  fixed.modulator_fill = spec.modulator_fill;
  fixed.steel_id = spec.steel_id;
  fixed.pm_id = spec.pm_id;
  long id = 0;
  for (int g : spec.gear_ratios) {
    for (int p1 : spec.p1_values.at(g)) {
      for (double r_o : spec.r_o) {
        for (double k_bi1 : spec.k_bi1) {
          for (double t_pm1 : spec.t_pm1) {
            for (double t_ag : spec.t_ag) {
              for (double t_mods : spec.t_mods) {
                for (double t_brg : spec.t_brg) {
                  for (double k_pm : spec.k_pm) {
                    for (double t_bi3 : spec.t_bi3) {
                      fixed.r_o = r_o;
                      fixed.t_ag = t_ag;
                      fixed.t_mods = t_mods;
                      fixed.t_brg = t_brg;
                      fixed.t_bi3 = t_bi3;
                      try {
                        SweepPoint p;
                        p.id = id;
                        p.gear_ratio = g;
                        p.k_bi1 = k_bi1;
                        p.k_pm = k_pm;
                        p.design = couple_sweep_parameters(g, p1, k_bi1, t_pm1, k_pm, fixed);
                        out.points.push_back(std::move(p));
                      } catch (const InputError& e) {
                        out.skipped.push_back("design " + std::to_string(id) + ": " + e.what());
                      }
                      ++id;
                    }
                  }
                }
              }
            }
          }
        }
      }
    }
  }
  if (out.points.empty()) throw InputError("sweep spec yields no valid designs");
  if (spec.subsample && static_cast<std::size_t>(*spec.subsample) < out.points.size()) {
    std::vector<std::size_t> order(out.points.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(spec.seed);
    // Partial Fisher-Yates with an explicit draw, independent of the library's shuffle.
    const auto n = static_cast<std::size_t>(*spec.subsample);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t j = i + static_cast<std::size_t>(rng() % (order.size() - i));
      std::swap(order[i], order[j]);
    }
    order.resize(n);
    std::sort(order.begin(), order.end());
    std::vector<SweepPoint> picked;
    picked.reserve(n);
    for (std::size_t i : order) picked.push_back(std::move(out.points[i]));
    out.points = std::move(picked);
  }
  return out;
}

DesignResult evaluate_point(const SweepPoint& point, const SweepSpec& spec) {
  DesignResult r;
  r.id = point.id;
  r.gear_ratio = point.gear_ratio;
  r.k_bi1 = point.k_bi1;
  r.k_pm = point.k_pm;
  r.design = point.design;
  const auto t0 = Clock::now();
  SlipOptions slip = spec.slip;
  slip.threads = 1;
  auto attempt = [&](const SolveOptions& options) {
    const MaterialSet materials = MaterialSet::lookup(point.design.steel_id, point.design.pm_id);
    const SlipResult s = slip_torque(point.design, spec.mesh_config, materials, options, slip);
    r.slip_torque = s.slip_torque;
    r.slip_angle = s.angle;
    r.iterations = s.iterations;
    r.converged = true;
  };
  try {
    try {
      attempt(spec.solver);
    } catch (const ConvergenceError&) {
      r.retried = true;
      SolveOptions again = spec.solver;
      again.damping = true;
      again.max_iters *= 2;
      attempt(again);
    }
  } catch (const std::exception& e) {
    r.converged = false;
    r.failure = e.what();
  }
  r.wall_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  if (r.converged) {
    r.vtd = r.slip_torque / active_volume(r.design);
    r.pm_vtd = r.slip_torque / magnet_volume(r.design);
  }
  return r;
}

std::string results_header() {
  return "id,gear_ratio,p1,p3,r_o_m,k_bi1,t_bi1_m,t_pm1_m,t_ag_m,t_mods_m,t_brg_m,k_pm,t_pm3_m,t_bi3_m,"
         "stack_length_m,slip_torque_Nm,slip_angle_deg,vtd_Nm_per_m3,pm_vtd_Nm_per_m3,iterations,wall_s,"
         "converged,retried,failure";
}

std::string format_result_row(const DesignResult& r) {
  const GearDesign& d = r.design;
  std::ostringstream os;
  os.precision(12);
  os << r.id << ',' << r.gear_ratio << ',' << d.p1 << ',' << d.p3 << ',' << d.r_o << ',' << r.k_bi1 << ','
     << d.t_bi1 << ',' << d.t_pm1 << ',' << d.t_ag1 << ',' << d.t_mods << ',' << d.t_brg << ',' << r.k_pm << ','
     << d.t_pm3 << ',' << d.t_bi3 << ',' << d.stack_length << ',' << r.slip_torque << ',' << to_deg(r.slip_angle)
     << ',' << r.vtd << ',' << r.pm_vtd << ',' << r.iterations << ',' << r.wall_seconds << ','
     << (r.converged ? 1 : 0) << ',' << (r.retried ? 1 : 0) << ',' << clean_field(r.failure);
  return os.str();
}

std::vector<DesignResult> read_results(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != results_header()) {
    throw InputError(path.string() + ": not a results file of schema version " +
                     std::to_string(kResultsSchemaVersion));
  }
  std::vector<DesignResult> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const auto f = split_csv(line);
    if (f.size() != 24) continue;  // interrupted write
    try {
      DesignResult r;
      GearDesign& d = r.design;
      r.id = std::stol(f[0]);
      r.gear_ratio = std::stoi(f[1]);
      d.p1 = std::stoi(f[2]);
      d.p3 = std::stoi(f[3]);
      d.r_o = std::stod(f[4]);
      r.k_bi1 = std::stod(f[5]);
      d.t_bi1 = std::stod(f[6]);
      d.t_pm1 = std::stod(f[7]);
      d.t_ag1 = d.t_ag2 = std::stod(f[8]);
      d.t_mods = std::stod(f[9]);
      d.t_brg = std::stod(f[10]);
      r.k_pm = std::stod(f[11]);
      d.t_pm3 = std::stod(f[12]);
      d.t_bi3 = std::stod(f[13]);
      d.stack_length = std::stod(f[14]);
      r.slip_torque = std::stod(f[15]);
      r.slip_angle = deg(std::stod(f[16]));
      r.vtd = std::stod(f[17]);
      r.pm_vtd = std::stod(f[18]);
      r.iterations = std::stoi(f[19]);
      r.wall_seconds = std::stod(f[20]);
      r.converged = f[21] == "1";
      r.retried = f[22] == "1";
      r.failure = f[23];
      out.push_back(std::move(r));
    } catch (const std::exception&) {
      continue;
    }
  }
  return out;
}

json SweepSummary::to_json() const {
  return {{"enumerated", enumerated},     {"skipped_invalid", skipped_invalid},
          {"resumed", resumed},           {"evaluated", evaluated},
          {"converged", converged},       {"failed", failed},
          {"retried", retried},           {"total_seconds", total_seconds},
          {"mean_seconds", mean_seconds}, {"elapsed_seconds", elapsed_seconds},
          {"min_torque_Nm", min_torque},  {"max_torque_Nm", max_torque},
          {"mean_torque_Nm", mean_torque}, {"max_vtd_Nm_per_m3", max_vtd},
          {"max_pm_vtd_Nm_per_m3", max_pm_vtd}};
}

SweepSummary run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir,
                       const std::function<void(const SweepProgress&)>& progress) {
  const auto t0 = Clock::now();
  const Enumeration en = enumerate(spec);
  std::error_code ec;
  std::filesystem::create_directories(out_dir, ec);
  if (ec) throw IoError("cannot create " + out_dir.string() + ": " + ec.message());

  // The sidecar pins the design space of a results directory; worker count may change.
  json sidecar = sweep_spec_to_json(spec);
  sidecar.erase("threads");
  sidecar["results_schema"] = kResultsSchemaVersion;
  sidecar["design_count"] = en.points.size();
  const auto sidecar_path = out_dir / "spec.json";
  if (std::filesystem::exists(sidecar_path)) {
    if (read_json_file(sidecar_path) != sidecar) {
      throw InputError(out_dir.string() + " holds results of a different sweep spec");
    }
  } else {
    write_json_file(sidecar, sidecar_path);
  }

  const auto results_path = out_dir / "results.csv";
  std::set<long> done;
  if (std::filesystem::exists(results_path)) {
    drop_partial_line(results_path);
    for (const auto& r : read_results(results_path)) done.insert(r.id);
  } else {
    std::ofstream head(results_path);
    if (!head) throw IoError("cannot write " + results_path.string());
    head << results_header() << '\n';
  }

  std::vector<const SweepPoint*> pending;
  for (const auto& p : en.points) {
    if (!done.count(p.id)) pending.push_back(&p);
  }

  SweepSummary summary;
  summary.enumerated = en.points.size();
  summary.skipped_invalid = en.skipped.size();
  summary.resumed = en.points.size() - pending.size();

  std::ofstream sink(results_path, std::ios::app);
  if (!sink) throw IoError("cannot append to " + results_path.string());
  std::mutex sink_mutex;
  std::atomic<std::size_t> next{0};
  std::size_t finished = 0;
  std::exception_ptr io_failure;

  auto worker = [&] {
    for (std::size_t i = next++; i < pending.size(); i = next++) {
      const DesignResult r = evaluate_point(*pending[i], spec);
      const std::lock_guard<std::mutex> lock(sink_mutex);
      sink << format_result_row(r) << '\n';
      sink.flush();
      if (!sink && !io_failure) {
        io_failure = std::make_exception_ptr(IoError("failed writing " + results_path.string()));
        next = pending.size();
      }
      ++finished;
      if (progress) {
        const double elapsed = std::chrono::duration<double>(Clock::now() - t0).count();
        progress({finished, pending.size(), elapsed, &r});
      }
    }
  };
  const auto workers = static_cast<std::size_t>(std::max(1, spec.threads));
  if (workers == 1 || pending.size() <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, pending.size()); ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  sink.close();
  if (io_failure) std::rethrow_exception(io_failure);
  summary.evaluated = finished;

  std::set<long> wanted;
  for (const auto& p : en.points) wanted.insert(p.id);
  std::set<long> counted;
  double torque_sum = 0.0;
  bool first = true;
  for (const auto& r : read_results(results_path)) {
    if (!wanted.count(r.id) || !counted.insert(r.id).second) continue;
    summary.total_seconds += r.wall_seconds;
    if (r.retried) ++summary.retried;
    if (!r.converged) {
      ++summary.failed;
      continue;
    }
    ++summary.converged;
    torque_sum += r.slip_torque;
    summary.min_torque = first ? r.slip_torque : std::min(summary.min_torque, r.slip_torque);
    summary.max_torque = first ? r.slip_torque : std::max(summary.max_torque, r.slip_torque);
    summary.max_vtd = std::max(summary.max_vtd, r.vtd);
    summary.max_pm_vtd = std::max(summary.max_pm_vtd, r.pm_vtd);
    first = false;
  }
  const std::size_t rows = summary.converged + summary.failed;
  summary.mean_seconds = rows ? summary.total_seconds / static_cast<double>(rows) : 0.0;
  summary.mean_torque = summary.converged ? torque_sum / static_cast<double>(summary.converged) : 0.0;
  summary.elapsed_seconds = std::chrono::duration<double>(Clock::now() - t0).count();
  json summary_doc = summary.to_json();
  summary_doc["skipped_messages"] = en.skipped;
  write_json_file(summary_doc, out_dir / "summary.json");
  return summary;
}

json RunComparison::to_json() const {
  return {{"matched", matched},
          {"mean_abs_discrepancy", mean_abs_discrepancy},
          {"min_discrepancy", min_discrepancy},
          {"max_discrepancy", max_discrepancy},
          {"fraction_below", fraction_below},
          {"mean_seconds_test", mean_seconds_test},
          {"mean_seconds_reference", mean_seconds_reference},
          {"speedup", speedup}};
}

RunComparison compare_runs(const std::vector<DesignResult>& test, const std::vector<DesignResult>& reference) {
  std::map<long, const DesignResult*> ref;
  for (const auto& r : reference) {
    if (r.converged && r.slip_torque > 0.0) ref[r.id] = &r;
  }
  RunComparison c;
  double abs_sum = 0.0;
  std::size_t below = 0;
  double t_test = 0.0;
  double t_ref = 0.0;
  for (const auto& r : test) {
    if (!r.converged) continue;
    const auto it = ref.find(r.id);
    if (it == ref.end()) continue;
    const double d = (r.slip_torque - it->second->slip_torque) / it->second->slip_torque;
    c.min_discrepancy = c.matched == 0 ? d : std::min(c.min_discrepancy, d);
    c.max_discrepancy = c.matched == 0 ? d : std::max(c.max_discrepancy, d);
    abs_sum += std::abs(d);
    if (d < 0.0) ++below;
    t_test += r.wall_seconds;
    t_ref += it->second->wall_seconds;
    ++c.matched;
  }
  if (c.matched > 0) {
    const auto n = static_cast<double>(c.matched);
    c.mean_abs_discrepancy = abs_sum / n;
    c.fraction_below = static_cast<double>(below) / n;
    c.mean_seconds_test = t_test / n;
    c.mean_seconds_reference = t_ref / n;
    c.speedup = t_test > 0.0 ? t_ref / t_test : 0.0;
  }
  return c;
}

std::vector<TrendRow> trend_tables(const std::vector<DesignResult>& results, const std::string& group_by) {
  group_value(DesignResult{}, group_by);  // rejects unknown keys up front
  std::map<std::pair<int, double>, TrendRow> groups;
  for (const auto& r : results) {
    if (!r.converged) continue;
    const double v = group_value(r, group_by);
    auto& row = groups[{r.gear_ratio, v}];
    row.gear_ratio = r.gear_ratio;
    row.value = v;
    ++row.count;
    row.max_vtd = std::max(row.max_vtd, r.vtd);
    row.max_pm_vtd = std::max(row.max_pm_vtd, r.pm_vtd);
  }
  std::vector<TrendRow> out;
  out.reserve(groups.size());
  for (auto& [key, row] : groups) out.push_back(row);
  return out;
}

void write_trend_csv(const std::vector<TrendRow>& rows, const std::string& group_by, std::ostream& out) {
  const bool length = group_by == "r_o" || group_by.rfind("t_", 0) == 0;
  out.precision(12);
  out << "gear_ratio," << group_by << (length ? "_m" : "") << ",designs,max_vtd_Nm_per_m3,max_pm_vtd_Nm_per_m3\n";
  for (const auto& r : rows) {
    out << r.gear_ratio << ',' << r.value << ',' << r.count << ',' << r.max_vtd << ',' << r.max_pm_vtd << '\n';
  }
}

void write_trend_csv(const std::vector<TrendRow>& rows, const std::string& group_by,
                     const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  write_trend_csv(rows, group_by, out);
  if (!out) throw IoError("failed writing " + path.string());
}

}  // namespace mecgear
