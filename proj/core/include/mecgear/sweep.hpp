#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <map>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "mecgear/geometry.hpp"
#include "mecgear/mesh.hpp"
#include "mecgear/postproc.hpp"
#include "mecgear/solver.hpp"

namespace mecgear {

inline constexpr int kResultsSchemaVersion = 1;

/// Value lists of the parametric study. Lengths in metres; the JSON form uses mm.
struct SweepSpec {
  std::vector<int> gear_ratios;
  std::map<int, std::vector<int>> p1_values;  // per gear ratio
  std::vector<double> r_o;
  std::vector<double> k_bi1;
  std::vector<double> t_pm1;
  std::vector<double> t_ag;
  std::vector<double> t_mods;
  std::vector<double> t_brg;
  std::vector<double> k_pm;
  std::vector<double> t_bi3;

  std::string mesh = "coarse";  // coarse | fine | custom:<file>
  MeshConfig mesh_config = MeshConfig::coarse();
  SolveOptions solver;
  SlipOptions slip;
  int threads = 1;

  double stack_length = 1.0;
  double modulator_fill = 0.5;
  std::string steel_id = "m250";
  std::string pm_id = "n42";

  // Uniform random subset of the valid designs, drawn with `seed`.
  std::optional<int> subsample;
  std::uint64_t seed = 1;

  void validate() const;
  /// Size of the full Cartesian product, before validity checks and subsampling.
  std::size_t product_size() const;
};

SweepSpec parse_sweep_spec(const nlohmann::json& doc);
nlohmann::json sweep_spec_to_json(const SweepSpec& spec);
SweepSpec load_sweep_spec(const std::filesystem::path& path);

struct SweepPoint {
  long id = 0;  // position in the full product; stable under subsampling
  int gear_ratio = 0;
  double k_bi1 = 0.0;
  double k_pm = 0.0;
  GearDesign design;
};

struct Enumeration {
  std::vector<SweepPoint> points;
  std::vector<std::string> skipped;  // one message per rejected combination
};

/// Deterministic order: gear ratio, P1, r_o, k_BI1, T_PM1, T_AG, T_Mods, T_Brg, k_PM, T_BI3.
Enumeration enumerate(const SweepSpec& spec);

struct DesignResult {
  long id = 0;
  int gear_ratio = 0;
  double k_bi1 = 0.0;
  double k_pm = 0.0;
  GearDesign design;
  double slip_torque = 0.0;  // Nm at the design's stack length
  double slip_angle = 0.0;   // rad
  double vtd = 0.0;          // Nm/m^3
  double pm_vtd = 0.0;       // Nm/m^3
  int iterations = 0;
  double wall_seconds = 0.0;
  bool converged = false;
  bool retried = false;
  std::string failure;
};

/// Slip torque of one point, with one retry (damping on, twice the iterations)
/// after a convergence failure. Never throws for solver failures.
DesignResult evaluate_point(const SweepPoint& point, const SweepSpec& spec);

struct SweepProgress {
  std::size_t done = 0;    // finished in this run
  std::size_t total = 0;   // to do in this run
  double elapsed = 0.0;    // s
  const DesignResult* last = nullptr;
};

struct SweepSummary {
  std::size_t enumerated = 0;
  std::size_t skipped_invalid = 0;
  std::size_t resumed = 0;  // already in the results file
  std::size_t evaluated = 0;
  std::size_t converged = 0;
  std::size_t failed = 0;
  std::size_t retried = 0;
  double total_seconds = 0.0;  // sum of per-design wall time over the results file
  double mean_seconds = 0.0;
  double elapsed_seconds = 0.0;  // this run
  double min_torque = 0.0;
  double max_torque = 0.0;
  double mean_torque = 0.0;
  double max_vtd = 0.0;
  double max_pm_vtd = 0.0;

  nlohmann::json to_json() const;
};

/// Runs the sweep into `out_dir`: results.csv (appended as designs finish,
/// resumable), spec.json (sidecar) and summary.json.
SweepSummary run_sweep(const SweepSpec& spec, const std::filesystem::path& out_dir,
                       const std::function<void(const SweepProgress&)>& progress = {});

std::string results_header();
std::string format_result_row(const DesignResult& r);
std::vector<DesignResult> read_results(const std::filesystem::path& path);

/// Coarse-vs-fine style comparison of two runs over the ids that converged in both.
struct RunComparison {
  std::size_t matched = 0;
  double mean_abs_discrepancy = 0.0;  // fraction, relative to the reference run
  double min_discrepancy = 0.0;
  double max_discrepancy = 0.0;
  double fraction_below = 0.0;  // share of designs where the test run is below the reference
  double mean_seconds_test = 0.0;
  double mean_seconds_reference = 0.0;
  double speedup = 0.0;  // reference time / test time

  nlohmann::json to_json() const;
};

RunComparison compare_runs(const std::vector<DesignResult>& test, const std::vector<DesignResult>& reference);

struct TrendRow {
  int gear_ratio = 0;
  double value = 0.0;  // group value, SI
  std::size_t count = 0;
  double max_vtd = 0.0;
  double max_pm_vtd = 0.0;
};

/// Max VTD and PM VTD per (gear ratio, parameter value) over converged rows.
/// Parameters: gear_ratio, p1, r_o, k_bi1, t_pm1, t_ag, t_mods, t_brg, k_pm, t_bi3.
std::vector<TrendRow> trend_tables(const std::vector<DesignResult>& results, const std::string& group_by);
/// Columns gear_ratio, <group_by> (with _m for lengths), designs, max_vtd_Nm_per_m3, max_pm_vtd_Nm_per_m3.
void write_trend_csv(const std::vector<TrendRow>& rows, const std::string& group_by, std::ostream& out);
void write_trend_csv(const std::vector<TrendRow>& rows, const std::string& group_by,
                     const std::filesystem::path& path);

}  // namespace mecgear
