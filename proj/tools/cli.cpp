#include "cli.hpp"

#include <CLI11.hpp>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <iomanip>
#include <iostream>
#include <nlohmann/json.hpp>
#include <optional>
#include <string>

#include "mecgear/error.hpp"
#include "mecgear/io.hpp"
#include "mecgear/mesh.hpp"
#include "mecgear/network.hpp"
#include "mecgear/postproc.hpp"
#include "mecgear/solver.hpp"
#include "mecgear/sweep.hpp"
#include "mecgear/units.hpp"

namespace mecgear::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

constexpr int kResultSchema = 1;

struct Options {
  std::string design;
  std::string spec;
  std::string mesh = "coarse";
  std::optional<std::string> sweep_mesh;
  std::string out;
  std::string results;
  std::string reference;
  std::string group_by;
  std::string bh;
  std::optional<double> br;            // T
  std::optional<double> stack_length;  // mm
  std::optional<int> threads;
  std::optional<std::uint64_t> seed;
  int angles = 9;
  int refine = 3;
  double tol = 1e-3;
  int max_iters = 50;
  bool frozen_linear = false;
  bool no_damping = false;
  bool no_symmetry = false;
  bool verbose = false;
  bool quiet = false;
};

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());
}

GearDesign read_design(const Options& o) {
  GearDesign d = load_design(o.design);
  if (o.stack_length) {
    d.stack_length = mm(*o.stack_length);
    d.validate();
  }
  return d;
}

MaterialSet read_materials(const GearDesign& d, const Options& o) {
  MaterialSet m = MaterialSet::lookup(d.steel_id, d.pm_id);
  if (!o.bh.empty()) m.steel = std::make_shared<BhCurve>(BhCurve::from_file(o.bh));
  if (o.br) {
    m.magnet.b_r = *o.br;
    m.magnet.validate();
  }
  return m;
}

SolveOptions solve_options(const Options& o) {
  SolveOptions s;
  s.torque_tol = o.tol;
  s.max_iters = o.max_iters;
  s.frozen_linear = o.frozen_linear;
  s.damping = !o.no_damping;
  s.use_symmetry = !o.no_symmetry;
  s.validate();
  return s;
}

SlipOptions slip_options(const Options& o) {
  SlipOptions s;
  s.samples = o.angles;
  s.refine = o.refine;
  s.threads = o.threads.value_or(1);
  return s;
}

json mesh_json(const std::string& preset, const PolarMesh& mesh) {
  return {{"preset", preset},
          {"radial_layers", mesh.n_rl()},
          {"angular_layers", mesh.n_al},
          {"cells", mesh.cell_count()},
          {"tubes", mesh.tube_count()},
          {"loops", mesh.loop_count()},
          {"symmetry", mesh.symmetry}};
}

json slip_json(const SlipResult& s, double stack_length) {
  json samples = json::array();
  for (const auto& x : s.samples) {
    samples.push_back({{"theta1_deg", to_deg(x.theta1)}, {"torque_rotor3_Nm", x.torque_rotor3}, {"iterations", x.iterations}});
  }
  return {{"torque_Nm", s.slip_torque},
          {"torque_kNm_per_m", s.slip_torque / stack_length * 1e-3},
          {"theta1_deg", to_deg(s.angle)},
          {"iterations", s.iterations},
          {"wall_s", s.seconds},
          {"samples", samples}};
}

void print_trace(const SolveTrace& trace, std::ostream& os) {
  os << "  iter  torque_Nm        rms_residual   halvings\n";
  os << "  init  " << std::setw(15) << trace.initial_torque << "  " << std::setw(13) << trace.initial_rms << '\n';
  for (const auto& r : trace.records) {
    os << "  " << std::setw(4) << r.iter << "  " << std::setw(15) << r.torque << "  " << std::setw(13)
       << r.rms_residual << "  " << r.halvings << '\n';
  }
}

int cmd_analyze(const Options& o, bool with_fixed, std::ostream& out, std::ostream& err) {
  const GearDesign design = read_design(o);
  const MaterialSet materials = read_materials(design, o);
  const MeshConfig config = resolve_mesh_config(o.mesh);
  const SolveOptions options = solve_options(o);
  const fs::path dir = o.out.empty() ? fs::path(".") : fs::path(o.out);
  ensure_dir(dir);

  const DerivedGeometry derived = derive_geometry(design);
  PolarMesh mesh = build_mesh(design, derived, config, materials.magnet);

  json doc;
  doc["schema"] = kResultSchema;
  doc["design"] = design_to_json(design);
  doc["mesh"] = mesh_json(o.mesh, mesh);
  doc["materials"] = {{"steel_id", design.steel_id},
                      {"pm_id", design.pm_id},
                      {"bh_file", o.bh},
                      {"b_r_T", materials.magnet.b_r},
                      {"mu_r_pm", materials.magnet.mu_r}};
  doc["gear_ratio"] = derived.gear_ratio.value();

  if (with_fixed) {
    SolveResult result;
    try {
      result = solve_newton(mesh, materials, options);
    } catch (const ConvergenceError& e) {
      write_trace_csv(e.trace(), dir / "trace.csv");
      err << "error: " << e.what() << '\n';
      print_trace(e.trace(), err);
      return e.exit_code();
    }
    write_trace_csv(result.trace, dir / "trace.csv");
    const FieldSolution field = flux_densities(mesh, result.phi);
    const TorqueReport report = torque_report(design, mesh, field);
    write_profile_csv(airgap_profile(mesh, field, Gap::kInner), dir / "profile_inner_gap.csv");
    write_profile_csv(airgap_profile(mesh, field, Gap::kOuter), dir / "profile_outer_gap.csv");
    doc["solve"] = {{"converged", true},
                    {"iterations", result.iterations},
                    {"wall_s", result.seconds},
                    {"symmetry_used", result.symmetry},
                    {"final_rms_residual", result.trace.records.empty() ? result.trace.initial_rms
                                                                        : result.trace.records.back().rms_residual}};
    doc["torque"] = {{"rotor1_Nm", report.torque_rotor1},
                     {"rotor3_Nm", report.torque_rotor3},
                     {"modulators_Nm", report.torque_modulators},
                     {"rotor3_kNm_per_m", report.torque_rotor3 / design.stack_length * 1e-3},
                     {"radius_inner_m", report.radius_inner},
                     {"radius_outer_m", report.radius_outer}};
    doc["vtd_Nm_per_m3"] = report.vtd;
    doc["pm_vtd_Nm_per_m3"] = report.pm_vtd;
    if (o.verbose) print_trace(result.trace, err);
    if (!o.quiet) {
      out << "torque at design position: T1 " << report.torque_rotor1 << " Nm, T3 " << report.torque_rotor3
          << " Nm, modulators " << report.torque_modulators << " Nm (" << result.iterations << " iterations, "
          << result.seconds << " s)\n";
    }
  }

  if (o.angles > 0) {
    SlipResult slip;
    try {
      slip = slip_torque(design, config, materials, options, slip_options(o));
    } catch (const ConvergenceError& e) {
      err << "error: " << e.what() << '\n';
      print_trace(e.trace(), err);
      return e.exit_code();
    }
    doc["slip"] = slip_json(slip, design.stack_length);
    doc["vtd_Nm_per_m3"] = slip.slip_torque / active_volume(design);
    doc["pm_vtd_Nm_per_m3"] = slip.slip_torque / magnet_volume(design);
    if (!o.quiet) {
      out << "slip torque: " << slip.slip_torque << " Nm (" << slip.slip_torque / design.stack_length * 1e-3
          << " kNm/m) at theta1 = " << to_deg(slip.angle) << " deg, " << slip.samples.size() << " solves, "
          << slip.seconds << " s\n";
    }
  }

  write_json_file(doc, dir / "result.json");
  if (!o.quiet) out << "wrote " << (dir / "result.json").string() << '\n';
  return 0;
}

int cmd_sweep(const Options& o, std::ostream& out, std::ostream& err) {
  SweepSpec spec = load_sweep_spec(o.spec);
  if (o.threads) spec.threads = *o.threads;
  if (o.seed) spec.seed = *o.seed;
  if (o.sweep_mesh) {
    spec.mesh = *o.sweep_mesh;
    spec.mesh_config = resolve_mesh_config(spec.mesh);
  }
  spec.validate();
  if (o.out.empty()) throw InputError("sweep needs --out");

  const Enumeration preview = enumerate(spec);
  if (!o.quiet) {
    err << "sweep: " << spec.product_size() << " combinations, " << preview.points.size() << " designs";
    if (!preview.skipped.empty()) err << ", " << preview.skipped.size() << " invalid skipped";
    err << '\n';
  }
  if (o.verbose) {
    for (const auto& s : preview.skipped) err << "  skipped: " << s << '\n';
  }

  std::size_t step = 1;
  auto progress = [&](const SweepProgress& p) {
    if (o.quiet || p.total == 0) return;
    step = std::max<std::size_t>(1, p.total / 20);
    if (o.verbose || p.done % step == 0 || p.done == p.total) {
      const double rate = p.elapsed > 0.0 ? static_cast<double>(p.done) / p.elapsed : 0.0;
      err << "  " << p.done << '/' << p.total << " designs, " << std::setprecision(3) << rate << " designs/s";
      if (p.last && !p.last->converged) err << " (design " << p.last->id << " failed: " << p.last->failure << ')';
      err << '\n';
    }
  };
  const SweepSummary summary = run_sweep(spec, o.out, progress);
  if (!o.quiet && summary.resumed > 0) {
    err << "resumed: " << summary.resumed << " designs already in results.csv were skipped\n";
  }
  out << summary.to_json().dump(2) << '\n';
  return 0;
}

int cmd_trends(const Options& o, std::ostream& out) {
  if (o.results.empty()) throw InputError("trends needs --results");
  const auto results = read_results(o.results);
  const auto rows = trend_tables(results, o.group_by);
  if (!o.out.empty()) {
    write_trend_csv(rows, o.group_by, o.out);
    if (!o.quiet) out << "wrote " << rows.size() << " rows to " << o.out << '\n';
  } else {
    write_trend_csv(rows, o.group_by, out);
  }
  return 0;
}

int cmd_compare(const Options& o, std::ostream& out) {
  if (o.results.empty() || o.reference.empty()) throw InputError("compare needs --results and --reference");
  const RunComparison c = compare_runs(read_results(o.results), read_results(o.reference));
  out << c.to_json().dump(2) << '\n';
  return 0;
}

int cmd_dump_mesh(const Options& o, std::ostream& out) {
  const GearDesign design = read_design(o);
  const MaterialSet materials = read_materials(design, o);
  const PolarMesh mesh = build_mesh(design, derive_geometry(design), resolve_mesh_config(o.mesh), materials.magnet);
  const fs::path path = o.out.empty() ? fs::path("mesh.csv") : fs::path(o.out);
  write_mesh_csv(mesh, path);
  if (!o.quiet) out << mesh_json(o.mesh, mesh).dump() << "\nwrote " << path.string() << '\n';
  return 0;
}

int cmd_dump_matrix(const Options& o, std::ostream& out) {
  const GearDesign design = read_design(o);
  const MaterialSet materials = read_materials(design, o);
  const PolarMesh mesh = build_mesh(design, derive_geometry(design), resolve_mesh_config(o.mesh), materials.magnet);
  SolveOptions options = solve_options(o);
  const MecSystem linear = assemble(mesh, materials, nullptr, options.init_mu_r);
  const fs::path path = o.out.empty() ? fs::path("matrix.txt") : fs::path(o.out);
  write_matrix_dump(linear, path);
  if (!o.quiet) {
    out << "wrote " << linear.dimension() << " loops, " << linear.r_app.matrix.nonZeros() << " stored entries to "
        << path.string() << '\n';
  }
  return 0;
}

void add_design_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--design", o.design, "Design JSON (mm, degrees)")->required()->check(CLI::ExistingFile);
  cmd->add_option("--mesh", o.mesh, "coarse | fine | custom:<file>");
  cmd->add_option("--stack-length", o.stack_length, "Override stack length [mm]");
  cmd->add_option("--bh", o.bh, "Steel B-H table (H A/m, B T per line)")->check(CLI::ExistingFile);
  cmd->add_option("--br", o.br, "Override magnet remanence [T]");
}

void add_solver_options(CLI::App* cmd, Options& o) {
  cmd->add_option("--tol", o.tol, "Relative torque change for convergence");
  cmd->add_option("--max-iters", o.max_iters, "Newton iteration limit");
  cmd->add_flag("--frozen-linear", o.frozen_linear, "Keep steel at the initial permeability");
  cmd->add_flag("--no-damping", o.no_damping, "Take full Newton steps");
  cmd->add_flag("--no-symmetry", o.no_symmetry, "Solve the full machine");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Nonlinear magnetic equivalent circuit for radial-flux magnetic gears", "mecgear"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.add_flag("-v,--verbose", o.verbose, "Print solver traces and per-design progress");
  app.add_flag("-q,--quiet", o.quiet, "Only print errors");

  auto* analyze = app.add_subcommand("analyze", "Solve one design; write result.json, gap profiles and the trace");
  add_design_options(analyze, o);
  add_solver_options(analyze, o);
  analyze->add_option("--angles", o.angles, "Rotor 1 angles for the slip search (0 skips it)")->check(CLI::NonNegativeNumber);
  analyze->add_option("--refine", o.refine, "Extra solves refining the slip angle")->check(CLI::NonNegativeNumber);
  analyze->add_option("--threads", o.threads, "Concurrent angle solves")->check(CLI::PositiveNumber);
  analyze->add_option("--out", o.out, "Output directory");

  auto* slip = app.add_subcommand("slip", "Slip torque only");
  add_design_options(slip, o);
  add_solver_options(slip, o);
  slip->add_option("--angles", o.angles, "Rotor 1 angles across the half electrical period")->check(CLI::PositiveNumber);
  slip->add_option("--refine", o.refine, "Extra solves refining the slip angle")->check(CLI::NonNegativeNumber);
  slip->add_option("--threads", o.threads, "Concurrent angle solves")->check(CLI::PositiveNumber);
  slip->add_option("--out", o.out, "Output directory");

  auto* sweep = app.add_subcommand("sweep", "Run (or resume) a parametric sweep");
  sweep->add_option("--spec", o.spec, "Sweep spec JSON")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", o.out, "Output directory")->required();
  sweep->add_option("--mesh", o.sweep_mesh, "Override the spec's mesh preset");
  sweep->add_option("--threads", o.threads, "Worker threads")->check(CLI::PositiveNumber);
  sweep->add_option("--seed", o.seed, "Override the subsampling seed");

  auto* trends = app.add_subcommand("trends", "Max VTD and PM VTD per parameter value");
  trends->add_option("--results", o.results, "results.csv of a sweep")->required()->check(CLI::ExistingFile);
  trends->add_option("--by", o.group_by, "gear_ratio, p1, r_o, k_bi1, t_pm1, t_ag, t_mods, t_brg, k_pm or t_bi3")
      ->required();
  trends->add_option("--out", o.out, "CSV file (stdout when omitted)");

  auto* compare = app.add_subcommand("compare", "Torque discrepancy and speed of one sweep against another");
  compare->add_option("--results", o.results, "results.csv under test (e.g. coarse)")->required()->check(CLI::ExistingFile);
  compare->add_option("--reference", o.reference, "Reference results.csv (e.g. fine)")->required()->check(CLI::ExistingFile);

  auto* dump_mesh = app.add_subcommand("dump-mesh", "Write the node cells as CSV");
  add_design_options(dump_mesh, o);
  dump_mesh->add_option("--out", o.out, "CSV file");

  auto* dump_matrix = app.add_subcommand("dump-matrix", "Write the linearised reluctance matrix and MMF vector");
  add_design_options(dump_matrix, o);
  dump_matrix->add_option("--out", o.out, "Output file");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : static_cast<int>(ErrorKind::kInput);
  }

  try {
    if (*analyze) return cmd_analyze(o, true, out, err);
    if (*slip) return cmd_analyze(o, false, out, err);
    if (*sweep) return cmd_sweep(o, out, err);
    if (*trends) return cmd_trends(o, out);
    if (*compare) return cmd_compare(o, out);
    if (*dump_mesh) return cmd_dump_mesh(o, out);
    if (*dump_matrix) return cmd_dump_matrix(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.exit_code();
  } catch (const std::exception& e) {
    err << "internal error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}

}  // namespace mecgear::cli
