#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <sstream>
#include <thread>

#include "mecgear/postproc.hpp"
#include "mecgear/solver.hpp"
#include "mecgear/units.hpp"

namespace mecgear {

namespace {

struct AngleSolver {
  const GearDesign& design;
  const PolarMesh& base;
  const MaterialSet& materials;
  const SolveOptions& options;
  bool warm_start;

  // `state` carries the last solution of the calling thread for warm starts.
  SlipSample operator()(double theta1, Eigen::VectorXd& state) const {
    GearDesign d = design;
    d.theta1 = theta1;
    PolarMesh mesh = base;
    assign_sources(mesh, d, materials.magnet);
    SolveOptions opt = options;
    opt.torque_gap = Gap::kOuter;
    if (warm_start && state.size() == mesh.loop_count()) opt.initial_phi = state;
    try {
      SolveResult r = solve_newton(mesh, materials, opt);
      state = std::move(r.phi);
      return {theta1, r.torque, r.iterations};
    } catch (const ConvergenceError& e) {
      std::ostringstream os;
      os << e.what() << " (rotor 1 at " << to_deg(theta1) << " deg)";
      throw ConvergenceError(os.str(), e.trace());
    }
  }
};

// Golden-section search for the largest |T3| on [a, b] with `budget` solves.
void refine_golden(const AngleSolver& solve, Eigen::VectorXd& state, double a, double b, int budget,
                   std::vector<SlipSample>& samples) {
  const double ratio = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = b - ratio * (b - a);
  double x2 = a + ratio * (b - a);
  SlipSample f1;
  SlipSample f2;
  bool have1 = false;
  bool have2 = false;
  for (int used = 0; used < budget;) {
    if (!have1) {
      f1 = solve(x1, state);
      samples.push_back(f1);
      have1 = true;
      ++used;
    } else if (!have2) {
      f2 = solve(x2, state);
      samples.push_back(f2);
      have2 = true;
      ++used;
    } else if (std::abs(f1.torque_rotor3) >= std::abs(f2.torque_rotor3)) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - ratio * (b - a);
      have1 = false;
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + ratio * (b - a);
      have2 = false;
    }
  }
}

}  // namespace

SlipResult slip_torque(const GearDesign& design, const MeshConfig& config, const MaterialSet& materials,
                       const SolveOptions& options, const SlipOptions& slip) {
  MECGEAR_REQUIRE(slip.samples >= 1, "slip sweep needs at least one sample");
  MECGEAR_REQUIRE(slip.refine >= 0, "negative refinement budget");
  const auto t0 = std::chrono::steady_clock::now();
  const DerivedGeometry derived = derive_geometry(design);
  const PolarMesh base = build_mesh(design, derived, config, materials.magnet);
  const AngleSolver solve{design, base, materials, options, slip.warm_start};

  // |T3| repeats every half electrical period of rotor 1.
  const double period = kPi / design.p1;
  const double step = period / slip.samples;

  SlipResult out;
  out.samples.resize(static_cast<std::size_t>(slip.samples));
  const int workers = std::clamp(slip.threads, 1, slip.samples);
  std::vector<Eigen::VectorXd> states(static_cast<std::size_t>(slip.samples));
  if (workers == 1) {
    Eigen::VectorXd state;
    for (int i = 0; i < slip.samples; ++i) {
      out.samples[static_cast<std::size_t>(i)] = solve(design.theta1 + (i + 0.5) * step, state);
      states[static_cast<std::size_t>(i)] = state;
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        try {
          Eigen::VectorXd state;
          for (int i = next++; i < slip.samples; i = next++) {
            out.samples[static_cast<std::size_t>(i)] = solve(design.theta1 + (i + 0.5) * step, state);
            states[static_cast<std::size_t>(i)] = state;
          }
        } catch (...) {
          errors[static_cast<std::size_t>(w)] = std::current_exception();
          next = slip.samples;
        }
      });
    }
    for (auto& t : pool) t.join();
    for (const auto& e : errors) {
      if (e) std::rethrow_exception(e);
    }
  }

  auto better = [](const SlipSample& a, const SlipSample& b) {
    return std::abs(a.torque_rotor3) < std::abs(b.torque_rotor3);
  };
  const auto best_it = std::max_element(out.samples.begin(), out.samples.end(), better);
  const SlipSample best_sample = *best_it;
  Eigen::VectorXd state = std::move(states[static_cast<std::size_t>(best_it - out.samples.begin())]);
  states.clear();

  if (slip.refine > 0) {
    // Predicted peak from the fundamental of the samples; T3 flips sign every
    // half period, so the samples cover a full electrical period.
    double centre = best_sample.theta1;
    double half_width = step;
    if (slip.samples >= 2) {
      double a = 0.0;
      double b = 0.0;
      for (int i = 0; i < slip.samples; ++i) {
        const double u = kPi * (i + 0.5) / slip.samples;
        a += out.samples[static_cast<std::size_t>(i)].torque_rotor3 * std::cos(u);
        b += out.samples[static_cast<std::size_t>(i)].torque_rotor3 * std::sin(u);
      }
      if (std::hypot(a, b) > 0.0) {
        const double peak = design.theta1 + std::atan2(b, a) / kPi * period;
        centre = peak + std::round((best_sample.theta1 - peak) / period) * period;
        half_width = 0.5 * step;
      }
    }
    const SlipSample first = solve(centre, state);
    out.samples.push_back(first);
    refine_golden(solve, state, centre - half_width, centre + half_width, slip.refine - 1, out.samples);
  }

  const SlipSample best = *std::max_element(out.samples.begin(), out.samples.end(), better);
  out.slip_torque = std::abs(best.torque_rotor3);
  out.angle = best.theta1;
  for (const auto& s : out.samples) out.iterations += s.iterations;
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace mecgear
