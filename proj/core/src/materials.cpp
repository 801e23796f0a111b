#include "mecgear/materials.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mecgear/error.hpp"
#include "mecgear/units.hpp"

namespace mecgear {

double mu_apparent(const BhModel& model, double b) {
  b = std::abs(b);
  if (b == 0.0) return model.initial_permeability();
  return b / model.h_of_b(b).h;
}

double mu_differential(const BhModel& model, double b) {
  return 1.0 / model.h_of_b(std::abs(b)).dh_db;
}

// ---------------------------------------------------------------------------
// BhCurve

namespace {

// Fritsch-Carlson derivative estimates for a monotone cubic Hermite interpolant.
std::vector<double> monotone_slopes(std::span<const double> x, std::span<const double> y, double end_slope) {
  const std::size_t n = x.size();
  std::vector<double> delta(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) delta[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);

  std::vector<double> d(n);
  d[0] = delta[0];
  for (std::size_t i = 1; i + 1 < n; ++i) {
    const double h0 = x[i] - x[i - 1];
    const double h1 = x[i + 1] - x[i];
    // Weighted harmonic mean; both secants are positive for strictly increasing data.
    const double w1 = 2.0 * h1 + h0;
    const double w2 = h1 + 2.0 * h0;
    d[i] = (w1 + w2) / (w1 / delta[i - 1] + w2 / delta[i]);
  }
  // Matching the extrapolation slope keeps dH/dB continuous at the last knot.
  d[n - 1] = std::min(end_slope, 3.0 * delta[n - 2]);

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double a = d[i] / delta[i];
    const double b = d[i + 1] / delta[i];
    const double s = a * a + b * b;
    if (s > 9.0) {
      const double tau = 3.0 / std::sqrt(s);
      d[i] = tau * a * delta[i];
      d[i + 1] = tau * b * delta[i];
    }
  }
  return d;
}

}  // namespace

BhCurve::BhCurve(std::vector<BhPoint> points) : points_(std::move(points)) {
  std::vector<double> b(points_.size());
  std::vector<double> h(points_.size());
  for (std::size_t i = 0; i < points_.size(); ++i) {
    b[i] = points_[i].b;
    h[i] = points_[i].h;
  }
  slopes_ = monotone_slopes(b, h, 1.0 / kMu0);
}

BhCurve BhCurve::from_points(std::vector<BhPoint> points) {
  MECGEAR_REQUIRE(points.size() >= 3, "B-H curve needs at least three points");
  MECGEAR_REQUIRE(points.front().h == 0.0 && points.front().b == 0.0, "B-H curve must start at (0, 0)");
  for (std::size_t i = 1; i < points.size(); ++i) {
    MECGEAR_REQUIRE(std::isfinite(points[i].h) && std::isfinite(points[i].b), "B-H curve has non-finite values");
    if (!(points[i].h > points[i - 1].h && points[i].b > points[i - 1].b)) {
      std::ostringstream os;
      os << "B-H curve must be strictly increasing in H and B (point " << i << ")";
      throw InputError(os.str());
    }
  }
  return BhCurve(std::move(points));
}

BhCurve BhCurve::from_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open B-H file " + path.string());
  std::vector<BhPoint> pts;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    BhPoint p;
    if (!(ls >> p.h)) continue;  // blank
    std::string extra;
    if (!(ls >> p.b) || (ls >> extra)) {
      throw InputError(path.string() + ":" + std::to_string(lineno) + ": expected two columns (H B)");
    }
    pts.push_back(p);
  }
  return from_points(std::move(pts));
}

HEval BhCurve::h_of_b(double b) const {
  const double sign = b < 0.0 ? -1.0 : 1.0;
  b = std::abs(b);
  const auto& last = points_.back();
  if (b >= last.b) {
    return {sign * (last.h + (b - last.b) / kMu0), slopes_.back()};
  }
  // First knot with B greater than b.
  const auto it = std::upper_bound(points_.begin(), points_.end(), b,
                                   [](double v, const BhPoint& p) { return v < p.b; });
  const std::size_t i = static_cast<std::size_t>(it - points_.begin()) - 1;
  const double x0 = points_[i].b;
  const double dx = points_[i + 1].b - x0;
  const double t = (b - x0) / dx;
  const double t2 = t * t;
  const double t3 = t2 * t;
  const double y0 = points_[i].h;
  const double y1 = points_[i + 1].h;
  const double m0 = slopes_[i] * dx;
  const double m1 = slopes_[i + 1] * dx;
  const double h = (2 * t3 - 3 * t2 + 1) * y0 + (t3 - 2 * t2 + t) * m0 + (-2 * t3 + 3 * t2) * y1 + (t3 - t2) * m1;
  const double dh = ((6 * t2 - 6 * t) * y0 + (3 * t2 - 4 * t + 1) * m0 + (-6 * t2 + 6 * t) * y1 + (3 * t2 - 2 * t) * m1) / dx;
  return {sign * h, dh};
}

double BhCurve::b_of_h(double h) const {
  const double sign = h < 0.0 ? -1.0 : 1.0;
  h = std::abs(h);
  const auto& last = points_.back();
  if (h >= last.h) return sign * (last.b + kMu0 * (h - last.h));
  const auto it = std::upper_bound(points_.begin(), points_.end(), h,
                                   [](double v, const BhPoint& p) { return v < p.h; });
  const std::size_t i = static_cast<std::size_t>(it - points_.begin()) - 1;
  // Safeguarded Newton on the monotone segment.
  double lo = points_[i].b;
  double hi = points_[i + 1].b;
  double b = lo + (hi - lo) * (h - points_[i].h) / (points_[i + 1].h - points_[i].h);
  for (int iter = 0; iter < 100; ++iter) {
    const HEval e = h_of_b(b);
    const double f = e.h - h;
    if (f == 0.0) break;
    if (f > 0.0) hi = b; else lo = b;
    double next = b - f / e.dh_db;
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - b) <= 1e-16 * std::max(1.0, std::abs(b))) {
      b = next;
      break;
    }
    b = next;
  }
  return sign * b;
}

double BhCurve::initial_permeability() const { return 1.0 / slopes_.front(); }

// ---------------------------------------------------------------------------
// AnalyticBh

AnalyticBh::AnalyticBh(double b_sat, double mu_r_initial)
    : b_sat_(b_sat), mu_r_initial_(mu_r_initial), h_knee_(b_sat / (kMu0 * (mu_r_initial - 1.0))) {
  MECGEAR_REQUIRE(b_sat > 0.0, "b_sat must be positive");
  MECGEAR_REQUIRE(mu_r_initial > 1.0, "initial relative permeability must exceed 1");
}

double AnalyticBh::b_of_h(double h) const {
  const double a = std::abs(h);
  const double b = kMu0 * a + b_sat_ * a / (a + h_knee_);
  return h < 0.0 ? -b : b;
}

double AnalyticBh::db_dh(double h) const {
  const double a = std::abs(h) + h_knee_;
  return kMu0 + b_sat_ * h_knee_ / (a * a);
}

HEval AnalyticBh::h_of_b(double b) const {
  // mu0 H^2 + (mu0 Hk + b_sat - B) H - B Hk = 0, positive root in a cancellation-free form.
  const double sign = b < 0.0 ? -1.0 : 1.0;
  const double bb = std::abs(b);
  const double beta = kMu0 * h_knee_ + b_sat_ - bb;
  const double disc = std::sqrt(beta * beta + 4.0 * kMu0 * bb * h_knee_);
  const double h = beta >= 0.0 ? 2.0 * bb * h_knee_ / (beta + disc) : (disc - beta) / (2.0 * kMu0);
  return {sign * h, 1.0 / db_dh(h)};
}

double AnalyticBh::initial_permeability() const { return kMu0 * mu_r_initial_; }

// ---------------------------------------------------------------------------

LinearBh::LinearBh(double mu_r) : mu_(kMu0 * mu_r) {
  MECGEAR_REQUIRE(mu_r > 0.0, "relative permeability must be positive");
}

HEval LinearBh::h_of_b(double b) const { return {b / mu_, 1.0 / mu_}; }
double LinearBh::b_of_h(double h) const { return mu_ * h; }
double LinearBh::initial_permeability() const { return mu_; }

double PermanentMagnet::permeability() const noexcept { return kMu0 * mu_r; }

void PermanentMagnet::validate() const {
  MECGEAR_REQUIRE(b_r >= 0.0 && std::isfinite(b_r), "magnet remanence must be non-negative");
  MECGEAR_REQUIRE(mu_r >= 1.0, "magnet recoil permeability must be at least 1");
}

double pm_mmf(const PermanentMagnet& pm, double radial_length, int polarity) {
  return polarity * pm.b_r / pm.permeability() * radial_length;
}

std::vector<BhPoint> m250_like_points() {
  const AnalyticBh law(1.9, 4000.0);
  std::vector<BhPoint> pts{{0.0, 0.0}};
  // Log-spaced from 0.1 A/m to 1 MA/m, ten points per decade.
  for (int i = -10; i <= 60; ++i) {
    const double h = std::pow(10.0, i / 10.0);
    pts.push_back({h, law.b_of_h(h)});
  }
  return pts;
}

std::shared_ptr<const BhModel> default_steel() {
  static const auto curve = std::make_shared<const BhCurve>(BhCurve::from_points(m250_like_points()));
  return curve;
}

PermanentMagnet n42_magnet() { return {1.31, 1.05}; }

MaterialSet MaterialSet::defaults() { return {default_steel(), n42_magnet()}; }

MaterialSet MaterialSet::lookup(const std::string& steel_id, const std::string& pm_id) {
  MaterialSet set;
  if (steel_id == "m250" || steel_id.empty()) {
    set.steel = default_steel();
  } else if (steel_id == "m250_analytic") {
    set.steel = std::make_shared<const AnalyticBh>(1.9, 4000.0);
  } else if (steel_id == "linear") {
    set.steel = std::make_shared<const LinearBh>(4000.0);
  } else {
    throw InputError("unknown steel '" + steel_id + "' (expected m250, m250_analytic, linear)");
  }
  if (pm_id == "n42" || pm_id.empty()) {
    set.magnet = n42_magnet();
  } else {
    throw InputError("unknown magnet '" + pm_id + "' (expected n42)");
  }
  return set;
}

}  // namespace mecgear
