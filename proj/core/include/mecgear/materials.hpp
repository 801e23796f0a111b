#pragma once

#include <filesystem>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace mecgear {

/// Field strength and its slope at one flux density.
struct HEval {
  double h = 0.0;     // A/m
  double dh_db = 0.0; // (A/m)/T, the reciprocal differential permeability
};

/// Isotropic, single-valued magnetisation law, odd in B. The network is flux
/// driven, so implementations expose H(B) rather than B(H).
class BhModel {
 public:
  virtual ~BhModel() = default;

  virtual HEval h_of_b(double b) const = 0;
  virtual double b_of_h(double h) const = 0;
  virtual double initial_permeability() const = 0;
  virtual bool is_linear() const { return false; }
};

double mu_apparent(const BhModel& model, double b);
double mu_differential(const BhModel& model, double b);

struct BhPoint {
  double h = 0.0;
  double b = 0.0;
};

/// Tabulated B-H curve. H(B) is a shape-preserving (Fritsch-Carlson) cubic
/// through the points, so B(H) is monotone and dB/dH is continuous. Past the
/// last point the curve continues with slope mu0.
class BhCurve final : public BhModel {
 public:
  static BhCurve from_points(std::vector<BhPoint> points);
  // Two columns (H in A/m, B in T) per line; '#' starts a comment.
  static BhCurve from_file(const std::filesystem::path& path);

  HEval h_of_b(double b) const override;
  double b_of_h(double h) const override;
  double initial_permeability() const override;

  std::span<const BhPoint> points() const noexcept { return points_; }

 private:
  explicit BhCurve(std::vector<BhPoint> points);

  std::vector<BhPoint> points_;
  std::vector<double> slopes_;  // dH/dB at each knot
};

/// Froehlich-Kennelly law B = mu0 H + b_sat H / (H + b_sat / (mu0 (mu_r_initial - 1))).
/// Smooth everywhere, with closed-form inverse and derivative.
class AnalyticBh final : public BhModel {
 public:
  AnalyticBh(double b_sat, double mu_r_initial);

  HEval h_of_b(double b) const override;
  double b_of_h(double h) const override;
  double initial_permeability() const override;
  double db_dh(double h) const;

  double b_sat() const noexcept { return b_sat_; }
  double mu_r_initial() const noexcept { return mu_r_initial_; }

 private:
  double b_sat_;
  double mu_r_initial_;
  double h_knee_;
};

/// Constant permeability.
class LinearBh final : public BhModel {
 public:
  explicit LinearBh(double mu_r);

  HEval h_of_b(double b) const override;
  double b_of_h(double h) const override;
  double initial_permeability() const override;
  bool is_linear() const override { return true; }

 private:
  double mu_;
};

struct PermanentMagnet {
  double b_r = 1.31;   // T
  double mu_r = 1.05;  // recoil

  double permeability() const noexcept;
  void validate() const;
};

/// MMF injected by a radially magnetised flux tube of the given radial length.
double pm_mmf(const PermanentMagnet& pm, double radial_length, int polarity);

/// M250-like electrical steel: Froehlich-Kennelly with mu_r(0) = 4000 and
/// b_sat = 1.9 T sampled onto a table.
std::vector<BhPoint> m250_like_points();
std::shared_ptr<const BhModel> default_steel();
PermanentMagnet n42_magnet();

struct MaterialSet {
  std::shared_ptr<const BhModel> steel;
  PermanentMagnet magnet;

  static MaterialSet defaults();
  static MaterialSet lookup(const std::string& steel_id, const std::string& pm_id);
};

}  // namespace mecgear
