#pragma once

#include <cmath>
#include <numbers>

namespace mecgear {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kMu0 = 4.0e-7 * kPi;  // H/m

// Inputs are in mm and degrees; everything internal is SI.
inline constexpr double mm(double v) { return v * 1.0e-3; }
inline constexpr double to_mm(double metres) { return metres * 1.0e3; }
inline constexpr double deg(double v) { return v * kPi / 180.0; }
inline constexpr double to_deg(double radians) { return radians * 180.0 / kPi; }

// For text output: rounded to 1e-9 of the unit so repeated mm -> m -> mm
// conversions do not drift.
inline double to_mm_text(double metres) { return std::round(metres * 1.0e12) * 1.0e-9; }
inline double to_deg_text(double radians) { return std::round(to_deg(radians) * 1.0e9) * 1.0e-9; }

}  // namespace mecgear
