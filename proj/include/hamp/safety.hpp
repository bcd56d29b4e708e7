#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace hamp {

/// Speed-and-separation-monitoring constants. With contact forbidden, the
/// human-robot distance S must stay above the protective distance, which
/// bounds the admissible robot speed toward the human.
struct SafetyParams {
  double a_s = 3.0;   // max Cartesian deceleration toward the human (m/s^2)
  double t_r = 0.15;  // robot reaction time (s)
  double c = 0.2;     // perception-uncertainty margin (m)
  double v_h = 0.0;   // human speed toward the robot (m/s)

  void validate() const {
    if (!(a_s > 0.0)) throw std::invalid_argument("SafetyParams: a_s must be positive");
    if (t_r < 0.0 || c < 0.0 || v_h < 0.0)
      throw std::invalid_argument("SafetyParams: t_r, c, v_h must be nonnegative");
  }
};

/// Minimum allowed human-robot separation when the robot closes at v_rh:
/// braking distance of both agents over the reaction time plus margins.
inline double protective_distance(const SafetyParams& p, double v_rh) {
  return p.v_h * (p.t_r + v_rh / p.a_s) + v_rh * p.t_r + v_rh * v_rh / (2.0 * p.a_s) + p.c;
}

/// Largest robot speed toward the human that keeps the separation S above the
/// protective distance. Clamped to zero below the margin (safety stop).
inline double max_allowed_speed(const SafetyParams& p, double s) {
  const double arg = p.v_h * p.v_h + p.a_s * p.t_r * (p.a_s * p.t_r) - 2.0 * p.a_s * (p.c - s);
  if (arg <= 0.0) return 0.0;
  return std::max(0.0, std::sqrt(arg) - p.a_s * p.t_r - p.v_h);
}

/// Runtime speed scaling in [0, 1]: unit when the robot recedes from every
/// human point, zero when it must stop, otherwise the ratio of the allowed to
/// the commanded approach speed.
inline double speed_override(double v_max, double v_max_rh) {
  if (v_max_rh <= 0.0) return 1.0;
  if (v_max <= 0.0) return 0.0;
  return std::min(v_max / v_max_rh, 1.0);
}

}  // namespace hamp
