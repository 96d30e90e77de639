#pragma once

#include <array>
#include <cmath>

#include "fffopt/error.hpp"

namespace fffopt {

/// Decision variables of the print: head speed during deposition and extrusion multiplier.
struct PrintParameters {
  double vp = 0.0;  // mm/s
  double em = 0.0;  // dimensionless

  friend bool operator==(const PrintParameters&, const PrintParameters&) = default;
};

/// Point in the unit square, after min-max normalization by a ParameterBox.
using UnitPoint = std::array<double, 2>;

/// Closed box of admissible print parameters.
struct ParameterBox {
  double vp_min = 10.0;
  double vp_max = 500.0;
  double em_min = 0.5;
  double em_max = 1.5;

  /// Throws InvalidInput unless both ranges are finite and non-degenerate.
  void validate() const {
    if (!(std::isfinite(vp_min) && std::isfinite(vp_max) && vp_min < vp_max))
      throw InvalidInput("print speed bounds must satisfy vp_min < vp_max");
    if (!(std::isfinite(em_min) && std::isfinite(em_max) && em_min < em_max))
      throw InvalidInput("extrusion bounds must satisfy em_min < em_max");
  }

  bool contains(const PrintParameters& p) const noexcept {
    return p.vp >= vp_min && p.vp <= vp_max && p.em >= em_min && p.em <= em_max;
  }

  UnitPoint normalize(const PrintParameters& p) const noexcept {
    return {(p.vp - vp_min) / (vp_max - vp_min), (p.em - em_min) / (em_max - em_min)};
  }

  PrintParameters denormalize(const UnitPoint& u) const noexcept {
    return {vp_min + u[0] * (vp_max - vp_min), em_min + u[1] * (em_max - em_min)};
  }

  friend bool operator==(const ParameterBox&, const ParameterBox&) = default;
};

}  // namespace fffopt
