/**
 * @file vulnerability.hpp
 * @brief Hazard intensity to damage fraction, cost and qualitative damage state.
 */
#pragma once

#include <array>
#include <map>
#include <optional>
#include <utility>

#include "hazcell/model.hpp"

namespace hazcell {

/// Piecewise-linear interpolation, clamped to the first/last knot fraction outside the knot range.
double damage_fraction(const DamageCurve& curve, double intensity);

/// Same, after checking the caller's intensity unit against the curve. Throws ValidationError on mismatch.
double damage_fraction(const DamageCurve& curve, double intensity, IntensityUnit unit);

/// Unrounded fraction * unit_cost; round with round_to_cents / format_usd at reporting time.
inline double damage_cost(double fraction, double unit_cost) noexcept { return fraction * unit_cost; }

/**
 * @brief Upper bounds of DS1..DS4 on the damage fraction.
 *
 * 0 maps to DS0; (0, t1] to DS1; (t1, t2] to DS2; (t2, t3] to DS3; (t3, t4] to DS4; above t4 to DS5.
 */
struct DamageStateThresholds {
  std::array<double, 4> upper{0.1, 0.25, 0.5, 0.9};

  /// Throws ValidationError unless 0 < t1 < t2 < t3 < t4 <= 1.
  void validate() const;
};

DamageState classify_damage_state(double fraction, const DamageStateThresholds& thresholds = {}) noexcept;

/**
 * @brief Curves keyed by hazard, with optional tower-design specialisations.
 */
class CurveSet {
 public:
  void set_default(Hazard hazard, DamageCurve curve);
  void add(Hazard hazard, TowerDesign design, DamageCurve curve);

  bool has_default(Hazard hazard) const { return defaults_.contains(hazard); }

  /// The (hazard, design) curve when registered, otherwise the hazard default. Throws ValidationError if none.
  const DamageCurve& select(Hazard hazard, TowerDesign design) const;

  /// Every curve registered for `hazard` (default first).
  std::vector<const DamageCurve*> curves_for(Hazard hazard) const;

 private:
  std::map<Hazard, DamageCurve> defaults_;
  std::map<std::pair<Hazard, TowerDesign>, DamageCurve> specific_;
};

}  // namespace hazcell
