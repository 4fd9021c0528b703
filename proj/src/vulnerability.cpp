#include "hazcell/vulnerability.hpp"

#include <algorithm>
#include <string>

namespace hazcell {

double damage_fraction(const DamageCurve& curve, double intensity) {
  const auto& k = curve.knots;
  if (intensity <= k.front().intensity) return k.front().fraction;
  if (intensity >= k.back().intensity) return k.back().fraction;
  // First knot with intensity > x; x lies in [hi-1, hi).
  const auto hi = std::upper_bound(k.begin(), k.end(), intensity,
                                   [](double x, const DamageCurve::Knot& knot) { return x < knot.intensity; });
  const auto lo = hi - 1;
  if (intensity == lo->intensity) return lo->fraction;
  const double t = (intensity - lo->intensity) / (hi->intensity - lo->intensity);
  // Clamp guards against rounding pushing the result past the segment ends.
  return std::clamp(lo->fraction + t * (hi->fraction - lo->fraction), lo->fraction, hi->fraction);
}

double damage_fraction(const DamageCurve& curve, double intensity, IntensityUnit unit) {
  if (unit != curve.intensity_unit) {
    throw ValidationError("curve '" + curve.curve_id + "' expects " + std::string(to_string(curve.intensity_unit)) +
                          " but intensity is in " + std::string(to_string(unit)));
  }
  return damage_fraction(curve, intensity);
}

void DamageStateThresholds::validate() const {
  double prev = 0.0;
  for (double t : upper) {
    if (!(t > prev) || t > 1.0) {
      throw ValidationError("damage-state thresholds must satisfy 0 < t1 < t2 < t3 < t4 <= 1");
    }
    prev = t;
  }
}

DamageState classify_damage_state(double fraction, const DamageStateThresholds& thresholds) noexcept {
  if (!(fraction > 0.0)) return DamageState::DS0_none;
  const auto& t = thresholds.upper;
  if (fraction <= t[0]) return DamageState::DS1_backup_exhausted;
  if (fraction <= t[1]) return DamageState::DS2_generator_failure;
  if (fraction <= t[2]) return DamageState::DS3_generator_damage;
  if (fraction <= t[3]) return DamageState::DS4_equipment_loss;
  return DamageState::DS5_catastrophic;
}

void CurveSet::set_default(Hazard hazard, DamageCurve curve) {
  validate_curve(curve);
  defaults_.insert_or_assign(hazard, std::move(curve));
}

void CurveSet::add(Hazard hazard, TowerDesign design, DamageCurve curve) {
  validate_curve(curve);
  specific_.insert_or_assign({hazard, design}, std::move(curve));
}

const DamageCurve& CurveSet::select(Hazard hazard, TowerDesign design) const {
  if (const auto it = specific_.find({hazard, design}); it != specific_.end()) return it->second;
  if (const auto it = defaults_.find(hazard); it != defaults_.end()) return it->second;
  throw ValidationError("no default damage curve registered for hazard " + std::string(to_string(hazard)));
}

std::vector<const DamageCurve*> CurveSet::curves_for(Hazard hazard) const {
  std::vector<const DamageCurve*> out;
  if (const auto it = defaults_.find(hazard); it != defaults_.end()) out.push_back(&it->second);
  for (const auto& [key, curve] : specific_) {
    if (key.first == hazard) out.push_back(&curve);
  }
  return out;
}

}  // namespace hazcell
