#include "hazcell/model.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>

#include "hazcell/text.hpp"

namespace hazcell {

namespace {

template <typename Enum, std::size_t N>
Enum parse_label(std::string_view s, const std::array<std::pair<std::string_view, Enum>, N>& table,
                 const char* what) {
  for (const auto& [label, value] : table) {
    if (iequals(s, label)) return value;
  }
  throw RejectedRecord(std::string("unknown ") + what, std::string(s));
}

constexpr std::array<std::pair<std::string_view, Radio>, 4> kRadioLabels{{
    {"GSM", Radio::GSM}, {"UMTS", Radio::UMTS}, {"LTE", Radio::LTE}, {"NR", Radio::NR}}};
constexpr std::array<std::pair<std::string_view, Generation>, 4> kGenerationLabels{{
    {"2G", Generation::G2}, {"3G", Generation::G3}, {"4G", Generation::G4}, {"5G", Generation::G5}}};
constexpr std::array<std::pair<std::string_view, TowerDesign>, 4> kDesignLabels{{
    {"monopole", TowerDesign::Monopole},
    {"self_supported", TowerDesign::SelfSupported},
    {"guyed", TowerDesign::Guyed},
    {"unknown", TowerDesign::Unknown}}};
constexpr std::array<std::pair<std::string_view, Hazard>, 3> kHazardLabels{{
    {"coastal", Hazard::Coastal}, {"riverine", Hazard::Riverine}, {"cyclone", Hazard::Cyclone}}};
constexpr std::array<std::pair<std::string_view, Pathway>, 3> kPathwayLabels{{
    {"historical", Pathway::Historical}, {"RCP4.5", Pathway::RCP45}, {"RCP8.5", Pathway::RCP85}}};
constexpr std::array<std::pair<std::string_view, IntensityUnit>, 3> kUnitLabels{{
    {"meters_depth", IntensityUnit::MetersDepth},
    {"kmh_wind", IntensityUnit::KmhWind},
    {"ms_wind", IntensityUnit::MsWind}}};
constexpr std::array<std::pair<std::string_view, IncomeGroup>, 5> kIncomeLabels{{
    {"HIC", IncomeGroup::HIC},
    {"UMC", IncomeGroup::UMC},
    {"LMC", IncomeGroup::LMC},
    {"LIC", IncomeGroup::LIC},
    {"unknown", IncomeGroup::Unknown}}};

template <typename Enum, std::size_t N>
std::string_view label_of(Enum v, const std::array<std::pair<std::string_view, Enum>, N>& table) {
  for (const auto& [label, value] : table) {
    if (value == v) return label;
  }
  return "?";
}

bool valid_iso3(std::string_view s) {
  if (iequals(s, "unknown")) return true;
  return s.size() == 3 && std::all_of(s.begin(), s.end(), [](char c) { return c >= 'A' && c <= 'Z'; });
}

}  // namespace

std::string_view to_string(Radio r) { return label_of(r, kRadioLabels); }
std::string_view to_string(Generation g) { return label_of(g, kGenerationLabels); }
std::string_view to_string(TowerDesign d) { return label_of(d, kDesignLabels); }
std::string_view to_string(Hazard h) { return label_of(h, kHazardLabels); }
std::string_view to_string(Pathway p) { return label_of(p, kPathwayLabels); }
std::string_view to_string(IntensityUnit u) { return label_of(u, kUnitLabels); }
std::string_view to_string(IncomeGroup g) { return label_of(g, kIncomeLabels); }

std::string_view to_string(DamageState s) {
  switch (s) {
    case DamageState::DS0_none: return "DS0_none";
    case DamageState::DS1_backup_exhausted: return "DS1_backup_exhausted";
    case DamageState::DS2_generator_failure: return "DS2_generator_failure";
    case DamageState::DS3_generator_damage: return "DS3_generator_damage";
    case DamageState::DS4_equipment_loss: return "DS4_equipment_loss";
    case DamageState::DS5_catastrophic: return "DS5_catastrophic";
  }
  return "?";
}

Radio parse_radio(std::string_view s) { return parse_label(s, kRadioLabels, "radio"); }
Generation parse_generation(std::string_view s) { return parse_label(s, kGenerationLabels, "generation"); }
TowerDesign parse_tower_design(std::string_view s) { return parse_label(s, kDesignLabels, "tower design"); }
Hazard parse_hazard(std::string_view s) { return parse_label(s, kHazardLabels, "hazard"); }
Pathway parse_pathway(std::string_view s) { return parse_label(s, kPathwayLabels, "pathway"); }
IntensityUnit parse_intensity_unit(std::string_view s) { return parse_label(s, kUnitLabels, "intensity unit"); }
IncomeGroup parse_income_group(std::string_view s) { return parse_label(s, kIncomeLabels, "income group"); }

Generation map_radio_generation(Radio radio) noexcept {
  switch (radio) {
    case Radio::GSM: return Generation::G2;
    case Radio::UMTS: return Generation::G3;
    case Radio::LTE: return Generation::G4;
    case Radio::NR: return Generation::G5;
  }
  return Generation::G2;
}

Generation map_radio_generation(std::string_view radio_label) {
  return map_radio_generation(parse_radio(radio_label));
}

Asset make_asset(std::string asset_id, double lon, double lat, Radio radio, double unit_cost,
                 TowerDesign design, std::string country_iso3) {
  if (!std::isfinite(lon) || lon < -180.0 || lon > 180.0) {
    throw RejectedRecord("lon out of range", format_number(lon));
  }
  if (!std::isfinite(lat) || lat < -90.0 || lat > 90.0) {
    throw RejectedRecord("lat out of range", format_number(lat));
  }
  if (!std::isfinite(unit_cost) || unit_cost < 0.0) {
    throw RejectedRecord("unit_cost must be nonnegative", format_number(unit_cost));
  }
  if (!valid_iso3(country_iso3)) throw RejectedRecord("bad country code", country_iso3);
  Asset a;
  a.asset_id = std::move(asset_id);
  a.lon = lon;
  a.lat = lat;
  a.radio = radio;
  a.generation = map_radio_generation(radio);
  a.tower_design = design;
  a.unit_cost = round_to_cents(unit_cost);
  a.country_iso3 = iequals(country_iso3, "unknown") ? std::string("unknown") : std::move(country_iso3);
  return a;
}

double round_to_cents(double usd) { return static_cast<double>(std::llround(usd * 100.0)) / 100.0; }

void validate_raster(const HazardRaster& r) {
  if (r.ncols <= 0 || r.nrows <= 0) throw ValidationError("raster dimensions must be positive");
  if (!(r.cellsize > 0.0) || !std::isfinite(r.cellsize)) {
    throw ValidationError("raster cellsize must be > 0, got " + format_number(r.cellsize));
  }
  if (!std::isfinite(r.xll) || !std::isfinite(r.yll)) throw ValidationError("raster origin must be finite");
  if (r.values.size() != static_cast<std::size_t>(r.ncols * r.nrows)) {
    throw ValidationError("raster holds " + std::to_string(r.values.size()) + " values, expected " +
                          std::to_string(r.ncols * r.nrows));
  }
  for (std::size_t i = 0; i < r.values.size(); ++i) {
    const double v = r.values[i];
    if (r.is_nodata(v)) continue;
    if (!std::isfinite(v) || v < 0.0) {
      throw ValidationError("raster value " + format_number(v) + " at index " + std::to_string(i) +
                            " is negative or non-finite");
    }
  }
}

std::string coastal_member(CoastalVariant v) {
  return "p" + std::to_string(v.percentile) + (v.subsidence ? "_wsub" : "_nosub");
}

std::optional<CoastalVariant> parse_coastal_member(std::string_view label) {
  for (int p : {5, 50, 95}) {
    for (bool sub : {false, true}) {
      const CoastalVariant v{p, sub};
      if (iequals(label, coastal_member(v))) return v;
    }
  }
  return std::nullopt;
}

Scenario validate_scenario(Scenario s) {
  if (s.return_period_years <= 0) {
    throw ValidationError("return period must be positive, got " + std::to_string(s.return_period_years));
  }
  if ((s.pathway == Pathway::Historical) != (s.epoch == kHistoricalEpoch)) {
    throw ValidationError("pathway " + std::string(to_string(s.pathway)) + " is inconsistent with epoch " +
                          std::to_string(s.epoch) + " (historical <=> 1980)");
  }
  const std::string& m = s.model_member;
  if (s.hazard == Hazard::Coastal) {
    const auto v = parse_coastal_member(m);
    if (!v) throw ValidationError("coastal member must be p{5,50,95}_{wsub,nosub}, got '" + m + "'");
    s.model_member = coastal_member(*v);
    return s;
  }
  if (s.pathway == Pathway::Historical && iequals(m, kBaselineMember)) {
    s.model_member = std::string(kBaselineMember);
    return s;
  }
  auto canonical = [&](const auto& models) -> std::optional<std::string> {
    for (std::string_view name : models) {
      if (iequals(m, name)) return std::string(name);
    }
    return std::nullopt;
  };
  const auto found = s.hazard == Hazard::Riverine ? canonical(kRiverineModels) : canonical(kCycloneModels);
  if (!found) {
    throw ValidationError("unknown " + std::string(to_string(s.hazard)) + " model member '" + m + "'");
  }
  s.model_member = *found;
  return s;
}

std::string scenario_key(const Scenario& s) {
  std::string key;
  key.append(to_string(s.hazard)).append("__");
  key.append(to_string(s.pathway)).append("__");
  key.append(std::to_string(s.epoch)).append("__rp");
  key.append(std::to_string(s.return_period_years)).append("__");
  key.append(s.model_member);
  return key;
}

Scenario parse_scenario_key(std::string_view key) {
  std::vector<std::string_view> parts;
  std::size_t start = 0;
  while (true) {
    const auto pos = key.find("__", start);
    if (pos == std::string_view::npos) {
      parts.push_back(key.substr(start));
      break;
    }
    parts.push_back(key.substr(start, pos - start));
    start = pos + 2;
  }
  if (parts.size() != 5 || parts[3].size() < 3 || parts[3].substr(0, 2) != "rp") {
    throw ValidationError("malformed scenario key '" + std::string(key) + "'");
  }
  auto to_int = [&](std::string_view t) {
    int v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size()) {
      throw ValidationError("malformed scenario key '" + std::string(key) + "'");
    }
    return v;
  };
  Scenario s;
  s.hazard = parse_hazard(parts[0]);
  s.pathway = parse_pathway(parts[1]);
  s.epoch = to_int(parts[2]);
  s.return_period_years = to_int(parts[3].substr(2));
  s.model_member = std::string(parts[4]);
  return validate_scenario(std::move(s));
}

void validate_curve(const DamageCurve& c) {
  if (c.knots.size() < 2) throw ValidationError("curve '" + c.curve_id + "' needs at least 2 knots");
  if (!(c.knots.front().intensity >= 0.0)) {
    throw ValidationError("curve '" + c.curve_id + "' first knot intensity must be >= 0");
  }
  for (std::size_t i = 0; i < c.knots.size(); ++i) {
    const auto& k = c.knots[i];
    if (!std::isfinite(k.intensity) || !(k.fraction >= 0.0 && k.fraction <= 1.0)) {
      throw ValidationError("curve '" + c.curve_id + "' knot " + std::to_string(i) +
                            " has fraction outside [0,1] or non-finite intensity");
    }
    if (i > 0) {
      if (!(k.intensity > c.knots[i - 1].intensity)) {
        throw ValidationError("curve '" + c.curve_id + "' intensities must be strictly increasing at knot " +
                              std::to_string(i));
      }
      if (k.fraction < c.knots[i - 1].fraction) {
        throw ValidationError("curve '" + c.curve_id + "' fractions must be non-decreasing at knot " +
                              std::to_string(i));
      }
    }
  }
}

BBox Region::bbox() const {
  BBox b{180.0, 90.0, -180.0, -90.0};
  for (const auto& ring : rings) {
    for (const auto& p : ring) {
      b.min_lon = std::min(b.min_lon, p.lon);
      b.min_lat = std::min(b.min_lat, p.lat);
      b.max_lon = std::max(b.max_lon, p.lon);
      b.max_lat = std::max(b.max_lat, p.lat);
    }
  }
  return b;
}

void validate_region(const Region& r) {
  if (r.region_id.empty()) throw ValidationError("region is missing region_id");
  if (r.region_id == "unassigned") throw ValidationError("region_id 'unassigned' is reserved");
  if (r.rings.empty()) throw ValidationError("region '" + r.region_id + "' has no rings");
  for (std::size_t i = 0; i < r.rings.size(); ++i) {
    const Ring& ring = r.rings[i];
    const std::string where = "region '" + r.region_id + "' ring " + std::to_string(i);
    if (ring.size() < 4) throw ValidationError(where + " has fewer than 4 vertices");
    if (!(ring.front() == ring.back())) throw ValidationError(where + " is not closed");
    for (std::size_t k = 0; k < ring.size(); ++k) {
      const auto& p = ring[k];
      if (!std::isfinite(p.lon) || !std::isfinite(p.lat) || p.lon < -180.0 || p.lon > 180.0 || p.lat < -90.0 ||
          p.lat > 90.0) {
        throw ValidationError(where + " has a vertex outside lon/lat range");
      }
      if (k > 0 && std::abs(p.lon - ring[k - 1].lon) > 180.0) {
        throw ValidationError(where + " crosses the antimeridian, which is not supported");
      }
    }
  }
}

}  // namespace hazcell
