/**
 * @file model.hpp
 * @brief Domain types shared across the hazcell pipeline.
 */
#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace hazcell {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that is structurally or semantically invalid (maps to exit code 2).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A single record that cannot be accepted; carries the offending value.
class RejectedRecord : public ValidationError {
 public:
  RejectedRecord(std::string reason, std::string value)
      : ValidationError(reason + ": '" + value + "'"), value_(std::move(value)) {}
  const std::string& value() const noexcept { return value_; }

 private:
  std::string value_;
};

/// I/O or environment failure (maps to exit code 1).
class RuntimeFailure : public Error {
 public:
  using Error::Error;
};

/// Default per-cell replacement cost: a 100,000 USD three-sector site split over 3 cells.
inline constexpr double kDefaultUnitCost = 33333.00;

enum class Radio : std::uint8_t { GSM, UMTS, LTE, NR };
enum class Generation : std::uint8_t { G2, G3, G4, G5 };
enum class TowerDesign : std::uint8_t { Monopole, SelfSupported, Guyed, Unknown };
enum class Hazard : std::uint8_t { Coastal, Riverine, Cyclone };
enum class Pathway : std::uint8_t { Historical, RCP45, RCP85 };
enum class IntensityUnit : std::uint8_t { MetersDepth, KmhWind, MsWind };
enum class IncomeGroup : std::uint8_t { HIC, UMC, LMC, LIC, Unknown };

enum class DamageState : std::uint8_t {
  DS0_none,
  DS1_backup_exhausted,
  DS2_generator_failure,
  DS3_generator_damage,
  DS4_equipment_loss,
  DS5_catastrophic,
};

inline constexpr std::array kAllGenerations{Generation::G2, Generation::G3, Generation::G4, Generation::G5};
inline constexpr std::array kAllHazards{Hazard::Coastal, Hazard::Riverine, Hazard::Cyclone};

/// Historical baseline epoch; the only epoch allowed for Pathway::Historical.
inline constexpr int kHistoricalEpoch = 1980;

// Label conversions. Parsers are case-insensitive and throw RejectedRecord on unknown labels.
std::string_view to_string(Radio r);
std::string_view to_string(Generation g);
std::string_view to_string(TowerDesign d);
std::string_view to_string(Hazard h);
std::string_view to_string(Pathway p);
std::string_view to_string(IntensityUnit u);
std::string_view to_string(IncomeGroup g);
std::string_view to_string(DamageState s);

Radio parse_radio(std::string_view s);
Generation parse_generation(std::string_view s);
TowerDesign parse_tower_design(std::string_view s);
Hazard parse_hazard(std::string_view s);
Pathway parse_pathway(std::string_view s);
IntensityUnit parse_intensity_unit(std::string_view s);
IncomeGroup parse_income_group(std::string_view s);

/// GSM→2G, UMTS→3G, LTE→4G, NR→5G.
Generation map_radio_generation(Radio radio) noexcept;
/// Parses the radio label and maps it; throws RejectedRecord("unknown radio", label).
Generation map_radio_generation(std::string_view radio_label);

/**
 * @brief One cellular cell.
 *
 * `generation` is always the image of `radio` under map_radio_generation; use make_asset
 * to construct validated instances.
 */
struct Asset {
  std::string asset_id;
  double lon{};
  double lat{};
  Radio radio{Radio::GSM};
  Generation generation{Generation::G2};
  TowerDesign tower_design{TowerDesign::Unknown};
  double unit_cost{kDefaultUnitCost};
  std::string country_iso3{"unknown"};
};

/// Validates coordinates and cost, derives generation. Throws RejectedRecord.
Asset make_asset(std::string asset_id, double lon, double lat, Radio radio,
                 double unit_cost = kDefaultUnitCost, TowerDesign design = TowerDesign::Unknown,
                 std::string country_iso3 = "unknown");

/// Rounds a monetary amount to whole cents (half away from zero).
double round_to_cents(double usd);

/**
 * @brief Georeferenced hazard intensity grid.
 *
 * Row 0 of `values` is the northernmost row. Use make_raster for validated construction.
 */
struct HazardRaster {
  std::int64_t ncols{};
  std::int64_t nrows{};
  double xll{};
  double yll{};
  double cellsize{};
  double nodata{-9999.0};
  std::vector<double> values;
  IntensityUnit units{IntensityUnit::MetersDepth};

  double xmax() const noexcept { return xll + static_cast<double>(ncols) * cellsize; }
  double ytop() const noexcept { return yll + static_cast<double>(nrows) * cellsize; }
  double at(std::int64_t row, std::int64_t col) const { return values[static_cast<std::size_t>(row * ncols + col)]; }
  bool is_nodata(double v) const noexcept { return v == nodata; }

  bool operator==(const HazardRaster&) const = default;
};

/// Checks dimensions, cellsize and value invariants; throws ValidationError.
void validate_raster(const HazardRaster& r);

/// Coastal member label: sea-level percentile with or without subsidence.
struct CoastalVariant {
  int percentile{95};
  bool subsidence{false};
};

/**
 * @brief One hazard layer's scenario coordinates.
 *
 * Annual probability is derived, never stored.
 */
struct Scenario {
  Hazard hazard{Hazard::Riverine};
  Pathway pathway{Pathway::Historical};
  int epoch{kHistoricalEpoch};
  int return_period_years{100};
  std::string model_member;

  double annual_probability() const noexcept { return 1.0 / static_cast<double>(return_period_years); }

  bool operator==(const Scenario&) const = default;
  auto operator<=>(const Scenario& o) const = default;
};

/// Label used for the single member of a historical (no-GCM) layer.
inline constexpr std::string_view kBaselineMember = "baseline";

inline constexpr std::array<std::string_view, 5> kRiverineModels{
    "GFDL-ESM2M", "HadGEM2-ES", "IPSL-CM5A-LR", "MIROC-ESM-CHEM", "NorESM1-M"};
inline constexpr std::array<std::string_view, 4> kCycloneModels{
    "CMCC-CM2-VHR4", "CNRM-CM6-1-HR", "EC-Earth3P-HR", "HadGEM3-GC31-HM"};

std::string coastal_member(CoastalVariant v);
std::optional<CoastalVariant> parse_coastal_member(std::string_view label);

/**
 * @brief Checks pathway/epoch consistency, return period and member label.
 *
 * Returns a copy with the member label canonicalised (GCM names in their published case).
 */
Scenario validate_scenario(Scenario s);

/// `<hazard>__<pathway>__<epoch>__rp<RP>__<member>`
std::string scenario_key(const Scenario& s);
/// Inverse of scenario_key; validates the result.
Scenario parse_scenario_key(std::string_view key);

/**
 * @brief Monotone piecewise-linear map from intensity to damage fraction.
 */
struct DamageCurve {
  struct Knot {
    double intensity{};
    double fraction{};
    bool operator==(const Knot&) const = default;
  };

  std::string curve_id;
  IntensityUnit intensity_unit{IntensityUnit::MetersDepth};
  std::vector<Knot> knots;

  bool operator==(const DamageCurve&) const = default;
};

/// Throws ValidationError unless knots are valid (>= 2, increasing, fractions in [0,1]).
void validate_curve(const DamageCurve& c);

struct LonLat {
  double lon{};
  double lat{};
  bool operator==(const LonLat&) const = default;
};

using Ring = std::vector<LonLat>;

struct BBox {
  double min_lon{};
  double min_lat{};
  double max_lon{};
  double max_lat{};

  bool contains(double lon, double lat) const noexcept {
    return lon >= min_lon && lon <= max_lon && lat >= min_lat && lat <= max_lat;
  }
};

/// One polygon (outer ring first, holes after). MultiPolygons become several Regions sharing region_id.
struct Region {
  std::string region_id;
  std::string name;
  std::vector<Ring> rings;
  std::string continent{"unknown"};
  IncomeGroup income_group{IncomeGroup::Unknown};
  std::string country_iso3{"unknown"};

  BBox bbox() const;
};

/// Closed rings of >= 4 vertices, no antimeridian-crossing edges. Throws ValidationError.
void validate_region(const Region& r);

/// Index into a region list; negative means unassigned.
using RegionSlot = std::int32_t;
inline constexpr RegionSlot kUnassigned = -1;

/**
 * @brief Per-asset intersection outcome for one layer.
 *
 * `intensity` is empty when the asset is not exposed; fraction and cost are then zero.
 */
struct ExposureRecord {
  std::size_t asset{};
  std::optional<double> intensity;
  double damage_fraction{};
  double damage_cost{};
  DamageState damage_state{DamageState::DS0_none};
  RegionSlot region{kUnassigned};

  bool exposed() const noexcept { return intensity.has_value(); }
  bool operator==(const ExposureRecord&) const = default;
};

}  // namespace hazcell
