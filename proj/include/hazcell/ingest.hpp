/**
 * @file ingest.hpp
 * @brief Readers (and the ASCII grid writer) for every external data file.
 *
 * Fatal problems (missing file, bad header, malformed grid) raise ValidationError or
 * RuntimeFailure. Row-level problems in asset files are collected in an IngestReport; a row
 * is never dropped without a reason.
 */
#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "hazcell/model.hpp"

namespace hazcell {

struct Rejection {
  std::size_t line{};
  std::string reason;
};

struct IngestReport {
  std::size_t accepted{};
  std::size_t rejected{};
  std::vector<Rejection> rejection_reasons;

  std::size_t total() const noexcept { return accepted + rejected; }
};

/// Per-cell replacement cost policy applied to rows without an explicit unit_cost column.
struct CostConfig {
  double default_unit_cost{kDefaultUnitCost};
  std::map<Generation, double> per_generation;

  double cost_for(Generation g) const {
    const auto it = per_generation.find(g);
    return it == per_generation.end() ? default_unit_cost : it->second;
  }
};

/// The OpenCellID export layout; lon is column 6, lat column 7.
inline constexpr std::array<std::string_view, 14> kAssetColumns{
    "radio", "mcc",  "net",     "area",       "cell",    "unit",    "lon",
    "lat",   "range", "samples", "changeable", "created", "updated", "averageSignal"};

struct AssetTable {
  std::vector<Asset> assets;
  IngestReport report;
};

/**
 * @brief Reads an OpenCellID-layout CSV.
 *
 * Optional trailing columns `unit_cost`, `tower_design` and `country_iso3` (by header name)
 * override the cost config and defaults per row; other extra columns are ignored. Asset ids
 * are `<mcc>-<net>-<area>-<cell>`. Duplicate cells are kept.
 */
AssetTable read_assets(const std::filesystem::path& path, const CostConfig& costs = {});
AssetTable parse_assets(std::string_view csv, const CostConfig& costs = {});

/// Reads an ESRI ASCII grid (north row first). Throws ValidationError on malformed content.
HazardRaster read_raster_asc(const std::filesystem::path& path, IntensityUnit units);
HazardRaster parse_raster_asc(std::string_view text, IntensityUnit units);

/// Writes numbers in shortest round-trip form so read(write(r)) == r bit for bit.
std::string format_raster_asc(const HazardRaster& r);
void write_raster_asc(const std::filesystem::path& path, const HazardRaster& r);

/// Reads a GeoJSON FeatureCollection of Polygon/MultiPolygon features; one Region per polygon part.
std::vector<Region> read_regions(const std::filesystem::path& path);
std::vector<Region> parse_regions(std::string_view geojson);

/// country_iso3 -> (continent, income group), loaded from `country_iso3,continent,income_group` CSV.
using CountryAttributes = std::map<std::string, std::pair<std::string, IncomeGroup>>;
CountryAttributes read_country_attributes(const std::filesystem::path& path);
/// Fills continent/income_group on regions that left them unknown.
void apply_country_attributes(std::vector<Region>& regions, const CountryAttributes& lookup);

/// Curve CSV: `intensity_unit,<unit>` then `intensity,fraction` rows. curve_id defaults to the file stem.
DamageCurve read_curve(const std::filesystem::path& path, std::string curve_id = {});
DamageCurve parse_curve(std::string_view csv, std::string curve_id);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace hazcell
