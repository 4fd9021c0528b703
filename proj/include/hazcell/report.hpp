/**
 * @file report.hpp
 * @brief Output files behind the command-line tool.
 *
 * An assessment output directory holds:
 *   exposure_<key>.csv   one row per exposed asset, in asset input order
 *   regions_<key>.csv    one row per region_id (sorted), then an `unassigned` row
 *   summary.csv          one row per (hazard, pathway, epoch, return period) ensemble group
 *   regions.geojson      the region geometry used for the run
 * where <key> is scenario_key(). Costs carry exactly two decimals, counts and percents are integers.
 * Ensemble and summary totals are sums of the per-region cent values, so they always agree with
 * the regions files.
 */
#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "hazcell/engine.hpp"

namespace hazcell {

struct RegionRow {
  std::string region_id;
  std::string name;
  std::string continent{"unknown"};
  IncomeGroup income_group{IncomeGroup::Unknown};
  std::string country_iso3{"unknown"};
  std::int64_t assets{};
  std::int64_t cell_count{};
  std::int64_t cost_cents{};
  std::array<std::int64_t, 4> cells_by_generation{};
  std::array<std::int64_t, 4> cost_cents_by_generation{};
  std::array<std::int64_t, 5> damage_states{};  ///< DS1..DS5 counts

  bool operator==(const RegionRow&) const = default;
};

/// Per-layer regional table: every region_id in sorted order, then the unassigned row.
std::vector<RegionRow> region_rows(const LayerResult& layer, std::span<const Asset> assets,
                                   std::span<const Region> regions);

std::string format_exposure_csv(const LayerResult& layer, std::span<const Asset> assets,
                                std::span<const Region> regions);
std::string format_regions_csv(std::span<const RegionRow> rows);
std::vector<RegionRow> parse_regions_csv(std::string_view csv);

/// One ensemble member's regional table.
struct MemberTable {
  Scenario scenario;
  std::vector<RegionRow> rows;
};

/// Reads every regions_<key>.csv in `out_dir`, ordered like enumerate_jobs.
std::vector<MemberTable> load_member_tables(const std::filesystem::path& out_dir);

/// `baselines` resolves the reference group per (hazard, return period).
using BaselineLookup = std::function<std::optional<BaselineDesignation>(Hazard, int)>;

std::string format_summary_csv(std::span<const MemberTable> members, const BaselineLookup& baselines);

struct ValidationOutcome {
  std::vector<std::string> lines;
  IngestReport assets;
};

/// Parses the manifest and every file it references. Throws ValidationError on the first fatal problem.
ValidationOutcome validate_inputs(const std::filesystem::path& manifest_path);

struct AssessOutcome {
  std::size_t jobs{};
  IngestReport assets;
  std::vector<std::filesystem::path> files;
};

/**
 * @brief Runs every job and writes the output directory.
 *
 * Previous hazcell outputs in `out_dir` (files matching the names above and report/map files)
 * are removed first so the directory always reflects one run.
 */
AssessOutcome assess_to_directory(const Manifest& manifest, const std::filesystem::path& out_dir, unsigned workers);

enum class ReportKind : std::uint8_t { Counts, Costs, PctChange, Zonal };
ReportKind parse_report_kind(std::string_view s);
std::string_view to_string(ReportKind k);

/// Tidy long-format report rows for counts / costs / pct_change over loaded member tables.
std::string format_report_csv(ReportKind kind, std::span<const MemberTable> members, const BaselineLookup& baselines);

/// Flooded-pixel counts and mean intensity per region_id per layer.
std::string format_zonal_csv(const Manifest& manifest);

/// Writes `report_<kind>.csv` into `out_dir` and returns its path. Zonal needs the manifest.
std::filesystem::path write_report(const std::filesystem::path& out_dir, ReportKind kind, const Manifest* manifest);

/// Writes `map_<key>.geojson`; throws ValidationError naming the valid keys when `key` is unknown.
std::filesystem::path export_geojson(const std::filesystem::path& out_dir, const std::string& key);

}  // namespace hazcell
