/**
 * @file engine.hpp
 * @brief Scenario manifests, per-layer assessment, aggregation and ensemble statistics.
 *
 * Determinism contract: assessment output is identical for any worker count. Records are
 * computed independently per asset, and group totals use ExactSum, so no result depends on
 * how assets were partitioned.
 */
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "hazcell/exact_sum.hpp"
#include "hazcell/ingest.hpp"
#include "hazcell/model.hpp"
#include "hazcell/spatial.hpp"
#include "hazcell/vulnerability.hpp"

namespace hazcell {

// ---------------------------------------------------------------------------
// Manifest

struct CurveBinding {
  std::string curve_id;
  std::filesystem::path path;
};

struct TowerCurveBinding {
  Hazard hazard{};
  TowerDesign tower_design{};
  std::string curve_id;
};

struct LayerJob {
  Scenario scenario;
  std::filesystem::path raster;
  IntensityUnit units{IntensityUnit::MetersDepth};
  std::string curve_id;
};

/// Which (pathway, epoch) group is the reference for a hazard and return period.
struct BaselineDesignation {
  Hazard hazard{};
  int return_period_years{};
  Pathway pathway{Pathway::Historical};
  int epoch{kHistoricalEpoch};

  bool operator==(const BaselineDesignation&) const = default;
};

struct Manifest {
  std::filesystem::path assets;
  std::filesystem::path regions;
  std::optional<std::filesystem::path> country_attributes;
  CostConfig costs;
  std::vector<CurveBinding> curves;
  std::vector<TowerCurveBinding> tower_curves;
  std::map<Hazard, double> exposure_thresholds;
  DamageStateThresholds damage_states;
  std::filesystem::path output_dir{"out"};
  std::vector<LayerJob> jobs;
  std::vector<BaselineDesignation> baselines;

  /// Directory relative paths resolve against; not serialized.
  std::filesystem::path base_dir;

  std::filesystem::path resolve(const std::filesystem::path& p) const {
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  }

  /// Explicit designation if any, else historical/1980 when a job for it exists.
  std::optional<BaselineDesignation> baseline_for(Hazard hazard, int return_period_years) const;
};

/// Parses and structurally validates a manifest (scenarios, labels, duplicate keys). Files are not touched.
Manifest parse_manifest(std::string_view json_text, std::filesystem::path base_dir = {});
Manifest read_manifest(const std::filesystem::path& path);
/// Canonical JSON (2-space indent, fixed key order); parse_manifest(format_manifest(m)) round-trips.
std::string format_manifest(const Manifest& m);

struct ResolvedJob {
  Scenario scenario;
  std::filesystem::path raster;
  IntensityUnit units{};
  std::string curve_id;
};

/**
 * @brief Jobs ordered by (hazard, pathway, epoch, return period, member).
 *
 * Throws ValidationError on duplicate scenarios or unknown curve ids, and on missing raster
 * files when `check_files` is set.
 */
std::vector<ResolvedJob> enumerate_jobs(const Manifest& m, bool check_files = true);

/// Default exposure cutoff: 0 for floods; for cyclones the first default-curve knot with a nonzero fraction.
double exposure_threshold(const Manifest& m, Hazard hazard, const CurveSet& curves);

// ---------------------------------------------------------------------------
// Inputs

struct LoadedInputs {
  AssetTable assets;
  RegionIndex regions;
  std::map<std::string, DamageCurve> curves;

  /// Default curve from the job binding plus tower-design overrides for the job's hazard.
  CurveSet curve_set_for(const Manifest& m, const ResolvedJob& job) const;
};

LoadedInputs load_inputs(const Manifest& m);

// ---------------------------------------------------------------------------
// Assessment

struct AssessOptions {
  double exposure_threshold{0.0};
  DamageStateThresholds damage_states;
  /// 0 = hardware concurrency.
  unsigned workers{1};
};

/// One record per asset, in asset order.
std::vector<ExposureRecord> assess_layer(std::span<const Asset> assets, const HazardRaster& raster,
                                         const CurveSet& curves, const Scenario& scenario,
                                         const RegionIndex& regions, const AssessOptions& options = {});

std::vector<ExposureRecord> assess_layer(std::span<const Asset> assets, const HazardRaster& raster,
                                         const DamageCurve& curve, const Scenario& scenario,
                                         const RegionIndex& regions, const AssessOptions& options = {});

struct LayerResult {
  Scenario scenario;
  std::vector<ExposureRecord> records;
};

// ---------------------------------------------------------------------------
// Aggregation

enum class GroupField : std::uint8_t {
  RegionId,
  Continent,
  IncomeGroup,
  Generation,
  Hazard,
  Pathway,
  Epoch,
  ReturnPeriod,
  ModelMember,
};

/// Group key component; numeric fields sort numerically.
struct KeyPart {
  std::int64_t number{};
  std::string text;
  auto operator<=>(const KeyPart&) const = default;
  bool operator==(const KeyPart&) const = default;
};

inline constexpr std::string_view kUnassignedRegion = "unassigned";

struct Aggregate {
  std::vector<KeyPart> key;
  std::int64_t asset_count{};  ///< all records in the group
  std::int64_t cell_count{};   ///< exposed records
  ExactSum cost;

  double damage_cost_total() const noexcept { return cost.value(); }
};

/// Groups sorted by key. Records reference `assets` by index; regions by slot.
std::vector<Aggregate> aggregate(std::span<const LayerResult> layers, std::span<const Asset> assets,
                                 std::span<const Region> regions, std::span<const GroupField> group_by);

struct EnsembleStats {
  double mean{};
  double min{};
  double max{};
  bool operator==(const EnsembleStats&) const = default;
};

/// Mean (exact sum / n), min, max across members. Throws ValidationError on an empty set.
EnsembleStats ensemble_stats(std::span<const double> member_values);
/// Mean count rounded half-up.
std::int64_t ensemble_count_mean(std::span<const std::int64_t> member_counts);

/// round((future / baseline - 1) * 100), half away from zero; empty when the baseline is not positive.
std::optional<std::int64_t> pct_change_vs_baseline(double future, double baseline) noexcept;

unsigned resolve_workers(unsigned requested) noexcept;

}  // namespace hazcell
