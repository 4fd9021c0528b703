#include "hazcell/report.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

#include <json.hpp>

#include "hazcell/text.hpp"

namespace hazcell {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

namespace {

constexpr std::string_view kRegionsHeader =
    "region_id,name,continent,income_group,country_iso3,assets,cell_count,damage_cost_total,"
    "cells_2g,cells_3g,cells_4g,cells_5g,cost_2g,cost_3g,cost_4g,cost_5g,ds1,ds2,ds3,ds4,ds5";
constexpr std::string_view kExposureHeader =
    "asset_id,radio,generation,tower_design,lon,lat,region_id,intensity,damage_fraction,damage_state,damage_cost";
constexpr std::string_view kSummaryHeader =
    "hazard,pathway,epoch,return_period,annual_probability,members,cell_count_mean,cell_count_min,cell_count_max,"
    "damage_cost_mean,damage_cost_min,damage_cost_max,baseline_pathway,baseline_epoch,pct_change_cell_count,"
    "pct_change_damage_cost";
constexpr std::string_view kTidyHeader = "hazard,pathway,epoch,return_period,annual_probability,group_by,group,statistic,value";
constexpr std::string_view kPctHeader =
    "hazard,pathway,epoch,return_period,annual_probability,baseline_pathway,baseline_epoch,group_by,group,statistic,value";
constexpr std::string_view kZonalHeader =
    "hazard,pathway,epoch,return_period,model_member,region_id,continent,threshold,flooded_pixels,mean_intensity";

/// CSV cells here are never quoted; free-text fields lose separators.
std::string csv_text(std::string_view s) {
  std::string out(s);
  for (char& c : out) {
    if (c == ',' || c == '\n' || c == '\r' || c == '"') c = ' ';
  }
  return out;
}

std::string regions_file_name(const Scenario& s) { return "regions_" + scenario_key(s) + ".csv"; }
std::string exposure_file_name(const Scenario& s) { return "exposure_" + scenario_key(s) + ".csv"; }

/// Ensemble group: a scenario without its member label.
struct EnsembleKey {
  Hazard hazard{};
  Pathway pathway{};
  int epoch{};
  int return_period{};
  auto operator<=>(const EnsembleKey&) const = default;
};

EnsembleKey ensemble_key(const Scenario& s) { return {s.hazard, s.pathway, s.epoch, s.return_period_years}; }

std::string ensemble_prefix(const EnsembleKey& k) {
  std::string out;
  out.append(to_string(k.hazard)).append(",");
  out.append(to_string(k.pathway)).append(",");
  out.append(std::to_string(k.epoch)).append(",");
  out.append(std::to_string(k.return_period)).append(",");
  out.append(format_number(1.0 / static_cast<double>(k.return_period)));
  return out;
}

struct Totals {
  std::int64_t cells{};
  std::int64_t cents{};
};

constexpr std::array<std::string_view, 5> kDimensions{"all", "continent", "income_group", "generation", "region_id"};

/// (dimension index, group label) -> totals for one member.
std::map<std::pair<std::size_t, std::string>, Totals> member_groups(const MemberTable& m, std::size_t max_dims) {
  std::map<std::pair<std::size_t, std::string>, Totals> out;
  for (const RegionRow& r : m.rows) {
    auto bump = [&](std::size_t dim, const std::string& label, std::int64_t cells, std::int64_t cents) {
      if (dim >= max_dims) return;
      Totals& t = out[{dim, label}];
      t.cells += cells;
      t.cents += cents;
    };
    bump(0, "all", r.cell_count, r.cost_cents);
    bump(1, r.continent, r.cell_count, r.cost_cents);
    bump(2, std::string(to_string(r.income_group)), r.cell_count, r.cost_cents);
    for (std::size_t g = 0; g < 4; ++g) {
      bump(3, std::string(to_string(kAllGenerations[g])), r.cells_by_generation[g], r.cost_cents_by_generation[g]);
    }
    bump(4, r.region_id, r.cell_count, r.cost_cents);
  }
  return out;
}

struct EnsembleCell {
  std::vector<std::int64_t> cells;
  std::vector<std::int64_t> cents;

  double mean_cells() const {
    std::int64_t s = 0;
    for (auto c : cells) s += c;
    return static_cast<double>(s) / static_cast<double>(cells.size());
  }
  double mean_cents() const {
    std::int64_t s = 0;
    for (auto c : cents) s += c;
    return static_cast<double>(s) / static_cast<double>(cents.size());
  }
};

using EnsembleTable = std::map<EnsembleKey, std::map<std::pair<std::size_t, std::string>, EnsembleCell>>;

EnsembleTable build_ensembles(std::span<const MemberTable> members, std::size_t max_dims) {
  // Collect every group label seen in any member of an ensemble so absent groups count as zero.
  std::map<EnsembleKey, std::vector<std::map<std::pair<std::size_t, std::string>, Totals>>> per_member;
  for (const auto& m : members) per_member[ensemble_key(m.scenario)].push_back(member_groups(m, max_dims));
  EnsembleTable table;
  for (const auto& [key, groups] : per_member) {
    std::set<std::pair<std::size_t, std::string>> labels;
    for (const auto& g : groups) {
      for (const auto& [label, t] : g) labels.insert(label);
    }
    auto& cells = table[key];
    for (const auto& label : labels) {
      EnsembleCell& c = cells[label];
      for (const auto& g : groups) {
        const auto it = g.find(label);
        c.cells.push_back(it == g.end() ? 0 : it->second.cells);
        c.cents.push_back(it == g.end() ? 0 : it->second.cents);
      }
    }
  }
  return table;
}

std::int64_t half_up_mean(std::span<const std::int64_t> v) { return ensemble_count_mean(v); }

std::string pct_text(std::optional<std::int64_t> p) { return p ? std::to_string(*p) : std::string("undefined"); }

/// Baseline ensemble for `key`, or empty when none applies or `key` is the baseline itself.
struct BaselineMatch {
  std::optional<BaselineDesignation> designation;
  const std::map<std::pair<std::size_t, std::string>, EnsembleCell>* cells{nullptr};
  bool is_self{false};
};

BaselineMatch find_baseline(const EnsembleTable& table, const EnsembleKey& key, const BaselineLookup& baselines) {
  BaselineMatch m;
  if (!baselines) return m;
  m.designation = baselines(key.hazard, key.return_period);
  if (!m.designation) return m;
  const EnsembleKey base{key.hazard, m.designation->pathway, m.designation->epoch, key.return_period};
  m.is_self = base == key;
  if (const auto it = table.find(base); it != table.end()) m.cells = &it->second;
  return m;
}

std::vector<RegionRow> rows_skeleton(std::span<const Region> regions, std::map<std::string, std::size_t>& by_id) {
  std::map<std::string, const Region*> first;
  for (const auto& r : regions) first.emplace(r.region_id, &r);
  std::vector<RegionRow> rows;
  rows.reserve(first.size() + 1);
  for (const auto& [id, r] : first) {
    RegionRow row;
    row.region_id = id;
    row.name = r->name;
    row.continent = r->continent;
    row.income_group = r->income_group;
    row.country_iso3 = r->country_iso3;
    by_id[id] = rows.size();
    rows.push_back(std::move(row));
  }
  RegionRow unassigned;
  unassigned.region_id = std::string(kUnassignedRegion);
  unassigned.name = std::string(kUnassignedRegion);
  by_id[std::string(kUnassignedRegion)] = rows.size();
  rows.push_back(std::move(unassigned));
  return rows;
}

std::string regions_geojson(std::span<const Region> regions) {
  std::vector<std::string> order;
  std::map<std::string, std::vector<const Region*>> parts;
  for (const auto& r : regions) {
    auto& list = parts[r.region_id];
    if (list.empty()) order.push_back(r.region_id);
    list.push_back(&r);
  }
  auto ring_json = [](const Ring& ring) {
    ojson a = ojson::array();
    for (const auto& p : ring) a.push_back(ojson::array({p.lon, p.lat}));
    return a;
  };
  auto polygon_json = [&](const Region& r) {
    ojson poly = ojson::array();
    for (const auto& ring : r.rings) poly.push_back(ring_json(ring));
    return poly;
  };
  ojson features = ojson::array();
  for (const auto& id : order) {
    const auto& list = parts[id];
    ojson geometry = ojson::object();
    if (list.size() == 1) {
      geometry["type"] = "Polygon";
      geometry["coordinates"] = polygon_json(*list.front());
    } else {
      geometry["type"] = "MultiPolygon";
      ojson multi = ojson::array();
      for (const Region* r : list) multi.push_back(polygon_json(*r));
      geometry["coordinates"] = multi;
    }
    const Region& r = *list.front();
    ojson props = ojson::object();
    props["region_id"] = r.region_id;
    props["name"] = r.name;
    props["continent"] = r.continent;
    props["income_group"] = to_string(r.income_group);
    props["country_iso3"] = r.country_iso3;
    features.push_back({{"type", "Feature"}, {"properties", props}, {"geometry", geometry}});
  }
  ojson doc = ojson::object();
  doc["type"] = "FeatureCollection";
  doc["features"] = features;
  return doc.dump(2) + "\n";
}

bool is_hazcell_output(const std::string& name) {
  auto starts = [&](std::string_view p) { return name.rfind(p, 0) == 0; };
  auto ends = [&](std::string_view s) { return name.size() >= s.size() && name.compare(name.size() - s.size(), s.size(), s) == 0; };
  if (name == "summary.csv" || name == "regions.geojson") return true;
  if ((starts("exposure_") || starts("regions_") || starts("report_")) && ends(".csv")) return true;
  return starts("map_") && ends(".geojson");
}

BaselineLookup baselines_from_summary(const fs::path& out_dir, std::span<const MemberTable> members) {
  const fs::path summary = out_dir / "summary.csv";
  if (fs::exists(summary)) {
    std::map<std::pair<Hazard, int>, BaselineDesignation> found;
    const std::string text = read_text_file(summary);
    bool header = true;
    for (auto line : split(text, '\n')) {
      line = trim(line);
      if (line.empty()) continue;
      if (header) {
        header = false;
        continue;
      }
      const auto f = split(line, ',');
      if (f.size() < 14 || trim(f[12]).empty()) continue;
      const Hazard h = parse_hazard(f[0]);
      const auto rp = parse_int(f[3]);
      const auto epoch = parse_int(f[13]);
      if (!rp || !epoch) throw ValidationError("malformed summary.csv row: " + std::string(line));
      found[{h, static_cast<int>(*rp)}] =
          BaselineDesignation{h, static_cast<int>(*rp), parse_pathway(f[12]), static_cast<int>(*epoch)};
    }
    return [found](Hazard h, int rp) -> std::optional<BaselineDesignation> {
      const auto it = found.find({h, rp});
      if (it == found.end()) return std::nullopt;
      return it->second;
    };
  }
  std::set<std::pair<Hazard, int>> historical;
  for (const auto& m : members) {
    if (m.scenario.pathway == Pathway::Historical) {
      historical.insert({m.scenario.hazard, m.scenario.return_period_years});
    }
  }
  return [historical](Hazard h, int rp) -> std::optional<BaselineDesignation> {
    if (!historical.contains({h, rp})) return std::nullopt;
    return BaselineDesignation{h, rp, Pathway::Historical, kHistoricalEpoch};
  };
}

}  // namespace

// ---------------------------------------------------------------------------
// Per-layer tables

std::vector<RegionRow> region_rows(const LayerResult& layer, std::span<const Asset> assets,
                                   std::span<const Region> regions) {
  std::map<std::string, std::size_t> by_id;
  std::vector<RegionRow> rows = rows_skeleton(regions, by_id);

  constexpr std::array group_by{GroupField::RegionId, GroupField::Generation};
  const auto groups = aggregate(std::span<const LayerResult>(&layer, 1), assets, regions, group_by);
  std::vector<ExactSum> region_cost(rows.size());
  for (const Aggregate& g : groups) {
    RegionRow& row = rows[by_id.at(g.key[0].text)];
    const auto gen = static_cast<std::size_t>(parse_generation(g.key[1].text));
    row.assets += g.asset_count;
    row.cell_count += g.cell_count;
    row.cells_by_generation[gen] += g.cell_count;
    row.cost_cents_by_generation[gen] = to_cents(g.damage_cost_total());
    region_cost[by_id.at(g.key[0].text)].merge(g.cost);
  }
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].cost_cents = to_cents(region_cost[i].value());

  for (const ExposureRecord& r : layer.records) {
    if (!r.exposed() || r.damage_state == DamageState::DS0_none) continue;
    const std::size_t slot = r.region >= 0 ? by_id.at(regions[static_cast<std::size_t>(r.region)].region_id)
                                           : rows.size() - 1;
    rows[slot].damage_states[static_cast<std::size_t>(r.damage_state) - 1] += 1;
  }
  return rows;
}

std::string format_exposure_csv(const LayerResult& layer, std::span<const Asset> assets,
                                std::span<const Region> regions) {
  std::string out(kExposureHeader);
  out += '\n';
  for (const ExposureRecord& r : layer.records) {
    if (!r.exposed()) continue;
    const Asset& a = assets[r.asset];
    out += csv_text(a.asset_id);
    out += ',';
    out += to_string(a.radio);
    out += ',';
    out += to_string(a.generation);
    out += ',';
    out += to_string(a.tower_design);
    out += ',' + format_number(a.lon) + ',' + format_number(a.lat) + ',';
    out += r.region >= 0 ? csv_text(regions[static_cast<std::size_t>(r.region)].region_id) : std::string(kUnassignedRegion);
    out += ',' + format_number(*r.intensity) + ',' + format_number(r.damage_fraction) + ',';
    out += to_string(r.damage_state);
    out += ',' + format_usd(r.damage_cost) + '\n';
  }
  return out;
}

std::string format_regions_csv(std::span<const RegionRow> rows) {
  std::string out(kRegionsHeader);
  out += '\n';
  for (const RegionRow& r : rows) {
    out += csv_text(r.region_id) + ',' + csv_text(r.name) + ',' + csv_text(r.continent) + ',';
    out += to_string(r.income_group);
    out += ',' + csv_text(r.country_iso3) + ',' + std::to_string(r.assets) + ',' + std::to_string(r.cell_count) + ',';
    out += format_cents(r.cost_cents);
    for (auto c : r.cells_by_generation) out += ',' + std::to_string(c);
    for (auto c : r.cost_cents_by_generation) out += ',' + format_cents(c);
    for (auto c : r.damage_states) out += ',' + std::to_string(c);
    out += '\n';
  }
  return out;
}

std::vector<RegionRow> parse_regions_csv(std::string_view csv) {
  std::vector<RegionRow> rows;
  bool header = true;
  std::size_t line_no = 0;
  for (auto line : split(csv, '\n')) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (trim(line).empty()) continue;
    if (header) {
      if (line != kRegionsHeader) throw ValidationError("regions CSV has an unexpected header");
      header = false;
      continue;
    }
    const auto f = split(line, ',');
    const std::string where = "regions CSV line " + std::to_string(line_no);
    if (f.size() != 21) throw ValidationError(where + ": expected 21 fields");
    auto integer = [&](std::string_view s) {
      const auto v = parse_int(s);
      if (!v) throw ValidationError(where + ": bad integer '" + std::string(s) + "'");
      return *v;
    };
    auto cents = [&](std::string_view s) {
      const auto v = parse_double(s);
      if (!v) throw ValidationError(where + ": bad amount '" + std::string(s) + "'");
      return to_cents(*v);
    };
    RegionRow r;
    r.region_id = std::string(f[0]);
    r.name = std::string(f[1]);
    r.continent = std::string(f[2]);
    r.income_group = parse_income_group(f[3]);
    r.country_iso3 = std::string(f[4]);
    r.assets = integer(f[5]);
    r.cell_count = integer(f[6]);
    r.cost_cents = cents(f[7]);
    for (std::size_t g = 0; g < 4; ++g) {
      r.cells_by_generation[g] = integer(f[8 + g]);
      r.cost_cents_by_generation[g] = cents(f[12 + g]);
    }
    for (std::size_t d = 0; d < 5; ++d) r.damage_states[d] = integer(f[16 + d]);
    rows.push_back(std::move(r));
  }
  if (header) throw ValidationError("regions CSV is empty");
  return rows;
}

std::vector<MemberTable> load_member_tables(const fs::path& out_dir) {
  if (!fs::is_directory(out_dir)) throw ValidationError("output directory not found: " + out_dir.string());
  std::vector<MemberTable> members;
  for (const auto& entry : fs::directory_iterator(out_dir)) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("regions_", 0) != 0 || entry.path().extension() != ".csv") continue;
    const std::string key = entry.path().stem().string().substr(std::string_view("regions_").size());
    members.push_back({parse_scenario_key(key), parse_regions_csv(read_text_file(entry.path()))});
  }
  std::sort(members.begin(), members.end(), [](const MemberTable& a, const MemberTable& b) {
    const auto& x = a.scenario;
    const auto& y = b.scenario;
    return std::tie(x.hazard, x.pathway, x.epoch, x.return_period_years, x.model_member) <
           std::tie(y.hazard, y.pathway, y.epoch, y.return_period_years, y.model_member);
  });
  return members;
}

std::string format_summary_csv(std::span<const MemberTable> members, const BaselineLookup& baselines) {
  const EnsembleTable table = build_ensembles(members, 1);
  std::string out(kSummaryHeader);
  out += '\n';
  for (const auto& [key, cells] : table) {
    const auto it = cells.find({0, "all"});
    if (it == cells.end()) continue;
    const EnsembleCell& c = it->second;
    const auto [cmin, cmax] = std::minmax_element(c.cells.begin(), c.cells.end());
    const auto [kmin, kmax] = std::minmax_element(c.cents.begin(), c.cents.end());
    out += ensemble_prefix(key);
    out += ',' + std::to_string(c.cells.size());
    out += ',' + std::to_string(half_up_mean(c.cells)) + ',' + std::to_string(*cmin) + ',' + std::to_string(*cmax);
    out += ',' + format_cents(half_up_mean(c.cents)) + ',' + format_cents(*kmin) + ',' + format_cents(*kmax);
    const BaselineMatch base = find_baseline(table, key, baselines);
    if (base.cells && base.cells->contains({0, "all"})) {
      const EnsembleCell& b = base.cells->at({0, "all"});
      out += ',' + std::string(to_string(base.designation->pathway)) + ',' + std::to_string(base.designation->epoch);
      if (base.is_self) {
        out += ",,";
      } else {
        out += ',' + pct_text(pct_change_vs_baseline(c.mean_cells(), b.mean_cells()));
        out += ',' + pct_text(pct_change_vs_baseline(c.mean_cents(), b.mean_cents()));
      }
    } else {
      out += ",,,,";
    }
    out += '\n';
  }
  return out;
}

// ---------------------------------------------------------------------------
// Commands

ValidationOutcome validate_inputs(const fs::path& manifest_path) {
  ValidationOutcome outcome;
  const Manifest m = read_manifest(manifest_path);
  const auto jobs = enumerate_jobs(m, true);
  outcome.lines.push_back("manifest " + manifest_path.string() + ": " + std::to_string(jobs.size()) + " jobs");
  LoadedInputs in = load_inputs(m);
  outcome.assets = in.assets.report;
  outcome.lines.push_back("assets " + m.resolve(m.assets).string() + ": accepted " +
                          std::to_string(in.assets.report.accepted) + ", rejected " +
                          std::to_string(in.assets.report.rejected));
  for (const auto& r : in.assets.report.rejection_reasons) {
    outcome.lines.push_back("  line " + std::to_string(r.line) + ": " + r.reason);
  }
  outcome.lines.push_back("regions " + m.resolve(m.regions).string() + ": " +
                          std::to_string(in.regions.regions().size()) + " polygons");
  for (const auto& [id, c] : in.curves) {
    outcome.lines.push_back("curve " + id + ": " + std::to_string(c.knots.size()) + " knots, " +
                            std::string(to_string(c.intensity_unit)));
  }
  for (const auto& job : jobs) {
    const HazardRaster raster = read_raster_asc(job.raster, job.units);
    const CurveSet curves = in.curve_set_for(m, job);
    for (const DamageCurve* c : curves.curves_for(job.scenario.hazard)) {
      if (c->intensity_unit != raster.units) {
        throw ValidationError("job " + scenario_key(job.scenario) + ": curve '" + c->curve_id + "' is " +
                              std::string(to_string(c->intensity_unit)) + " but raster is " +
                              std::string(to_string(raster.units)));
      }
    }
    outcome.lines.push_back("job " + scenario_key(job.scenario) + ": " + job.raster.string() + " (" +
                            std::to_string(raster.ncols) + "x" + std::to_string(raster.nrows) + ")");
  }
  return outcome;
}

AssessOutcome assess_to_directory(const Manifest& m, const fs::path& out_dir, unsigned workers) {
  const auto jobs = enumerate_jobs(m, true);
  LoadedInputs in = load_inputs(m);

  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec || !fs::is_directory(out_dir)) throw RuntimeFailure("cannot create output directory: " + out_dir.string());
  for (const auto& entry : fs::directory_iterator(out_dir)) {
    if (entry.is_regular_file() && is_hazcell_output(entry.path().filename().string())) fs::remove(entry.path());
  }

  AssessOutcome outcome;
  outcome.assets = in.assets.report;
  const auto& assets = in.assets.assets;
  const auto& regions = in.regions.regions();

  auto emit = [&](const std::string& name, const std::string& content) {
    write_text_file(out_dir / name, content);
    outcome.files.push_back(out_dir / name);
  };
  emit("regions.geojson", regions_geojson(regions));

  std::vector<MemberTable> members;
  for (const auto& job : jobs) {
    const HazardRaster raster = read_raster_asc(job.raster, job.units);
    const CurveSet curves = in.curve_set_for(m, job);
    AssessOptions options;
    options.exposure_threshold = exposure_threshold(m, job.scenario.hazard, curves);
    options.damage_states = m.damage_states;
    options.workers = workers;
    LayerResult layer{job.scenario, assess_layer(assets, raster, curves, job.scenario, in.regions, options)};
    auto rows = region_rows(layer, assets, regions);
    emit(exposure_file_name(job.scenario), format_exposure_csv(layer, assets, regions));
    emit(regions_file_name(job.scenario), format_regions_csv(rows));
    members.push_back({job.scenario, std::move(rows)});
    ++outcome.jobs;
  }
  emit("summary.csv", format_summary_csv(members, [&m](Hazard h, int rp) { return m.baseline_for(h, rp); }));
  return outcome;
}

ReportKind parse_report_kind(std::string_view s) {
  if (iequals(s, "counts")) return ReportKind::Counts;
  if (iequals(s, "costs")) return ReportKind::Costs;
  if (iequals(s, "pct_change")) return ReportKind::PctChange;
  if (iequals(s, "zonal")) return ReportKind::Zonal;
  throw ValidationError("unknown report kind '" + std::string(s) + "' (counts|costs|pct_change|zonal)");
}

std::string_view to_string(ReportKind k) {
  switch (k) {
    case ReportKind::Counts: return "counts";
    case ReportKind::Costs: return "costs";
    case ReportKind::PctChange: return "pct_change";
    case ReportKind::Zonal: return "zonal";
  }
  return "?";
}

std::string format_report_csv(ReportKind kind, std::span<const MemberTable> members, const BaselineLookup& baselines) {
  if (kind == ReportKind::Zonal) throw ValidationError("zonal reports are built from the manifest");
  const EnsembleTable table = build_ensembles(members, kDimensions.size());
  std::string out(kind == ReportKind::PctChange ? kPctHeader : kTidyHeader);
  out += '\n';
  for (const auto& [key, cells] : table) {
    const std::string prefix = ensemble_prefix(key);
    if (kind == ReportKind::PctChange) {
      const BaselineMatch base = find_baseline(table, key, baselines);
      if (!base.cells || base.is_self) continue;
      const std::string base_cols =
          std::string(to_string(base.designation->pathway)) + ',' + std::to_string(base.designation->epoch);
      for (const auto& [label, c] : cells) {
        const auto b = base.cells->find(label);
        const double base_cells = b == base.cells->end() ? 0.0 : b->second.mean_cells();
        const double base_cents = b == base.cells->end() ? 0.0 : b->second.mean_cents();
        const std::string lead = prefix + ',' + base_cols + ',' + std::string(kDimensions[label.first]) + ',' +
                                 csv_text(label.second) + ',';
        out += lead + "cell_count," + pct_text(pct_change_vs_baseline(c.mean_cells(), base_cells)) + '\n';
        out += lead + "damage_cost," + pct_text(pct_change_vs_baseline(c.mean_cents(), base_cents)) + '\n';
      }
      continue;
    }
    for (const auto& [label, c] : cells) {
      const std::string lead =
          prefix + ',' + std::string(kDimensions[label.first]) + ',' + csv_text(label.second) + ',';
      if (kind == ReportKind::Counts) {
        const auto [lo, hi] = std::minmax_element(c.cells.begin(), c.cells.end());
        out += lead + "mean," + std::to_string(half_up_mean(c.cells)) + '\n';
        out += lead + "min," + std::to_string(*lo) + '\n';
        out += lead + "max," + std::to_string(*hi) + '\n';
      } else {
        const auto [lo, hi] = std::minmax_element(c.cents.begin(), c.cents.end());
        out += lead + "mean," + format_cents(half_up_mean(c.cents)) + '\n';
        out += lead + "min," + format_cents(*lo) + '\n';
        out += lead + "max," + format_cents(*hi) + '\n';
      }
    }
  }
  return out;
}

std::string format_zonal_csv(const Manifest& m) {
  const auto jobs = enumerate_jobs(m, true);
  LoadedInputs in = load_inputs(m);
  std::map<std::string, std::vector<Region>> by_id;
  for (const auto& r : in.regions.regions()) by_id[r.region_id].push_back(r);

  std::string out(kZonalHeader);
  out += '\n';
  for (const auto& job : jobs) {
    const HazardRaster raster = read_raster_asc(job.raster, job.units);
    const double threshold = exposure_threshold(m, job.scenario.hazard, in.curve_set_for(m, job));
    const Scenario& s = job.scenario;
    for (const auto& [id, parts] : by_id) {
      const ZonalStats z = zonal_stats(raster, parts, threshold);
      out += std::string(to_string(s.hazard)) + ',' + std::string(to_string(s.pathway)) + ',' +
             std::to_string(s.epoch) + ',' + std::to_string(s.return_period_years) + ',' + s.model_member + ',';
      out += csv_text(id) + ',' + csv_text(parts.front().continent) + ',' + format_number(threshold) + ',';
      out += std::to_string(z.flooded_pixels) + ',';
      if (z.mean_intensity) out += format_number(*z.mean_intensity);
      out += '\n';
    }
  }
  return out;
}

fs::path write_report(const fs::path& out_dir, ReportKind kind, const Manifest* manifest) {
  std::string content;
  if (kind == ReportKind::Zonal) {
    if (!manifest) throw ValidationError("the zonal report needs --manifest");
    content = format_zonal_csv(*manifest);
    std::error_code ec;
    fs::create_directories(out_dir, ec);
  } else {
    const auto members = load_member_tables(out_dir);
    content = format_report_csv(kind, members, baselines_from_summary(out_dir, members));
  }
  const fs::path path = out_dir / ("report_" + std::string(to_string(kind)) + ".csv");
  write_text_file(path, content);
  return path;
}

fs::path export_geojson(const fs::path& out_dir, const std::string& key) {
  const fs::path table = out_dir / ("regions_" + key + ".csv");
  if (!fs::exists(table)) {
    std::vector<std::string> keys;
    if (fs::is_directory(out_dir)) {
      for (const auto& e : fs::directory_iterator(out_dir)) {
        const std::string name = e.path().filename().string();
        if (name.rfind("regions_", 0) == 0 && e.path().extension() == ".csv") {
          keys.push_back(e.path().stem().string().substr(8));
        }
      }
    }
    std::sort(keys.begin(), keys.end());
    std::string valid;
    for (const auto& k : keys) valid += (valid.empty() ? "" : ", ") + k;
    throw ValidationError("unknown scenario key '" + key + "'; valid keys: " + (valid.empty() ? "(none)" : valid));
  }
  const auto rows = parse_regions_csv(read_text_file(table));
  std::map<std::string, const RegionRow*> row_by_id;
  for (const auto& r : rows) row_by_id[r.region_id] = &r;

  const auto regions = read_regions(out_dir / "regions.geojson");
  std::vector<std::string> order;
  std::map<std::string, std::vector<const Region*>> parts;
  for (const auto& r : regions) {
    auto& list = parts[r.region_id];
    if (list.empty()) order.push_back(r.region_id);
    list.push_back(&r);
  }

  ojson features = ojson::array();
  for (const auto& id : order) {
    const auto& list = parts[id];
    auto polygon = [](const Region& r) {
      ojson poly = ojson::array();
      for (const auto& ring : r.rings) {
        ojson a = ojson::array();
        for (const auto& p : ring) a.push_back(ojson::array({p.lon, p.lat}));
        poly.push_back(a);
      }
      return poly;
    };
    ojson geometry = ojson::object();
    if (list.size() == 1) {
      geometry["type"] = "Polygon";
      geometry["coordinates"] = polygon(*list.front());
    } else {
      geometry["type"] = "MultiPolygon";
      ojson multi = ojson::array();
      for (const Region* r : list) multi.push_back(polygon(*r));
      geometry["coordinates"] = multi;
    }
    const auto it = row_by_id.find(id);
    const std::int64_t cells = it == row_by_id.end() ? 0 : it->second->cell_count;
    const std::int64_t cents = it == row_by_id.end() ? 0 : it->second->cost_cents;
    ojson props = ojson::object();
    props["region_id"] = id;
    props["name"] = list.front()->name;
    props["cell_count"] = cells;
    props["damage_cost_total"] = static_cast<double>(cents) / 100.0;
    features.push_back({{"type", "Feature"}, {"properties", props}, {"geometry", geometry}});
  }
  ojson doc = ojson::object();
  doc["type"] = "FeatureCollection";
  doc["features"] = features;
  const fs::path path = out_dir / ("map_" + key + ".geojson");
  write_text_file(path, doc.dump(2) + "\n");
  return path;
}

}  // namespace hazcell
