#include "hazcell/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <set>
#include <thread>
#include <tuple>

#include <json.hpp>

#include "hazcell/text.hpp"

namespace hazcell {

namespace fs = std::filesystem;
using ojson = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Manifest

std::optional<BaselineDesignation> Manifest::baseline_for(Hazard hazard, int return_period_years) const {
  for (const auto& b : baselines) {
    if (b.hazard == hazard && b.return_period_years == return_period_years) return b;
  }
  for (const auto& j : jobs) {
    if (j.scenario.hazard == hazard && j.scenario.return_period_years == return_period_years &&
        j.scenario.pathway == Pathway::Historical) {
      return BaselineDesignation{hazard, return_period_years, Pathway::Historical, kHistoricalEpoch};
    }
  }
  return std::nullopt;
}

namespace {

template <typename T>
T required(const ojson& obj, const char* key, const std::string& where) {
  if (!obj.is_object() || !obj.contains(key)) throw ValidationError(where + ": missing '" + key + "'");
  try {
    return obj.at(key).get<T>();
  } catch (const ojson::exception&) {
    throw ValidationError(where + ": '" + key + "' has the wrong type");
  }
}

std::string path_string(const fs::path& p) { return p.generic_string(); }

}  // namespace

Manifest parse_manifest(std::string_view json_text, fs::path base_dir) {
  ojson doc;
  try {
    doc = ojson::parse(json_text);
  } catch (const ojson::parse_error& e) {
    throw ValidationError(std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ValidationError("manifest must be a JSON object");
  const std::string top = "manifest";

  Manifest m;
  m.base_dir = std::move(base_dir);
  m.assets = required<std::string>(doc, "assets", top);
  m.regions = required<std::string>(doc, "regions", top);
  if (doc.contains("country_attributes")) m.country_attributes = required<std::string>(doc, "country_attributes", top);
  if (doc.contains("unit_cost")) m.costs.default_unit_cost = required<double>(doc, "unit_cost", top);
  if (!(m.costs.default_unit_cost >= 0.0)) throw ValidationError("manifest: unit_cost must be >= 0");
  m.costs.default_unit_cost = round_to_cents(m.costs.default_unit_cost);
  if (doc.contains("unit_cost_by_generation")) {
    const auto& obj = doc["unit_cost_by_generation"];
    if (!obj.is_object()) throw ValidationError("manifest: unit_cost_by_generation must be an object");
    for (const auto& [gen, cost] : obj.items()) {
      if (!cost.is_number() || !(cost.get<double>() >= 0.0)) {
        throw ValidationError("manifest: unit_cost_by_generation." + gen + " must be a nonnegative number");
      }
      m.costs.per_generation[parse_generation(gen)] = round_to_cents(cost.get<double>());
    }
  }

  try {
    for (const auto& c : doc.value("curves", ojson::array())) {
      m.curves.push_back({required<std::string>(c, "curve_id", "curve"), required<std::string>(c, "path", "curve")});
    }
    for (const auto& t : doc.value("tower_curves", ojson::array())) {
      m.tower_curves.push_back({parse_hazard(required<std::string>(t, "hazard", "tower_curve")),
                                parse_tower_design(required<std::string>(t, "tower_design", "tower_curve")),
                                required<std::string>(t, "curve_id", "tower_curve")});
    }
    const ojson thresholds = doc.value("exposure_thresholds", ojson::object());
    if (!thresholds.is_object()) throw ValidationError("manifest: exposure_thresholds must be an object");
    for (const auto& [hazard, value] : thresholds.items()) {
      if (!value.is_number() || !(value.get<double>() >= 0.0)) {
        throw ValidationError("manifest: exposure_thresholds." + hazard + " must be a nonnegative number");
      }
      m.exposure_thresholds[parse_hazard(hazard)] = value.get<double>();
    }
    if (doc.contains("damage_state_thresholds")) {
      const auto t = required<std::vector<double>>(doc, "damage_state_thresholds", top);
      if (t.size() != 4) throw ValidationError("manifest: damage_state_thresholds needs 4 values");
      std::copy(t.begin(), t.end(), m.damage_states.upper.begin());
      m.damage_states.validate();
    }
    if (doc.contains("output_dir")) m.output_dir = required<std::string>(doc, "output_dir", top);

    std::set<Scenario> seen;
    std::size_t n = 0;
    for (const auto& j : doc.value("jobs", ojson::array())) {
      const std::string where = "job " + std::to_string(n++);
      LayerJob job;
      job.scenario.hazard = parse_hazard(required<std::string>(j, "hazard", where));
      job.scenario.pathway = parse_pathway(required<std::string>(j, "pathway", where));
      job.scenario.epoch = required<int>(j, "epoch", where);
      job.scenario.return_period_years = required<int>(j, "return_period_years", where);
      job.scenario.model_member = required<std::string>(j, "model_member", where);
      job.scenario = validate_scenario(job.scenario);
      job.raster = required<std::string>(j, "raster", where);
      job.units = parse_intensity_unit(required<std::string>(j, "units", where));
      job.curve_id = required<std::string>(j, "curve_id", where);
      if (!seen.insert(job.scenario).second) {
        throw ValidationError(where + ": duplicate scenario " + scenario_key(job.scenario));
      }
      m.jobs.push_back(std::move(job));
    }
    for (const auto& b : doc.value("baselines", ojson::array())) {
      BaselineDesignation d;
      d.hazard = parse_hazard(required<std::string>(b, "hazard", "baseline"));
      d.return_period_years = required<int>(b, "return_period_years", "baseline");
      d.pathway = parse_pathway(required<std::string>(b, "pathway", "baseline"));
      d.epoch = required<int>(b, "epoch", "baseline");
      m.baselines.push_back(d);
    }
  } catch (const ojson::exception& e) {
    throw ValidationError(std::string("manifest: ") + e.what());
  }
  return m;
}

Manifest read_manifest(const fs::path& path) {
  if (!fs::exists(path)) throw ValidationError("manifest not found: " + path.string());
  try {
    return parse_manifest(read_text_file(path), path.parent_path());
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::string format_manifest(const Manifest& m) {
  ojson doc = ojson::object();
  doc["assets"] = path_string(m.assets);
  doc["regions"] = path_string(m.regions);
  if (m.country_attributes) doc["country_attributes"] = path_string(*m.country_attributes);
  doc["unit_cost"] = m.costs.default_unit_cost;
  ojson by_gen = ojson::object();
  for (const auto& [g, c] : m.costs.per_generation) by_gen[std::string(to_string(g))] = c;
  doc["unit_cost_by_generation"] = by_gen;
  ojson curves = ojson::array();
  for (const auto& c : m.curves) curves.push_back({{"curve_id", c.curve_id}, {"path", path_string(c.path)}});
  doc["curves"] = curves;
  ojson towers = ojson::array();
  for (const auto& t : m.tower_curves) {
    towers.push_back({{"hazard", to_string(t.hazard)}, {"tower_design", to_string(t.tower_design)}, {"curve_id", t.curve_id}});
  }
  doc["tower_curves"] = towers;
  ojson thresholds = ojson::object();
  for (const auto& [h, v] : m.exposure_thresholds) thresholds[std::string(to_string(h))] = v;
  doc["exposure_thresholds"] = thresholds;
  doc["damage_state_thresholds"] = m.damage_states.upper;
  doc["output_dir"] = path_string(m.output_dir);
  ojson jobs = ojson::array();
  for (const auto& j : m.jobs) {
    ojson o = ojson::object();
    o["hazard"] = to_string(j.scenario.hazard);
    o["pathway"] = to_string(j.scenario.pathway);
    o["epoch"] = j.scenario.epoch;
    o["return_period_years"] = j.scenario.return_period_years;
    o["model_member"] = j.scenario.model_member;
    o["raster"] = path_string(j.raster);
    o["units"] = to_string(j.units);
    o["curve_id"] = j.curve_id;
    jobs.push_back(std::move(o));
  }
  doc["jobs"] = jobs;
  ojson baselines = ojson::array();
  for (const auto& b : m.baselines) {
    ojson o = ojson::object();
    o["hazard"] = to_string(b.hazard);
    o["return_period_years"] = b.return_period_years;
    o["pathway"] = to_string(b.pathway);
    o["epoch"] = b.epoch;
    baselines.push_back(std::move(o));
  }
  doc["baselines"] = baselines;
  return doc.dump(2) + "\n";
}

std::vector<ResolvedJob> enumerate_jobs(const Manifest& m, bool check_files) {
  std::set<std::string> curve_ids;
  for (const auto& c : m.curves) {
    if (!curve_ids.insert(c.curve_id).second) throw ValidationError("duplicate curve_id '" + c.curve_id + "'");
  }
  for (const auto& t : m.tower_curves) {
    if (!curve_ids.contains(t.curve_id)) throw ValidationError("tower curve references unknown curve_id '" + t.curve_id + "'");
  }
  std::vector<ResolvedJob> out;
  std::set<Scenario> seen;
  for (const auto& j : m.jobs) {
    const Scenario s = validate_scenario(j.scenario);
    if (!seen.insert(s).second) throw ValidationError("duplicate scenario " + scenario_key(s));
    if (!curve_ids.contains(j.curve_id)) {
      throw ValidationError("job " + scenario_key(s) + " references unknown curve_id '" + j.curve_id + "'");
    }
    const fs::path raster = m.resolve(j.raster);
    if (check_files && !fs::exists(raster)) {
      throw ValidationError("job " + scenario_key(s) + ": raster not found: " + raster.string());
    }
    out.push_back({s, raster, j.units, j.curve_id});
  }
  std::sort(out.begin(), out.end(), [](const ResolvedJob& a, const ResolvedJob& b) {
    const auto& x = a.scenario;
    const auto& y = b.scenario;
    return std::tie(x.hazard, x.pathway, x.epoch, x.return_period_years, x.model_member) <
           std::tie(y.hazard, y.pathway, y.epoch, y.return_period_years, y.model_member);
  });
  return out;
}

double exposure_threshold(const Manifest& m, Hazard hazard, const CurveSet& curves) {
  if (const auto it = m.exposure_thresholds.find(hazard); it != m.exposure_thresholds.end()) return it->second;
  if (hazard != Hazard::Cyclone || !curves.has_default(hazard)) return 0.0;
  const auto& knots = curves.select(hazard, TowerDesign::Unknown).knots;
  for (const auto& k : knots) {
    if (k.fraction > 0.0) return k.intensity;
  }
  return knots.back().intensity;
}

// ---------------------------------------------------------------------------
// Inputs

CurveSet LoadedInputs::curve_set_for(const Manifest& m, const ResolvedJob& job) const {
  CurveSet set;
  set.set_default(job.scenario.hazard, curves.at(job.curve_id));
  for (const auto& t : m.tower_curves) {
    if (t.hazard == job.scenario.hazard) set.add(t.hazard, t.tower_design, curves.at(t.curve_id));
  }
  return set;
}

LoadedInputs load_inputs(const Manifest& m) {
  LoadedInputs in;
  in.assets = read_assets(m.resolve(m.assets), m.costs);
  auto regions = read_regions(m.resolve(m.regions));
  if (m.country_attributes) apply_country_attributes(regions, read_country_attributes(m.resolve(*m.country_attributes)));
  in.regions = RegionIndex(std::move(regions));
  for (const auto& c : m.curves) in.curves.emplace(c.curve_id, read_curve(m.resolve(c.path), c.curve_id));
  return in;
}

// ---------------------------------------------------------------------------
// Assessment

unsigned resolve_workers(unsigned requested) noexcept {
  if (requested != 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ExposureRecord> assess_layer(std::span<const Asset> assets, const HazardRaster& raster,
                                         const CurveSet& curves, const Scenario& scenario,
                                         const RegionIndex& regions, const AssessOptions& options) {
  const Hazard hazard = scenario.hazard;
  const auto hazard_curves = curves.curves_for(hazard);
  if (hazard_curves.empty()) {
    throw ValidationError("no damage curve registered for hazard " + std::string(to_string(hazard)));
  }
  for (const DamageCurve* c : hazard_curves) {
    if (c->intensity_unit != raster.units) {
      throw ValidationError("unit mismatch for " + scenario_key(scenario) + ": curve '" + c->curve_id + "' is " +
                            std::string(to_string(c->intensity_unit)) + ", raster is " +
                            std::string(to_string(raster.units)));
    }
  }

  std::vector<ExposureRecord> records(assets.size());
  auto run_range = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const Asset& a = assets[i];
      ExposureRecord& rec = records[i];
      rec.asset = i;
      rec.region = regions.assign(a.lon, a.lat);
      const auto v = sample(raster, a.lon, a.lat);
      if (!v || !(*v > options.exposure_threshold)) continue;
      const DamageCurve& curve = curves.select(hazard, a.tower_design);
      rec.intensity = v;
      rec.damage_fraction = damage_fraction(curve, *v);
      rec.damage_cost = damage_cost(rec.damage_fraction, a.unit_cost);
      rec.damage_state = classify_damage_state(rec.damage_fraction, options.damage_states);
    }
  };

  constexpr std::size_t kChunk = 1u << 14;
  const std::size_t chunks = (assets.size() + kChunk - 1) / kChunk;
  const unsigned workers = std::min<std::size_t>(resolve_workers(options.workers), std::max<std::size_t>(chunks, 1));
  if (workers <= 1) {
    run_range(0, assets.size());
    return records;
  }
  std::atomic<std::size_t> next{0};
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t c = next.fetch_add(1); c < chunks; c = next.fetch_add(1)) {
          run_range(c * kChunk, std::min(assets.size(), (c + 1) * kChunk));
        }
      });
    }
  }
  return records;
}

std::vector<ExposureRecord> assess_layer(std::span<const Asset> assets, const HazardRaster& raster,
                                         const DamageCurve& curve, const Scenario& scenario,
                                         const RegionIndex& regions, const AssessOptions& options) {
  CurveSet set;
  set.set_default(scenario.hazard, curve);
  return assess_layer(assets, raster, set, scenario, regions, options);
}

// ---------------------------------------------------------------------------
// Aggregation

std::vector<Aggregate> aggregate(std::span<const LayerResult> layers, std::span<const Asset> assets,
                                 std::span<const Region> regions, std::span<const GroupField> group_by) {
  bool by_layer = false, by_region = false, by_generation = false;
  for (GroupField f : group_by) {
    switch (f) {
      case GroupField::RegionId:
      case GroupField::Continent:
      case GroupField::IncomeGroup: by_region = true; break;
      case GroupField::Generation: by_generation = true; break;
      default: by_layer = true; break;
    }
  }

  // Partial groups keyed by the (layer, region slot, generation) that determine the full key.
  using Signature = std::tuple<std::size_t, RegionSlot, int>;
  std::map<Signature, Aggregate> partial;
  for (std::size_t li = 0; li < layers.size(); ++li) {
    for (const ExposureRecord& r : layers[li].records) {
      const Signature sig{by_layer ? li : 0, by_region ? r.region : 0,
                          by_generation ? static_cast<int>(assets[r.asset].generation) : 0};
      Aggregate& g = partial[sig];
      ++g.asset_count;
      if (r.exposed()) {
        ++g.cell_count;
        g.cost.add(r.damage_cost);
      }
    }
  }

  std::map<std::vector<KeyPart>, Aggregate> groups;
  for (auto& [sig, part] : partial) {
    const auto& [li, slot, gen] = sig;
    const Region* region = slot >= 0 ? &regions[static_cast<std::size_t>(slot)] : nullptr;
    const Scenario* s = layers.empty() ? nullptr : &layers[li].scenario;
    std::vector<KeyPart> key;
    for (GroupField f : group_by) {
      switch (f) {
        case GroupField::RegionId: key.push_back({0, region ? region->region_id : std::string(kUnassignedRegion)}); break;
        case GroupField::Continent: key.push_back({0, region ? region->continent : "unknown"}); break;
        case GroupField::IncomeGroup:
          key.push_back({0, std::string(to_string(region ? region->income_group : IncomeGroup::Unknown))});
          break;
        case GroupField::Generation: key.push_back({0, std::string(to_string(static_cast<Generation>(gen)))}); break;
        case GroupField::Hazard: key.push_back({0, std::string(to_string(s->hazard))}); break;
        case GroupField::Pathway: key.push_back({0, std::string(to_string(s->pathway))}); break;
        case GroupField::Epoch: key.push_back({s->epoch, {}}); break;
        case GroupField::ReturnPeriod: key.push_back({s->return_period_years, {}}); break;
        case GroupField::ModelMember: key.push_back({0, s->model_member}); break;
      }
    }
    Aggregate& g = groups[key];
    g.key = key;
    g.asset_count += part.asset_count;
    g.cell_count += part.cell_count;
    g.cost.merge(part.cost);
  }

  std::vector<Aggregate> out;
  out.reserve(groups.size());
  for (auto& [key, g] : groups) out.push_back(std::move(g));
  return out;
}

EnsembleStats ensemble_stats(std::span<const double> member_values) {
  if (member_values.empty()) throw ValidationError("ensemble statistics need at least one member");
  ExactSum sum;
  EnsembleStats st{0.0, member_values.front(), member_values.front()};
  for (double v : member_values) {
    sum.add(v);
    st.min = std::min(st.min, v);
    st.max = std::max(st.max, v);
  }
  st.mean = sum.value() / static_cast<double>(member_values.size());
  // Division rounding can step just outside [min, max] for near-constant ensembles.
  st.mean = std::clamp(st.mean, st.min, st.max);
  return st;
}

std::int64_t ensemble_count_mean(std::span<const std::int64_t> member_counts) {
  if (member_counts.empty()) throw ValidationError("ensemble statistics need at least one member");
  std::int64_t sum = 0;
  for (auto c : member_counts) sum += c;
  const auto n = static_cast<std::int64_t>(member_counts.size());
  // floor(sum / n + 1/2) for nonnegative counts
  return (2 * sum + n) / (2 * n);
}

std::optional<std::int64_t> pct_change_vs_baseline(double future, double baseline) noexcept {
  if (!(baseline > 0.0) || !std::isfinite(future)) return std::nullopt;
  return std::llround((future / baseline - 1.0) * 100.0);
}

}  // namespace hazcell
