#include <doctest.h>

#include <filesystem>
#include <random>

#include "generators.hpp"
#include "hazcell/engine.hpp"
#include "hazcell/text.hpp"

using namespace hazcell;
namespace fs = std::filesystem;

namespace {

const fs::path kData = HAZCELL_DATA_DIR;

DamageCurve flood_curve() { return read_curve(kData / "curves" / "flood_default.csv"); }

std::string riverine_manifest(int members, bool duplicate = false) {
  std::string jobs;
  for (int rp : {10, 100, 250, 1000}) {
    for (int m = 0; m < members; ++m) {
      if (!jobs.empty()) jobs += ",";
      jobs += R"({"hazard":"riverine","pathway":"RCP8.5","epoch":2050,"return_period_years":)" + std::to_string(rp) +
              R"(,"model_member":")" + std::string(kRiverineModels[static_cast<std::size_t>(m)]) +
              R"(","raster":"r.asc","units":"meters_depth","curve_id":"flood"})";
    }
  }
  if (duplicate) {
    jobs += R"(,{"hazard":"riverine","pathway":"RCP8.5","epoch":2050,"return_period_years":10,"model_member":"gfdl-esm2m","raster":"x.asc","units":"meters_depth","curve_id":"flood"})";
  }
  return R"({"assets":"a.csv","regions":"r.geojson","curves":[{"curve_id":"flood","path":"f.csv"}],"jobs":[)" + jobs +
         "]}";
}

}  // namespace

TEST_CASE("job enumeration") {
  const auto jobs = enumerate_jobs(parse_manifest(riverine_manifest(5)), false);
  CHECK(jobs.size() == 20);
  for (std::size_t i = 1; i < jobs.size(); ++i) {
    const auto& a = jobs[i - 1].scenario;
    const auto& b = jobs[i].scenario;
    CHECK(std::tie(a.hazard, a.pathway, a.epoch, a.return_period_years, a.model_member) <
          std::tie(b.hazard, b.pathway, b.epoch, b.return_period_years, b.model_member));
  }
  CHECK(jobs.front().scenario.return_period_years == 10);
  CHECK(jobs.front().scenario.model_member == "GFDL-ESM2M");
  CHECK_THROWS_AS(parse_manifest(riverine_manifest(5, true)), ValidationError);
  CHECK(enumerate_jobs(parse_manifest(R"({"assets":"a","regions":"r"})"), true).empty());
}

TEST_CASE("dangling manifest references") {
  auto m = parse_manifest(riverine_manifest(1), "/nonexistent");
  try {
    enumerate_jobs(m, true);
    FAIL("expected an error");
  } catch (const ValidationError& e) {
    CHECK(std::string(e.what()).find("/nonexistent/r.asc") != std::string::npos);
  }
  m.jobs[0].curve_id = "nope";
  CHECK_THROWS_AS(enumerate_jobs(m, false), ValidationError);
  CHECK_THROWS_AS(parse_manifest("{"), ValidationError);
  CHECK_THROWS_AS(parse_manifest(R"({"regions":"r"})"), ValidationError);
  CHECK_THROWS_AS(parse_manifest(R"({"assets":"a","regions":"r","jobs":[{"hazard":"riverine"}]})"), ValidationError);
}

TEST_CASE("manifest round-trip") {
  const std::string text = R"({"assets":"a.csv","regions":"r.geojson","country_attributes":"c.csv","unit_cost":100000,
    "unit_cost_by_generation":{"5G":50000.004},"curves":[{"curve_id":"wind","path":"w.csv"}],
    "tower_curves":[{"hazard":"cyclone","tower_design":"guyed","curve_id":"wind"}],
    "exposure_thresholds":{"cyclone":100},"damage_state_thresholds":[0.2,0.3,0.6,0.95],"output_dir":"o",
    "jobs":[{"hazard":"cyclone","pathway":"historical","epoch":1980,"return_period_years":10,"model_member":"Baseline",
             "raster":"c.asc","units":"kmh_wind","curve_id":"wind"}],
    "baselines":[{"hazard":"cyclone","return_period_years":10,"pathway":"historical","epoch":1980}]})";
  const Manifest m = parse_manifest(text);
  CHECK(m.costs.per_generation.at(Generation::G5) == 50000.0);
  CHECK(m.jobs[0].scenario.model_member == "baseline");
  const std::string once = format_manifest(m);
  CHECK(format_manifest(parse_manifest(once)) == once);
}

TEST_CASE("baseline designation") {
  Manifest m = parse_manifest(riverine_manifest(1));
  CHECK_FALSE(m.baseline_for(Hazard::Riverine, 100).has_value());
  LayerJob hist = m.jobs[0];
  hist.scenario = validate_scenario({Hazard::Riverine, Pathway::Historical, 1980, 100, "baseline"});
  m.jobs.push_back(hist);
  CHECK(m.baseline_for(Hazard::Riverine, 100) ==
        BaselineDesignation{Hazard::Riverine, 100, Pathway::Historical, 1980});
  CHECK_FALSE(m.baseline_for(Hazard::Riverine, 10).has_value());
  m.baselines.push_back({Hazard::Riverine, 10, Pathway::RCP45, 2030});
  CHECK(m.baseline_for(Hazard::Riverine, 10)->pathway == Pathway::RCP45);
}

TEST_CASE("exposure thresholds") {
  Manifest m;
  CurveSet curves;
  curves.set_default(Hazard::Cyclone, read_curve(kData / "curves" / "wind_default.csv"));
  curves.set_default(Hazard::Riverine, flood_curve());
  CHECK(exposure_threshold(m, Hazard::Riverine, curves) == 0.0);
  CHECK(exposure_threshold(m, Hazard::Cyclone, curves) == 128.7);
  m.exposure_thresholds[Hazard::Cyclone] = 90.0;
  CHECK(exposure_threshold(m, Hazard::Cyclone, curves) == 90.0);
}

TEST_CASE("assess_layer examples") {
  const HazardRaster r{2, 1, 0, 0, 1, -9999, {0.6, 0.0}, IntensityUnit::MetersDepth};
  const std::vector<Asset> assets{make_asset("in", 0.5, 0.5, Radio::LTE), make_asset("out", 5, 5, Radio::GSM),
                                  make_asset("dry", 1.5, 0.5, Radio::NR)};
  Region whole;
  whole.region_id = "W";
  whole.rings = {{{0, 0}, {2, 0}, {2, 1}, {0, 1}, {0, 0}}};
  const RegionIndex index({whole});
  const Scenario s{Hazard::Riverine, Pathway::RCP85, 2050, 100, "GFDL-ESM2M"};
  const auto recs = assess_layer(assets, r, flood_curve(), s, index);
  REQUIRE(recs.size() == 3);
  CHECK(recs[0].intensity == 0.6);
  CHECK(recs[0].damage_fraction == 0.5);
  CHECK(format_usd(recs[0].damage_cost) == "16666.50");
  CHECK(recs[0].damage_state == DamageState::DS3_generator_damage);
  CHECK(recs[0].region == 0);
  CHECK_FALSE(recs[1].exposed());
  CHECK(recs[1].damage_cost == 0.0);
  CHECK(recs[1].region == kUnassigned);
  CHECK_FALSE(recs[2].exposed());

  auto wind = r;
  wind.units = IntensityUnit::KmhWind;
  CHECK_THROWS_AS(assess_layer(assets, wind, flood_curve(), s, index), ValidationError);
}

TEST_CASE("assess_layer equals the straight-line oracle, for any worker count") {
  std::mt19937_64 rng(91);
  for (int trial = 0; trial < 100; ++trial) {
    const auto r = gen::raster(rng);
    const auto c = gen::curve(rng);
    const auto regions = gen::regions(rng, r);
    const auto assets = gen::assets(rng, r);
    const RegionIndex index(regions);
    const Scenario s{Hazard::Riverine, Pathway::RCP45, 2030, 10, "NorESM1-M"};
    const auto want = oracle::records(assets, r, c, regions);
    CHECK(assess_layer(assets, r, c, s, index) == want);
    AssessOptions opts;
    opts.workers = 3;
    CHECK(assess_layer(assets, r, c, s, index, opts) == want);
  }
}

TEST_CASE("aggregate examples") {
  const std::vector<Asset> assets{make_asset("a", 0, 0, Radio::LTE), make_asset("b", 0, 0, Radio::LTE),
                                  make_asset("c", 0, 0, Radio::LTE), make_asset("d", 0, 0, Radio::LTE)};
  LayerResult layer;
  layer.scenario = {Hazard::Riverine, Pathway::RCP85, 2050, 100, "GFDL-ESM2M"};
  for (std::size_t i = 0; i < 3; ++i) {
    ExposureRecord r;
    r.asset = i;
    r.intensity = 1.0;
    r.damage_cost = 10.0 * static_cast<double>(i + 1);
    layer.records.push_back(r);
  }
  ExposureRecord dry;
  dry.asset = 3;
  layer.records.push_back(dry);
  const std::array by{GroupField::Generation};
  const auto groups = aggregate(std::span(&layer, 1), assets, {}, by);
  REQUIRE(groups.size() == 1);
  CHECK(groups[0].cell_count == 3);
  CHECK(groups[0].asset_count == 4);
  CHECK(groups[0].damage_cost_total() == 60.0);
  CHECK(groups[0].key[0].text == "4G");
}

TEST_CASE("grouped totals equal the ungrouped total") {
  std::mt19937_64 rng(101);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = gen::raster(rng);
    const auto regions = gen::regions(rng, r);
    const auto assets = gen::assets(rng, r, 400);
    const RegionIndex index(regions);
    std::vector<LayerResult> layers;
    for (const char* m : {"GFDL-ESM2M", "HadGEM2-ES"}) {
      const Scenario s{Hazard::Riverine, Pathway::RCP85, 2080, 250, m};
      layers.push_back({s, assess_layer(assets, r, gen::curve(rng), s, index)});
    }
    std::vector<double> all;
    std::int64_t cells = 0;
    for (const auto& l : layers) {
      for (const auto& rec : l.records) {
        if (rec.exposed()) {
          all.push_back(rec.damage_cost);
          ++cells;
        }
      }
    }
    const double total = oracle::fsum(all);
    for (auto fields : std::vector<std::vector<GroupField>>{{},
                                                            {GroupField::RegionId},
                                                            {GroupField::Continent, GroupField::Generation},
                                                            {GroupField::ModelMember, GroupField::IncomeGroup},
                                                            {GroupField::ReturnPeriod, GroupField::Epoch}}) {
      const auto groups = aggregate(layers, assets, regions, fields);
      ExactSum sum;
      std::int64_t n = 0;
      for (const auto& g : groups) {
        sum.merge(g.cost);
        n += g.cell_count;
        CHECK(g.cell_count <= g.asset_count);
      }
      CHECK(sum.value() == total);
      CHECK(n == cells);
    }
    // Region/generation groups against the oracle grouping.
    const std::array by{GroupField::RegionId, GroupField::Generation};
    const auto groups = aggregate(std::span(layers.data(), 1), assets, regions, by);
    const auto want = oracle::groups(layers[0].records, assets, regions);
    REQUIRE(groups.size() == want.size());
    for (const auto& g : groups) {
      const auto& o = want.at({g.key[0].text, g.key[1].text});
      CHECK(g.asset_count == o.assets);
      CHECK(g.cell_count == o.cells);
      CHECK(g.damage_cost_total() == o.total());
    }
  }
}

TEST_CASE("ensemble statistics") {
  const std::vector<double> flat{3, 3, 3, 3, 3};
  CHECK(ensemble_stats(flat) == EnsembleStats{3, 3, 3});
  const std::vector<double> ramp{1, 2, 3, 4, 5};
  CHECK(ensemble_stats(ramp) == EnsembleStats{3, 1, 5});
  CHECK_THROWS_AS(ensemble_stats(std::vector<double>{}), ValidationError);
  const std::vector<std::int64_t> counts{1, 2};
  CHECK(ensemble_count_mean(counts) == 2);
  const std::vector<std::int64_t> counts2{1, 1, 2};
  CHECK(ensemble_count_mean(counts2) == 1);
  CHECK_THROWS_AS(ensemble_count_mean(std::vector<std::int64_t>{}), ValidationError);

  std::mt19937_64 rng(111);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(static_cast<std::size_t>(gen::integer(rng, 1, 9)));
    for (auto& x : v) x = std::round(gen::uniform(rng, 0, 1e9)) / 100;
    const auto got = ensemble_stats(v);
    const auto want = oracle::ensemble(v);
    CHECK(got.mean == want.mean);
    CHECK(got.min == want.min);
    CHECK(got.max == want.max);
    CHECK(got.min <= got.mean);
    CHECK(got.mean <= got.max);
  }
}

TEST_CASE("percent change") {
  CHECK(pct_change_vs_baseline(87.8, 52.2) == 68);
  CHECK(pct_change_vs_baseline(79.9, 52.2) == 53);
  CHECK(pct_change_vs_baseline(109.9, 64.5) == 70);
  CHECK(pct_change_vs_baseline(1.01, 0.70) == 44);
  CHECK(pct_change_vs_baseline(5.0, 5.0) == 0);
  CHECK(pct_change_vs_baseline(0.0, 5.0) == -100);
  CHECK(pct_change_vs_baseline(1.0, 0.8) == 25);
  CHECK(pct_change_vs_baseline(0.995, 1.0) == -1);  // half away from zero
  CHECK_FALSE(pct_change_vs_baseline(3.0, 0.0).has_value());
}

TEST_CASE("raising the hazard never lowers any group") {
  std::mt19937_64 rng(121);
  for (int trial = 0; trial < 30; ++trial) {
    const auto r = gen::raster(rng);
    auto higher = r;
    for (auto& v : higher.values) {
      if (v == r.nodata) {
        if (gen::uniform(rng, 0, 1) < 0.5) v = gen::uniform(rng, 0, 8);
      } else {
        v += gen::uniform(rng, 0, 1) < 0.5 ? 0.0 : gen::uniform(rng, 0, 2);
      }
    }
    const auto c = gen::curve(rng);
    const auto regions = gen::regions(rng, r);
    const auto assets = gen::assets(rng, r);
    const RegionIndex index(regions);
    const Scenario s{Hazard::Riverine, Pathway::RCP45, 2030, 10, "NorESM1-M"};
    const std::array by{GroupField::RegionId, GroupField::Generation};
    const LayerResult lo{s, assess_layer(assets, r, c, s, index)};
    const LayerResult hi{s, assess_layer(assets, higher, c, s, index)};
    const auto glo = aggregate(std::span(&lo, 1), assets, regions, by);
    const auto ghi = aggregate(std::span(&hi, 1), assets, regions, by);
    REQUIRE(glo.size() == ghi.size());
    for (std::size_t i = 0; i < glo.size(); ++i) {
      CHECK(ghi[i].cell_count >= glo[i].cell_count);
      CHECK(ghi[i].damage_cost_total() >= glo[i].damage_cost_total());
    }
  }
}
