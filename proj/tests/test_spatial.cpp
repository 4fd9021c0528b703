#include <doctest.h>

#include <random>

#include "generators.hpp"
#include "hazcell/spatial.hpp"

using namespace hazcell;

namespace {

HazardRaster grid(std::int64_t ncols, std::int64_t nrows, std::vector<double> values, double xll = 0, double yll = 0,
                  double cs = 1) {
  HazardRaster r{ncols, nrows, xll, yll, cs, -9999, std::move(values), IntensityUnit::MetersDepth};
  validate_raster(r);
  return r;
}

Region box(std::string id, double x0, double y0, double x1, double y1) {
  Region r;
  r.region_id = std::move(id);
  r.name = r.region_id;
  r.rings = {{{x0, y0}, {x1, y0}, {x1, y1}, {x0, y1}, {x0, y0}}};
  return r;
}

/// C shape opening east: the notch is [1,3] x [1,2].
Region c_shape() {
  Region r;
  r.region_id = "C";
  r.rings = {{{0, 0}, {3, 0}, {3, 1}, {1, 1}, {1, 2}, {3, 2}, {3, 3}, {0, 3}, {0, 0}}};
  return r;
}

}  // namespace

TEST_CASE("sample examples") {
  const auto one = grid(1, 1, {5.0});
  CHECK(sample(one, 0.5, 0.5) == 5.0);
  CHECK_FALSE(sample(one, 2, 2).has_value());
  const auto two = grid(2, 2, {1, 2, 3, 4});
  CHECK(sample(two, 1.5, 1.5) == 2.0);
  CHECK(sample(two, 0.5, 0.5) == 3.0);
}

TEST_CASE("sample edge conventions") {
  const auto two = grid(2, 2, {1, 2, 3, 4});
  CHECK(sample(two, 1.0, 1.5) == 2.0);  // internal vertical edge goes east
  CHECK(sample(two, 0.5, 1.0) == 3.0);  // internal horizontal edge goes south
  CHECK(sample(two, 1.0, 1.0) == 4.0);
  CHECK(sample(two, 0.0, 2.0) == 1.0);  // outer corners belong to the edge cells
  CHECK(sample(two, 2.0, 0.0) == 4.0);
  CHECK(sample(two, 2.0, 2.0) == 2.0);
  CHECK_FALSE(sample(two, 2.0000001, 1).has_value());
  CHECK_FALSE(sample(two, 1, -1e-12).has_value());
  const auto holes = grid(2, 1, {-9999, 7});
  CHECK_FALSE(sample(holes, 0.5, 0.5).has_value());
  CHECK(sample(holes, 1.5, 0.5) == 7.0);
}

TEST_CASE("sample equals the per-cell oracle on lattice points") {
  std::mt19937_64 rng(21);
  for (int trial = 0; trial < 100; ++trial) {
    const auto r = gen::raster(rng, 12, 12);
    for (const auto& a : gen::assets(rng, r, 100)) {
      CHECK(sample(r, a.lon, a.lat) == oracle::sample(r, a.lon, a.lat));
    }
  }
}

TEST_CASE("sampling is stable under small in-cell perturbations") {
  std::mt19937_64 rng(22);
  for (int trial = 0; trial < 50; ++trial) {
    const auto r = gen::raster(rng, 10, 10);
    for (int i = 0; i < 50; ++i) {
      const auto col = gen::integer(rng, 0, r.ncols - 1);
      const auto row = gen::integer(rng, 0, r.nrows - 1);
      const double cx = r.xll + (static_cast<double>(col) + 0.5) * r.cellsize;
      const double cy = r.ytop() - (static_cast<double>(row) + 0.5) * r.cellsize;
      const double dx = gen::uniform(rng, -0.24, 0.24) * r.cellsize;
      const double dy = gen::uniform(rng, -0.24, 0.24) * r.cellsize;
      CHECK(sample(r, cx + dx, cy + dy) == sample(r, cx, cy));
    }
  }
}

TEST_CASE("mosaic examples") {
  const auto a = grid(1, 1, {3}, 0, 0);
  const auto b = grid(1, 1, {7}, 1, 0);
  const std::vector<HazardRaster> disjoint{a, b};
  const auto m = mosaic(disjoint);
  CHECK(m.ncols == 2);
  CHECK(m.nrows == 1);
  CHECK(m.values == std::vector<double>{3, 7});

  const std::vector<HazardRaster> coincident{a, grid(1, 1, {7}, 0, 0)};
  CHECK(mosaic(coincident).values == std::vector<double>{7});

  const std::vector<HazardRaster> gap{a, grid(1, 1, {7}, 2, 1)};
  const auto g = mosaic(gap);
  CHECK(g.ncols == 3);
  CHECK(g.nrows == 2);
  CHECK(g.values == std::vector<double>{-9999, -9999, 7, 3, -9999, -9999});
}

TEST_CASE("mosaic rejects incompatible inputs") {
  const auto a = grid(1, 1, {3});
  auto wind = a;
  wind.units = IntensityUnit::KmhWind;
  CHECK_THROWS_AS(mosaic(std::vector<HazardRaster>{a, wind}), ValidationError);
  CHECK_THROWS_AS(mosaic(std::vector<HazardRaster>{a, grid(1, 1, {1}, 0.5, 0)}), ValidationError);
  CHECK_THROWS_AS(mosaic(std::vector<HazardRaster>{a, grid(2, 2, {1, 1, 1, 1}, 0, 0, 0.5)}), ValidationError);
  CHECK_THROWS_AS(mosaic(std::vector<HazardRaster>{}), ValidationError);
}

TEST_CASE("mosaic equals per-cell recombination, and is commutative and associative") {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<HazardRaster> parts;
    const double cs = 0.5;
    for (int k = 0; k < 3; ++k) {
      auto r = gen::raster(rng, 8, 8, 0.2);
      r.cellsize = cs;
      r.xll = static_cast<double>(gen::integer(rng, -6, 6)) * cs;
      r.yll = static_cast<double>(gen::integer(rng, -6, 6)) * cs;
      parts.push_back(r);
    }
    const auto m = mosaic(parts);
    // Oracle: for each output cell center, max over inputs that cover it with data.
    for (std::int64_t row = 0; row < m.nrows; ++row) {
      for (std::int64_t col = 0; col < m.ncols; ++col) {
        const double x = m.xll + (static_cast<double>(col) + 0.5) * cs;
        const double y = m.ytop() - (static_cast<double>(row) + 0.5) * cs;
        std::optional<double> best;
        for (const auto& p : parts) {
          const auto v = oracle::sample(p, x, y);
          if (v) best = best ? std::max(*best, *v) : *v;
        }
        CHECK(m.at(row, col) == (best ? *best : m.nodata));
      }
    }
    const std::vector<HazardRaster> reversed{parts[2], parts[1], parts[0]};
    CHECK(mosaic(reversed) == m);
    const std::vector<HazardRaster> left{parts[0], parts[1]};
    const std::vector<HazardRaster> nested{mosaic(left), parts[2]};
    CHECK(mosaic(nested) == m);
  }
}

TEST_CASE("point in polygon examples") {
  const auto sq = box("s", 0, 0, 1, 1);
  CHECK(point_in_polygon(sq, 0.5, 0.5));
  CHECK_FALSE(point_in_polygon(sq, 2, 2));
  CHECK(point_in_polygon(sq, 1, 0.5));
  CHECK(point_in_polygon(sq, 0, 0));
  const auto c = c_shape();
  CHECK_FALSE(point_in_polygon(c, 2, 1.5));
  CHECK(point_in_polygon(c, 0.5, 1.5));
  CHECK(point_in_polygon(c, 2, 0.5));
  Region donut = box("d", 0, 0, 4, 4);
  donut.rings.push_back({{1, 1}, {3, 1}, {3, 3}, {1, 3}, {1, 1}});
  CHECK_FALSE(point_in_polygon(donut, 2, 2));
  CHECK(point_in_polygon(donut, 1, 2));  // hole edge counts as inside
  CHECK(point_in_polygon(donut, 0.5, 2));
}

TEST_CASE("point in polygon equals the exact-arithmetic oracle") {
  std::mt19937_64 rng(41);
  for (int trial = 0; trial < 200; ++trial) {
    const Region p = gen::polygon(rng, "p", 0, 0, gen::uniform(rng, 1, 6));
    validate_region(p);
    for (int i = 0; i < 200; ++i) {
      const double x = gen::lattice(rng, -7, 7, 16);
      const double y = gen::lattice(rng, -7, 7, 16);
      CHECK(point_in_polygon(p, x, y) == oracle::inside(p, x, y));
    }
    for (const auto& v : p.rings[0]) CHECK(point_in_polygon(p, v.lon, v.lat));
  }
}

TEST_CASE("region assignment examples") {
  const std::vector<Region> regions{box("A", 0, 0, 1, 1), box("B", 1, 0, 2, 1)};
  const RegionIndex index(regions);
  CHECK(index.assign(0.5, 0.5) == 0);
  CHECK(index.assign(1.5, 0.5) == 1);
  CHECK(index.assign(1.0, 0.5) == 0);  // shared border goes to the first region
  CHECK(index.assign(5, 5) == kUnassigned);
  CHECK(RegionIndex().assign(0, 0) == kUnassigned);
  CHECK(index.bins_per_axis() == 8);
}

TEST_CASE("index lookups equal brute force") {
  std::mt19937_64 rng(51);
  for (int trial = 0; trial < 40; ++trial) {
    std::vector<Region> regions;
    const auto n = gen::integer(rng, 1, 120);
    for (int i = 0; i < n; ++i) {
      regions.push_back(gen::polygon(rng, "r" + std::to_string(i), gen::uniform(rng, -20, 20),
                                     gen::uniform(rng, -20, 20), gen::uniform(rng, 0.5, 6)));
    }
    const RegionIndex index(regions);
    for (int i = 0; i < 1000; ++i) {
      const double x = gen::lattice(rng, -28, 28, 16);
      const double y = gen::lattice(rng, -28, 28, 16);
      const RegionSlot got = index.assign(x, y);
      CHECK(got == assign_region_brute(regions, x, y));
      CHECK(got == oracle::assign(regions, x, y));
    }
  }
}

TEST_CASE("zonal examples") {
  const auto empty = grid(2, 2, {-9999, -9999, -9999, -9999});
  const auto whole = box("w", 0, 0, 2, 2);
  CHECK(zonal_stats(empty, whole, 0) == ZonalStats{0, std::nullopt});
  const auto ones = grid(2, 2, {1, 1, 1, 1});
  CHECK(zonal_stats(ones, whole, 0) == ZonalStats{4, 1.0});
  CHECK(zonal_stats(ones, whole, 1.0) == ZonalStats{0, std::nullopt});
  CHECK(zonal_stats(ones, box("far", 10, 10, 11, 11), 0) == ZonalStats{0, std::nullopt});
  CHECK_THROWS_AS(zonal_stats(ones, whole, -1), ValidationError);
  const auto mixed = grid(2, 2, {0, 2, 4, 0});
  CHECK(zonal_stats(mixed, whole, 0) == ZonalStats{2, 3.0});
}

TEST_CASE("zonal equals the pixel-loop oracle on concave polygons") {
  std::mt19937_64 rng(61);
  for (int trial = 0; trial < 100; ++trial) {
    const auto r = gen::raster(rng, 20, 20);
    const auto regions = gen::regions(rng, r, 3);
    const double threshold = gen::uniform(rng, 0, 1) < 0.5 ? 0.0 : gen::uniform(rng, 0, 3);
    for (const auto& reg : regions) {
      CHECK(zonal_stats(r, reg, threshold) == oracle::zonal(r, {reg}, threshold));
    }
    CHECK(zonal_stats(r, regions, threshold) == oracle::zonal(r, regions, threshold));
  }
}

TEST_CASE("zonal counts over a partition sum to the whole") {
  std::mt19937_64 rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    auto r = gen::raster(rng, 16, 16);
    const double split = r.xll + static_cast<double>(gen::integer(rng, 0, r.ncols)) * r.cellsize;
    const Region west = box("w", r.xll, r.yll, std::max(split, r.xll + r.cellsize / 4), r.ytop());
    const Region east = box("e", std::max(split, r.xll + r.cellsize / 4), r.yll, r.xmax(), r.ytop());
    const Region all = box("a", r.xll, r.yll, r.xmax(), r.ytop());
    // Centers never sit on the split line, so each pixel lands in exactly one half.
    CHECK(zonal_stats(r, west, 0).flooded_pixels + zonal_stats(r, east, 0).flooded_pixels ==
          zonal_stats(r, all, 0).flooded_pixels);
  }
}
