// Independent brute-force reimplementations used as test oracles.
//
// Geometry oracles assume coordinates lie on a 1/kLattice grid so they can decide edge cases
// with exact integer arithmetic instead of the floating-point formulas used by the library.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "hazcell/engine.hpp"

namespace oracle {

using namespace hazcell;

inline constexpr double kLattice = 64.0;

inline std::int64_t lat_int(double v) {
  const double s = v * kLattice;
  if (s != std::floor(s)) throw std::logic_error("coordinate is off the oracle lattice");
  return static_cast<std::int64_t>(s);
}

/// Containing-cell lookup by testing every cell against its own bounds.
inline std::optional<double> sample(const HazardRaster& r, double lon, double lat) {
  for (std::int64_t row = 0; row < r.nrows; ++row) {
    const double top = r.yll + static_cast<double>(r.nrows - row) * r.cellsize;
    const double bottom = r.yll + static_cast<double>(r.nrows - row - 1) * r.cellsize;
    // Row `row` owns its top edge (an internal edge goes south), and its bottom edge only when it
    // is the southern border.
    const bool in_row = lat <= top &&
                        (lat > bottom || (row == r.nrows - 1 && lat == bottom));
    if (!in_row) continue;
    for (std::int64_t col = 0; col < r.ncols; ++col) {
      const double left = r.xll + static_cast<double>(col) * r.cellsize;
      const double right = r.xll + static_cast<double>(col + 1) * r.cellsize;
      const bool in_col = lon >= left && (lon < right || (col == r.ncols - 1 && lon == right));
      if (!in_col) continue;
      const double v = r.values[static_cast<std::size_t>(row * r.ncols + col)];
      if (v == r.nodata) return std::nullopt;
      return v;
    }
  }
  return std::nullopt;
}

inline bool on_segment(std::int64_t px, std::int64_t py, std::int64_t ax, std::int64_t ay, std::int64_t bx,
                       std::int64_t by) {
  const std::int64_t cross = (bx - ax) * (py - ay) - (by - ay) * (px - ax);
  return cross == 0 && px >= std::min(ax, bx) && px <= std::max(ax, bx) && py >= std::min(ay, by) &&
         py <= std::max(ay, by);
}

/// Parity of crossings with an upward vertical ray, summed over all rings; any edge hit is inside.
inline bool inside(const Region& region, double lon, double lat) {
  const std::int64_t px = lat_int(lon);
  const std::int64_t py = lat_int(lat);
  int crossings = 0;
  for (const Ring& ring : region.rings) {
    for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
      const std::int64_t ax = lat_int(ring[i].lon), ay = lat_int(ring[i].lat);
      const std::int64_t bx = lat_int(ring[i + 1].lon), by = lat_int(ring[i + 1].lat);
      if (on_segment(px, py, ax, ay, bx, by)) return true;
      if ((ax > px) == (bx > px)) continue;
      // Crossing height Y satisfies (Y - ay) * (bx - ax) = (px - ax) * (by - ay).
      const std::int64_t lhs = (py - ay) * (bx - ax);
      const std::int64_t rhs = (px - ax) * (by - ay);
      const bool below = bx > ax ? lhs < rhs : lhs > rhs;
      if (below) ++crossings;
    }
  }
  return crossings % 2 == 1;
}

inline RegionSlot assign(const std::vector<Region>& regions, double lon, double lat) {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (inside(regions[i], lon, lat)) return static_cast<RegionSlot>(i);
  }
  return kUnassigned;
}

/// Piecewise-linear lookup by scanning segments in order.
inline double interpolate(const DamageCurve& c, double x) {
  const auto& k = c.knots;
  if (x <= k.front().intensity) return k.front().fraction;
  for (std::size_t i = 0; i + 1 < k.size(); ++i) {
    if (x == k[i].intensity) return k[i].fraction;
    if (x > k[i].intensity && x < k[i + 1].intensity) {
      const double t = (x - k[i].intensity) / (k[i + 1].intensity - k[i].intensity);
      const double y = k[i].fraction + t * (k[i + 1].fraction - k[i].fraction);
      return std::min(std::max(y, k[i].fraction), k[i + 1].fraction);
    }
  }
  return k.back().fraction;
}

inline DamageState state_of(double f, const std::array<double, 4>& t = {0.1, 0.25, 0.5, 0.9}) {
  if (f == 0.0) return DamageState::DS0_none;
  int s = 1;
  for (double u : t) {
    if (f > u) ++s;
  }
  return static_cast<DamageState>(s);
}

/// Correctly rounded floating-point sum (Shewchuk partials with a half-even final correction).
inline double fsum(const std::vector<double>& xs) {
  std::vector<double> partials;
  for (double x : xs) {
    std::size_t i = 0;
    for (double y : partials) {
      if (std::abs(x) < std::abs(y)) std::swap(x, y);
      const double hi = x + y;
      const double lo = y - (hi - x);
      if (lo != 0.0) partials[i++] = lo;
      x = hi;
    }
    partials.resize(i);
    partials.push_back(x);
  }
  if (partials.empty()) return 0.0;
  std::size_t n = partials.size() - 1;
  double hi = partials[n];
  double lo = 0.0;
  while (n > 0) {
    const double x = hi;
    const double y = partials[--n];
    hi = x + y;
    const double yr = hi - x;
    lo = y - yr;
    if (lo != 0.0) break;
  }
  if (n > 0 && ((lo < 0.0 && partials[n - 1] < 0.0) || (lo > 0.0 && partials[n - 1] > 0.0))) {
    const double y = lo * 2.0;
    const double x = hi + y;
    if (y == x - hi) hi = x;
  }
  return hi;
}

/// Per-asset pipeline written straight through: sample, threshold, interpolate, multiply, scan regions.
inline std::vector<ExposureRecord> records(const std::vector<Asset>& assets, const HazardRaster& raster,
                                           const DamageCurve& curve, const std::vector<Region>& regions,
                                           double threshold = 0.0) {
  std::vector<ExposureRecord> out;
  for (std::size_t i = 0; i < assets.size(); ++i) {
    ExposureRecord r;
    r.asset = i;
    r.region = assign(regions, assets[i].lon, assets[i].lat);
    const auto v = oracle::sample(raster, assets[i].lon, assets[i].lat);
    if (v && *v > threshold) {
      r.intensity = *v;
      r.damage_fraction = interpolate(curve, *v);
      r.damage_cost = r.damage_fraction * assets[i].unit_cost;
      r.damage_state = state_of(r.damage_fraction);
    }
    out.push_back(r);
  }
  return out;
}

struct Group {
  std::int64_t assets{};
  std::int64_t cells{};
  std::vector<double> costs;
  double total() const { return fsum(costs); }
};

/// (region_id, generation) groups built from a record list.
inline std::map<std::pair<std::string, std::string>, Group> groups(const std::vector<ExposureRecord>& recs,
                                                                   const std::vector<Asset>& assets,
                                                                   const std::vector<Region>& regions) {
  std::map<std::pair<std::string, std::string>, Group> out;
  for (const auto& r : recs) {
    const std::string id = r.region < 0 ? "unassigned" : regions[static_cast<std::size_t>(r.region)].region_id;
    Group& g = out[{id, std::string(to_string(assets[r.asset].generation))}];
    ++g.assets;
    if (r.intensity) {
      ++g.cells;
      g.costs.push_back(r.damage_cost);
    }
  }
  return out;
}

/// Pixel loop over the whole raster; sums in row-major order.
inline ZonalStats zonal(const HazardRaster& r, const std::vector<Region>& parts, double threshold) {
  ZonalStats z;
  double sum = 0.0;
  for (std::int64_t row = 0; row < r.nrows; ++row) {
    for (std::int64_t col = 0; col < r.ncols; ++col) {
      const double v = r.values[static_cast<std::size_t>(row * r.ncols + col)];
      if (v == r.nodata || v <= threshold) continue;
      const double x = r.xll + (static_cast<double>(col) + 0.5) * r.cellsize;
      const double y = r.yll + (static_cast<double>(r.nrows - row) - 0.5) * r.cellsize;
      bool hit = false;
      for (const auto& p : parts) hit = hit || inside(p, x, y);
      if (!hit) continue;
      ++z.flooded_pixels;
      sum += v;
    }
  }
  if (z.flooded_pixels > 0) z.mean_intensity = sum / static_cast<double>(z.flooded_pixels);
  return z;
}

struct Ensemble {
  double mean{};
  double min{};
  double max{};
};

/// Sort, then read the ends; mean from the exact sum, kept inside the range.
inline Ensemble ensemble(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const double mean = fsum(v) / static_cast<double>(v.size());
  return {std::min(std::max(mean, v.front()), v.back()), v.front(), v.back()};
}

}  // namespace oracle
