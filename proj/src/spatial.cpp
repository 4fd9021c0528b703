#include "hazcell/spatial.hpp"

#include <algorithm>
#include <cmath>

#include "hazcell/text.hpp"

namespace hazcell {

std::optional<CellIndex> locate_cell(const HazardRaster& raster, double lon, double lat) noexcept {
  const double ytop = raster.ytop();
  if (!(lon >= raster.xll && lon <= raster.xmax() && lat >= raster.yll && lat <= ytop)) return std::nullopt;
  auto col = static_cast<std::int64_t>(std::floor((lon - raster.xll) / raster.cellsize));
  auto row = static_cast<std::int64_t>(std::floor((ytop - lat) / raster.cellsize));
  col = std::clamp<std::int64_t>(col, 0, raster.ncols - 1);
  row = std::clamp<std::int64_t>(row, 0, raster.nrows - 1);
  return CellIndex{row, col};
}

std::optional<double> sample(const HazardRaster& raster, double lon, double lat) noexcept {
  const auto cell = locate_cell(raster, lon, lat);
  if (!cell) return std::nullopt;
  const double v = raster.at(cell->row, cell->col);
  if (raster.is_nodata(v)) return std::nullopt;
  return v;
}

HazardRaster mosaic(std::span<const HazardRaster> rasters, Combine combine) {
  if (rasters.empty()) throw ValidationError("mosaic needs at least one raster");
  const HazardRaster& first = rasters.front();
  const double cs = first.cellsize;
  double xmin = first.xll, ymin = first.yll, xmax = first.xmax(), ytop = first.ytop();
  for (const auto& r : rasters) {
    validate_raster(r);
    if (r.units != first.units) throw ValidationError("mosaic inputs have mixed units");
    if (std::abs(r.cellsize - cs) > 1e-9 * cs) throw ValidationError("mosaic inputs have different cellsizes");
    const double off_x = (r.xll - first.xll) / cs;
    const double off_y = (r.yll - first.yll) / cs;
    if (std::abs(off_x - std::round(off_x)) > 1e-6 || std::abs(off_y - std::round(off_y)) > 1e-6) {
      throw ValidationError("mosaic inputs are not aligned to a common lattice");
    }
    xmin = std::min(xmin, r.xll);
    ymin = std::min(ymin, r.yll);
    xmax = std::max(xmax, r.xmax());
    ytop = std::max(ytop, r.ytop());
  }

  HazardRaster out;
  out.units = first.units;
  out.cellsize = cs;
  out.nodata = first.nodata;
  out.xll = xmin;
  out.yll = ymin;
  out.ncols = std::llround((xmax - xmin) / cs);
  out.nrows = std::llround((ytop - ymin) / cs);
  out.values.assign(static_cast<std::size_t>(out.ncols * out.nrows), out.nodata);
  std::vector<bool> covered(out.values.size(), false);
  const double out_top = out.ytop();

  for (const auto& r : rasters) {
    const std::int64_t col0 = std::llround((r.xll - xmin) / cs);
    const std::int64_t row0 = std::llround((out_top - r.ytop()) / cs);
    for (std::int64_t row = 0; row < r.nrows; ++row) {
      for (std::int64_t col = 0; col < r.ncols; ++col) {
        const double v = r.at(row, col);
        if (r.is_nodata(v)) continue;
        const auto idx = static_cast<std::size_t>((row0 + row) * out.ncols + col0 + col);
        switch (combine) {
          case Combine::Max:
            out.values[idx] = covered[idx] ? std::max(out.values[idx], v) : v;
            break;
        }
        covered[idx] = true;
      }
    }
  }
  for (std::size_t i = 0; i < covered.size(); ++i) {
    if (covered[i] && out.values[i] == out.nodata) {
      throw ValidationError("mosaic value collides with output nodata " + format_number(out.nodata));
    }
  }
  return out;
}

bool point_in_polygon(const Region& region, double lon, double lat) noexcept {
  bool inside = false;
  for (const Ring& ring : region.rings) {
    for (std::size_t i = 1; i < ring.size(); ++i) {
      const LonLat& a = ring[i - 1];
      const LonLat& b = ring[i];
      const double cross = (b.lon - a.lon) * (lat - a.lat) - (b.lat - a.lat) * (lon - a.lon);
      if (cross == 0.0 && lon >= std::min(a.lon, b.lon) && lon <= std::max(a.lon, b.lon) &&
          lat >= std::min(a.lat, b.lat) && lat <= std::max(a.lat, b.lat)) {
        return true;
      }
      if ((a.lat > lat) != (b.lat > lat)) {
        const double x = a.lon + (lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
        if (lon < x) inside = !inside;
      }
    }
  }
  return inside;
}

ZonalStats zonal_stats(const HazardRaster& raster, const Region& region, double threshold) {
  return zonal_stats(raster, std::span<const Region>(&region, 1), threshold);
}

ZonalStats zonal_stats(const HazardRaster& raster, std::span<const Region> parts, double threshold) {
  if (!(threshold >= 0.0)) throw ValidationError("zonal threshold must be >= 0");
  if (parts.empty()) return {};
  BBox box = parts.front().bbox();
  for (const auto& p : parts) {
    const BBox b = p.bbox();
    box = {std::min(box.min_lon, b.min_lon), std::min(box.min_lat, b.min_lat), std::max(box.max_lon, b.max_lon),
           std::max(box.max_lat, b.max_lat)};
  }
  const double cs = raster.cellsize;
  const double ytop = raster.ytop();
  if (box.max_lon < raster.xll - cs || box.min_lon > raster.xmax() + cs || box.max_lat < raster.yll - cs ||
      box.min_lat > ytop + cs) {
    return {};
  }
  // Window of pixels whose centers may fall in the bbox, padded by one pixel.
  auto clamp_index = [](double v, std::int64_t n) {
    return std::clamp<std::int64_t>(static_cast<std::int64_t>(v), 0, n - 1);
  };
  const std::int64_t c0 = clamp_index(std::floor((box.min_lon - raster.xll) / cs) - 1, raster.ncols);
  const std::int64_t c1 = clamp_index(std::floor((box.max_lon - raster.xll) / cs) + 1, raster.ncols);
  const std::int64_t r0 = clamp_index(std::floor((ytop - box.max_lat) / cs) - 1, raster.nrows);
  const std::int64_t r1 = clamp_index(std::floor((ytop - box.min_lat) / cs) + 1, raster.nrows);

  ZonalStats stats;
  double sum = 0.0;
  for (std::int64_t row = r0; row <= r1; ++row) {
    const double y = ytop - (static_cast<double>(row) + 0.5) * cs;
    if (y < box.min_lat || y > box.max_lat) continue;
    for (std::int64_t col = c0; col <= c1; ++col) {
      const double v = raster.at(row, col);
      if (raster.is_nodata(v) || !(v > threshold)) continue;
      const double x = raster.xll + (static_cast<double>(col) + 0.5) * cs;
      if (x < box.min_lon || x > box.max_lon) continue;
      const bool inside = std::any_of(parts.begin(), parts.end(),
                                      [&](const Region& p) { return point_in_polygon(p, x, y); });
      if (!inside) continue;
      ++stats.flooded_pixels;
      sum += v;
    }
  }
  if (stats.flooded_pixels > 0) stats.mean_intensity = sum / static_cast<double>(stats.flooded_pixels);
  return stats;
}

RegionSlot assign_region_brute(std::span<const Region> regions, double lon, double lat) noexcept {
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (point_in_polygon(regions[i], lon, lat)) return static_cast<RegionSlot>(i);
  }
  return kUnassigned;
}

RegionIndex::RegionIndex(std::vector<Region> regions) : regions_(std::move(regions)) {
  if (regions_.empty()) return;
  std::size_t rings = 0;
  boxes_.reserve(regions_.size());
  extent_ = regions_.front().bbox();
  for (const auto& r : regions_) {
    rings += r.rings.size();
    const BBox b = r.bbox();
    boxes_.push_back(b);
    extent_.min_lon = std::min(extent_.min_lon, b.min_lon);
    extent_.min_lat = std::min(extent_.min_lat, b.min_lat);
    extent_.max_lon = std::max(extent_.max_lon, b.max_lon);
    extent_.max_lat = std::max(extent_.max_lat, b.max_lat);
  }
  bins_ = std::max<std::size_t>(8, static_cast<std::size_t>(std::ceil(std::sqrt(static_cast<double>(rings)))));
  bin_w_ = std::max(extent_.max_lon - extent_.min_lon, 1e-12) / static_cast<double>(bins_);
  bin_h_ = std::max(extent_.max_lat - extent_.min_lat, 1e-12) / static_cast<double>(bins_);

  // bin_x/bin_y are monotone, so every point inside a bbox maps into the bbox's bin range.
  std::vector<std::vector<RegionSlot>> cells(bins_ * bins_);
  for (std::size_t i = 0; i < boxes_.size(); ++i) {
    const auto& b = boxes_[i];
    for (std::size_t by = bin_y(b.min_lat); by <= bin_y(b.max_lat); ++by) {
      for (std::size_t bx = bin_x(b.min_lon); bx <= bin_x(b.max_lon); ++bx) {
        cells[by * bins_ + bx].push_back(static_cast<RegionSlot>(i));
      }
    }
  }
  bin_start_.reserve(cells.size() + 1);
  bin_start_.push_back(0);
  for (const auto& c : cells) {
    bin_items_.insert(bin_items_.end(), c.begin(), c.end());
    bin_start_.push_back(static_cast<std::uint32_t>(bin_items_.size()));
  }
}

std::size_t RegionIndex::bin_x(double lon) const noexcept {
  const double b = std::floor((lon - extent_.min_lon) / bin_w_);
  return static_cast<std::size_t>(std::clamp(b, 0.0, static_cast<double>(bins_ - 1)));
}

std::size_t RegionIndex::bin_y(double lat) const noexcept {
  const double b = std::floor((lat - extent_.min_lat) / bin_h_);
  return static_cast<std::size_t>(std::clamp(b, 0.0, static_cast<double>(bins_ - 1)));
}

RegionSlot RegionIndex::assign(double lon, double lat) const noexcept {
  if (regions_.empty() || !extent_.contains(lon, lat)) return kUnassigned;
  const std::size_t bin = bin_y(lat) * bins_ + bin_x(lon);
  for (std::uint32_t k = bin_start_[bin]; k < bin_start_[bin + 1]; ++k) {
    const RegionSlot slot = bin_items_[k];
    const auto i = static_cast<std::size_t>(slot);
    if (boxes_[i].contains(lon, lat) && point_in_polygon(regions_[i], lon, lat)) return slot;
  }
  return kUnassigned;
}

}  // namespace hazcell
