/**
 * @file spatial.hpp
 * @brief Raster sampling, mosaicking, zonal statistics and point-in-polygon region lookup.
 *
 * Geometric conventions:
 *  - Raster cells are half-open toward the east and south: a point on an internal cell edge
 *    belongs to the cell with the larger column / row index (row 0 is the north row). Points on
 *    the outer extent boundary belong to the adjacent edge cell.
 *  - Pixel centers are `xll + (col + 0.5) * cellsize`, `ytop - (row + 0.5) * cellsize`.
 *  - Polygon containment is even-odd over all rings; points on any edge count as inside.
 */
#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "hazcell/model.hpp"

namespace hazcell {

struct CellIndex {
  std::int64_t row{};
  std::int64_t col{};
  bool operator==(const CellIndex&) const = default;
};

/// Grid cell containing (lon, lat), or empty when outside the extent.
std::optional<CellIndex> locate_cell(const HazardRaster& raster, double lon, double lat) noexcept;

/// Value of the containing cell; empty outside the extent or on nodata.
std::optional<double> sample(const HazardRaster& raster, double lon, double lat) noexcept;

enum class Combine : std::uint8_t { Max };

/**
 * @brief Merges aligned rasters onto their bounding union.
 *
 * Inputs must share cellsize, lattice alignment and units. Output nodata is taken from the
 * first raster; cells covered by no valid input stay nodata.
 */
HazardRaster mosaic(std::span<const HazardRaster> rasters, Combine combine = Combine::Max);

struct ZonalStats {
  std::int64_t flooded_pixels{};
  std::optional<double> mean_intensity;
  bool operator==(const ZonalStats&) const = default;
};

/// Pixels whose center lies in `region` with a valid value > threshold; mean over those (row-major sum).
ZonalStats zonal_stats(const HazardRaster& raster, const Region& region, double threshold);

/// Same over the union of several polygons (e.g. the parts of one MultiPolygon region).
ZonalStats zonal_stats(const HazardRaster& raster, std::span<const Region> parts, double threshold);

bool point_in_polygon(const Region& region, double lon, double lat) noexcept;

/// First region in list order containing the point, scanning every polygon.
RegionSlot assign_region_brute(std::span<const Region> regions, double lon, double lat) noexcept;

/**
 * @brief Uniform-grid bin index over a region list.
 *
 * Bins per axis = max(8, ceil(sqrt(total rings))). Each bin lists, in file order, the regions
 * whose bounding box overlaps it. Lookups return exactly what assign_region_brute returns.
 */
class RegionIndex {
 public:
  RegionIndex() = default;
  explicit RegionIndex(std::vector<Region> regions);

  RegionSlot assign(double lon, double lat) const noexcept;

  const std::vector<Region>& regions() const noexcept { return regions_; }
  std::size_t bins_per_axis() const noexcept { return bins_; }

 private:
  std::size_t bin_x(double lon) const noexcept;
  std::size_t bin_y(double lat) const noexcept;

  std::vector<Region> regions_;
  std::vector<BBox> boxes_;
  BBox extent_{};
  double bin_w_{1.0};
  double bin_h_{1.0};
  std::size_t bins_{0};
  std::vector<std::uint32_t> bin_start_;  // CSR offsets, size bins_*bins_ + 1
  std::vector<RegionSlot> bin_items_;
};

}  // namespace hazcell
