#include "hazcell/ingest.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "hazcell/text.hpp"

namespace hazcell {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_text_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError("cannot open file: " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return std::move(buf).str();
}

void write_text_file(const fs::path& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw RuntimeFailure("cannot write file: " + path.string());
  out.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!out) throw RuntimeFailure("failed writing file: " + path.string());
}

namespace {

/// Iterates lines, stripping a trailing '\r'. Callback gets (1-based line number, line).
template <typename F>
void for_each_line(std::string_view text, F&& f) {
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    ++line_no;
    if (!f(line_no, line)) return;
    start = end + 1;
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Assets

AssetTable read_assets(const fs::path& path, const CostConfig& costs) {
  if (!fs::exists(path)) throw ValidationError("asset file not found: " + path.string());
  return parse_assets(read_text_file(path), costs);
}

AssetTable parse_assets(std::string_view csv, const CostConfig& costs) {
  AssetTable table;
  bool have_header = false;
  std::size_t ncols = 0;
  std::optional<std::size_t> cost_col, design_col, country_col;

  for_each_line(csv, [&](std::size_t line_no, std::string_view line) {
    if (trim(line).empty()) return true;
    const auto fields = split(line, ',');
    if (!have_header) {
      if (fields.size() < kAssetColumns.size()) {
        throw ValidationError("asset header has " + std::to_string(fields.size()) + " columns, expected at least " +
                              std::to_string(kAssetColumns.size()));
      }
      for (std::size_t i = 0; i < kAssetColumns.size(); ++i) {
        if (!iequals(trim(fields[i]), kAssetColumns[i])) {
          throw ValidationError("asset header column " + std::to_string(i) + " is '" + std::string(trim(fields[i])) +
                                "', expected '" + std::string(kAssetColumns[i]) + "'");
        }
      }
      for (std::size_t i = kAssetColumns.size(); i < fields.size(); ++i) {
        const auto name = trim(fields[i]);
        if (iequals(name, "unit_cost")) cost_col = i;
        if (iequals(name, "tower_design")) design_col = i;
        if (iequals(name, "country_iso3")) country_col = i;
      }
      ncols = fields.size();
      have_header = true;
      return true;
    }

    try {
      if (fields.size() != ncols) {
        throw RejectedRecord("wrong field count", std::to_string(fields.size()) + " != " + std::to_string(ncols));
      }
      const Radio radio = parse_radio(trim(fields[0]));
      const auto lon = parse_double(fields[6]);
      if (!lon) throw RejectedRecord("lon is not a number", std::string(fields[6]));
      const auto lat = parse_double(fields[7]);
      if (!lat) throw RejectedRecord("lat is not a number", std::string(fields[7]));

      double unit_cost = costs.cost_for(map_radio_generation(radio));
      if (cost_col && !trim(fields[*cost_col]).empty()) {
        const auto c = parse_double(fields[*cost_col]);
        if (!c) throw RejectedRecord("unit_cost is not a number", std::string(fields[*cost_col]));
        unit_cost = *c;
      }
      TowerDesign design = TowerDesign::Unknown;
      if (design_col && !trim(fields[*design_col]).empty()) design = parse_tower_design(trim(fields[*design_col]));
      std::string country = "unknown";
      if (country_col && !trim(fields[*country_col]).empty()) country = std::string(trim(fields[*country_col]));

      std::string id;
      id.append(trim(fields[1])).append("-").append(trim(fields[2])).append("-");
      id.append(trim(fields[3])).append("-").append(trim(fields[4]));
      table.assets.push_back(make_asset(std::move(id), *lon, *lat, radio, unit_cost, design, std::move(country)));
      ++table.report.accepted;
    } catch (const RejectedRecord& e) {
      ++table.report.rejected;
      table.report.rejection_reasons.push_back({line_no, e.what()});
    }
    return true;
  });
  return table;  // a blank file is an empty asset table

}

// ---------------------------------------------------------------------------
// ESRI ASCII grid

HazardRaster read_raster_asc(const fs::path& path, IntensityUnit units) {
  if (!fs::exists(path)) throw ValidationError("raster file not found: " + path.string());
  try {
    return parse_raster_asc(read_text_file(path), units);
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

HazardRaster parse_raster_asc(std::string_view text, IntensityUnit units) {
  constexpr std::array<std::string_view, 6> keys{"ncols",    "nrows",        "xllcorner",
                                                 "yllcorner", "cellsize", "nodata_value"};
  std::array<std::optional<double>, 6> header{};
  std::size_t header_lines = 0;
  std::int64_t rows_read = 0;
  HazardRaster r;
  r.units = units;

  auto finish_header = [&] {
    for (std::size_t k = 0; k < keys.size(); ++k) {
      if (!header[k]) throw ValidationError("grid header key '" + std::string(keys[k]) + "' is missing");
    }
    auto as_dim = [](double v, std::string_view name) {
      if (v != std::floor(v) || v <= 0.0 || v > 1e9) {
        throw ValidationError("grid " + std::string(name) + " must be a positive integer");
      }
      return static_cast<std::int64_t>(v);
    };
    r.ncols = as_dim(*header[0], "ncols");
    r.nrows = as_dim(*header[1], "nrows");
    r.xll = *header[2];
    r.yll = *header[3];
    r.cellsize = *header[4];
    r.nodata = *header[5];
    if (!(r.cellsize > 0.0)) throw ValidationError("grid cellsize must be > 0");
    if (!std::isfinite(r.nodata)) throw ValidationError("grid NODATA_value must be finite");
    r.values.reserve(static_cast<std::size_t>(r.ncols * r.nrows));
  };

  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    const auto t = trim(line);
    if (t.empty()) return true;
    if (header_lines < keys.size()) {
      const auto sp = t.find_first_of(" \t");
      if (sp == std::string_view::npos) {
        throw ValidationError("line " + std::to_string(line_no) + ": expected '<key> <value>' in grid header");
      }
      const auto key = t.substr(0, sp);
      std::size_t k = 0;
      while (k < keys.size() && !iequals(key, keys[k])) ++k;
      if (k == keys.size()) {
        throw ValidationError("line " + std::to_string(line_no) + ": unsupported grid header key '" +
                              std::string(key) + "'");
      }
      if (header[k]) throw ValidationError("grid header key '" + std::string(keys[k]) + "' repeated");
      const auto v = parse_double(t.substr(sp));
      if (!v) throw ValidationError("line " + std::to_string(line_no) + ": bad value for '" + std::string(key) + "'");
      header[k] = *v;
      if (++header_lines == keys.size()) finish_header();
      return true;
    }

    if (rows_read == r.nrows) {
      throw ValidationError("line " + std::to_string(line_no) + ": more than nrows=" + std::to_string(r.nrows) +
                            " data rows");
    }
    const char* p = t.data();
    const char* end = t.data() + t.size();
    std::int64_t count = 0;
    while (p < end) {
      while (p < end && (*p == ' ' || *p == '\t')) ++p;
      if (p == end) break;
      const char* tok = p;
      while (p < end && *p != ' ' && *p != '\t') ++p;
      double v = 0.0;
      const char* num = (*tok == '+') ? tok + 1 : tok;
      const auto [q, ec] = std::from_chars(num, p, v);
      if (ec != std::errc{} || q != p) {
        throw ValidationError("line " + std::to_string(line_no) + ": bad grid value '" + std::string(tok, p) + "'");
      }
      if (++count > r.ncols) break;
      r.values.push_back(v);
    }
    if (count != r.ncols) {
      throw ValidationError("line " + std::to_string(line_no) + ": row has " + (count > r.ncols ? "more than " : "") +
                            std::to_string(count) + " values, expected ncols=" + std::to_string(r.ncols));
    }
    ++rows_read;
    return true;
  });

  if (header_lines < keys.size()) finish_header();
  if (rows_read != r.nrows) {
    throw ValidationError("grid has " + std::to_string(rows_read) + " data rows, expected nrows=" +
                          std::to_string(r.nrows));
  }
  validate_raster(r);
  return r;
}

std::string format_raster_asc(const HazardRaster& r) {
  validate_raster(r);
  std::string out;
  out.reserve(static_cast<std::size_t>(r.ncols * r.nrows) * 6 + 128);
  out += "ncols " + std::to_string(r.ncols) + "\n";
  out += "nrows " + std::to_string(r.nrows) + "\n";
  out += "xllcorner " + format_number(r.xll) + "\n";
  out += "yllcorner " + format_number(r.yll) + "\n";
  out += "cellsize " + format_number(r.cellsize) + "\n";
  out += "NODATA_value " + format_number(r.nodata) + "\n";
  std::array<char, 32> buf{};
  for (std::int64_t row = 0; row < r.nrows; ++row) {
    for (std::int64_t col = 0; col < r.ncols; ++col) {
      if (col > 0) out += ' ';
      const auto [p, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), r.at(row, col));
      out.append(buf.data(), p);
    }
    out += '\n';
  }
  return out;
}

void write_raster_asc(const fs::path& path, const HazardRaster& r) { write_text_file(path, format_raster_asc(r)); }

// ---------------------------------------------------------------------------
// Regions

namespace {

std::string property_string(const json& props, const char* key, std::string fallback) {
  if (!props.is_object() || !props.contains(key) || props[key].is_null()) return fallback;
  const auto& v = props[key];
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<std::int64_t>());
  return v.dump();
}

Ring parse_ring(const json& coords, const std::string& region_id) {
  if (!coords.is_array()) throw ValidationError("region '" + region_id + "': ring is not an array");
  Ring ring;
  ring.reserve(coords.size());
  for (const auto& pt : coords) {
    if (!pt.is_array() || pt.size() < 2 || !pt[0].is_number() || !pt[1].is_number()) {
      throw ValidationError("region '" + region_id + "': malformed coordinate");
    }
    ring.push_back({pt[0].get<double>(), pt[1].get<double>()});
  }
  return ring;
}

}  // namespace

std::vector<Region> read_regions(const fs::path& path) {
  if (!fs::exists(path)) throw ValidationError("regions file not found: " + path.string());
  try {
    return parse_regions(read_text_file(path));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

std::vector<Region> parse_regions(std::string_view geojson) {
  json doc;
  try {
    doc = json::parse(geojson);
  } catch (const json::parse_error& e) {
    throw ValidationError(std::string("invalid GeoJSON: ") + e.what());
  }
  if (!doc.is_object() || doc.value("type", "") != "FeatureCollection" || !doc.contains("features") ||
      !doc["features"].is_array()) {
    throw ValidationError("regions file must be a GeoJSON FeatureCollection");
  }
  std::vector<Region> regions;
  std::size_t feature_no = 0;
  for (const auto& feature : doc["features"]) {
    const json props = feature.contains("properties") ? feature["properties"] : json::object();
    const std::string id = property_string(props, "region_id", "");
    if (id.empty()) throw ValidationError("feature " + std::to_string(feature_no) + " is missing region_id");
    Region base;
    base.region_id = id;
    base.name = property_string(props, "name", id);
    base.continent = property_string(props, "continent", "unknown");
    base.income_group = parse_income_group(property_string(props, "income_group", "unknown"));
    base.country_iso3 = property_string(props, "country_iso3", "unknown");

    if (!feature.contains("geometry") || !feature["geometry"].is_object()) {
      throw ValidationError("region '" + id + "' has no geometry");
    }
    const auto& geom = feature["geometry"];
    const std::string type = geom.value("type", "");
    const auto& coords = geom.contains("coordinates") ? geom["coordinates"] : json();
    std::vector<const json*> polygons;
    if (type == "Polygon") {
      polygons.push_back(&coords);
    } else if (type == "MultiPolygon" && coords.is_array()) {
      for (const auto& poly : coords) polygons.push_back(&poly);
    } else {
      throw ValidationError("region '" + id + "' geometry must be Polygon or MultiPolygon, got '" + type + "'");
    }
    for (const json* poly : polygons) {
      if (!poly->is_array() || poly->empty()) throw ValidationError("region '" + id + "' has an empty polygon");
      Region part = base;
      for (const auto& ring : *poly) part.rings.push_back(parse_ring(ring, id));
      validate_region(part);
      regions.push_back(std::move(part));
    }
    ++feature_no;
  }
  return regions;
}

CountryAttributes read_country_attributes(const fs::path& path) {
  const std::string text = read_text_file(path);
  CountryAttributes lookup;
  bool header = true;
  for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    if (trim(line).empty()) return true;
    const auto f = split(line, ',');
    if (header) {
      if (f.size() < 3 || !iequals(trim(f[0]), "country_iso3")) {
        throw ValidationError(path.string() + ": header must be country_iso3,continent,income_group");
      }
      header = false;
      return true;
    }
    if (f.size() < 3) throw ValidationError(path.string() + ": line " + std::to_string(line_no) + " is short");
    lookup[std::string(trim(f[0]))] = {std::string(trim(f[1])), parse_income_group(trim(f[2]))};
    return true;
  });
  return lookup;
}

void apply_country_attributes(std::vector<Region>& regions, const CountryAttributes& lookup) {
  for (auto& r : regions) {
    const auto it = lookup.find(r.country_iso3);
    if (it == lookup.end()) continue;
    if (r.continent == "unknown") r.continent = it->second.first;
    if (r.income_group == IncomeGroup::Unknown) r.income_group = it->second.second;
  }
}

// ---------------------------------------------------------------------------
// Curves

DamageCurve read_curve(const fs::path& path, std::string curve_id) {
  if (!fs::exists(path)) throw ValidationError("curve file not found: " + path.string());
  if (curve_id.empty()) curve_id = path.stem().string();
  try {
    return parse_curve(read_text_file(path), std::move(curve_id));
  } catch (const ValidationError& e) {
    throw ValidationError(path.string() + ": " + e.what());
  }
}

DamageCurve parse_curve(std::string_view csv, std::string curve_id) {
  DamageCurve curve;
  curve.curve_id = std::move(curve_id);
  bool have_unit = false;
  for_each_line(csv, [&](std::size_t line_no, std::string_view line) {
    const auto t = trim(line);
    if (t.empty() || t.front() == '#') return true;
    const auto f = split(t, ',');
    const std::string where = "line " + std::to_string(line_no);
    if (!have_unit) {
      if (f.size() != 2 || !iequals(trim(f[0]), "intensity_unit")) {
        throw ValidationError(where + ": curve must start with 'intensity_unit,<unit>'");
      }
      curve.intensity_unit = parse_intensity_unit(trim(f[1]));
      have_unit = true;
      return true;
    }
    if (f.size() != 2) throw ValidationError(where + ": expected 'intensity,fraction'");
    if (curve.knots.empty() && iequals(trim(f[0]), "intensity")) return true;
    const auto x = parse_double(f[0]);
    const auto y = parse_double(f[1]);
    if (!x || !y) throw ValidationError(where + ": non-numeric knot");
    curve.knots.push_back({*x, *y});
    return true;
  });
  if (!have_unit) throw ValidationError("curve has no intensity_unit header");
  validate_curve(curve);
  return curve;
}

}  // namespace hazcell
