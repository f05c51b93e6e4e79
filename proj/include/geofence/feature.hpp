#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <variant>

#include "geofence/geo_types.hpp"

namespace geofence {

enum class Category { Building, Natural, Landuse, Roads, Waterways, Railways };

constexpr std::string_view to_string(Category c) noexcept {
  switch (c) {
    case Category::Building: return "building";
    case Category::Natural: return "natural";
    case Category::Landuse: return "landuse";
    case Category::Roads: return "roads";
    case Category::Waterways: return "waterways";
    case Category::Railways: return "railways";
  }
  return "building";
}

inline std::optional<Category> category_from_string(std::string_view s) noexcept {
  if (s == "building" || s == "buildings") return Category::Building;
  if (s == "natural") return Category::Natural;
  if (s == "landuse") return Category::Landuse;
  if (s == "roads" || s == "road" || s == "highway") return Category::Roads;
  if (s == "waterways" || s == "waterway") return Category::Waterways;
  if (s == "railways" || s == "railway") return Category::Railways;
  return std::nullopt;
}

using Geometry = std::variant<PolygonShape, MultiPolygonShape, Polyline>;

inline BBox bbox_of(const Geometry& g) {
  return std::visit([](const auto& shape) { return shape.bbox(); }, g);
}

inline int srid_of(const Geometry& g) {
  return std::visit([](const auto& shape) { return shape.srid(); }, g);
}

/// One map object. `ftype` is the value of the tag that decided the category
/// (building=hospital gives "hospital").
struct MapFeature {
  std::int64_t osm_id = 0;
  Category category = Category::Building;
  std::optional<std::string> name;
  std::optional<std::string> ftype;
  std::optional<double> height_m;
  std::map<std::string, std::string> tags;
  Geometry geometry = Polyline{};

  BBox bbox() const { return bbox_of(geometry); }

  /// Tag lookup; the pseudo-tag "type" resolves to ftype.
  std::optional<std::string_view> tag(std::string_view key) const {
    if (key == "type" && ftype) return std::string_view(*ftype);
    if (key == "name" && name) return std::string_view(*name);
    if (auto it = tags.find(std::string(key)); it != tags.end()) return std::string_view(it->second);
    return std::nullopt;
  }
};

}  // namespace geofence
