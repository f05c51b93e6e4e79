#pragma once

#include <charconv>
#include <cmath>
#include <cstdint>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "geofence/crs.hpp"
#include "geofence/error.hpp"
#include "geofence/feature.hpp"
#include "geofence/geo_types.hpp"

namespace geofence {

struct TypeFilter {
  std::string tag;
  std::string value;

  friend bool operator==(const TypeFilter&, const TypeFilter&) = default;
  friend auto operator<=>(const TypeFilter&, const TypeFilter&) = default;
};

/// Construction-file parameters.
struct FenceConfig {
  double buffer_radius_deg = 0.012;
  std::set<Category> obstacle_categories{Category::Building};
  std::vector<TypeFilter> obstacle_type_filters;
  std::set<std::int64_t> whitelist_ids;
  double default_building_height_m = 30.0;
  double cone_half_angle_deg = 10.0;
  int raster_px = 500;
  double stop_time_s = 5.0;
  double min_separation_m = 50.0;

  // 2.5D rule: obstacles only constrain a UAV at or below their height.
  bool height_rule = false;
  // When > 0 the buffer grows to cover velocity * window; buffer_radius_deg is the floor.
  double speed_window_s = 0.0;
  crs::HelmertParams helmert{};
  double geoid_separation_m = 0.0;
  crs::ProjectionMode projection_mode = crs::ProjectionMode::Standard;

  /// Throws Config naming the offending key.
  void validate() const {
    auto bad = [](const std::string& key, const std::string& why) {
      throw Error(ErrorKind::Config, key + ": " + why);
    };
    if (!(buffer_radius_deg > 0.0) || !std::isfinite(buffer_radius_deg))
      bad("buffer_radius_deg", "must be > 0");
    if (!(cone_half_angle_deg > 0.0 && cone_half_angle_deg < 90.0))
      bad("cone_half_angle_deg", "must be in (0, 90)");
    if (raster_px < 16 || raster_px > 4096) bad("raster_px", "must be in [16, 4096]");
    if (!(default_building_height_m >= 0.0) || !std::isfinite(default_building_height_m))
      bad("default_building_height_m", "must be finite and >= 0");
    if (!(stop_time_s >= 0.0) || !std::isfinite(stop_time_s)) bad("stop_time_s", "must be >= 0");
    if (!(min_separation_m >= 0.0) || !std::isfinite(min_separation_m))
      bad("min_separation_m", "must be >= 0");
    if (!(speed_window_s >= 0.0) || !std::isfinite(speed_window_s))
      bad("speed_window_s", "must be >= 0");
    if (!std::isfinite(geoid_separation_m) || std::abs(geoid_separation_m) > crs::kMaxGeoidSeparationM)
      bad("geoid_separation_m", "must be within +/-120 m");
    try {
      helmert.validate();
    } catch (const Error& e) {
      bad("helmert", e.what());
    }
  }
};

struct ConfigParseResult {
  FenceConfig config;
  std::vector<std::string> warnings;
};

namespace detail {

inline std::string_view trim(std::string_view s) noexcept {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

template <typename T>
bool parse_number(std::string_view s, T& out) noexcept {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  if (s.empty()) return false;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
  if (ec != std::errc() || ptr != s.data() + s.size()) return false;
  if constexpr (std::is_floating_point_v<T>) return std::isfinite(out);
  return true;
}

inline std::vector<std::string_view> split_list(std::string_view s) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    const auto next = s.find_first_of(",;", start);
    auto item = trim(s.substr(start, next == s.npos ? s.npos : next - start));
    if (!item.empty()) out.push_back(item);
    if (next == s.npos) break;
    start = next + 1;
  }
  return out;
}

}  // namespace detail

/// Parses `key,value` lines. `#` starts a comment line. Absent keys keep
/// their defaults; unknown keys become warnings. List values separate items
/// with ',' or ';'.
inline ConfigParseResult parse_construction_file(std::string_view text) {
  ConfigParseResult out;
  FenceConfig& cfg = out.config;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    const auto nl = text.find('\n', start);
    const auto raw = text.substr(start, nl == text.npos ? text.npos : nl - start);
    start = nl == text.npos ? text.size() : nl + 1;
    ++line_no;
    const auto line = detail::trim(raw);
    if (line.empty() || line.front() == '#') continue;

    const auto comma = line.find(',');
    const std::string key(detail::trim(line.substr(0, comma)));
    const auto value = comma == line.npos ? std::string_view{} : detail::trim(line.substr(comma + 1));
    auto fail = [&](const std::string& why) -> void {
      throw Error(ErrorKind::Config,
                  key + " (line " + std::to_string(line_no) + "): " + why + " '" + std::string(value) + "'");
    };
    auto number = [&](auto& field) {
      if (!detail::parse_number(value, field)) fail("not a number");
    };

    if (key == "buffer_radius_deg") {
      number(cfg.buffer_radius_deg);
    } else if (key == "default_building_height_m") {
      number(cfg.default_building_height_m);
    } else if (key == "cone_half_angle_deg") {
      number(cfg.cone_half_angle_deg);
    } else if (key == "raster_px") {
      number(cfg.raster_px);
    } else if (key == "stop_time_s") {
      number(cfg.stop_time_s);
    } else if (key == "min_separation_m") {
      number(cfg.min_separation_m);
    } else if (key == "speed_window_s") {
      number(cfg.speed_window_s);
    } else if (key == "geoid_separation_m") {
      number(cfg.geoid_separation_m);
    } else if (key == "obstacle_categories") {
      cfg.obstacle_categories.clear();
      for (auto item : detail::split_list(value)) {
        auto c = category_from_string(item);
        if (!c) fail("unknown category");
        cfg.obstacle_categories.insert(*c);
      }
    } else if (key == "obstacle_type_filter" || key == "obstacle_type_filters") {
      for (auto item : detail::split_list(value)) {
        const auto eq = item.find('=');
        if (eq == item.npos || eq == 0 || eq + 1 == item.size()) fail("expected tag=value");
        cfg.obstacle_type_filters.push_back(
            TypeFilter{std::string(detail::trim(item.substr(0, eq))),
                       std::string(detail::trim(item.substr(eq + 1)))});
      }
    } else if (key == "whitelist_ids") {
      for (auto item : detail::split_list(value)) {
        std::int64_t id = 0;
        if (!detail::parse_number(item, id)) fail("not an osm id");
        cfg.whitelist_ids.insert(id);
      }
    } else if (key == "height_rule") {
      if (value == "on" || value == "true" || value == "1") cfg.height_rule = true;
      else if (value == "off" || value == "false" || value == "0") cfg.height_rule = false;
      else fail("expected on/off");
    } else if (key == "projection_mode") {
      if (value == "standard") cfg.projection_mode = crs::ProjectionMode::Standard;
      else if (value == "rounded") cfg.projection_mode = crs::ProjectionMode::Rounded;
      else fail("expected standard or rounded");
    } else if (key == "helmert") {
      try {
        cfg.helmert = crs::parse_helmert_params(value);
      } catch (const Error& e) {
        fail(e.what());
      }
    } else {
      out.warnings.push_back("line " + std::to_string(line_no) + ": unknown key '" + key + "'");
      continue;
    }
  }
  cfg.validate();
  return out;
}

/// "lat,lon,height_m,heading_deg,velocity_ms". Heading is normalized and the
/// timestamp set to now.
inline UavState parse_uav_line(std::string_view text) {
  auto fields = std::vector<std::string_view>{};
  std::size_t start = 0;
  text = detail::trim(text);
  while (true) {
    const auto comma = text.find(',', start);
    fields.push_back(text.substr(start, comma == text.npos ? text.npos : comma - start));
    if (comma == text.npos) break;
    start = comma + 1;
  }
  if (fields.size() != 5)
    throw FieldError("uav line needs 5 fields (lat,lon,height_m,heading_deg,velocity_ms), got " +
                         std::to_string(fields.size()),
                     -1);
  static constexpr const char* kNames[] = {"lat", "lon", "height_m", "heading_deg", "velocity_ms"};
  double v[5];
  for (int i = 0; i < 5; ++i)
    if (!detail::parse_number(fields[i], v[i]))
      throw FieldError("uav field " + std::to_string(i) + " (" + kNames[i] + ") is not numeric", i);
  if (v[0] < -90.0 || v[0] > 90.0) throw FieldError("uav field 0 (lat) out of range", 0);
  if (v[1] < -180.0 || v[1] > 180.0) throw FieldError("uav field 1 (lon) out of range", 1);
  if (v[4] < 0.0) throw FieldError("uav field 4 (velocity_ms) is negative", 4);
  return UavState::make(GeoPoint{v[1], v[0], kWgs84Srid}, v[2], v[3], v[4]);
}

}  // namespace geofence
