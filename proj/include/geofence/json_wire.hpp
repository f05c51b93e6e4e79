#pragma once

#include <json.hpp>

#include <cstdint>
#include <string>
#include <vector>

#include "geofence/config.hpp"
#include "geofence/error.hpp"
#include "geofence/feature.hpp"
#include "geofence/fence_engine.hpp"
#include "geofence/geo_types.hpp"
#include "geofence/wkt.hpp"

// JSON wire format shared by the HTTP API and the session dump.
namespace geofence::wire {

using nlohmann::json;

inline json to_json(const UavState& u) {
  return json{{"lat", u.position.lat},
              {"lon", u.position.lon},
              {"height_m", u.height_m},
              {"heading_deg", u.heading_deg},
              {"velocity_ms", u.velocity_ms}};
}

/// Field indices follow the UAV line order: lat, lon, height_m, heading_deg, velocity_ms.
inline UavState uav_from_json(const json& j) {
  if (!j.is_object()) throw FieldError("uav body must be a JSON object", -1);
  static constexpr const char* kNames[] = {"lat", "lon", "height_m", "heading_deg", "velocity_ms"};
  double v[5];
  for (int i = 0; i < 5; ++i) {
    auto it = j.find(kNames[i]);
    if (it == j.end()) throw FieldError(std::string("missing field ") + kNames[i], i);
    if (!it->is_number()) throw FieldError(std::string("field ") + kNames[i] + " is not a number", i);
    v[i] = it->get<double>();
  }
  if (v[0] < -90.0 || v[0] > 90.0) throw FieldError("field lat out of range", 0);
  if (v[1] < -180.0 || v[1] > 180.0) throw FieldError("field lon out of range", 1);
  if (!std::isfinite(v[2])) throw FieldError("field height_m not finite", 2);
  if (!std::isfinite(v[3])) throw FieldError("field heading_deg not finite", 3);
  if (!(v[4] >= 0.0) || !std::isfinite(v[4])) throw FieldError("field velocity_ms must be >= 0", 4);
  return UavState::make(GeoPoint{v[1], v[0], kWgs84Srid}, v[2], v[3], v[4]);
}

inline json to_json(const FenceConfig& c) {
  json cats = json::array();
  for (auto cat : c.obstacle_categories) cats.push_back(std::string(to_string(cat)));
  json filters = json::array();
  for (const auto& f : c.obstacle_type_filters) filters.push_back({{"tag", f.tag}, {"value", f.value}});
  return json{{"buffer_radius_deg", c.buffer_radius_deg},
              {"obstacle_categories", cats},
              {"obstacle_type_filters", filters},
              {"whitelist_ids", c.whitelist_ids},
              {"default_building_height_m", c.default_building_height_m},
              {"cone_half_angle_deg", c.cone_half_angle_deg},
              {"raster_px", c.raster_px},
              {"stop_time_s", c.stop_time_s},
              {"min_separation_m", c.min_separation_m},
              {"height_rule", c.height_rule},
              {"speed_window_s", c.speed_window_s}};
}

/// Applies the keys present in `patch` on top of `base`. Unknown keys and
/// invalid values throw Config.
inline FenceConfig apply_config_patch(FenceConfig base, const json& patch) {
  if (!patch.is_object()) throw Error(ErrorKind::Config, "config patch must be a JSON object");
  try {
    for (const auto& [key, value] : patch.items()) {
      if (key == "buffer_radius_deg") base.buffer_radius_deg = value.get<double>();
      else if (key == "default_building_height_m") base.default_building_height_m = value.get<double>();
      else if (key == "cone_half_angle_deg") base.cone_half_angle_deg = value.get<double>();
      else if (key == "raster_px") base.raster_px = value.get<int>();
      else if (key == "stop_time_s") base.stop_time_s = value.get<double>();
      else if (key == "min_separation_m") base.min_separation_m = value.get<double>();
      else if (key == "height_rule") base.height_rule = value.get<bool>();
      else if (key == "speed_window_s") base.speed_window_s = value.get<double>();
      else if (key == "whitelist_ids") base.whitelist_ids = value.get<std::set<std::int64_t>>();
      else if (key == "obstacle_categories") {
        base.obstacle_categories.clear();
        for (const auto& item : value) {
          auto cat = category_from_string(item.get<std::string>());
          if (!cat) throw Error(ErrorKind::Config, "obstacle_categories: unknown category " + item.dump());
          base.obstacle_categories.insert(*cat);
        }
      } else if (key == "obstacle_type_filters") {
        base.obstacle_type_filters.clear();
        for (const auto& item : value)
          base.obstacle_type_filters.push_back(
              TypeFilter{item.at("tag").get<std::string>(), item.at("value").get<std::string>()});
      } else {
        throw Error(ErrorKind::Config, "unknown config key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Config, std::string("bad config value: ") + e.what());
  }
  base.validate();
  return base;
}

inline json to_json(const std::vector<SituationEntry>& entries) {
  json arr = json::array();
  for (const auto& e : entries)
    arr.push_back({{"osm_id", e.osm_id}, {"distance_m", e.distance_m}, {"bearing_deg", e.bearing_deg}});
  return json{{"entries", arr}};
}

inline json to_json(const Advisory& a) {
  return json{{"level", std::string(to_string(a.level))},
              {"messages", a.messages},
              {"triggering_ids", a.triggering_ids},
              {"eta_s", a.eta_s ? json(*a.eta_s) : json(nullptr)},
              {"alert_event", a.alert_event}};
}

// ---------------------------------------------------------------------------
// Feature dump

inline json to_json(const MapFeature& f) {
  json j{{"osm_id", f.osm_id}, {"category", std::string(to_string(f.category))}, {"tags", f.tags}};
  if (f.name) j["name"] = *f.name;
  if (f.ftype) j["ftype"] = *f.ftype;
  if (f.height_m) j["height_m"] = *f.height_m;
  if (const auto* poly = std::get_if<PolygonShape>(&f.geometry)) {
    j["wkt"] = wkt::serialize_wkt(*poly);
  } else if (const auto* mp = std::get_if<MultiPolygonShape>(&f.geometry)) {
    j["wkt"] = wkt::serialize_wkt(*mp);
  } else {
    json coords = json::array();
    for (const auto& p : std::get<Polyline>(f.geometry).points) coords.push_back({p.lon, p.lat});
    j["line"] = coords;
  }
  return j;
}

inline MapFeature feature_from_json(const json& j) {
  try {
    MapFeature f;
    f.osm_id = j.at("osm_id").get<std::int64_t>();
    const auto cat = category_from_string(j.at("category").get<std::string>());
    if (!cat) throw Error(ErrorKind::Parse, "feature " + std::to_string(f.osm_id) + ": unknown category");
    f.category = *cat;
    if (j.contains("tags")) f.tags = j.at("tags").get<std::map<std::string, std::string>>();
    if (j.contains("name")) f.name = j.at("name").get<std::string>();
    if (j.contains("ftype")) f.ftype = j.at("ftype").get<std::string>();
    if (j.contains("height_m")) f.height_m = j.at("height_m").get<double>();
    if (j.contains("wkt")) {
      const auto text = j.at("wkt").get<std::string>();
      auto mp = wkt::parse_wkt(text);
      if (text.starts_with("POLYGON") && mp.polygons.size() == 1)
        f.geometry = std::move(mp.polygons.front());
      else
        f.geometry = std::move(mp);
    } else {
      Polyline line;
      for (const auto& c : j.at("line")) line.points.push_back(GeoPoint{c.at(0).get<double>(), c.at(1).get<double>()});
      f.geometry = std::move(line);
    }
    return f;
  } catch (const json::exception& e) {
    throw Error(ErrorKind::Parse, std::string("bad feature record: ") + e.what());
  }
}

inline constexpr const char* kSessionFormat = "geofence-session/1";

inline json session_dump(const std::vector<MapFeature>& features, const std::vector<std::string>& warnings) {
  json arr = json::array();
  for (const auto& f : features) arr.push_back(to_json(f));
  return json{{"format", kSessionFormat}, {"features", arr}, {"warnings", warnings}};
}

inline std::vector<MapFeature> features_from_dump(const json& dump) {
  if (!dump.is_object() || dump.value("format", "") != kSessionFormat)
    throw Error(ErrorKind::Parse, "not a geofence session dump");
  std::vector<MapFeature> out;
  for (const auto& f : dump.at("features")) out.push_back(feature_from_json(f));
  return out;
}

}  // namespace geofence::wire
