#pragma once

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "geofence/config.hpp"
#include "geofence/crs.hpp"
#include "geofence/error.hpp"
#include "geofence/feature.hpp"
#include "geofence/geo_types.hpp"
#include "geofence/spatial_store.hpp"

namespace geofence {

/// Which features count as obstacles. The whitelist always wins.
struct ObstacleRuleSet {
  std::set<Category> categories;
  std::vector<TypeFilter> type_filters;
  std::set<std::int64_t> whitelist_ids;
  double default_height_m = 30.0;
  bool height_rule = false;

  static ObstacleRuleSet from_config(const FenceConfig& cfg) {
    return ObstacleRuleSet{cfg.obstacle_categories, cfg.obstacle_type_filters, cfg.whitelist_ids,
                           cfg.default_building_height_m, cfg.height_rule};
  }

  bool is_obstacle(const MapFeature& f) const {
    if (whitelist_ids.contains(f.osm_id)) return false;
    if (categories.contains(f.category)) return true;
    return std::any_of(type_filters.begin(), type_filters.end(), [&](const TypeFilter& tf) {
      const auto v = f.tag(tf.tag);
      return v && *v == tf.value;
    });
  }

  double effective_height(const MapFeature& f) const { return f.height_m.value_or(default_height_m); }

  /// 2.5D: with the height rule on, an obstacle only constrains a UAV at or below it.
  bool constrains(const MapFeature& f, double uav_height_m) const {
    return !height_rule || uav_height_m <= effective_height(f);
  }
};

/// Obstacle ids in ascending order.
inline std::set<std::int64_t> classify_obstacles(const FeatureStore& store, const ObstacleRuleSet& rules) {
  std::set<std::int64_t> out;
  for (const auto& [id, f] : store.features())
    if (rules.is_obstacle(f)) out.insert(id);
  return out;
}

struct SituationEntry {
  std::int64_t osm_id = 0;
  double distance_m = 0.0;
  double bearing_deg = 0.0;

  friend bool operator==(const SituationEntry&, const SituationEntry&) = default;
};

enum class AlertLevel { None = 0, Caution = 1, Stop = 2 };

constexpr std::string_view to_string(AlertLevel level) noexcept {
  switch (level) {
    case AlertLevel::None: return "NONE";
    case AlertLevel::Caution: return "CAUTION";
    case AlertLevel::Stop: return "STOP";
  }
  return "NONE";
}

struct Advisory {
  AlertLevel level = AlertLevel::None;
  std::vector<std::int64_t> triggering_ids;
  std::vector<std::string> messages;
  std::optional<double> eta_s;
  bool alert_event = false;

  friend bool operator==(const Advisory&, const Advisory&) = default;
};

struct TickSnapshot {
  UavState uav;
  BufferZone zone;
  std::vector<std::int64_t> candidates;
  std::vector<std::int64_t> obstacles_in_zone;
  std::vector<SituationEntry> situation;
  Advisory advisory;
};

/// Smallest angle between two compass directions, in [0, 180].
inline double circular_diff(double a_deg, double b_deg) noexcept {
  const double d = std::abs(a_deg - b_deg);
  return std::min(d, 360.0 - d);
}

/// True when the bearing lies strictly inside the cone around the heading.
inline bool cone_test(double heading_deg, double bearing_deg, double half_angle_deg) noexcept {
  return circular_diff(heading_deg, bearing_deg) < half_angle_deg;
}

/// Seconds to cover `distance_m` at `velocity_ms`; nullopt when stationary.
inline std::optional<double> eta_to_object(double distance_m, double velocity_ms) {
  if (!(distance_m >= 0.0)) throw Error(ErrorKind::InvalidInput, "distance must be >= 0");
  if (!(velocity_ms > 0.0)) return std::nullopt;
  return distance_m / velocity_ms;
}

struct BufferSizing {
  double radius_m = 0.0;
  double radius_deg = 0.0;
};

/// Radius that covers `window_s` of flight. Meters convert to degrees along
/// the longitude axis, which gives the larger degree radius.
inline BufferSizing buffer_radius_from_speed(double velocity_ms, double window_s,
                                             const crs::LocalProjection& proj) {
  if (!(velocity_ms >= 0.0) || !std::isfinite(velocity_ms))
    throw Error(ErrorKind::InvalidInput, "velocity must be >= 0");
  if (!(window_s > 0.0) || !std::isfinite(window_s))
    throw Error(ErrorKind::InvalidInput, "window must be > 0");
  const double radius_m = velocity_ms * window_s;
  return BufferSizing{radius_m, radius_m / proj.meters_per_degree_lon()};
}

inline std::string format_situation_line(const SituationEntry& e) {
  return fmt::format("Object OSM ID: {} at degree:{:.1f} with distance of {:.1f} meter", e.osm_id,
                     e.bearing_deg, e.distance_m);
}

inline std::string format_advisory_message(double bearing_deg) {
  return fmt::format("Make diversion to avoid going {:.1f} degree", bearing_deg);
}

/// One entry per obstacle, ascending by distance then id.
inline std::vector<SituationEntry> situation_report(std::span<const MapFeature* const> obstacles,
                                                    const UavState& uav, const crs::LocalProjection& proj) {
  std::vector<SituationEntry> out;
  out.reserve(obstacles.size());
  for (const MapFeature* f : obstacles) {
    SituationEntry e;
    e.osm_id = f->osm_id;
    e.distance_m = distance_to_feature(uav.position, f->geometry, proj);
    const GeoPoint c = geometry_centroid(f->geometry);
    try {
      e.bearing_deg = bearing_to(uav.position, c, proj);
    } catch (const Error& err) {
      if (err.kind() != ErrorKind::UndefinedBearing) throw;
      // UAV sits on the centroid: treat the object as dead ahead.
      e.bearing_deg = uav.heading_deg;
    }
    out.push_back(e);
  }
  std::sort(out.begin(), out.end(), [](const SituationEntry& a, const SituationEntry& b) {
    if (a.distance_m != b.distance_m) return a.distance_m < b.distance_m;
    return a.osm_id < b.osm_id;
  });
  return out;
}

/// Cone-test advisory over a sorted situation report.
inline Advisory advise(std::span<const SituationEntry> situation, const UavState& uav, const FenceConfig& config) {
  Advisory adv;
  std::optional<double> nearest;
  for (const auto& e : situation) {
    if (!cone_test(uav.heading_deg, e.bearing_deg, config.cone_half_angle_deg)) continue;
    adv.triggering_ids.push_back(e.osm_id);
    adv.messages.push_back(format_advisory_message(e.bearing_deg));
    nearest = nearest ? std::min(*nearest, e.distance_m) : e.distance_m;
  }
  if (!nearest) return adv;
  const double stop_distance = std::max(config.min_separation_m, uav.velocity_ms * config.stop_time_s);
  adv.level = *nearest <= stop_distance ? AlertLevel::Stop : AlertLevel::Caution;
  adv.eta_s = eta_to_object(*nearest, uav.velocity_ms);
  adv.alert_event = adv.level == AlertLevel::Stop;
  return adv;
}

/// Buffer radius actually used for a tick.
inline double effective_buffer_radius_deg(const FenceConfig& config, const UavState& uav,
                                          const crs::LocalProjection& proj) {
  if (config.speed_window_s <= 0.0) return config.buffer_radius_deg;
  return std::max(config.buffer_radius_deg,
                  buffer_radius_from_speed(uav.velocity_ms, config.speed_window_s, proj).radius_deg);
}

/// One evaluation cycle: buffer, candidates, in-zone obstacles, situation, advisory.
inline TickSnapshot evaluate_tick(const FeatureStore& store, const ObstacleRuleSet& rules,
                                  const FenceConfig& config, const UavState& uav) {
  const auto proj = store.projection_near(uav.position);
  TickSnapshot snap{uav, build_buffer(uav.position, effective_buffer_radius_deg(config, uav, proj), 8),
                    {}, {}, {}, {}};
  const auto candidates = query_candidates(store, snap.zone);
  std::vector<const MapFeature*> obstacles;
  snap.candidates.reserve(candidates.size());
  for (const MapFeature* f : candidates) {
    snap.candidates.push_back(f->osm_id);
    if (rules.is_obstacle(*f) && rules.constrains(*f, uav.height_m) && within_buffer(f->geometry, snap.zone)) {
      obstacles.push_back(f);
      snap.obstacles_in_zone.push_back(f->osm_id);
    }
  }
  snap.situation = situation_report(obstacles, uav, proj);
  snap.advisory = advise(snap.situation, uav, config);
  return snap;
}

}  // namespace geofence
