#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <numbers>
#include <optional>
#include <set>
#include <variant>
#include <vector>

#include "geofence/crs.hpp"
#include "geofence/error.hpp"
#include "geofence/feature.hpp"
#include "geofence/geo_types.hpp"
#include "geofence/rtree.hpp"

namespace geofence {

// ---------------------------------------------------------------------------
// Buffer zone

/// Degree-space circle around a point, approximated by a closed polygon.
struct BufferZone {
  GeoPoint center;
  double radius_deg = 0.0;
  Ring ring;

  BBox bbox() const noexcept {
    return BBox{center.lon - radius_deg, center.lat - radius_deg, center.lon + radius_deg,
                center.lat + radius_deg};
  }
};

/// 4 * segments_per_quadrant vertices, counterclockwise from due east.
inline BufferZone build_buffer(const GeoPoint& center, double radius_deg, int segments_per_quadrant = 8) {
  if (!(radius_deg > 0.0) || !std::isfinite(radius_deg))
    throw Error(ErrorKind::InvalidInput, "buffer radius must be > 0");
  if (segments_per_quadrant < 1)
    throw Error(ErrorKind::InvalidInput, "segments_per_quadrant must be >= 1");
  const int n = 4 * segments_per_quadrant;
  std::vector<GeoPoint> pts;
  pts.reserve(static_cast<std::size_t>(n) + 1);
  for (int k = 0; k < n; ++k) {
    const double a = 2.0 * std::numbers::pi * k / n;
    pts.push_back(GeoPoint{center.lon + radius_deg * std::cos(a), center.lat + radius_deg * std::sin(a),
                           center.srid});
  }
  pts.push_back(pts.front());
  return BufferZone{center, radius_deg, Ring(std::move(pts))};
}

struct BufferMetrics {
  double equivalent_radius_m = 0.0;
  double area_m2 = 0.0;
};

/// Planar area of the projected ring and the radius of the circle with that area.
inline BufferMetrics buffer_metrics(const BufferZone& zone, const crs::LocalProjection& proj) {
  if (!(std::abs(zone.center.lat) < 89.0))
    throw Error(ErrorKind::ProjectionUndefined, "buffer centered at a polar latitude");
  const double area = std::abs(crs::ring_area_signed(zone.ring, proj));
  return BufferMetrics{std::sqrt(area / std::numbers::pi), area};
}

// ---------------------------------------------------------------------------
// Predicates

namespace detail {

inline void require_same_srid(int a, int b) {
  if (a != b)
    throw Error(ErrorKind::SridMismatch, "srid " + std::to_string(a) + " vs " + std::to_string(b));
}

inline bool within_disc(std::span<const GeoPoint> pts, const BufferZone& zone) {
  const double r2 = zone.radius_deg * zone.radius_deg;
  for (const auto& p : pts) {
    const double dx = p.lon - zone.center.lon, dy = p.lat - zone.center.lat;
    if (dx * dx + dy * dy > r2) return false;
  }
  return true;
}

inline bool on_segment(const GeoPoint& p, const GeoPoint& a, const GeoPoint& b) noexcept {
  const double cross = (b.lon - a.lon) * (p.lat - a.lat) - (b.lat - a.lat) * (p.lon - a.lon);
  // within 1e-12 degree of the supporting line
  const double len = std::hypot(b.lon - a.lon, b.lat - a.lat);
  if (std::abs(cross) > 1e-12 * len) return false;
  return p.lon >= std::min(a.lon, b.lon) - 1e-15 && p.lon <= std::max(a.lon, b.lon) + 1e-15 &&
         p.lat >= std::min(a.lat, b.lat) - 1e-15 && p.lat <= std::max(a.lat, b.lat) + 1e-15;
}

/// Even-odd crossing parity; `boundary` is set when p lies on an edge.
inline bool ring_parity(const GeoPoint& p, const Ring& ring, bool& boundary) noexcept {
  bool inside = false;
  const auto pts = ring.points();
  for (std::size_t i = 0, j = pts.size() - 2; i + 1 < pts.size(); j = i++) {
    const auto& a = pts[i];
    const auto& b = pts[j];
    if (on_segment(p, a, b)) {
      boundary = true;
      return true;
    }
    if ((a.lat > p.lat) != (b.lat > p.lat)) {
      const double x = a.lon + (p.lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat);
      if (p.lon < x) inside = !inside;
    }
  }
  return inside;
}

inline double segment_distance(const LocalXY& p, const LocalXY& a, const LocalXY& b) noexcept {
  const double vx = b.x_m - a.x_m, vy = b.y_m - a.y_m;
  const double wx = p.x_m - a.x_m, wy = p.y_m - a.y_m;
  const double len2 = vx * vx + vy * vy;
  double t = len2 > 0.0 ? (wx * vx + wy * vy) / len2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return std::hypot(wx - t * vx, wy - t * vy);
}

inline double polyline_distance(const LocalXY& p, std::span<const LocalXY> pts) noexcept {
  double best = std::numeric_limits<double>::infinity();
  if (pts.size() == 1) return std::hypot(p.x_m - pts[0].x_m, p.y_m - pts[0].y_m);
  for (std::size_t i = 0; i + 1 < pts.size(); ++i)
    best = std::min(best, segment_distance(p, pts[i], pts[i + 1]));
  return best;
}

}  // namespace detail

/// Even-odd ray casting over the outer ring and holes; boundary points count as inside.
inline bool point_in_polygon(const GeoPoint& p, const PolygonShape& poly) {
  bool boundary = false;
  bool inside = detail::ring_parity(p, poly.outer, boundary);
  if (boundary) return true;
  for (const auto& hole : poly.holes) {
    const bool in_hole = detail::ring_parity(p, hole, boundary);
    if (boundary) return true;
    if (in_hole) inside = !inside;
  }
  return inside;
}

inline bool within_buffer(const PolygonShape& poly, const BufferZone& zone) {
  detail::require_same_srid(poly.srid(), zone.center.srid);
  if (!detail::within_disc(poly.outer.points(), zone)) return false;
  for (const auto& h : poly.holes)
    if (!detail::within_disc(h.points(), zone)) return false;
  return true;
}

inline bool within_buffer(const MultiPolygonShape& mp, const BufferZone& zone) {
  if (mp.polygons.empty()) return false;
  for (const auto& p : mp.polygons)
    if (!within_buffer(p, zone)) return false;
  return true;
}

inline bool within_buffer(const Polyline& line, const BufferZone& zone) {
  detail::require_same_srid(line.srid(), zone.center.srid);
  return !line.points.empty() && detail::within_disc(line.points, zone);
}

inline bool within_buffer(const Geometry& g, const BufferZone& zone) {
  return std::visit([&](const auto& shape) { return within_buffer(shape, zone); }, g);
}

/// Meters from the point to the polygon's outer ring; 0 when inside.
inline double distance_to_feature(const GeoPoint& uav, const PolygonShape& poly,
                                  const crs::LocalProjection& proj) {
  if (detail::ring_moments(poly.outer).area == 0.0)
    throw Error(ErrorKind::DegenerateGeometry, "polygon has zero area");
  bool boundary = false;
  if (detail::ring_parity(uav, poly.outer, boundary)) return 0.0;
  const auto p = proj.to_local(uav);
  const auto ring = proj.to_local(poly.outer);
  return detail::polyline_distance(p, ring);
}

inline double distance_to_feature(const GeoPoint& uav, const MultiPolygonShape& mp,
                                  const crs::LocalProjection& proj) {
  if (mp.polygons.empty()) throw Error(ErrorKind::DegenerateGeometry, "empty multipolygon");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& p : mp.polygons) best = std::min(best, distance_to_feature(uav, p, proj));
  return best;
}

inline double distance_to_feature(const GeoPoint& uav, const Polyline& line,
                                  const crs::LocalProjection& proj) {
  if (line.points.empty()) throw Error(ErrorKind::DegenerateGeometry, "empty polyline");
  std::vector<LocalXY> pts;
  pts.reserve(line.points.size());
  for (const auto& q : line.points) pts.push_back(proj.to_local(q));
  return detail::polyline_distance(proj.to_local(uav), pts);
}

inline double distance_to_feature(const GeoPoint& uav, const Geometry& g, const crs::LocalProjection& proj) {
  return std::visit([&](const auto& shape) { return distance_to_feature(uav, shape, proj); }, g);
}

/// Compass bearing from `from` to `to`: 0 = north, 90 = east.
inline double bearing_to(const GeoPoint& from, const GeoPoint& to, const crs::LocalProjection& proj) {
  const auto a = proj.to_local(from);
  const auto b = proj.to_local(to);
  const double dx = b.x_m - a.x_m, dy = b.y_m - a.y_m;
  if (dx == 0.0 && dy == 0.0) throw Error(ErrorKind::UndefinedBearing, "coincident points");
  return normalize_heading(crs::rad2deg(std::atan2(dx, dy)));
}

/// Area-weighted for polygons, length-weighted for polylines.
inline GeoPoint geometry_centroid(const Geometry& g) {
  if (const auto* poly = std::get_if<PolygonShape>(&g)) return polygon_centroid(*poly);
  if (const auto* mp = std::get_if<MultiPolygonShape>(&g)) {
    double total = 0.0, sx = 0.0, sy = 0.0;
    for (const auto& p : mp->polygons) {
      const double a = std::abs(detail::ring_moments(p.outer).area);
      const auto c = polygon_centroid(p);
      total += a;
      sx += a * c.lon;
      sy += a * c.lat;
    }
    if (total == 0.0) throw Error(ErrorKind::DegenerateGeometry, "multipolygon has zero area");
    return GeoPoint{sx / total, sy / total, mp->srid()};
  }
  const auto& line = std::get<Polyline>(g);
  if (line.points.empty()) throw Error(ErrorKind::DegenerateGeometry, "empty polyline");
  double total = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i + 1 < line.points.size(); ++i) {
    const auto& a = line.points[i];
    const auto& b = line.points[i + 1];
    const double len = std::hypot(b.lon - a.lon, b.lat - a.lat);
    total += len;
    sx += len * 0.5 * (a.lon + b.lon);
    sy += len * 0.5 * (a.lat + b.lat);
  }
  if (total == 0.0) return line.points.front();
  return GeoPoint{sx / total, sy / total, line.srid()};
}

// ---------------------------------------------------------------------------
// Feature store

/// Id-keyed features plus a packed R-tree over their bounding boxes.
/// One writer (add/recenter) or many readers; never both at once.
class FeatureStore {
 public:
  static constexpr double kRecenterThresholdDeg = 0.1;

  explicit FeatureStore(crs::ProjectionMode mode = crs::ProjectionMode::Standard) : mode_(mode) {}

  explicit FeatureStore(std::vector<MapFeature> features,
                        crs::ProjectionMode mode = crs::ProjectionMode::Standard)
      : mode_(mode) {
    add(std::move(features));
  }

  /// Inserts features and rebuilds the index. Duplicate ids are rejected
  /// before anything is inserted.
  void add(std::vector<MapFeature> features) {
    std::set<std::int64_t> seen;
    for (const auto& f : features) {
      if (features_.contains(f.osm_id) || !seen.insert(f.osm_id).second)
        throw Error(ErrorKind::InvalidInput, "duplicate osm_id " + std::to_string(f.osm_id));
    }
    for (auto& f : features) {
      const auto id = f.osm_id;
      features_.emplace(id, std::move(f));
    }
    rebuild_index();
  }

  std::size_t size() const noexcept { return features_.size(); }
  bool empty() const noexcept { return features_.empty(); }

  const MapFeature* find(std::int64_t id) const {
    auto it = features_.find(id);
    return it == features_.end() ? nullptr : &it->second;
  }

  const MapFeature& at(std::int64_t id) const {
    if (const auto* f = find(id)) return *f;
    throw Error(ErrorKind::InvalidInput, "unknown osm_id " + std::to_string(id));
  }

  /// Features in ascending id order.
  const std::map<std::int64_t, MapFeature>& features() const noexcept { return features_; }
  const StaticRTree<std::int64_t>& index() const noexcept { return index_; }
  crs::ProjectionMode projection_mode() const noexcept { return mode_; }

  const std::optional<crs::LocalProjection>& projection() const noexcept { return projection_; }

  /// Moves the cached projection origin to `at` if it is unset or more than
  /// 0.1 degree away. Returns true when it changed.
  bool recenter(const GeoPoint& at) {
    if (projection_ && std::abs(projection_->origin().lon - at.lon) <= kRecenterThresholdDeg &&
        std::abs(projection_->origin().lat - at.lat) <= kRecenterThresholdDeg)
      return false;
    projection_.emplace(at, mode_);
    return true;
  }

  /// The cached projection when it is within 0.1 degree of `at`, otherwise
  /// a fresh one centered on `at`. Does not mutate the store.
  crs::LocalProjection projection_near(const GeoPoint& at) const {
    if (projection_ && std::abs(projection_->origin().lon - at.lon) <= kRecenterThresholdDeg &&
        std::abs(projection_->origin().lat - at.lat) <= kRecenterThresholdDeg)
      return *projection_;
    return crs::LocalProjection(at, mode_);
  }

 private:
  void rebuild_index() {
    std::vector<StaticRTree<std::int64_t>::Entry> entries;
    entries.reserve(features_.size());
    for (const auto& [id, f] : features_) entries.push_back({f.bbox(), id});
    index_.build(std::move(entries));
  }

  crs::ProjectionMode mode_;
  std::map<std::int64_t, MapFeature> features_;
  StaticRTree<std::int64_t> index_;
  std::optional<crs::LocalProjection> projection_;
};

/// Features whose bounding box meets the zone's bounding box, by ascending id.
inline std::vector<const MapFeature*> query_candidates(const FeatureStore& store, const BufferZone& zone) {
  std::vector<std::int64_t> ids = store.index().query(zone.bbox());
  std::sort(ids.begin(), ids.end());
  std::vector<const MapFeature*> out;
  out.reserve(ids.size());
  for (auto id : ids) out.push_back(&store.at(id));
  return out;
}

}  // namespace geofence
