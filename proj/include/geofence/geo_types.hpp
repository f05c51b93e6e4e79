#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "geofence/error.hpp"

namespace geofence {

inline constexpr int kWgs84Srid = 4326;

/// WGS84 position in decimal degrees.
struct GeoPoint {
  double lon = 0.0;
  double lat = 0.0;
  int srid = kWgs84Srid;

  bool in_range() const noexcept {
    return std::isfinite(lon) && std::isfinite(lat) && lon >= -180.0 && lon <= 180.0 &&
           lat >= -90.0 && lat <= 90.0;
  }

  friend bool operator==(const GeoPoint&, const GeoPoint&) = default;
};

/// Meters east/north of a projection origin.
struct LocalXY {
  double x_m = 0.0;
  double y_m = 0.0;

  friend bool operator==(const LocalXY&, const LocalXY&) = default;
};

/// Axis-aligned box in lon/lat degrees.
struct BBox {
  double min_lon = std::numeric_limits<double>::infinity();
  double min_lat = std::numeric_limits<double>::infinity();
  double max_lon = -std::numeric_limits<double>::infinity();
  double max_lat = -std::numeric_limits<double>::infinity();

  bool empty() const noexcept { return min_lon > max_lon || min_lat > max_lat; }

  void expand(const GeoPoint& p) noexcept {
    min_lon = std::min(min_lon, p.lon);
    min_lat = std::min(min_lat, p.lat);
    max_lon = std::max(max_lon, p.lon);
    max_lat = std::max(max_lat, p.lat);
  }

  void expand(const BBox& b) noexcept {
    min_lon = std::min(min_lon, b.min_lon);
    min_lat = std::min(min_lat, b.min_lat);
    max_lon = std::max(max_lon, b.max_lon);
    max_lat = std::max(max_lat, b.max_lat);
  }

  bool intersects(const BBox& o) const noexcept {
    return !empty() && !o.empty() && min_lon <= o.max_lon && o.min_lon <= max_lon &&
           min_lat <= o.max_lat && o.min_lat <= max_lat;
  }

  bool contains(const GeoPoint& p) const noexcept {
    return p.lon >= min_lon && p.lon <= max_lon && p.lat >= min_lat && p.lat <= max_lat;
  }

  double center_lon() const noexcept { return 0.5 * (min_lon + max_lon); }
  double center_lat() const noexcept { return 0.5 * (min_lat + max_lat); }

  friend bool operator==(const BBox&, const BBox&) = default;
};

/// Closed linear ring. Construction enforces closure, a minimum of three
/// distinct vertices and a single srid; a Ring that exists is valid.
class Ring {
 public:
  explicit Ring(std::vector<GeoPoint> points) : points_(std::move(points)) { validate(); }

  /// Closes the sequence by repeating the first point when needed.
  static Ring closing(std::vector<GeoPoint> points) {
    if (!points.empty() && points.front() != points.back()) points.push_back(points.front());
    return Ring(std::move(points));
  }

  std::span<const GeoPoint> points() const noexcept { return points_; }
  std::size_t size() const noexcept { return points_.size(); }
  const GeoPoint& operator[](std::size_t i) const noexcept { return points_[i]; }
  int srid() const noexcept { return points_.front().srid; }

  BBox bbox() const noexcept {
    BBox b;
    for (const auto& p : points_) b.expand(p);
    return b;
  }

  friend bool operator==(const Ring&, const Ring&) = default;

 private:
  void validate() const {
    if (points_.size() < 4)
      throw Error(ErrorKind::InvalidGeometry,
                  "ring needs at least 4 stored points, got " + std::to_string(points_.size()));
    if (points_.front() != points_.back())
      throw Error(ErrorKind::InvalidGeometry, "ring is not closed");
    const int srid = points_.front().srid;
    for (const auto& p : points_) {
      if (p.srid != srid) throw Error(ErrorKind::SridMismatch, "ring mixes srids");
      if (!std::isfinite(p.lon) || !std::isfinite(p.lat))
        throw Error(ErrorKind::InvalidGeometry, "ring has a non-finite coordinate");
    }
    std::vector<std::pair<double, double>> distinct;
    distinct.reserve(points_.size());
    for (std::size_t i = 0; i + 1 < points_.size(); ++i)
      distinct.emplace_back(points_[i].lon, points_[i].lat);
    std::sort(distinct.begin(), distinct.end());
    distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
    if (distinct.size() < 3)
      throw Error(ErrorKind::DegenerateGeometry, "ring has fewer than 3 distinct vertices");
  }

  std::vector<GeoPoint> points_;
};

struct PolygonShape {
  Ring outer;
  std::vector<Ring> holes;

  int srid() const noexcept { return outer.srid(); }
  BBox bbox() const noexcept { return outer.bbox(); }

  friend bool operator==(const PolygonShape&, const PolygonShape&) = default;
};

struct MultiPolygonShape {
  std::vector<PolygonShape> polygons;

  int srid() const noexcept { return polygons.empty() ? kWgs84Srid : polygons.front().srid(); }

  BBox bbox() const noexcept {
    BBox b;
    for (const auto& p : polygons) b.expand(p.bbox());
    return b;
  }

  friend bool operator==(const MultiPolygonShape&, const MultiPolygonShape&) = default;
};

/// Open line (roads, waterways, railways).
struct Polyline {
  std::vector<GeoPoint> points;

  int srid() const noexcept { return points.empty() ? kWgs84Srid : points.front().srid; }

  BBox bbox() const noexcept {
    BBox b;
    for (const auto& p : points) b.expand(p);
    return b;
  }

  friend bool operator==(const Polyline&, const Polyline&) = default;
};

/// Maps any finite angle onto [0, 360).
inline double normalize_heading(double raw_deg) {
  if (!std::isfinite(raw_deg)) throw Error(ErrorKind::InvalidInput, "heading is not finite");
  double h = std::fmod(raw_deg, 360.0);
  if (h < 0.0) h += 360.0;
  // fmod of a tiny negative value can round up to exactly 360
  if (h >= 360.0) h = 0.0;
  return h;
}

struct UavState {
  GeoPoint position;
  double height_m = 0.0;
  double heading_deg = 0.0;
  double velocity_ms = 0.0;
  std::chrono::system_clock::time_point last_update{};

  /// Validates and normalizes heading.
  static UavState make(GeoPoint position, double height_m, double heading_deg, double velocity_ms,
                       std::chrono::system_clock::time_point at = std::chrono::system_clock::now()) {
    if (!position.in_range())
      throw Error(ErrorKind::InvalidInput, "uav position out of range");
    if (!std::isfinite(height_m)) throw Error(ErrorKind::InvalidInput, "uav height not finite");
    if (!std::isfinite(velocity_ms) || velocity_ms < 0.0)
      throw Error(ErrorKind::InvalidInput, "uav velocity must be finite and >= 0");
    return UavState{position, height_m, normalize_heading(heading_deg), velocity_ms, at};
  }
};

/// Shoelace area of a closed planar ring; positive for counterclockwise order.
inline double ring_area_signed(std::span<const LocalXY> ring) {
  if (ring.size() < 4 || ring.front() != ring.back())
    throw Error(ErrorKind::InvalidGeometry, "ring is not closed");
  const double ox = ring.front().x_m;
  const double oy = ring.front().y_m;
  double twice = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const double x0 = ring[i].x_m - ox, y0 = ring[i].y_m - oy;
    const double x1 = ring[i + 1].x_m - ox, y1 = ring[i + 1].y_m - oy;
    twice += x0 * y1 - x1 * y0;
  }
  return 0.5 * twice;
}

namespace detail {

struct PlanarMoments {
  double area = 0.0;  // signed, in squared degrees
  double cx = 0.0;    // centroid relative to the first vertex
  double cy = 0.0;
};

inline PlanarMoments ring_moments(const Ring& ring) {
  const auto pts = ring.points();
  const double ox = pts.front().lon, oy = pts.front().lat;
  double twice = 0.0, sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double x0 = pts[i].lon - ox, y0 = pts[i].lat - oy;
    const double x1 = pts[i + 1].lon - ox, y1 = pts[i + 1].lat - oy;
    const double cross = x0 * y1 - x1 * y0;
    twice += cross;
    sx += (x0 + x1) * cross;
    sy += (y0 + y1) * cross;
  }
  PlanarMoments m;
  m.area = 0.5 * twice;
  if (twice != 0.0) {
    m.cx = sx / (3.0 * twice);
    m.cy = sy / (3.0 * twice);
  }
  return m;
}

}  // namespace detail

/// Area-weighted centroid of the outer ring, computed in degree space.
inline GeoPoint polygon_centroid(const PolygonShape& poly) {
  const auto m = detail::ring_moments(poly.outer);
  const auto bb = poly.outer.bbox();
  const double scale = std::max(bb.max_lon - bb.min_lon, bb.max_lat - bb.min_lat);
  if (m.area == 0.0 || std::abs(m.area) <= 1e-15 * scale * scale)
    throw Error(ErrorKind::DegenerateGeometry, "zero-area ring has no centroid");
  const auto& o = poly.outer[0];
  return GeoPoint{o.lon + m.cx, o.lat + m.cy, o.srid};
}

}  // namespace geofence
