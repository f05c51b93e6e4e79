#pragma once

#include <array>
#include <cmath>
#include <functional>
#include <numbers>
#include <string>
#include <string_view>
#include <vector>

#include "geofence/error.hpp"
#include "geofence/geo_types.hpp"

namespace geofence::crs {

inline constexpr double kStandardMetersPerDegree = 111320.0;
/// Round figure of 100 km per degree.
inline constexpr double kRoundedMetersPerDegree = 100000.0;
inline constexpr double kMetersPerSecondPerKnot = 0.514444;
inline constexpr double kMaxGeoidSeparationM = 120.0;

inline double deg2rad(double deg) noexcept { return deg * std::numbers::pi / 180.0; }
inline double rad2deg(double rad) noexcept { return rad * 180.0 / std::numbers::pi; }

/// Degrees, minutes, seconds to decimal degrees. The sign is carried by `deg`.
inline double sexagesimal_to_decimal(int deg, int min, double sec) {
  if (min < 0 || min >= 60) throw Error(ErrorKind::InvalidInput, "minutes out of [0, 60)");
  if (!(sec >= 0.0 && sec < 60.0)) throw Error(ErrorKind::InvalidInput, "seconds out of [0, 60)");
  const double magnitude = std::abs(static_cast<double>(deg)) + min / 60.0 + sec / 3600.0;
  return deg < 0 ? -magnitude : magnitude;
}

inline double knots_to_ms(double v_kn) {
  if (!std::isfinite(v_kn) || v_kn < 0.0)
    throw Error(ErrorKind::InvalidInput, "speed in knots must be finite and >= 0");
  return v_kn * kMetersPerSecondPerKnot;
}

// ---------------------------------------------------------------------------
// Geoid height

/// Geoid-ellipsoid separation N as a function of position.
class GeoidModel {
 public:
  using Lookup = std::function<double(const GeoPoint&)>;

  explicit GeoidModel(Lookup lookup) : lookup_(std::move(lookup)) {}

  static GeoidModel constant(double n_m) {
    if (!std::isfinite(n_m) || std::abs(n_m) > kMaxGeoidSeparationM)
      throw Error(ErrorKind::InvalidInput, "geoid separation outside +/-120 m");
    return GeoidModel([n_m](const GeoPoint&) { return n_m; });
  }

  double separation(const GeoPoint& at) const {
    if (!lookup_) throw Error(ErrorKind::ModelUnavailable, "geoid model has no lookup");
    const double n = lookup_(at);
    if (!std::isfinite(n) || std::abs(n) > kMaxGeoidSeparationM)
      throw Error(ErrorKind::ModelUnavailable, "geoid lookup returned an out-of-bounds separation");
    return n;
  }

 private:
  Lookup lookup_;
};

/// Orthometric height H = h + N.
inline double geoid_height(double h_ellipsoid_m, const GeoidModel& model, const GeoPoint& at) {
  if (!std::isfinite(h_ellipsoid_m)) throw Error(ErrorKind::InvalidInput, "height not finite");
  return h_ellipsoid_m + model.separation(at);
}

// ---------------------------------------------------------------------------
// Helmert

using Vec3 = std::array<double, 3>;
using Mat3 = std::array<Vec3, 3>;

struct HelmertParams {
  double tx_m = 0.0, ty_m = 0.0, tz_m = 0.0;
  double rx_rad = 0.0, ry_rad = 0.0, rz_rad = 0.0;
  double s_ppm = 0.0;

  void validate() const {
    for (double v : {tx_m, ty_m, tz_m, rx_rad, ry_rad, rz_rad, s_ppm})
      if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "helmert parameter not finite");
    if (std::abs(s_ppm) >= 1000.0)
      throw Error(ErrorKind::InvalidInput, "helmert scale must satisfy |s_ppm| < 1000");
  }

  friend bool operator==(const HelmertParams&, const HelmertParams&) = default;
};

/// Small-angle rotation-plus-scale matrix.
inline Mat3 helmert_matrix(const HelmertParams& p) {
  const double d = 1.0 + p.s_ppm * 1e-6;
  return Mat3{Vec3{d, -p.rz_rad, p.ry_rad},
              Vec3{p.rz_rad, d, -p.rx_rad},
              Vec3{-p.ry_rad, p.rx_rad, d}};
}

inline Vec3 helmert_transform(const Vec3& xyz, const HelmertParams& params) {
  for (double v : xyz)
    if (!std::isfinite(v)) throw Error(ErrorKind::InvalidInput, "cartesian coordinate not finite");
  params.validate();
  const Mat3 m = helmert_matrix(params);
  const Vec3 t{params.tx_m, params.ty_m, params.tz_m};
  Vec3 out{};
  for (int r = 0; r < 3; ++r)
    out[r] = t[r] + m[r][0] * xyz[0] + m[r][1] * xyz[1] + m[r][2] * xyz[2];
  return out;
}

/// "tx,ty,tz,rx,ry,rz,s_ppm" as seven comma-separated decimals.
inline HelmertParams parse_helmert_params(std::string_view text) {
  std::vector<double> values;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto field = text.substr(start, comma == std::string_view::npos ? text.npos : comma - start);
    std::string s(field);
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw Error(ErrorKind::InvalidInput,
                  "helmert field " + std::to_string(values.size()) + " is not a number");
    }
    while (used < s.size() && std::isspace(static_cast<unsigned char>(s[used]))) ++used;
    if (used != s.size())
      throw Error(ErrorKind::InvalidInput,
                  "helmert field " + std::to_string(values.size()) + " has trailing text");
    values.push_back(v);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  if (values.size() != 7)
    throw Error(ErrorKind::InvalidInput,
                "helmert needs 7 values, got " + std::to_string(values.size()));
  HelmertParams p{values[0], values[1], values[2], values[3], values[4], values[5], values[6]};
  p.validate();
  return p;
}

// ---------------------------------------------------------------------------
// Local equirectangular projection

enum class ProjectionMode { Standard, Rounded };

class LocalProjection {
 public:
  explicit LocalProjection(GeoPoint origin, ProjectionMode mode = ProjectionMode::Standard)
      : LocalProjection(origin, mode == ProjectionMode::Rounded ? kRoundedMetersPerDegree
                                                                   : kStandardMetersPerDegree,
                        mode) {}

  LocalProjection(GeoPoint origin, double meters_per_degree, ProjectionMode mode)
      : origin_(origin), meters_per_degree_(meters_per_degree), mode_(mode) {
    if (!(origin.lat > -89.0 && origin.lat < 89.0))
      throw Error(ErrorKind::ProjectionUndefined, "projection origin latitude must be inside (-89, 89)");
    if (!(meters_per_degree > 0.0) || !std::isfinite(meters_per_degree))
      throw Error(ErrorKind::InvalidInput, "meters_per_degree must be positive");
    cos_lat_ = std::cos(deg2rad(origin.lat));
  }

  const GeoPoint& origin() const noexcept { return origin_; }
  double meters_per_degree() const noexcept { return meters_per_degree_; }
  ProjectionMode mode() const noexcept { return mode_; }
  /// Meters per degree of longitude at the origin latitude.
  double meters_per_degree_lon() const noexcept { return meters_per_degree_ * cos_lat_; }

  LocalXY to_local(const GeoPoint& p) const {
    if (p.srid != origin_.srid) throw Error(ErrorKind::SridMismatch, "point srid differs from projection");
    return LocalXY{(p.lon - origin_.lon) * meters_per_degree_ * cos_lat_,
                   (p.lat - origin_.lat) * meters_per_degree_};
  }

  GeoPoint from_local(const LocalXY& xy) const {
    return GeoPoint{origin_.lon + xy.x_m / (meters_per_degree_ * cos_lat_),
                    origin_.lat + xy.y_m / meters_per_degree_, origin_.srid};
  }

  std::vector<LocalXY> to_local(const Ring& ring) const {
    std::vector<LocalXY> out;
    out.reserve(ring.size());
    for (const auto& p : ring.points()) out.push_back(to_local(p));
    return out;
  }

 private:
  GeoPoint origin_;
  double meters_per_degree_;
  ProjectionMode mode_;
  double cos_lat_ = 1.0;
};

inline LocalXY to_local(const GeoPoint& p, const LocalProjection& proj) { return proj.to_local(p); }
inline GeoPoint from_local(const LocalXY& xy, const LocalProjection& proj) { return proj.from_local(xy); }

/// Ground length of a longitude difference at a given latitude.
inline double lon_arc_length(double dlon_deg, double lat_deg, const LocalProjection& proj) {
  if (!(std::abs(lat_deg) < 89.0))
    throw Error(ErrorKind::ProjectionUndefined, "longitude arc undefined near the poles");
  return dlon_deg * proj.meters_per_degree() * std::cos(deg2rad(lat_deg));
}

inline double ring_area_signed(const Ring& ring, const LocalProjection& proj) {
  const auto xy = proj.to_local(ring);
  return geofence::ring_area_signed(std::span<const LocalXY>(xy));
}

}  // namespace geofence::crs
