#pragma once

#include <zlib.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "geofence/config.hpp"
#include "geofence/error.hpp"
#include "geofence/fence_engine.hpp"
#include "geofence/geo_types.hpp"
#include "geofence/spatial_store.hpp"

namespace geofence::raster {

struct Rgba {
  std::uint8_t r = 0, g = 0, b = 0, a = 0;

  friend bool operator==(const Rgba&, const Rgba&) = default;
};

inline constexpr Rgba kTransparent{0, 0, 0, 0};

/// Row-major RGBA pixels; row 0 is the northern edge, column 0 the western edge.
class RasterLayer {
 public:
  RasterLayer(int width_px, int height_px, const BBox& extent)
      : width_(width_px), height_(height_px), extent_(extent) {
    if (width_px < 1 || height_px < 1)
      throw Error(ErrorKind::InvalidExtent, "raster dimensions must be >= 1");
    if (!(extent.min_lon < extent.max_lon) || !(extent.min_lat < extent.max_lat))
      throw Error(ErrorKind::InvalidExtent, "raster extent must satisfy min < max on both axes");
    pixels_.assign(static_cast<std::size_t>(width_px) * static_cast<std::size_t>(height_px), kTransparent);
  }

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  const BBox& extent() const noexcept { return extent_; }
  std::span<const Rgba> pixels() const noexcept { return pixels_; }
  std::span<Rgba> pixels() noexcept { return pixels_; }

  const Rgba& at(int col, int row) const { return pixels_[index(col, row)]; }
  Rgba& at(int col, int row) { return pixels_[index(col, row)]; }

  double pixel_width_deg() const noexcept { return (extent_.max_lon - extent_.min_lon) / width_; }
  double pixel_height_deg() const noexcept { return (extent_.max_lat - extent_.min_lat) / height_; }

  GeoPoint pixel_center(int col, int row) const noexcept {
    return GeoPoint{extent_.min_lon + (col + 0.5) * pixel_width_deg(),
                    extent_.max_lat - (row + 0.5) * pixel_height_deg(), kWgs84Srid};
  }

  /// Continuous pixel coordinates of a point (column, row).
  std::pair<double, double> to_pixel(const GeoPoint& p) const noexcept {
    return {(p.lon - extent_.min_lon) / pixel_width_deg(), (extent_.max_lat - p.lat) / pixel_height_deg()};
  }

  std::size_t painted_count() const noexcept {
    return static_cast<std::size_t>(
        std::count_if(pixels_.begin(), pixels_.end(), [](const Rgba& p) { return p.a != 0; }));
  }

  bool same_frame(const RasterLayer& o) const noexcept {
    return width_ == o.width_ && height_ == o.height_ && extent_ == o.extent_;
  }

  friend bool operator==(const RasterLayer&, const RasterLayer&) = default;

 private:
  std::size_t index(int col, int row) const noexcept {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(width_) + static_cast<std::size_t>(col);
  }

  int width_;
  int height_;
  BBox extent_;
  std::vector<Rgba> pixels_;
};

struct ColorScheme {
  Rgba obstacle{255, 0, 0, 255};
  Rgba reference{255, 255, 255, 255};
  Rgba open_area{0, 128, 0, 255};
  Rgba uav_marker{255, 165, 0, 255};
  Rgba background{0, 0, 0, 255};
};

// ---------------------------------------------------------------------------
// Painting

namespace detail {

inline void collect_crossings(const Ring& ring, double lat, std::vector<double>& xs) {
  const auto pts = ring.points();
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const auto& a = pts[i];
    const auto& b = pts[i + 1];
    if ((a.lat > lat) != (b.lat > lat))
      xs.push_back(a.lon + (lat - a.lat) * (b.lon - a.lon) / (b.lat - a.lat));
  }
}

}  // namespace detail

/// Paints every pixel whose center is inside the polygon (even-odd over all rings).
inline void paint_polygon(RasterLayer& layer, const PolygonShape& poly, Rgba color) {
  const BBox bb = poly.bbox();
  if (!bb.intersects(layer.extent())) return;
  const double pw = layer.pixel_width_deg();
  const double ph = layer.pixel_height_deg();
  const auto& ext = layer.extent();
  const int row0 = std::max(0, static_cast<int>(std::floor((ext.max_lat - bb.max_lat) / ph - 0.5)));
  const int row1 = std::min(layer.height() - 1, static_cast<int>(std::ceil((ext.max_lat - bb.min_lat) / ph)));
  std::vector<double> xs;
  for (int row = row0; row <= row1; ++row) {
    const double lat = ext.max_lat - (row + 0.5) * ph;
    xs.clear();
    detail::collect_crossings(poly.outer, lat, xs);
    for (const auto& h : poly.holes) detail::collect_crossings(h, lat, xs);
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      // columns whose center c satisfies xs[k] <= c < xs[k+1]
      const double c0 = std::ceil((xs[k] - ext.min_lon) / pw - 0.5);
      const double c1 = std::ceil((xs[k + 1] - ext.min_lon) / pw - 0.5);
      const int first = static_cast<int>(std::clamp(c0, 0.0, static_cast<double>(layer.width())));
      const int last = static_cast<int>(std::clamp(c1, 0.0, static_cast<double>(layer.width())));
      for (int col = first; col < last; ++col) layer.at(col, row) = color;
    }
  }
}

/// Marks every pixel touched by the line, sampled at quarter-pixel steps.
inline void paint_polyline(RasterLayer& layer, const Polyline& line, Rgba color) {
  auto plot = [&](double col, double row) {
    const int c = static_cast<int>(std::floor(col));
    const int r = static_cast<int>(std::floor(row));
    if (c >= 0 && c < layer.width() && r >= 0 && r < layer.height()) layer.at(c, r) = color;
  };
  for (std::size_t i = 0; i + 1 < line.points.size(); ++i) {
    const auto [c0, r0] = layer.to_pixel(line.points[i]);
    const auto [c1, r1] = layer.to_pixel(line.points[i + 1]);
    const double steps = std::ceil(4.0 * std::max(std::abs(c1 - c0), std::abs(r1 - r0))) + 1.0;
    if (steps > 4.0 * (layer.width() + layer.height()) * 16.0) continue;  // far outside the frame
    for (double s = 0.0; s <= steps; s += 1.0) plot(c0 + (c1 - c0) * s / steps, r0 + (r1 - r0) * s / steps);
  }
}

inline void paint_geometry(RasterLayer& layer, const Geometry& g, Rgba color) {
  if (const auto* poly = std::get_if<PolygonShape>(&g)) {
    paint_polygon(layer, *poly, color);
  } else if (const auto* mp = std::get_if<MultiPolygonShape>(&g)) {
    for (const auto& p : mp->polygons) paint_polygon(layer, p, color);
  } else {
    paint_polyline(layer, std::get<Polyline>(g), color);
  }
}

/// Filled disc of `radius_px` pixels around a point.
inline void paint_disc(RasterLayer& layer, const GeoPoint& center, double radius_px, Rgba color) {
  const auto [cc, cr] = layer.to_pixel(center);
  const int r0 = std::max(0, static_cast<int>(std::floor(cr - radius_px)));
  const int r1 = std::min(layer.height() - 1, static_cast<int>(std::ceil(cr + radius_px)));
  const int c0 = std::max(0, static_cast<int>(std::floor(cc - radius_px)));
  const int c1 = std::min(layer.width() - 1, static_cast<int>(std::ceil(cc + radius_px)));
  for (int row = r0; row <= r1; ++row)
    for (int col = c0; col <= c1; ++col) {
      const double dx = col + 0.5 - cc, dy = row + 0.5 - cr;
      if (dx * dx + dy * dy <= radius_px * radius_px) layer.at(col, row) = color;
    }
}

/// Union of polygons painted in one color; elsewhere transparent.
inline RasterLayer rasterize(std::span<const PolygonShape> geoms, const BBox& extent, int width_px,
                             int height_px, Rgba color) {
  RasterLayer layer(width_px, height_px, extent);
  for (const auto& g : geoms) paint_polygon(layer, g, color);
  return layer;
}

// ---------------------------------------------------------------------------
// Compositing

/// Source-over blend of non-premultiplied colors.
inline Rgba blend_over(Rgba base, Rgba over) noexcept {
  if (over.a == 255) return over;
  if (over.a == 0) return base;
  const double sa = over.a / 255.0;
  const double ba = base.a / 255.0;
  const double oa = sa + ba * (1.0 - sa);
  auto channel = [&](std::uint8_t s, std::uint8_t b) {
    const double v = (s * sa + b * ba * (1.0 - sa)) / oa;
    return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0L, 255L));
  };
  return Rgba{channel(over.r, base.r), channel(over.g, base.g), channel(over.b, base.b),
              static_cast<std::uint8_t>(std::clamp(std::lround(oa * 255.0), 0L, 255L))};
}

inline RasterLayer composite(const RasterLayer& base, const RasterLayer& overlay) {
  if (!base.same_frame(overlay))
    throw Error(ErrorKind::LayerMismatch, "composite needs identical dimensions and extent");
  RasterLayer out = base;
  auto dst = out.pixels();
  const auto src = overlay.pixels();
  for (std::size_t i = 0; i < dst.size(); ++i) dst[i] = blend_over(dst[i], src[i]);
  return out;
}

inline RasterLayer filled(int width_px, int height_px, const BBox& extent, Rgba color) {
  RasterLayer layer(width_px, height_px, extent);
  std::fill(layer.pixels().begin(), layer.pixels().end(), color);
  return layer;
}

// ---------------------------------------------------------------------------
// PNG

namespace detail {

inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v >> 24));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v));
}

inline void put_chunk(std::vector<std::uint8_t>& out, const char type[4], std::span<const std::uint8_t> data) {
  put_u32(out, static_cast<std::uint32_t>(data.size()));
  const std::size_t type_at = out.size();
  out.insert(out.end(), type, type + 4);
  out.insert(out.end(), data.begin(), data.end());
  uLong crc = crc32(0L, Z_NULL, 0);
  crc = crc32(crc, out.data() + type_at, static_cast<uInt>(4 + data.size()));
  put_u32(out, static_cast<std::uint32_t>(crc));
}

}  // namespace detail

/// 8-bit RGBA, non-interlaced, filter type 0 on every row.
inline std::vector<std::uint8_t> export_png(const RasterLayer& layer) {
  const auto w = static_cast<std::uint32_t>(layer.width());
  const auto h = static_cast<std::uint32_t>(layer.height());
  std::vector<std::uint8_t> raw;
  raw.reserve(static_cast<std::size_t>(h) * (1 + 4 * static_cast<std::size_t>(w)));
  const auto px = layer.pixels();
  for (std::uint32_t row = 0; row < h; ++row) {
    raw.push_back(0);
    for (std::uint32_t col = 0; col < w; ++col) {
      const Rgba& p = px[static_cast<std::size_t>(row) * w + col];
      raw.insert(raw.end(), {p.r, p.g, p.b, p.a});
    }
  }
  uLongf zlen = compressBound(static_cast<uLong>(raw.size()));
  std::vector<std::uint8_t> z(zlen);
  if (compress2(z.data(), &zlen, raw.data(), static_cast<uLong>(raw.size()), Z_DEFAULT_COMPRESSION) != Z_OK)
    throw Error(ErrorKind::Io, "zlib compression failed");
  z.resize(zlen);

  std::vector<std::uint8_t> out = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1A, '\n'};
  std::vector<std::uint8_t> ihdr;
  detail::put_u32(ihdr, w);
  detail::put_u32(ihdr, h);
  ihdr.insert(ihdr.end(), {8, 6, 0, 0, 0});  // depth 8, RGBA, deflate, filter 0, no interlace
  detail::put_chunk(out, "IHDR", ihdr);
  detail::put_chunk(out, "IDAT", z);
  detail::put_chunk(out, "IEND", {});
  return out;
}

// ---------------------------------------------------------------------------
// Per-tick layers

struct TickLayers {
  RasterLayer reference;
  RasterLayer obstacles;
  RasterLayer open_area;
  RasterLayer uav;
};

/// Square degree-space frame around the buffer zone.
inline BBox tick_extent(const TickSnapshot& snap) { return snap.zone.bbox(); }

inline TickLayers render_tick_layers(const TickSnapshot& snap, const FeatureStore& store,
                                     const ColorScheme& scheme, const FenceConfig& config) {
  const BBox extent = tick_extent(snap);
  const int px = config.raster_px;
  TickLayers layers{RasterLayer(px, px, extent), RasterLayer(px, px, extent), RasterLayer(px, px, extent),
                    RasterLayer(px, px, extent)};

  std::vector<std::int64_t> in_extent = store.index().query(extent);
  std::sort(in_extent.begin(), in_extent.end());
  for (auto id : in_extent) paint_geometry(layers.reference, store.at(id).geometry, scheme.reference);

  for (auto id : snap.obstacles_in_zone) paint_geometry(layers.obstacles, store.at(id).geometry, scheme.obstacle);

  paint_polygon(layers.open_area, PolygonShape{snap.zone.ring, {}}, scheme.open_area);
  auto open = layers.open_area.pixels();
  const auto obst = layers.obstacles.pixels();
  for (std::size_t i = 0; i < open.size(); ++i)
    if (obst[i].a != 0) open[i] = kTransparent;

  paint_disc(layers.uav, snap.uav.position, std::max(1.0, 0.01 * px), scheme.uav_marker);
  return layers;
}

/// Background, open area, reference, obstacles, then the UAV marker.
inline RasterLayer composite_layers(const TickLayers& layers, const ColorScheme& scheme) {
  const auto& ref = layers.reference;
  RasterLayer out = filled(ref.width(), ref.height(), ref.extent(), scheme.background);
  out = composite(out, layers.open_area);
  out = composite(out, layers.reference);
  out = composite(out, layers.obstacles);
  out = composite(out, layers.uav);
  return out;
}

}  // namespace geofence::raster
