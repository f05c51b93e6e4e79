#pragma once

// Independent reference computations used only by tests. Nothing here calls
// into the code path it checks.

#include <png.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <map>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace oracle {

struct Pt {
  double x, y;
};

/// Winding number of a closed polygon (last vertex repeats the first) around p.
inline int winding_number(Pt p, const std::vector<Pt>& ring) {
  int wn = 0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const Pt a = ring[i], b = ring[i + 1];
    const double side = (b.x - a.x) * (p.y - a.y) - (p.x - a.x) * (b.y - a.y);
    if (a.y <= p.y) {
      if (b.y > p.y && side > 0) ++wn;
    } else {
      if (b.y <= p.y && side < 0) --wn;
    }
  }
  return wn;
}

/// Minimum distance from p to `samples_per_edge` evenly spaced points on each edge.
inline double sampled_boundary_distance(Pt p, const std::vector<Pt>& ring, int samples_total) {
  double perimeter = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i)
    perimeter += std::hypot(ring[i + 1].x - ring[i].x, ring[i + 1].y - ring[i].y);
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const Pt a = ring[i], b = ring[i + 1];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const int n = std::max(2, static_cast<int>(samples_total * len / perimeter));
    for (int k = 0; k <= n; ++k) {
      const double t = static_cast<double>(k) / n;
      best = std::min(best, std::hypot(a.x + t * (b.x - a.x) - p.x, a.y + t * (b.y - a.y) - p.y));
    }
  }
  return best;
}

/// Dense boundary sampling: is every sampled boundary point within r of c?
inline bool sampled_within_disc(Pt c, double r, const std::vector<Pt>& ring, int samples_total) {
  double perimeter = 0.0;
  for (std::size_t i = 0; i + 1 < ring.size(); ++i)
    perimeter += std::hypot(ring[i + 1].x - ring[i].x, ring[i + 1].y - ring[i].y);
  for (std::size_t i = 0; i + 1 < ring.size(); ++i) {
    const Pt a = ring[i], b = ring[i + 1];
    const double len = std::hypot(b.x - a.x, b.y - a.y);
    const int n = std::max(2, static_cast<int>(samples_total * len / perimeter));
    for (int k = 0; k <= n; ++k) {
      const double t = static_cast<double>(k) / n;
      if (std::hypot(a.x + t * (b.x - a.x) - c.x, a.y + t * (b.y - a.y) - c.y) > r) return false;
    }
  }
  return true;
}

/// Fraction of uniform samples in the bounding box that fall inside (winding != 0), times box area.
inline double monte_carlo_area(const std::vector<Pt>& ring, int samples, std::uint64_t seed) {
  double x0 = 1e300, y0 = 1e300, x1 = -1e300, y1 = -1e300;
  for (auto p : ring) {
    x0 = std::min(x0, p.x);
    y0 = std::min(y0, p.y);
    x1 = std::max(x1, p.x);
    y1 = std::max(y1, p.y);
  }
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ux(x0, x1), uy(y0, y1);
  int hits = 0;
  for (int i = 0; i < samples; ++i)
    if (winding_number(Pt{ux(rng), uy(rng)}, ring) != 0) ++hits;
  return (x1 - x0) * (y1 - y0) * hits / samples;
}

/// Centroid by fan triangulation from vertex 0; each triangle weighted by signed area.
inline Pt triangle_fan_centroid(const std::vector<Pt>& ring) {
  double total = 0.0, cx = 0.0, cy = 0.0;
  const Pt o = ring[0];
  for (std::size_t i = 1; i + 2 < ring.size(); ++i) {
    const Pt a = ring[i], b = ring[i + 1];
    const double area = 0.5 * ((a.x - o.x) * (b.y - o.y) - (b.x - o.x) * (a.y - o.y));
    total += area;
    cx += area * (o.x + a.x + b.x) / 3.0;
    cy += area * (o.y + a.y + b.y) / 3.0;
  }
  return Pt{cx / total, cy / total};
}

/// Plain 3x3 matrix times vector plus translation.
inline std::array<double, 3> affine(const double m[3][3], const double t[3], const double v[3]) {
  std::array<double, 3> out{};
  for (int r = 0; r < 3; ++r) {
    double acc = t[r];
    for (int c = 0; c < 3; ++c) acc += m[r][c] * v[c];
    out[r] = acc;
  }
  return out;
}

struct DecodedPng {
  std::uint32_t width = 0;
  std::uint32_t height = 0;
  std::vector<std::uint8_t> rgba;
};

/// libpng decode to 8-bit RGBA.
inline DecodedPng decode_png(const std::vector<std::uint8_t>& bytes) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
    throw std::runtime_error(std::string("libpng: ") + image.message);
  image.format = PNG_FORMAT_RGBA;
  DecodedPng out;
  out.width = image.width;
  out.height = image.height;
  out.rgba.resize(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, out.rgba.data(), 0, nullptr)) {
    png_image_free(&image);
    throw std::runtime_error(std::string("libpng: ") + image.message);
  }
  return out;
}

/// Random simple (star-shaped) polygon around a center; closed.
inline std::vector<Pt> random_star_polygon(std::mt19937_64& rng, Pt c, double rmin, double rmax, int n) {
  std::uniform_real_distribution<double> ur(rmin, rmax);
  std::vector<double> angles(n);
  std::uniform_real_distribution<double> ua(0.0, 2.0 * std::numbers::pi);
  for (auto& a : angles) a = ua(rng);
  std::sort(angles.begin(), angles.end());
  std::vector<Pt> out;
  for (double a : angles) {
    const double r = ur(rng);
    out.push_back(Pt{c.x + r * std::cos(a), c.y + r * std::sin(a)});
  }
  out.push_back(out.front());
  return out;
}

}  // namespace oracle
