#pragma once

#include <cctype>
#include <charconv>
#include <string>
#include <string_view>
#include <system_error>
#include <variant>
#include <vector>

#include "geofence/error.hpp"
#include "geofence/geo_types.hpp"

namespace geofence::wkt {

namespace detail {

class Reader {
 public:
  explicit Reader(std::string_view text) : text_(text) {}

  std::size_t pos() const noexcept { return pos_; }

  void skip_ws() noexcept {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool at_end() noexcept {
    skip_ws();
    return pos_ >= text_.size();
  }

  char peek() noexcept {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }

  void expect(char c) {
    if (peek() != c) {
      if (pos_ >= text_.size()) fail(std::string("unexpected end of input, expected '") + c + "'");
      fail(std::string("expected '") + c + "', found '" + text_[pos_] + "'");
    }
    ++pos_;
  }

  bool consume(char c) noexcept {
    if (peek() != c) return false;
    ++pos_;
    return true;
  }

  /// Upper-cased alphabetic word.
  std::string keyword() {
    skip_ws();
    std::string word;
    while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_])))
      word.push_back(static_cast<char>(std::toupper(static_cast<unsigned char>(text_[pos_++]))));
    return word;
  }

  bool try_keyword(std::string_view kw) {
    const auto save = pos_;
    if (keyword() == kw) return true;
    pos_ = save;
    return false;
  }

  bool number_ahead() noexcept {
    const char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '+' || c == '.';
  }

  double number() {
    skip_ws();
    // from_chars rejects a leading '+'
    if (pos_ < text_.size() && text_[pos_] == '+') ++pos_;
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
    if (ec != std::errc()) fail("expected a number");
    pos_ = static_cast<std::size_t>(ptr - text_.data());
    return value;
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError("WKT " + msg + " at byte " + std::to_string(pos_), 0, pos_);
  }

 private:
  std::string_view text_;
  std::size_t pos_ = 0;
};

inline GeoPoint read_coord(Reader& r, int srid) {
  const double x = r.number();
  if (!r.number_ahead()) r.fail("odd coordinate count (missing y)");
  const double y = r.number();
  if (r.number_ahead()) r.fail("unsupported coordinate dimension (more than 2 values)");
  return GeoPoint{x, y, srid};
}

inline Ring read_ring(Reader& r, int srid) {
  r.expect('(');
  std::vector<GeoPoint> pts;
  const auto start = r.pos();
  pts.push_back(read_coord(r, srid));
  while (r.consume(',')) pts.push_back(read_coord(r, srid));
  r.expect(')');
  try {
    return Ring(std::move(pts));
  } catch (const Error& e) {
    throw Error(e.kind(), std::string(e.what()) + " (ring at byte " + std::to_string(start) + ")");
  }
}

inline PolygonShape read_polygon(Reader& r, int srid) {
  r.expect('(');
  Ring outer = read_ring(r, srid);
  std::vector<Ring> holes;
  while (r.consume(',')) holes.push_back(read_ring(r, srid));
  r.expect(')');
  return PolygonShape{std::move(outer), std::move(holes)};
}

inline void append_number(std::string& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  out.append(buf, ptr);
}

inline void append_ring(std::string& out, const Ring& ring) {
  out.push_back('(');
  bool first = true;
  for (const auto& p : ring.points()) {
    if (!first) out.push_back(',');
    first = false;
    append_number(out, p.lon);
    out.push_back(' ');
    append_number(out, p.lat);
  }
  out.push_back(')');
}

inline void append_polygon(std::string& out, const PolygonShape& poly) {
  out.push_back('(');
  append_ring(out, poly.outer);
  for (const auto& h : poly.holes) {
    out.push_back(',');
    append_ring(out, h);
  }
  out.push_back(')');
}

}  // namespace detail

using WktGeometry = std::variant<GeoPoint, MultiPolygonShape>;

/// Parses POINT, POLYGON or MULTIPOLYGON (optionally prefixed "SRID=n;").
inline WktGeometry parse_wkt_geometry(std::string_view text, int default_srid = kWgs84Srid) {
  detail::Reader r(text);
  int srid = default_srid;
  if (r.try_keyword("SRID")) {
    r.expect('=');
    srid = static_cast<int>(r.number());
    r.expect(';');
  }
  const auto kw_pos = r.pos();
  const std::string kw = r.keyword();
  WktGeometry result;
  if (kw == "POINT") {
    r.expect('(');
    result = detail::read_coord(r, srid);
    r.expect(')');
  } else if (kw == "POLYGON") {
    MultiPolygonShape mp;
    if (!r.try_keyword("EMPTY")) mp.polygons.push_back(detail::read_polygon(r, srid));
    result = std::move(mp);
  } else if (kw == "MULTIPOLYGON") {
    MultiPolygonShape mp;
    if (!r.try_keyword("EMPTY")) {
      r.expect('(');
      mp.polygons.push_back(detail::read_polygon(r, srid));
      while (r.consume(',')) mp.polygons.push_back(detail::read_polygon(r, srid));
      r.expect(')');
    }
    result = std::move(mp);
  } else {
    throw ParseError("WKT unsupported geometry keyword '" + kw + "' at byte " + std::to_string(kw_pos),
                     0, kw_pos);
  }
  if (!r.at_end()) r.fail("trailing characters after geometry");
  return result;
}

/// Polygonal WKT as a multipolygon; POLYGON becomes a one-member multipolygon.
inline MultiPolygonShape parse_wkt(std::string_view text, int default_srid = kWgs84Srid) {
  auto g = parse_wkt_geometry(text, default_srid);
  if (auto* mp = std::get_if<MultiPolygonShape>(&g)) return std::move(*mp);
  throw ParseError("WKT POINT is not a polygonal geometry", 0, 0);
}

inline std::string serialize_wkt(const MultiPolygonShape& mp) {
  if (mp.polygons.empty()) return "MULTIPOLYGON EMPTY";
  std::string out = "MULTIPOLYGON(";
  for (std::size_t i = 0; i < mp.polygons.size(); ++i) {
    if (i) out.push_back(',');
    detail::append_polygon(out, mp.polygons[i]);
  }
  out.push_back(')');
  return out;
}

inline std::string serialize_wkt(const PolygonShape& poly) {
  std::string out = "POLYGON";
  detail::append_polygon(out, poly);
  return out;
}

inline std::string serialize_wkt(const GeoPoint& p) {
  std::string out = "POINT(";
  detail::append_number(out, p.lon);
  out.push_back(' ');
  detail::append_number(out, p.lat);
  out.push_back(')');
  return out;
}

}  // namespace geofence::wkt
