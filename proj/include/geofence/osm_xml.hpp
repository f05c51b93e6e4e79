#pragma once

#include <expat.h>

#include <charconv>
#include <cstdint>
#include <fstream>
#include <map>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "geofence/error.hpp"
#include "geofence/feature.hpp"
#include "geofence/geo_types.hpp"

namespace geofence::osm {

struct ParseResult {
  std::vector<MapFeature> features;
  std::size_t skipped_ways = 0;
  std::size_t skipped_relations = 0;
  std::vector<std::string> warnings;
};

/// Category from tags in the fixed priority order
/// building > natural > landuse > waterway > railway > highway.
/// Returns the category and the deciding tag value.
inline std::optional<std::pair<Category, std::string>> categorize(
    const std::map<std::string, std::string>& tags) {
  static constexpr std::pair<std::string_view, Category> kPriority[] = {
      {"building", Category::Building}, {"natural", Category::Natural},
      {"landuse", Category::Landuse},   {"waterway", Category::Waterways},
      {"railway", Category::Railways},  {"highway", Category::Roads},
  };
  for (const auto& [key, cat] : kPriority) {
    auto it = tags.find(std::string(key));
    if (it != tags.end() && !it->second.empty() && it->second != "no")
      return std::make_pair(cat, it->second);
  }
  return std::nullopt;
}

/// "12", "12.5m", "12 m" -> meters. Anything else -> nullopt.
inline std::optional<double> parse_height_tag(std::string_view v) {
  auto trim = [](std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return s;
  };
  v = trim(v);
  if (!v.empty() && v.back() == 'm') v = trim(v.substr(0, v.size() - 1));
  if (v.empty()) return std::nullopt;
  double h = 0.0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), h);
  if (ec != std::errc() || ptr != v.data() + v.size() || !std::isfinite(h) || h < 0.0)
    return std::nullopt;
  return h;
}

namespace detail {

struct RawWay {
  std::int64_t id = 0;
  std::vector<std::int64_t> refs;
  std::map<std::string, std::string> tags;
};

struct RawMember {
  std::string type;
  std::int64_t ref = 0;
  std::string role;
};

struct RawRelation {
  std::int64_t id = 0;
  std::vector<RawMember> members;
  std::map<std::string, std::string> tags;
};

enum class Open { None, Node, Way, Relation };

struct Collector {
  XML_Parser parser = nullptr;
  std::unordered_map<std::int64_t, GeoPoint> nodes;
  std::vector<RawWay> ways;
  std::vector<RawRelation> relations;
  Open open = Open::None;
  bool saw_root = false;
  std::optional<ParseError> error;

  [[noreturn]] void fail(const std::string& msg) {
    const auto line = static_cast<std::size_t>(XML_GetCurrentLineNumber(parser));
    const auto off = static_cast<std::size_t>(XML_GetCurrentByteIndex(parser));
    throw ParseError("OSM XML line " + std::to_string(line) + ": " + msg, line, off);
  }

  static const char* attr(const XML_Char** atts, std::string_view name) {
    for (int i = 0; atts[i]; i += 2)
      if (name == atts[i]) return atts[i + 1];
    return nullptr;
  }

  template <typename T>
  T number_attr(const XML_Char** atts, std::string_view name, std::string_view element) {
    const char* raw = attr(atts, name);
    if (!raw) fail(std::string(element) + " missing attribute '" + std::string(name) + "'");
    std::string_view s(raw);
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc() || ptr != s.data() + s.size())
      fail(std::string(element) + " attribute '" + std::string(name) + "' is not numeric: '" +
           std::string(s) + "'");
    return value;
  }

  void start(const char* name, const XML_Char** atts) {
    const std::string_view el(name);
    if (el == "osm") {
      saw_root = true;
    } else if (el == "node") {
      const auto id = number_attr<std::int64_t>(atts, "id", "node");
      const GeoPoint p{number_attr<double>(atts, "lon", "node"),
                       number_attr<double>(atts, "lat", "node"), kWgs84Srid};
      if (!p.in_range()) fail("node " + std::to_string(id) + " has out-of-range coordinates");
      nodes[id] = p;
      open = Open::Node;
    } else if (el == "way") {
      ways.push_back(RawWay{number_attr<std::int64_t>(atts, "id", "way"), {}, {}});
      open = Open::Way;
    } else if (el == "relation") {
      relations.push_back(RawRelation{number_attr<std::int64_t>(atts, "id", "relation"), {}, {}});
      open = Open::Relation;
    } else if (el == "nd") {
      if (open == Open::Way) ways.back().refs.push_back(number_attr<std::int64_t>(atts, "ref", "nd"));
    } else if (el == "member") {
      if (open == Open::Relation) {
        const char* type = attr(atts, "type");
        const char* role = attr(atts, "role");
        relations.back().members.push_back(RawMember{type ? type : "",
                                                     number_attr<std::int64_t>(atts, "ref", "member"),
                                                     role ? role : ""});
      }
    } else if (el == "tag") {
      const char* k = attr(atts, "k");
      const char* v = attr(atts, "v");
      if (!k || !v) fail("tag missing k or v");
      if (open == Open::Way) ways.back().tags[k] = v;
      if (open == Open::Relation) relations.back().tags[k] = v;
    }
  }

  void end(const char* name) {
    const std::string_view el(name);
    if (el == "node" || el == "way" || el == "relation") open = Open::None;
  }

  static void on_start(void* self, const XML_Char* name, const XML_Char** atts) {
    auto* c = static_cast<Collector*>(self);
    if (c->error) return;
    try {
      c->start(name, atts);
    } catch (const ParseError& e) {
      c->error = e;
      XML_StopParser(c->parser, XML_FALSE);
    }
  }

  static void on_end(void* self, const XML_Char* name) {
    auto* c = static_cast<Collector*>(self);
    if (!c->error) c->end(name);
  }
};

struct ParserDeleter {
  void operator()(XML_Parser p) const noexcept { XML_ParserFree(p); }
};

inline void fill_attributes(MapFeature& f, const std::map<std::string, std::string>& tags,
                            std::string ftype, std::vector<std::string>& warnings) {
  f.tags = tags;
  f.ftype = std::move(ftype);
  if (auto it = tags.find("name"); it != tags.end()) f.name = it->second;
  if (auto it = tags.find("height"); it != tags.end()) {
    f.height_m = parse_height_tag(it->second);
    if (!f.height_m)
      warnings.push_back("feature " + std::to_string(f.osm_id) + ": unparseable height '" +
                         it->second + "'");
  }
}

/// Joins open way segments end to end into closed rings. Leftovers are reported.
inline std::vector<std::vector<GeoPoint>> join_segments(std::vector<std::vector<GeoPoint>> segs,
                                                        std::size_t& unclosed) {
  std::vector<std::vector<GeoPoint>> rings;
  unclosed = 0;
  while (!segs.empty()) {
    auto current = std::move(segs.front());
    segs.erase(segs.begin());
    bool progress = true;
    while (current.front() != current.back() && progress) {
      progress = false;
      for (auto it = segs.begin(); it != segs.end(); ++it) {
        if (it->front() == current.back()) {
          current.insert(current.end(), it->begin() + 1, it->end());
        } else if (it->back() == current.back()) {
          current.insert(current.end(), it->rbegin() + 1, it->rend());
        } else {
          continue;
        }
        segs.erase(it);
        progress = true;
        break;
      }
    }
    if (current.size() >= 4 && current.front() == current.back())
      rings.push_back(std::move(current));
    else
      ++unclosed;
  }
  return rings;
}

}  // namespace detail

/// Parses the OSM XML subset (osm/node/way/nd/relation/member/tag).
/// Closed categorized ways become polygons, open road/waterway/railway ways
/// become polylines, multipolygon relations keep outer rings only and get
/// the negated relation id. Output order: ways in document order, then relations.
inline ParseResult parse_osm_xml(std::string_view document) {
  std::unique_ptr<XML_ParserStruct, detail::ParserDeleter> parser(XML_ParserCreate(nullptr));
  if (!parser) throw Error(ErrorKind::Io, "cannot allocate XML parser");
  detail::Collector c;
  c.parser = parser.get();
  XML_SetUserData(parser.get(), &c);
  XML_SetElementHandler(parser.get(), &detail::Collector::on_start, &detail::Collector::on_end);

  const auto status = XML_Parse(parser.get(), document.data(), static_cast<int>(document.size()), XML_TRUE);
  if (c.error) throw *c.error;
  if (status != XML_STATUS_OK) {
    const auto line = static_cast<std::size_t>(XML_GetCurrentLineNumber(parser.get()));
    const auto off = static_cast<std::size_t>(XML_GetCurrentByteIndex(parser.get()));
    throw ParseError("malformed XML at line " + std::to_string(line) + ": " +
                         XML_ErrorString(XML_GetErrorCode(parser.get())),
                     line, off);
  }
  if (!c.saw_root) throw ParseError("document has no <osm> root element", 1, 0);

  ParseResult out;
  std::unordered_map<std::int64_t, const detail::RawWay*> way_by_id;
  for (const auto& w : c.ways) way_by_id[w.id] = &w;

  for (const auto& w : c.ways) {
    std::vector<GeoPoint> pts;
    pts.reserve(w.refs.size());
    for (auto ref : w.refs) {
      auto it = c.nodes.find(ref);
      if (it == c.nodes.end())
        throw Error(ErrorKind::DanglingReference,
                    "way " + std::to_string(w.id) + " references missing node " + std::to_string(ref));
      pts.push_back(it->second);
    }
    const auto cat = categorize(w.tags);
    if (!cat) {
      ++out.skipped_ways;
      continue;
    }
    MapFeature f;
    f.osm_id = w.id;
    f.category = cat->first;
    const bool closed = pts.size() >= 4 && pts.front() == pts.back();
    if (closed) {
      try {
        f.geometry = PolygonShape{Ring(std::move(pts)), {}};
      } catch (const Error& e) {
        out.warnings.push_back("way " + std::to_string(w.id) + " rejected: " + e.what());
        ++out.skipped_ways;
        continue;
      }
    } else if ((cat->first == Category::Roads || cat->first == Category::Waterways ||
                cat->first == Category::Railways) &&
               pts.size() >= 2) {
      f.geometry = Polyline{std::move(pts)};
    } else {
      ++out.skipped_ways;
      continue;
    }
    detail::fill_attributes(f, w.tags, cat->second, out.warnings);
    out.features.push_back(std::move(f));
  }

  for (const auto& r : c.relations) {
    auto type = r.tags.find("type");
    const auto cat = categorize(r.tags);
    if (type == r.tags.end() || type->second != "multipolygon" || !cat) {
      ++out.skipped_relations;
      continue;
    }
    std::vector<std::vector<GeoPoint>> outer_segments;
    bool broken = false;
    std::size_t inner_dropped = 0;
    for (const auto& m : r.members) {
      if (m.type != "way") continue;
      if (m.role == "inner") {
        ++inner_dropped;
        continue;
      }
      auto wit = way_by_id.find(m.ref);
      if (wit == way_by_id.end()) {
        out.warnings.push_back("relation " + std::to_string(r.id) + " references missing way " +
                               std::to_string(m.ref));
        broken = true;
        break;
      }
      std::vector<GeoPoint> seg;
      for (auto ref : wit->second->refs) seg.push_back(c.nodes.at(ref));
      if (seg.size() >= 2) outer_segments.push_back(std::move(seg));
    }
    if (inner_dropped)
      out.warnings.push_back("relation " + std::to_string(r.id) + ": dropped " +
                             std::to_string(inner_dropped) + " inner ring(s)");
    if (broken) {
      ++out.skipped_relations;
      continue;
    }
    std::size_t unclosed = 0;
    MultiPolygonShape mp;
    for (auto& ring_pts : detail::join_segments(std::move(outer_segments), unclosed)) {
      try {
        mp.polygons.push_back(PolygonShape{Ring(std::move(ring_pts)), {}});
      } catch (const Error& e) {
        out.warnings.push_back("relation " + std::to_string(r.id) + " ring rejected: " + e.what());
      }
    }
    if (unclosed)
      out.warnings.push_back("relation " + std::to_string(r.id) + ": " + std::to_string(unclosed) +
                             " outer segment(s) could not be closed");
    if (mp.polygons.empty()) {
      ++out.skipped_relations;
      continue;
    }
    MapFeature f;
    f.osm_id = -r.id;
    f.category = cat->first;
    f.geometry = std::move(mp);
    detail::fill_attributes(f, r.tags, cat->second, out.warnings);
    out.features.push_back(std::move(f));
  }
  return out;
}

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::Io, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline ParseResult parse_osm_xml_file(const std::string& path) { return parse_osm_xml(read_file(path)); }

/// Two-column "osm_id,height_m" CSV. A non-numeric first line is treated as a header.
inline std::map<std::int64_t, double> parse_height_csv(std::string_view text) {
  std::map<std::int64_t, double> heights;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start < text.size()) {
    auto nl = text.find('\n', start);
    auto line = text.substr(start, nl == text.npos ? text.npos : nl - start);
    start = nl == text.npos ? text.size() : nl + 1;
    ++line_no;
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    const auto comma = line.find(',');
    std::int64_t id = 0;
    const auto id_part = line.substr(0, comma);
    const auto [p1, e1] = std::from_chars(id_part.data(), id_part.data() + id_part.size(), id);
    if (e1 != std::errc() || p1 != id_part.data() + id_part.size() || comma == line.npos) {
      if (line_no == 1) continue;
      throw ParseError("height CSV line " + std::to_string(line_no) + ": expected osm_id,height_m",
                       line_no, 0);
    }
    auto h = parse_height_tag(line.substr(comma + 1));
    if (!h)
      throw ParseError("height CSV line " + std::to_string(line_no) + ": bad height", line_no, 0);
    heights[id] = *h;
  }
  return heights;
}

/// Returns the number of features that received a height.
inline std::size_t apply_heights(std::vector<MapFeature>& features,
                                 const std::map<std::int64_t, double>& heights) {
  std::size_t n = 0;
  for (auto& f : features) {
    if (auto it = heights.find(f.osm_id); it != heights.end()) {
      f.height_m = it->second;
      ++n;
    }
  }
  return n;
}

}  // namespace geofence::osm
