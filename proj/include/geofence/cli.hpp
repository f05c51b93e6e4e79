#pragma once

#include <CLI11.hpp>
#include <fmt/format.h>
#include <json.hpp>

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "geofence/config.hpp"
#include "geofence/error.hpp"
#include "geofence/fence_engine.hpp"
#include "geofence/json_wire.hpp"
#include "geofence/osm_xml.hpp"
#include "geofence/outputs.hpp"
#include "geofence/service.hpp"
#include "geofence/session.hpp"

namespace geofence::cli {

namespace fs = std::filesystem;

struct Loaded {
  std::vector<MapFeature> features;
  std::vector<std::string> warnings;
};

/// map.xml, or a session dump written by `ingest` (detected by a leading '{').
inline Loaded load_map(const std::string& path, const std::string& heights_path) {
  const std::string text = osm::read_file(path);
  Loaded out;
  const auto first = text.find_first_not_of(" \t\r\n");
  if (first != std::string::npos && text[first] == '{') {
    try {
      out.features = wire::features_from_dump(nlohmann::json::parse(text));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorKind::Parse, "session dump '" + path + "': " + e.what());
    }
  } else {
    auto parsed = osm::parse_osm_xml(text);
    out.features = std::move(parsed.features);
    out.warnings = std::move(parsed.warnings);
  }
  if (!heights_path.empty()) osm::apply_heights(out.features, osm::parse_height_csv(osm::read_file(heights_path)));
  return out;
}

inline FenceConfig load_config(const std::string& path, std::ostream& err) {
  if (path.empty()) return FenceConfig{};
  auto parsed = parse_construction_file(osm::read_file(path));
  for (const auto& w : parsed.warnings) err << "config warning: " << w << '\n';
  return parsed.config;
}

inline SimSession make_session(const std::string& map, const std::string& heights, const std::string& config,
                               std::ostream& err) {
  auto cfg = load_config(config, err);
  auto loaded = load_map(map, heights);
  for (const auto& w : loaded.warnings) err << "map warning: " << w << '\n';
  return SimSession(FeatureStore(std::move(loaded.features), cfg.projection_mode), std::move(cfg));
}

/// Situation lines, the advisory file text, then the ETA when there is one.
inline void print_tick(const TickSnapshot& snap, std::ostream& out) {
  out << situation_text(snap.situation) << advisory_file_text(snap.advisory);
  if (snap.advisory.eta_s) out << fmt::format("ETA: {:.1f} s\n", *snap.advisory.eta_s);
}

inline void emit_tick(SimSession& session, const TickSnapshot& snap, const std::optional<fs::path>& out_dir,
                      std::ostream& out) {
  print_tick(snap, out);
  if (out_dir) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto pngs = render_pngs(snap, session.store(), raster::ColorScheme{}, session.config());
    session.record("render", t0);
    write_tick_files(*out_dir, snap, pngs);
  }
}

/// Entry point behind the geofence executable. 0 ok, 1 data error, 2 usage error.
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout,
                   std::ostream& err = std::cerr) {
  CLI::App app{"UAV geofencing engine: fences from map data, per-tick situation and advisory"};
  app.name("geofence");
  app.require_subcommand(1);

  std::string map_path, config_path, heights_path, uav_line, uav_file, out_dir;
  int port = 8080;
  int runs = 5;
  double rate_hz = 1.0;
  std::vector<double> radii{0.05, 0.02, 0.01, 0.005, 0.002};

  auto* ingest = app.add_subcommand("ingest", "parse map.xml and write a session dump to --out");
  ingest->add_option("--map", map_path, "OSM XML file")->required();
  ingest->add_option("--heights", heights_path, "osm_id,height_m CSV");
  ingest->add_option("--out", out_dir, "output directory")->required();

  auto* tick = app.add_subcommand("tick", "evaluate one UAV line and print situation and advisory");
  tick->add_option("--map", map_path, "map.xml or session dump")->required();
  tick->add_option("--config", config_path, "construction file");
  tick->add_option("--heights", heights_path, "osm_id,height_m CSV");
  tick->add_option("--uav", uav_line, "lat,lon,height_m,heading_deg,velocity_ms")->required();
  tick->add_option("--out", out_dir, "directory for advisory_out.txt, situation.log and PNGs");

  auto* simulate = app.add_subcommand("simulate", "replay a file of UAV lines at a fixed cadence");
  simulate->add_option("--map", map_path, "map.xml or session dump")->required();
  simulate->add_option("--config", config_path, "construction file");
  simulate->add_option("--heights", heights_path, "osm_id,height_m CSV");
  simulate->add_option("--uav-file", uav_file, "one UAV line per tick")->required();
  simulate->add_option("--rate", rate_hz, "ticks per second")->check(CLI::PositiveNumber);
  simulate->add_option("--out", out_dir, "output directory");

  auto* bench = app.add_subcommand("bench", "time the within stage across buffer radii");
  bench->add_option("--map", map_path, "map.xml or session dump (default: synthetic 10^4 features)");
  bench->add_option("--config", config_path, "construction file");
  bench->add_option("--radii", radii, "comma-separated radii in degrees")->delimiter(',');
  bench->add_option("--runs", runs, "warm runs per radius (>= 5)")->check(CLI::Range(5, 1000000));

  auto* serve = app.add_subcommand("serve", "run the HTTP API");
  serve->add_option("--map", map_path, "map.xml or session dump")->required();
  serve->add_option("--config", config_path, "construction file");
  serve->add_option("--heights", heights_path, "osm_id,height_m CSV");
  serve->add_option("--port", port, "listen port")->check(CLI::Range(0, 65535));
  serve->add_option("--out", out_dir, "directory for per-tick files");

  if (argc <= 1) {
    err << app.help();
    return 2;
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  const std::optional<fs::path> out_path = out_dir.empty() ? std::nullopt : std::optional<fs::path>(out_dir);
  try {
    if (out_path) fs::create_directories(*out_path);

    if (*ingest) {
      auto loaded = load_map(map_path, heights_path);
      for (const auto& w : loaded.warnings) err << "map warning: " << w << '\n';
      FeatureStore check(loaded.features);  // rejects duplicate ids
      const auto dump = wire::session_dump(loaded.features, loaded.warnings);
      const auto target = *out_path / "session.json";
      if (!write_file_atomic(target, dump.dump(1)))
        throw Error(ErrorKind::Io, "cannot write " + target.string());
      out << fmt::format("ingested {} features into {}\n", loaded.features.size(), target.string());
      return 0;
    }

    if (*tick) {
      auto session = make_session(map_path, heights_path, config_path, err);
      const auto& snap = session.tick(parse_uav_line(uav_line));
      emit_tick(session, snap, out_path, out);
      return 0;
    }

    if (*simulate) {
      auto session = make_session(map_path, heights_path, config_path, err);
      std::ifstream in(uav_file);
      if (!in) throw Error(ErrorKind::Io, "cannot open '" + uav_file + "'");
      const auto period = std::chrono::duration<double>(1.0 / rate_hz);
      auto next = std::chrono::steady_clock::now();
      std::string line;
      std::size_t line_no = 0;
      while (std::getline(in, line)) {
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string::npos || line.front() == '#') continue;
        UavState uav;
        try {
          uav = parse_uav_line(line);
        } catch (const FieldError& e) {
          throw Error(ErrorKind::InvalidInput, fmt::format("{} line {}: {}", uav_file, line_no, e.what()));
        }
        std::this_thread::sleep_until(next);
        next += std::chrono::duration_cast<std::chrono::steady_clock::duration>(period);
        const auto& snap = session.tick(uav);
        out << fmt::format("# tick {}\n", session.tick_count());
        emit_tick(session, snap, out_path, out);
      }
      return 0;
    }

    if (*bench) {
      std::optional<SimSession> session;
      if (map_path.empty()) {
        const GeoPoint center{-0.627, 52.073};
        session.emplace(FeatureStore(make_synthetic_corpus(10000, center, 0.06, 42)), load_config(config_path, err));
        session->tick(UavState::make(center, 30.0, 0.0, 0.0));
      } else {
        session.emplace(make_session(map_path, "", config_path, err));
      }
      const auto results = bench_buffer_sweep(*session, radii, runs);
      out << "radius_deg,mean_ms,runs,within\n";
      for (const auto& r : results)
        out << fmt::format("{},{:.4f},{},{}\n", r.buffer_radius_deg, r.mean_ms, r.runs, r.within_count);
      return 0;
    }

    if (*serve) {
      GeofenceService service(make_session(map_path, heights_path, config_path, err), raster::ColorScheme{},
                              out_path);
      const int bound = service.start("0.0.0.0", port);
      out << fmt::format("serving on port {}\n", bound) << std::flush;
      service.wait();
      return 0;
    }
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace geofence::cli
