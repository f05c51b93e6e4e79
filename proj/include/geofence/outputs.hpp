#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "geofence/fence_engine.hpp"
#include "geofence/raster.hpp"
#include "geofence/session.hpp"

namespace geofence {

using PngBytes = std::vector<std::uint8_t>;

/// reference.png, obstacles.png and composite.png for one tick.
inline std::map<std::string, PngBytes> render_pngs(const TickSnapshot& snap, const FeatureStore& store,
                                                   const raster::ColorScheme& scheme, const FenceConfig& config) {
  const auto layers = raster::render_tick_layers(snap, store, scheme, config);
  std::map<std::string, PngBytes> out;
  out["reference"] = raster::export_png(layers.reference);
  out["obstacles"] = raster::export_png(layers.obstacles);
  out["composite"] = raster::export_png(raster::composite_layers(layers, scheme));
  return out;
}

/// advisory_out.txt (replaced), situation.log (appended) and the PNGs.
/// I/O failures are logged and do not interrupt the caller.
inline void write_tick_files(const std::filesystem::path& dir, const TickSnapshot& snap,
                             const std::map<std::string, PngBytes>& pngs) {
  write_advisory_file(snap.advisory, dir / "advisory_out.txt");
  append_situation_log(snap.situation, dir / "situation.log");
  for (const auto& [name, bytes] : pngs)
    write_file_atomic(dir / (name + ".png"),
                      std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
}

}  // namespace geofence
