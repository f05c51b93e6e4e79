#pragma once

#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numbers>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "geofence/config.hpp"
#include "geofence/error.hpp"
#include "geofence/fence_engine.hpp"
#include "geofence/spatial_store.hpp"

namespace geofence {

struct StageTiming {
  std::string stage;
  double duration_us = 0.0;
};

/// Scenario state: one store, one config, one UAV stream.
class SimSession {
 public:
  static constexpr std::size_t kTimingLogCapacity = 4096;

  SimSession(FeatureStore store, FenceConfig config)
      : store_(std::move(store)), config_(std::move(config)), rules_(ObstacleRuleSet::from_config(config_)) {
    config_.validate();
  }

  const FeatureStore& store() const noexcept { return store_; }
  const FenceConfig& config() const noexcept { return config_; }
  const ObstacleRuleSet& rules() const noexcept { return rules_; }
  const std::optional<UavState>& uav() const noexcept { return uav_; }
  std::uint64_t tick_count() const noexcept { return tick_count_; }
  const std::optional<TickSnapshot>& last_snapshot() const noexcept { return last_snapshot_; }
  const std::deque<StageTiming>& timing_log() const noexcept { return timing_log_; }

  void set_config(FenceConfig config) {
    config.validate();
    config_ = std::move(config);
    rules_ = ObstacleRuleSet::from_config(config_);
  }

  /// Evaluates one UAV state and makes it the current tick.
  const TickSnapshot& tick(const UavState& uav) {
    const auto t0 = std::chrono::steady_clock::now();
    store_.recenter(uav.position);
    TickSnapshot snap = evaluate_tick(store_, rules_, config_, uav);
    record("evaluate_tick", t0);
    uav_ = uav;
    last_snapshot_ = std::move(snap);
    ++tick_count_;
    return *last_snapshot_;
  }

  void record(std::string stage, std::chrono::steady_clock::time_point since) {
    const auto us = std::chrono::duration<double, std::micro>(std::chrono::steady_clock::now() - since).count();
    timing_log_.push_back(StageTiming{std::move(stage), us});
    if (timing_log_.size() > kTimingLogCapacity) timing_log_.pop_front();
  }

 private:
  FeatureStore store_;
  FenceConfig config_;
  ObstacleRuleSet rules_;
  std::optional<UavState> uav_;
  std::uint64_t tick_count_ = 0;
  std::optional<TickSnapshot> last_snapshot_;
  std::deque<StageTiming> timing_log_;
};

// ---------------------------------------------------------------------------
// Text outputs

/// "LEVEL:<level>" followed by one message per line.
inline std::string advisory_file_text(const Advisory& adv) {
  std::string out = "LEVEL:";
  out += to_string(adv.level);
  out += '\n';
  for (const auto& m : adv.messages) {
    out += m;
    out += '\n';
  }
  return out;
}

inline std::string situation_text(std::span<const SituationEntry> situation) {
  std::string out;
  for (const auto& e : situation) {
    out += format_situation_line(e);
    out += '\n';
  }
  return out;
}

/// Writes to a sibling temp file and renames it over `path`, so readers see
/// either the old or the new content. Failures are reported on stderr and
/// returned as false; they never throw.
inline bool write_file_atomic(const std::filesystem::path& path, std::string_view content) noexcept {
  try {
    auto tmp = path;
    tmp += ".tmp." + std::to_string(::getpid());
    {
      std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
      if (!out) throw Error(ErrorKind::Io, "cannot open " + tmp.string());
      out.write(content.data(), static_cast<std::streamsize>(content.size()));
      out.flush();
      if (!out) throw Error(ErrorKind::Io, "short write to " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
    return true;
  } catch (const std::exception& e) {
    std::cerr << "geofence: write failed for " << path.string() << ": " << e.what() << '\n';
    return false;
  }
}

inline bool write_advisory_file(const Advisory& adv, const std::filesystem::path& path) noexcept {
  return write_file_atomic(path, advisory_file_text(adv));
}

inline bool append_situation_log(std::span<const SituationEntry> situation,
                                 const std::filesystem::path& path) noexcept {
  std::ofstream out(path, std::ios::binary | std::ios::app);
  if (!out) {
    std::cerr << "geofence: cannot append to " << path.string() << '\n';
    return false;
  }
  const auto text = situation_text(situation);
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  return static_cast<bool>(out);
}

// ---------------------------------------------------------------------------
// Benchmark

struct BenchResult {
  double buffer_radius_deg = 0.0;
  double mean_ms = 0.0;
  int runs = 0;
  std::size_t within_count = 0;
};

/// Candidate filter plus within test: the stage whose cost scales with the buffer.
inline std::size_t within_stage(const FeatureStore& store, const BufferZone& zone) {
  std::size_t n = 0;
  for (const MapFeature* f : query_candidates(store, zone))
    if (within_buffer(f->geometry, zone)) ++n;
  return n;
}

/// Times within_stage for each radius over `runs` warm repetitions (one
/// untimed warm-up first). Each repetition loops the stage until at least
/// `min_batch` has elapsed and reports the per-execution time, which keeps
/// sub-microsecond stages above timer resolution.
inline std::vector<BenchResult> bench_buffer_sweep(const FeatureStore& store, const GeoPoint& center,
                                                   std::span<const double> radii, int runs,
                                                   std::chrono::microseconds min_batch = std::chrono::microseconds(2000)) {
  if (store.empty()) throw Error(ErrorKind::BenchPrecondition, "benchmark needs a loaded store");
  if (runs < 5) throw Error(ErrorKind::InvalidInput, "benchmark needs at least 5 runs");
  std::vector<BenchResult> out;
  out.reserve(radii.size());
  volatile std::size_t sink = 0;
  for (double r : radii) {
    const BufferZone zone = build_buffer(center, r, 8);
    BenchResult res{r, 0.0, runs, within_stage(store, zone)};
    double total_ms = 0.0;
    for (int run = 0; run < runs; ++run) {
      std::size_t iters = 0;
      const auto t0 = std::chrono::steady_clock::now();
      auto elapsed = std::chrono::steady_clock::duration::zero();
      do {
        sink = sink + within_stage(store, zone);
        ++iters;
        elapsed = std::chrono::steady_clock::now() - t0;
      } while (elapsed < min_batch);
      total_ms += std::chrono::duration<double, std::milli>(elapsed).count() / static_cast<double>(iters);
    }
    res.mean_ms = total_ms / runs;
    out.push_back(res);
  }
  return out;
}

inline std::vector<BenchResult> bench_buffer_sweep(const SimSession& session, std::span<const double> radii,
                                                   int runs) {
  if (session.store().empty()) throw Error(ErrorKind::BenchPrecondition, "benchmark needs a loaded store");
  // Without a UAV, sweep around the middle of the data.
  GeoPoint center;
  if (session.uav()) {
    center = session.uav()->position;
  } else {
    BBox all;
    for (const auto& [id, f] : session.store().features()) all.expand(f.bbox());
    center = GeoPoint{all.center_lon(), all.center_lat()};
  }
  return bench_buffer_sweep(session.store(), center, radii, runs);
}

/// Uniformly scattered small building polygons (4 to 8 vertices) in a square
/// of half-width `half_span_deg` around `center`. Ids run from `first_id`.
inline std::vector<MapFeature> make_synthetic_corpus(std::size_t count, const GeoPoint& center,
                                                     double half_span_deg, std::uint64_t seed,
                                                     std::int64_t first_id = 1) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> pos(-half_span_deg, half_span_deg);
  std::uniform_real_distribution<double> size(0.00005, 0.0002);
  std::uniform_int_distribution<int> verts(4, 8);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::vector<MapFeature> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double cx = center.lon + pos(rng);
    const double cy = center.lat + pos(rng);
    const double r = size(rng);
    const int n = verts(rng);
    const double a0 = phase(rng);
    std::vector<GeoPoint> pts;
    for (int k = 0; k < n; ++k) {
      const double a = a0 + 2.0 * std::numbers::pi * k / n;
      pts.push_back(GeoPoint{cx + r * std::cos(a), cy + r * std::sin(a)});
    }
    MapFeature f;
    f.osm_id = first_id + static_cast<std::int64_t>(i);
    f.category = Category::Building;
    f.ftype = "yes";
    f.tags = {{"building", "yes"}};
    f.geometry = PolygonShape{Ring::closing(std::move(pts)), {}};
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace geofence
