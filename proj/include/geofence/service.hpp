#pragma once

#include <httplib.h>
#include <json.hpp>

#include <condition_variable>
#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <future>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>

#include "geofence/error.hpp"
#include "geofence/json_wire.hpp"
#include "geofence/outputs.hpp"
#include "geofence/raster.hpp"
#include "geofence/session.hpp"

namespace geofence {

/// Everything a reader may see for one tick. Immutable once published.
struct PublishedTick {
  std::uint64_t tick = 0;
  std::optional<UavState> uav;
  FenceConfig config;
  std::optional<TickSnapshot> snapshot;
  std::map<std::string, PngBytes> pngs;
};

/// HTTP front end over a SimSession. A single worker thread owns the
/// session; handlers read the latest PublishedTick through a swapped
/// shared_ptr, so one response never mixes two ticks.
class GeofenceService {
 public:
  explicit GeofenceService(SimSession session, raster::ColorScheme scheme = {},
                           std::optional<std::filesystem::path> out_dir = std::nullopt)
      : session_(std::move(session)), scheme_(scheme), out_dir_(std::move(out_dir)) {
    auto first = std::make_shared<PublishedTick>();
    first->config = session_.config();
    published_ = std::move(first);
    install_routes();
  }

  GeofenceService(const GeofenceService&) = delete;
  GeofenceService& operator=(const GeofenceService&) = delete;

  ~GeofenceService() { stop(); }

  /// Binds and starts serving in the background. Port 0 picks a free port.
  /// Returns the bound port; throws Io when the bind fails.
  int start(const std::string& host = "127.0.0.1", int port = 0) {
    if (port == 0) {
      port_ = server_.bind_to_any_port(host);
    } else {
      port_ = server_.bind_to_port(host, port) ? port : -1;
    }
    if (port_ < 0) throw Error(ErrorKind::Io, "cannot bind " + host + ":" + std::to_string(port));
    worker_ = std::thread([this] { worker_loop(); });
    listener_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
    return port_;
  }

  /// Blocks the caller until stop() is called from elsewhere.
  void wait() {
    if (listener_.joinable()) listener_.join();
  }

  void stop() {
    server_.stop();
    if (listener_.joinable()) listener_.join();
    {
      std::lock_guard lock(queue_mutex_);
      stopping_ = true;
    }
    queue_cv_.notify_all();
    if (worker_.joinable()) worker_.join();
  }

  int port() const noexcept { return port_; }

  std::shared_ptr<const PublishedTick> latest() const {
    std::lock_guard lock(publish_mutex_);
    return published_;
  }

  /// Queues a UAV state; the future resolves to the published tick number.
  std::future<std::shared_ptr<const PublishedTick>> submit_uav(const UavState& uav) {
    return enqueue([uav](SimSession& s) { s.tick(uav); });
  }

  /// Queues a config change; re-evaluates the current UAV when there is one.
  std::future<std::shared_ptr<const PublishedTick>> submit_config(FenceConfig cfg) {
    return enqueue([cfg = std::move(cfg)](SimSession& s) {
      s.set_config(cfg);
      if (s.uav()) s.tick(*s.uav());
    });
  }

 private:
  using Job = std::function<void(SimSession&)>;
  struct Pending {
    Job job;
    std::promise<std::shared_ptr<const PublishedTick>> done;
  };

  std::future<std::shared_ptr<const PublishedTick>> enqueue(Job job) {
    Pending p{std::move(job), {}};
    auto fut = p.done.get_future();
    {
      std::lock_guard lock(queue_mutex_);
      if (stopping_) throw Error(ErrorKind::Io, "service is stopping");
      queue_.push_back(std::move(p));
    }
    queue_cv_.notify_one();
    return fut;
  }

  void worker_loop() {
    while (true) {
      Pending p;
      {
        std::unique_lock lock(queue_mutex_);
        queue_cv_.wait(lock, [this] { return stopping_ || !queue_.empty(); });
        if (queue_.empty()) return;
        p = std::move(queue_.front());
        queue_.pop_front();
      }
      try {
        p.job(session_);
        p.done.set_value(publish());
      } catch (...) {
        p.done.set_exception(std::current_exception());
      }
    }
  }

  std::shared_ptr<const PublishedTick> publish() {
    auto next = std::make_shared<PublishedTick>();
    next->tick = session_.tick_count();
    next->uav = session_.uav();
    next->config = session_.config();
    next->snapshot = session_.last_snapshot();
    if (next->snapshot) {
      const auto t0 = std::chrono::steady_clock::now();
      next->pngs = render_pngs(*next->snapshot, session_.store(), scheme_, session_.config());
      session_.record("render", t0);
      if (out_dir_) write_tick_files(*out_dir_, *next->snapshot, next->pngs);
    }
    std::shared_ptr<const PublishedTick> frozen = std::move(next);
    std::lock_guard lock(publish_mutex_);
    published_ = frozen;
    return frozen;
  }

  static void send_json(httplib::Response& res, int status, const nlohmann::json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
  }

  void install_routes() {
    using nlohmann::json;
    server_.set_default_headers({{"Access-Control-Allow-Origin", "*"}});

    server_.Get("/state", [this](const httplib::Request&, httplib::Response& res) {
      const auto snap = latest();
      send_json(res, 200,
                json{{"tick", snap->tick},
                     {"uav", snap->uav ? wire::to_json(*snap->uav) : json(nullptr)},
                     {"config", wire::to_json(snap->config)}});
    });

    server_.Get("/situation", [this](const httplib::Request&, httplib::Response& res) {
      const auto snap = latest();
      auto body = wire::to_json(snap->snapshot ? snap->snapshot->situation : std::vector<SituationEntry>{});
      body["tick"] = snap->tick;
      send_json(res, 200, body);
    });

    server_.Get("/advisory", [this](const httplib::Request&, httplib::Response& res) {
      const auto snap = latest();
      auto body = wire::to_json(snap->snapshot ? snap->snapshot->advisory : Advisory{});
      body["tick"] = snap->tick;
      send_json(res, 200, body);
    });

    server_.Get(R"(/layers/(reference|obstacles|composite)\.png)",
                [this](const httplib::Request& req, httplib::Response& res) {
                  const auto snap = latest();
                  auto it = snap->pngs.find(req.matches[1].str());
                  if (it == snap->pngs.end()) {
                    send_json(res, 404, json{{"error", "no tick evaluated yet"}});
                    return;
                  }
                  res.set_header("X-Geofence-Tick", std::to_string(snap->tick));
                  res.set_content(std::string(it->second.begin(), it->second.end()), "image/png");
                });

    server_.Post("/uav", [this](const httplib::Request& req, httplib::Response& res) {
      UavState uav;
      try {
        uav = wire::uav_from_json(json::parse(req.body));
      } catch (const json::parse_error& e) {
        send_json(res, 400, json{{"error", std::string("malformed JSON: ") + e.what()}, {"field", -1}});
        return;
      } catch (const FieldError& e) {
        send_json(res, 400, json{{"error", e.what()}, {"field", e.field()}});
        return;
      } catch (const Error& e) {
        send_json(res, 400, json{{"error", e.what()}, {"field", -1}});
        return;
      }
      try {
        const auto snap = submit_uav(uav).get();
        send_json(res, 200,
                  json{{"tick", snap->tick},
                       {"level", std::string(to_string(snap->snapshot->advisory.level))}});
      } catch (const std::exception& e) {
        send_json(res, 500, json{{"error", e.what()}});
      }
    });

    server_.Post("/config", [this](const httplib::Request& req, httplib::Response& res) {
      FenceConfig cfg;
      try {
        cfg = wire::apply_config_patch(latest()->config, json::parse(req.body));
      } catch (const json::parse_error& e) {
        send_json(res, 400, json{{"error", std::string("malformed JSON: ") + e.what()}});
        return;
      } catch (const Error& e) {
        send_json(res, 400, json{{"error", e.what()}});
        return;
      }
      try {
        const auto snap = submit_config(std::move(cfg)).get();
        send_json(res, 200, json{{"tick", snap->tick}, {"config", wire::to_json(snap->config)}});
      } catch (const std::exception& e) {
        send_json(res, 500, json{{"error", e.what()}});
      }
    });
  }

  SimSession session_;
  raster::ColorScheme scheme_;
  std::optional<std::filesystem::path> out_dir_;
  httplib::Server server_;
  int port_ = -1;

  mutable std::mutex publish_mutex_;
  std::shared_ptr<const PublishedTick> published_;

  std::mutex queue_mutex_;
  std::condition_variable queue_cv_;
  std::deque<Pending> queue_;
  bool stopping_ = false;

  std::thread worker_;
  std::thread listener_;
};

}  // namespace geofence
