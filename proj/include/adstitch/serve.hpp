#pragma once

#include <atomic>
#include <memory>
#include <mutex>
#include <shared_mutex>
#include <string>
#include <thread>
#include <vector>

#include "adstitch/model.hpp"
#include "adstitch/rng.hpp"
#include "adstitch/stitch.hpp"
#include "adstitch/types.hpp"

namespace adstitch {

struct ServeRequest {
  std::string request_id;
  std::string page_url;
  std::string query;
  StitchMode mode = StitchMode::Exploit;
};

struct ServeResponse {
  std::string request_id;
  bool ok = false;
  std::string error;
  StitchedAd ad;
  std::array<std::optional<double>, kNumPositions> slot_scores;
  long long latency_micros = 0;
};

// Snapshot holder for the live model. Readers take a shared_ptr copy under a
// shared lock; a reload swaps the pointer and never mutates a bank in place,
// so in-flight requests keep scoring against the snapshot they started with.
class ModelStore {
 public:
  explicit ModelStore(std::shared_ptr<const ModelBank> bank);

  std::shared_ptr<const ModelBank> get() const;
  void set(std::shared_ptr<const ModelBank> bank);

 private:
  mutable std::shared_mutex mutex_;
  std::shared_ptr<const ModelBank> bank_;
};

class Service {
 public:
  Service(AssetCatalog catalog, std::shared_ptr<const ModelBank> bank,
          SystemConfig config);

  // Never throws for per-request problems; those come back as ok=false with
  // the reason in `error`.
  ServeResponse handle(const ServeRequest& request);

  void reload(std::shared_ptr<const ModelBank> bank);

  const SystemConfig& config() const { return config_; }
  const AssetCatalog& catalog() const { return catalog_; }

 private:
  AssetCatalog catalog_;
  ModelStore store_;
  SystemConfig config_;
  std::mutex rng_mutex_;  // explore draws share one deterministic stream
  Rng rng_;
};

// Line-delimited JSON over TCP: one request per line in, one response per
// line out, connection per client thread. stop() unblocks run().
class TcpServer {
 public:
  TcpServer(Service& service, int port);  // port 0 picks a free port
  ~TcpServer();

  int port() const { return port_; }
  void run();
  void stop();

 private:
  void serve_connection(int fd);

  Service& service_;
  int listen_fd_ = -1;
  int port_ = 0;
  std::atomic<bool> stopping_{false};
  std::mutex threads_mutex_;
  std::vector<std::thread> threads_;
};

}  // namespace adstitch
