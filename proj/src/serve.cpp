#include "adstitch/serve.hpp"

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <stdexcept>

#include "adstitch/records.hpp"

namespace adstitch {

ModelStore::ModelStore(std::shared_ptr<const ModelBank> bank)
    : bank_(std::move(bank)) {
  if (!bank_) throw std::invalid_argument("ModelStore requires a bank");
}

std::shared_ptr<const ModelBank> ModelStore::get() const {
  std::shared_lock lock(mutex_);
  return bank_;
}

void ModelStore::set(std::shared_ptr<const ModelBank> bank) {
  if (!bank) throw std::invalid_argument("cannot reload a null bank");
  std::unique_lock lock(mutex_);
  bank_ = std::move(bank);
}

Service::Service(AssetCatalog catalog, std::shared_ptr<const ModelBank> bank,
                 SystemConfig config)
    : catalog_(std::move(catalog)),
      store_(std::move(bank)),
      config_(config),
      rng_(derive_seed(config.rng_seed, 0x5E12CEULL)) {}

void Service::reload(std::shared_ptr<const ModelBank> bank) {
  store_.set(std::move(bank));
}

ServeResponse Service::handle(const ServeRequest& request) {
  auto t0 = std::chrono::steady_clock::now();
  ServeResponse response;
  response.request_id = request.request_id;

  auto finish = [&]() -> ServeResponse& {
    auto t1 = std::chrono::steady_clock::now();
    response.latency_micros =
        std::chrono::duration_cast<std::chrono::microseconds>(t1 - t0).count();
    return response;
  };

  auto it = catalog_.find(request.page_url);
  if (it == catalog_.end()) {
    response.error = "unknown page_url " + request.page_url;
    return finish();
  }
  const CatalogEntry& entry = it->second;
  if (entry.titles.empty() || entry.descriptions.empty()) {
    response.error = "page " + request.page_url + " has no servable pools";
    return finish();
  }

  std::shared_ptr<const ModelBank> bank = store_.get();
  Query query = Query::make(request.query);

  // per-request feature cache over the catalog pools, so no copies of the
  // pool vectors are made on the hot path
  std::vector<std::array<std::optional<FeatureVector>, kNumPositions>> tcache(
      entry.titles.size());
  std::vector<std::array<std::optional<FeatureVector>, kNumPositions>> dcache(
      entry.descriptions.size());
  auto features = [&](bool is_title, std::size_t i, Position pos) -> const FeatureVector& {
    auto& cache = is_title ? tcache : dcache;
    auto& slot = cache[i][static_cast<std::size_t>(static_cast<int>(pos))];
    if (!slot) {
      const AdAsset& asset = is_title ? entry.titles[i] : entry.descriptions[i];
      slot = featurize(asset, query, pos, bank->hash_bits);
    }
    return *slot;
  };

  StitchOutcome outcome;
  if (request.mode == StitchMode::Explore) {
    std::lock_guard lock(rng_mutex_);
    outcome = stitch_with(*bank, entry.titles, entry.descriptions,
                          StitchMode::Explore, config_.trial_scale, rng_, features);
  } else {
    Rng unused(0);
    outcome = stitch_with(*bank, entry.titles, entry.descriptions,
                          StitchMode::Exploit, config_.trial_scale, unused,
                          features);
  }

  response.ok = true;
  response.ad = std::move(outcome.ad);
  response.slot_scores = outcome.slot_scores;
  return finish();
}

TcpServer::TcpServer(Service& service, int port) : service_(service) {
  listen_fd_ = ::socket(AF_INET, SOCK_STREAM, 0);
  if (listen_fd_ < 0) throw std::runtime_error("socket() failed");
  int one = 1;
  ::setsockopt(listen_fd_, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
  sockaddr_in addr{};
  addr.sin_family = AF_INET;
  addr.sin_addr.s_addr = htonl(INADDR_LOOPBACK);
  addr.sin_port = htons(static_cast<std::uint16_t>(port));
  if (::bind(listen_fd_, reinterpret_cast<sockaddr*>(&addr), sizeof(addr)) < 0) {
    ::close(listen_fd_);
    throw std::runtime_error("bind() failed on port " + std::to_string(port));
  }
  if (::listen(listen_fd_, 16) < 0) {
    ::close(listen_fd_);
    throw std::runtime_error("listen() failed");
  }
  socklen_t len = sizeof(addr);
  ::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  port_ = ntohs(addr.sin_port);
}

TcpServer::~TcpServer() {
  stop();
  std::lock_guard lock(threads_mutex_);
  for (auto& t : threads_) {
    if (t.joinable()) t.join();
  }
}

void TcpServer::stop() {
  bool expected = false;
  if (stopping_.compare_exchange_strong(expected, true) && listen_fd_ >= 0) {
    ::shutdown(listen_fd_, SHUT_RDWR);
    ::close(listen_fd_);
    listen_fd_ = -1;
  }
}

void TcpServer::run() {
  while (!stopping_.load()) {
    int fd = ::accept(listen_fd_, nullptr, nullptr);
    if (fd < 0) {
      if (stopping_.load()) break;
      continue;
    }
    std::lock_guard lock(threads_mutex_);
    threads_.emplace_back([this, fd] { serve_connection(fd); });
  }
}

void TcpServer::serve_connection(int fd) {
  std::string buffer;
  char chunk[4096];
  for (;;) {
    ssize_t n = ::recv(fd, chunk, sizeof(chunk), 0);
    if (n <= 0) break;
    buffer.append(chunk, static_cast<std::size_t>(n));
    std::size_t at;
    while ((at = buffer.find('\n')) != std::string::npos) {
      std::string line = buffer.substr(0, at);
      buffer.erase(0, at + 1);
      if (line.empty() || line == "\r") continue;
      std::string reply;
      Json j = Json::parse(line, nullptr, false);
      if (j.is_discarded()) {
        Json err;
        err["ok"] = false;
        err["error"] = "malformed JSON request";
        reply = to_jsonl_line(err);
      } else {
        ServeResponse response = service_.handle(serve_request_from_json(j));
        reply = to_jsonl_line(to_json(response));
      }
      std::size_t sent = 0;
      while (sent < reply.size()) {
        ssize_t w = ::send(fd, reply.data() + sent, reply.size() - sent, 0);
        if (w <= 0) {
          ::close(fd);
          return;
        }
        sent += static_cast<std::size_t>(w);
      }
    }
  }
  ::close(fd);
}

}  // namespace adstitch
