#pragma once

#include <chrono>
#include <memory>
#include <string>

#include "trustmw/middleware.hpp"

namespace trustmw::service {

// HTTP JSON front end of one middleware instance:
//   POST /requests       DataRequest -> DataResponse
//   GET  /trust/{iri}    trust record (IRI URL-encoded or prefixed)
//   POST /peers/scores   ScoreUpdate batch -> {"applied": n}
//   POST /admin/dua      DUA rewrite for a locked pair
//   GET  /healthz
class HttpService {
 public:
  explicit HttpService(middleware::Middleware& mw);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  // Binds without serving; port 0 picks a free port. Returns the port.
  int bind(const std::string& host, int port);
  // Serves on a background thread until stop().
  void start();
  // Serves on the calling thread until stop().
  void run();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

// Posts batches to <peer>/peers/scores; a 200 reply is the acknowledgement.
class HttpTransport : public middleware::PeerTransport {
 public:
  explicit HttpTransport(std::chrono::milliseconds timeout = std::chrono::milliseconds(2000)) : timeout_(timeout) {}
  bool send(const std::string& peer, const std::vector<trust::ScoreUpdate>& updates) override;

 private:
  std::chrono::milliseconds timeout_;
};

// Splits "host:port" or "http://host:port".
std::pair<std::string, int> split_address(const std::string& address);

}  // namespace trustmw::service
