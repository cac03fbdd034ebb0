#include "trustmw/service.hpp"

#include <httplib.h>
#include <spdlog/spdlog.h>

#include <thread>

#include "trustmw/codec.hpp"
#include "trustmw/error.hpp"

namespace trustmw::service {

using codec::json;

namespace {

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument:
    case ErrorCode::parse:
    case ErrorCode::validation:
    case ErrorCode::kind:
    case ErrorCode::unsupported:
      return 400;
    case ErrorCode::not_found:
      return 404;
    case ErrorCode::conflict:
    case ErrorCode::state:
    case ErrorCode::mismatch:
      return 409;
    default:
      return 500;
  }
}

void reply(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

// Runs a handler, mapping errors to JSON error replies.
template <class Fn>
void guarded(httplib::Response& res, Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    reply(res, status_for(e.code()), {{"error", to_string(e.code())}, {"message", e.what()}});
  } catch (const json::exception& e) {
    reply(res, 400, {{"error", "parse"}, {"message", e.what()}});
  } catch (const std::exception& e) {
    spdlog::error("unhandled error: {}", e.what());
    reply(res, 500, {{"error", "internal"}, {"message", e.what()}});
  }
}

}  // namespace

struct HttpService::Impl {
  middleware::Middleware& mw;
  httplib::Server server;
  std::thread thread;

  explicit Impl(middleware::Middleware& m) : mw(m) {
    const Namespaces ns = mw.read_graph([](const Graph& g) { return g.namespaces(); });

    server.Post("/requests", [this, ns](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto request = codec::request_from_json(json::parse(req.body), ns);
        reply(res, 200, codec::to_json(mw.handle_request(request)));
      });
    });

    server.Get(R"(/trust/(.+))", [this, ns](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        std::string iri = req.matches[1];
        if (iri.find("://") == std::string::npos && iri.find(':') != std::string::npos) iri = ns.expand(iri);
        const auto record = mw.registry().find(iri);
        if (!record) throw Error(ErrorCode::not_found, "no trust record for <" + iri + ">");
        reply(res, 200, codec::to_json(*record));
      });
    });

    server.Post("/peers/scores", [this](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const json body = json::parse(req.body);
        if (!body.is_array()) throw Error(ErrorCode::validation, "expected an array of score updates");
        std::vector<trust::ScoreUpdate> updates;
        for (const auto& u : body) updates.push_back(codec::update_from_json(u));
        reply(res, 200, {{"applied", mw.receive_scores(updates)}});
      });
    });

    server.Post("/admin/dua", [this, ns](const httplib::Request& req, httplib::Response& res) {
      guarded(res, [&] {
        const auto dua = codec::dua_from_json(json::parse(req.body), ns);
        mw.rewrite_dua(dua);
        reply(res, 200, {{"status", "rewritten"}, {"dua", dua.iri}});
      });
    });

    server.Get("/healthz", [this](const httplib::Request&, httplib::Response& res) {
      reply(res, 200, {{"status", "ok"}, {"tm", mw.config().tm_id}, {"pendingUpdates", mw.pending_updates()}});
    });
  }
};

HttpService::HttpService(middleware::Middleware& mw) : impl_(std::make_unique<Impl>(mw)) {}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  const int bound = port == 0 ? impl_->server.bind_to_any_port(host) : (impl_->server.bind_to_port(host, port) ? port : -1);
  if (bound < 0) throw Error(ErrorCode::io, "cannot listen on " + host + ":" + std::to_string(port));
  return bound;
}

void HttpService::start() {
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
}

void HttpService::run() { impl_->server.listen_after_bind(); }

void HttpService::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

bool HttpTransport::send(const std::string& peer, const std::vector<trust::ScoreUpdate>& updates) {
  const auto [host, port] = split_address(peer);
  httplib::Client client(host, port);
  const auto secs = static_cast<time_t>(timeout_.count() / 1000);
  const auto usecs = static_cast<time_t>((timeout_.count() % 1000) * 1000);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  json body = json::array();
  for (const auto& u : updates) body.push_back(codec::to_json(u));
  const auto res = client.Post("/peers/scores", body.dump(), "application/json");
  return res && res->status == 200;
}

std::pair<std::string, int> split_address(const std::string& address) {
  std::string rest = address;
  if (const auto scheme = rest.find("://"); scheme != std::string::npos) rest = rest.substr(scheme + 3);
  while (!rest.empty() && rest.back() == '/') rest.pop_back();
  const auto colon = rest.rfind(':');
  if (colon == std::string::npos || colon == 0) {
    throw Error(ErrorCode::invalid_argument, "address '" + address + "' must be host:port");
  }
  const std::string port = rest.substr(colon + 1);
  if (port.empty() || !std::all_of(port.begin(), port.end(), ::isdigit) || port.size() > 5) {
    throw Error(ErrorCode::invalid_argument, "address '" + address + "' has a bad port");
  }
  return {rest.substr(0, colon), std::stoi(port)};
}

}  // namespace trustmw::service
