#pragma once

#include <filesystem>
#include <memory>
#include <string>

#include "arsum/rater.hpp"

namespace arsum::rater {

struct HttpOptions {
  std::string host = "127.0.0.1";
  int port = 0;  // 0 picks a free port
  std::filesystem::path static_dir;  // rater-ui assets; empty serves the API only
};

/// Binds RaterService to the JSON-over-HTTP API:
///   GET  /api/session[?rater=]    GET  /api/task/next?rater=
///   POST /api/rating              GET  /api/aggregate
///   POST /api/session/close
/// The admin token travels in X-Admin-Token or ?admin=.
class HttpServer {
 public:
  HttpServer(RaterService& service, HttpOptions options);
  ~HttpServer();

  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// Binds the socket and returns the port. Throws IoError.
  int bind();
  /// Serves until stop(); bind() first.
  void run();
  /// bind() plus run() on a background thread.
  int start();
  void stop();
  int port() const { return port_; }

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  int port_ = -1;
};

}  // namespace arsum::rater
