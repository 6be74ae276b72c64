#include "arsum/rater_http.hpp"

#include <httplib.h>

#include <thread>

#include "arsum/error.hpp"

namespace arsum::rater {

struct HttpServer::Impl {
  RaterService& service;
  HttpOptions options;
  httplib::Server server;
  std::thread thread;

  Impl(RaterService& s, HttpOptions o) : service(s), options(std::move(o)) {}
};

namespace {

void reply(httplib::Response& res, const Response& r) {
  res.status = r.status;
  res.set_header("Cache-Control", "no-store");
  res.set_content(r.body.dump(), "application/json; charset=utf-8");
}

std::string admin_token(const httplib::Request& req) {
  if (req.has_header("X-Admin-Token")) return req.get_header_value("X-Admin-Token");
  return req.get_param_value("admin");
}

}  // namespace

HttpServer::HttpServer(RaterService& service, HttpOptions options)
    : impl_(std::make_unique<Impl>(service, std::move(options))) {
  auto& svc = impl_->service;
  auto& srv = impl_->server;

  srv.Get("/api/session", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.session_info(req.get_param_value("rater")));
  });
  srv.Get("/api/task/next", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.next_task(req.get_param_value("rater")));
  });
  srv.Post("/api/rating", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.post_rating(req.body));
  });
  srv.Get("/api/aggregate", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.aggregates(admin_token(req)));
  });
  srv.Post("/api/session/close", [&svc](const httplib::Request& req, httplib::Response& res) {
    reply(res, svc.close_session(admin_token(req)));
  });
  srv.set_exception_handler([](const httplib::Request&, httplib::Response& res, std::exception_ptr) {
    reply(res, {500, Json{{"error", "InternalError"}, {"message", "unexpected failure"}}});
  });

  if (!impl_->options.static_dir.empty() &&
      !srv.set_mount_point("/", impl_->options.static_dir.string())) {
    throw IoError("static directory " + impl_->options.static_dir.string() + " does not exist");
  }
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind() {
  auto& srv = impl_->server;
  const auto& opt = impl_->options;
  port_ = opt.port == 0 ? srv.bind_to_any_port(opt.host) : (srv.bind_to_port(opt.host, opt.port) ? opt.port : -1);
  if (port_ < 0) throw IoError("cannot listen on " + opt.host + ":" + std::to_string(opt.port));
  return port_;
}

void HttpServer::run() { impl_->server.listen_after_bind(); }

int HttpServer::start() {
  const int port = bind();
  impl_->thread = std::thread([this] { run(); });
  impl_->server.wait_until_ready();
  return port;
}

void HttpServer::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace arsum::rater
