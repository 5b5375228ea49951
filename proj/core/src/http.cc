// Copyright 2026 The Evalscope Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "evalscope/http.h"

#include <chrono>
#include <regex>
#include <thread>

#include <httplib.h>

namespace evalscope {

Url parse_url(const std::string& url) {
  static const std::regex re(R"(^(https?)://([^/:?#]+)(?::(\d+))?([/?][^#]*)?$)");
  std::smatch m;
  if (!std::regex_match(url, m, re)) {
    throw Error(ErrorCode::kInvalidArgument, "not an http(s) URL: '" + url + "'");
  }
  Url u;
  u.scheme = m[1];
  u.host = m[2];
  u.port = m[3].matched ? std::stoi(m[3]) : (u.scheme == "https" ? 443 : 80);
  u.path = m[4].matched ? m[4].str() : "/";
  if (u.path.front() == '?') u.path.insert(0, "/");
  return u;
}

namespace {

std::unique_ptr<httplib::Client> make_client(const std::string& scheme_host_port, int timeout_ms) {
  auto cli = std::make_unique<httplib::Client>(scheme_host_port);
  const auto t = std::chrono::milliseconds(timeout_ms);
  cli->set_connection_timeout(t);
  cli->set_read_timeout(t);
  cli->set_write_timeout(t);
  cli->set_follow_location(true);
  return cli;
}

HttpResponse finish(httplib::Result& res, const std::string& what,
                    std::chrono::steady_clock::time_point started, int timeout_ms) {
  if (!res) {
    const auto elapsed = std::chrono::duration_cast<std::chrono::milliseconds>(
        std::chrono::steady_clock::now() - started);
    const auto err = res.error();
    const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                           (err == httplib::Error::Read && elapsed.count() >= timeout_ms);
    throw Error(timed_out ? ErrorCode::kTimeout : ErrorCode::kNetwork,
                what + ": " + httplib::to_string(err));
  }
  return HttpResponse{res->status, res->body};
}

}  // namespace

std::string http_get(const std::string& url, int timeout_ms) {
  const Url u = parse_url(url);
  auto cli = make_client(u.scheme + "://" + u.host + ":" + std::to_string(u.port), timeout_ms);
  const auto started = std::chrono::steady_clock::now();
  auto res = cli->Get(u.path);
  HttpResponse r = finish(res, "GET " + url, started, timeout_ms);
  if (r.status < 200 || r.status >= 300) {
    throw Error(ErrorCode::kNetwork, "GET " + url + " returned HTTP " + std::to_string(r.status));
  }
  return std::move(r.body);
}

HttpResponse http_request(const std::string& method, const std::string& base,
                          const std::string& path, const std::string& body, int timeout_ms) {
  auto cli = make_client(base, timeout_ms);
  const auto started = std::chrono::steady_clock::now();
  httplib::Result res{nullptr, httplib::Error::Unknown};
  if (method == "GET") {
    res = cli->Get(path);
  } else if (method == "POST") {
    res = cli->Post(path, body, "application/json");
  } else if (method == "PUT") {
    res = cli->Put(path, body, "application/json");
  } else if (method == "DELETE") {
    res = cli->Delete(path);
  } else {
    throw Error(ErrorCode::kInvalidArgument, "unsupported HTTP method " + method);
  }
  return finish(res, method + " " + base + path, started, timeout_ms);
}

std::string url_encode(const std::string& s) {
  static const char kHex[] = "0123456789ABCDEF";
  std::string out;
  for (unsigned char c : s) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out.push_back(static_cast<char>(c));
    } else {
      out.push_back('%');
      out.push_back(kHex[c >> 4]);
      out.push_back(kHex[c & 0xf]);
    }
  }
  return out;
}

int http_status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kSyntax:
    case ErrorCode::kSchema:
    case ErrorCode::kMalformedSpan:
    case ErrorCode::kShapeMismatch:
      return 400;
    case ErrorCode::kNotFound:
      return 404;
    case ErrorCode::kAlreadyExists:
      return 409;
    case ErrorCode::kFailedPrecondition:
      return 412;
    case ErrorCode::kUnsupported:
    case ErrorCode::kNoBackend:
    case ErrorCode::kChecksumMismatch:
      return 422;
    case ErrorCode::kNetwork:
      return 502;
    case ErrorCode::kTimeout:
      return 504;
    case ErrorCode::kIo:
    case ErrorCode::kInternal:
      return 500;
  }
  return 500;
}

nlohmann::json error_body(const Error& e) {
  return {{"error", {{"code", error_code_name(e.code())}, {"message", e.what()}}}};
}

Error error_from_response(const HttpResponse& r) {
  ErrorCode code = ErrorCode::kInternal;
  std::string message = "HTTP " + std::to_string(r.status);
  auto j = nlohmann::json::parse(r.body, nullptr, false);
  if (j.is_object() && j.contains("error") && j["error"].is_object()) {
    const std::string name = j["error"].value("code", "");
    for (int c = 0; c <= static_cast<int>(ErrorCode::kInternal); ++c) {
      if (name == error_code_name(static_cast<ErrorCode>(c))) code = static_cast<ErrorCode>(c);
    }
    message = j["error"].value("message", message);
  } else if (r.status == 404) {
    code = ErrorCode::kNotFound;
  }
  return Error(code, message);
}

nlohmann::json expect_json(const HttpResponse& r) {
  if (r.status < 200 || r.status >= 300) throw error_from_response(r);
  auto j = nlohmann::json::parse(r.body, nullptr, false);
  if (j.is_discarded()) throw Error(ErrorCode::kNetwork, "response is not JSON");
  return j;
}

HttpResponse json_response(const nlohmann::json& j, int status) {
  return HttpResponse{status, j.dump()};
}

struct HttpServer::Impl {
  struct Route {
    std::string method;
    std::regex pattern;
    HttpHandler handler;
  };
  httplib::Server server;
  std::vector<Route> routes;
  std::thread thread;
  int port = 0;

  void handle(const httplib::Request& req, httplib::Response& res) {
    HttpRequest r;
    r.method = req.method;
    r.path = req.path;
    r.body = req.body;
    for (const auto& [k, v] : req.params) r.params[k] = v;
    bool path_known = false;
    for (const auto& route : routes) {
      std::smatch m;
      if (!std::regex_match(r.path, m, route.pattern)) continue;
      path_known = true;
      if (route.method != r.method) continue;
      for (size_t i = 1; i < m.size(); ++i) r.captures.push_back(m[i]);
      HttpResponse out;
      try {
        out = route.handler(r);
      } catch (const Error& e) {
        out = json_response(error_body(e), http_status_for(e.code()));
      } catch (const nlohmann::json::exception& e) {
        // Missing or mistyped fields in a request body.
        out = json_response(error_body(Error(ErrorCode::kInvalidArgument, e.what())), 400);
      } catch (const std::exception& e) {
        out = json_response(error_body(Error(ErrorCode::kInternal, e.what())), 500);
      }
      res.status = out.status;
      res.set_content(out.body, "application/json");
      return;
    }
    const Error e(ErrorCode::kNotFound, (path_known ? "method not allowed: " : "no route: ") +
                                            r.method + " " + r.path);
    res.status = path_known ? 405 : 404;
    res.set_content(error_body(e).dump(), "application/json");
  }
};

HttpServer::HttpServer() : impl_(std::make_unique<Impl>()) {
  auto h = [this](const httplib::Request& req, httplib::Response& res) { impl_->handle(req, res); };
  impl_->server.Get(".*", h);
  impl_->server.Post(".*", h);
  impl_->server.Put(".*", h);
  impl_->server.Delete(".*", h);
}

HttpServer::~HttpServer() { stop(); }

void HttpServer::route(const std::string& method, const std::string& pattern,
                       HttpHandler handler) {
  impl_->routes.push_back(Impl::Route{method, std::regex(pattern), std::move(handler)});
}

int HttpServer::start(const std::string& host, int port) {
  if (port == 0) {
    impl_->port = impl_->server.bind_to_any_port(host);
  } else {
    impl_->port = impl_->server.bind_to_port(host, port) ? port : -1;
  }
  if (impl_->port <= 0) {
    throw Error(ErrorCode::kIo, "cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return impl_->port;
}

void HttpServer::stop() {
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

void HttpServer::wait() {
  while (impl_->server.is_running()) std::this_thread::sleep_for(std::chrono::milliseconds(50));
}

int HttpServer::port() const { return impl_->port; }

}  // namespace evalscope
