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

#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evalscope/error.h"

namespace evalscope {

// Small blocking HTTP helpers shared by the cache, the orchestrator and the
// CLI. Errors surface as Error(kNetwork) or Error(kTimeout).

struct HttpResponse {
  int status = 0;
  std::string body;
};

struct Url {
  std::string scheme;  // "http" or "https"
  std::string host;
  int port = 0;
  std::string path;  // includes the query, starts with '/'
};

/// Throws Error(kInvalidArgument) for anything but http(s)://host[:port]/path.
Url parse_url(const std::string& url);

/// GET returning the body; non-2xx statuses throw Error(kNetwork).
std::string http_get(const std::string& url, int timeout_ms = 30000);

/// Requests against a base like "http://127.0.0.1:8080". Transport failures
/// throw; any HTTP status is returned.
HttpResponse http_request(const std::string& method, const std::string& base,
                          const std::string& path, const std::string& body = "",
                          int timeout_ms = 30000);

/// Percent-encodes a query parameter value.
std::string url_encode(const std::string& s);

/// Error responses carry {"error": {"code": "<ErrorCode name>", "message": ...}}.
int http_status_for(ErrorCode code);
nlohmann::json error_body(const Error& e);
/// Rebuilds the Error carried by a non-2xx response.
Error error_from_response(const HttpResponse& r);
/// Parses a 2xx JSON body or throws error_from_response.
nlohmann::json expect_json(const HttpResponse& r);

struct HttpRequest {
  std::string method;
  std::string path;
  std::map<std::string, std::string> params;  // query string
  std::vector<std::string> captures;          // regex groups of the route
  std::string body;
};

/// Handlers return a response or throw; thrown Errors map to statuses via
/// http_status_for and anything else to 500.
using HttpHandler = std::function<HttpResponse(const HttpRequest&)>;

HttpResponse json_response(const nlohmann::json& j, int status = 200);

/// Threaded HTTP/1.1 server on a background thread.
class HttpServer {
 public:
  HttpServer();
  ~HttpServer();
  HttpServer(const HttpServer&) = delete;
  HttpServer& operator=(const HttpServer&) = delete;

  /// `pattern` is an ECMAScript regex matched against the whole path.
  void route(const std::string& method, const std::string& pattern, HttpHandler handler);

  /// Binds and starts serving; port 0 picks a free port. Returns the port.
  int start(const std::string& host, int port);
  void stop();
  /// Blocks until the server stops.
  void wait();
  int port() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace evalscope
