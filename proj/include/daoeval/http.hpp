// Copyright 2026 The DaoEval Authors
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

#ifndef DAOEVAL_HTTP_HPP_
#define DAOEVAL_HTTP_HPP_

#include <chrono>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

namespace daoeval {

class Diagnostics;

using Headers = std::vector<std::pair<std::string, std::string>>;

struct HttpRequest {
  std::string method = "GET";
  std::string url;  // absolute: scheme://host[:port]/path?query
  std::string body;
  Headers headers;
};

struct HttpResponse {
  int status = 0;  // 0 when the connection itself failed
  std::string body;
  std::string error;
};

class HttpTransport {
 public:
  virtual ~HttpTransport() = default;
  virtual HttpResponse send(const HttpRequest& request) = 0;
};

/// cpp-httplib backed transport. https URLs require OpenSSL support at build
/// time; without it they fail with a connection error.
class HttplibTransport final : public HttpTransport {
 public:
  explicit HttplibTransport(std::chrono::seconds timeout = std::chrono::seconds(30))
      : timeout_(timeout) {}
  HttpResponse send(const HttpRequest& request) override;

 private:
  std::chrono::seconds timeout_;
};

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string target;  // /path?query
};
SplitUrl split_url(const std::string& url);
std::string url_encode(const std::string& value);

class TokenBucket {
 public:
  /// rate <= 0 disables limiting.
  TokenBucket(double rate_per_second, double burst);
  void acquire();

 private:
  std::mutex mu_;
  double rate_;
  double burst_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
};

struct RetryPolicy {
  int max_attempts = 5;
  std::chrono::milliseconds initial_backoff{250};
  double multiplier = 2.0;
};

/// Rate-limited, retrying client for one upstream source. Connection failures,
/// 429 and 5xx responses are retried with exponential backoff; other statuses
/// are returned to the caller. Exhausting the attempts throws
/// kSourceUnavailable. Safe to share across threads.
class HttpClient {
 public:
  HttpClient(std::string source_name, std::shared_ptr<HttpTransport> transport,
             RetryPolicy retry = {}, double requests_per_second = 0.0,
             Diagnostics* diag = nullptr);

  HttpResponse get(const std::string& url, const Headers& headers = {});
  HttpResponse post(const std::string& url, const std::string& body,
                    const Headers& headers = {});

  const std::string& source_name() const { return name_; }

 private:
  HttpResponse send(HttpRequest request);

  std::string name_;
  std::shared_ptr<HttpTransport> transport_;
  RetryPolicy retry_;
  TokenBucket bucket_;
  Diagnostics* diag_;
};

}  // namespace daoeval

#endif  // DAOEVAL_HTTP_HPP_
