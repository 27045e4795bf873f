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

#include "daoeval/http.hpp"

#include <algorithm>
#include <cstdio>
#include <thread>

#include <httplib.h>

#include "daoeval/diagnostics.hpp"
#include "daoeval/error.hpp"

namespace daoeval {

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos) {
    throw Error(ErrorCode::kInvalidArgument, "URL without scheme: " + url);
  }
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

std::string url_encode(const std::string& value) {
  std::string out;
  for (unsigned char c : value) {
    if (std::isalnum(c) || c == '-' || c == '_' || c == '.' || c == '~') {
      out += static_cast<char>(c);
    } else {
      char buf[4];
      std::snprintf(buf, sizeof(buf), "%%%02X", c);
      out += buf;
    }
  }
  return out;
}

HttpResponse HttplibTransport::send(const HttpRequest& request) {
  HttpResponse out;
  SplitUrl parts;
  try {
    parts = split_url(request.url);
  } catch (const Error& e) {
    out.error = e.what();
    return out;
  }
  httplib::Client client(parts.origin);
  client.set_connection_timeout(timeout_);
  client.set_read_timeout(timeout_);
  client.set_write_timeout(timeout_);
  httplib::Headers headers;
  std::string content_type = "application/json";
  for (const auto& [k, v] : request.headers) {
    if (k == "Content-Type") {
      content_type = v;
    } else {
      headers.emplace(k, v);
    }
  }
  httplib::Result res = request.method == "POST"
                            ? client.Post(parts.target, headers, request.body, content_type)
                            : client.Get(parts.target, headers);
  if (!res) {
    out.error = httplib::to_string(res.error());
    return out;
  }
  out.status = res->status;
  out.body = res->body;
  return out;
}

TokenBucket::TokenBucket(double rate_per_second, double burst)
    : rate_(rate_per_second),
      burst_(std::max(1.0, burst)),
      tokens_(std::max(1.0, burst)),
      last_(std::chrono::steady_clock::now()) {}

void TokenBucket::acquire() {
  if (rate_ <= 0.0) return;
  std::unique_lock<std::mutex> lock(mu_);
  for (;;) {
    const auto now = std::chrono::steady_clock::now();
    const double elapsed = std::chrono::duration<double>(now - last_).count();
    last_ = now;
    tokens_ = std::min(burst_, tokens_ + elapsed * rate_);
    if (tokens_ >= 1.0) {
      tokens_ -= 1.0;
      return;
    }
    const double wait = (1.0 - tokens_) / rate_;
    lock.unlock();
    std::this_thread::sleep_for(std::chrono::duration<double>(wait));
    lock.lock();
  }
}

HttpClient::HttpClient(std::string source_name, std::shared_ptr<HttpTransport> transport,
                       RetryPolicy retry, double requests_per_second, Diagnostics* diag)
    : name_(std::move(source_name)),
      transport_(std::move(transport)),
      retry_(retry),
      bucket_(requests_per_second, requests_per_second),
      diag_(diag) {}

HttpResponse HttpClient::get(const std::string& url, const Headers& headers) {
  return send(HttpRequest{"GET", url, {}, headers});
}

HttpResponse HttpClient::post(const std::string& url, const std::string& body,
                              const Headers& headers) {
  return send(HttpRequest{"POST", url, body, headers});
}

HttpResponse HttpClient::send(HttpRequest request) {
  auto backoff = retry_.initial_backoff;
  std::string last_problem;
  const int attempts = std::max(1, retry_.max_attempts);
  for (int attempt = 1; attempt <= attempts; ++attempt) {
    bucket_.acquire();
    HttpResponse res = transport_->send(request);
    const bool retryable = res.status == 0 || res.status == 429 || res.status >= 500;
    if (!retryable) return res;
    last_problem = res.status == 0 ? res.error : "HTTP " + std::to_string(res.status);
    if (attempt == attempts) break;
    if (diag_) diag_->Warn(warn::kHttpRetry, name_ + ": " + last_problem);
    std::this_thread::sleep_for(backoff);
    backoff = std::chrono::milliseconds(
        static_cast<long long>(static_cast<double>(backoff.count()) * retry_.multiplier));
  }
  throw Error(ErrorCode::kSourceUnavailable,
              name_ + " unavailable after " + std::to_string(attempts) +
                  " attempts (" + last_problem + "): " + request.url);
}

}  // namespace daoeval
