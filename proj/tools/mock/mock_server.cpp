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

#include "mock_server.hpp"

#include <httplib.h>

#include <algorithm>
#include <cctype>
#include <chrono>
#include <stdexcept>
#include <vector>

#include "daoeval/codec.hpp"
#include "daoeval/error.hpp"

namespace daoeval::mock {
namespace {

std::string route_of(const std::string& path) {
  if (path.starts_with("/graphql")) return "graphql";
  if (path.starts_with("/protocol/") || path.starts_with("/treasury/")) return "defillama";
  if (path.starts_with("/v2/") || path.starts_with("/v3/")) return "cmc";
  if (path.starts_with("/forum/")) return "forum";
  if (path.starts_with("/v1/chat")) return "llm";
  return "other";
}

Json snapshot_proposal(const Proposal& p) {
  Json j;
  j["id"] = p.id;
  j["title"] = p.title;
  j["body"] = p.body.value_or("");
  j["choices"] = p.choices;
  j["created"] = p.created_at.value_or(p.start);
  j["start"] = p.start;
  j["end"] = p.end;
  j["state"] = "closed";
  j["space"] = Json{{"id", p.space_id}};
  return j;
}

void reply_json(httplib::Response& res, const Json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

std::string upper(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::toupper(c); });
  return s;
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

/// Value of a "- key: value" line in the prompt, if present.
std::string prompt_field(const std::string& text, const std::string& key) {
  const std::string marker = "\n- " + key + ": ";
  const auto pos = text.find(marker);
  if (pos == std::string::npos) return {};
  const auto from = pos + marker.size();
  const auto nl = text.find('\n', from);
  return text.substr(from, nl == std::string::npos ? std::string::npos : nl - from);
}

std::vector<std::string> prompt_choices(const std::string& text) {
  // "1. For | 2. Against"
  std::vector<std::string> out;
  const std::string line = prompt_field(text, "choices");
  std::size_t pos = 0;
  while (pos < line.size()) {
    auto sep = line.find(" | ", pos);
    if (sep == std::string::npos) sep = line.size();
    std::string item = line.substr(pos, sep - pos);
    if (auto dot = item.find(". "); dot != std::string::npos) item = item.substr(dot + 2);
    out.push_back(item);
    pos = sep + 3;
  }
  return out;
}

}  // namespace

LlmMode parse_llm_mode(const std::string& text) {
  if (text == "first") return LlmMode::kFirst;
  if (text == "fixed") return LlmMode::kFixed;
  if (text == "leader") return LlmMode::kLeader;
  if (text == "gibberish") return LlmMode::kGibberish;
  if (text == "gibberish_once") return LlmMode::kGibberishOnce;
  throw std::invalid_argument("unknown llm mode '" + text + "'");
}

MockServer::MockServer(Dataset dataset, MockOptions options)
    : dataset_(std::move(dataset)),
      options_(std::move(options)),
      server_(std::make_unique<httplib::Server>()) {
  failures_left_ = options_.fail_first_requests;
  install_routes();
}

MockServer::~MockServer() { stop(); }

std::string MockServer::base_url() const { return "http://127.0.0.1:" + std::to_string(port_); }

int MockServer::start(int port) {
  if (port == 0) {
    port_ = server_->bind_to_any_port("127.0.0.1");
  } else {
    if (!server_->bind_to_port("127.0.0.1", port)) port_ = -1;
    else port_ = port;
  }
  if (port_ <= 0) throw std::runtime_error("mock server could not bind 127.0.0.1");
  thread_ = std::thread([this] { server_->listen_after_bind(); });
  const auto deadline = std::chrono::steady_clock::now() + std::chrono::seconds(5);
  while (!server_->is_running() && std::chrono::steady_clock::now() < deadline) {
    std::this_thread::sleep_for(std::chrono::milliseconds(1));
  }
  return port_;
}

void MockServer::stop() {
  if (server_) server_->stop();
  if (thread_.joinable()) thread_.join();
}

void MockServer::wait() {
  if (thread_.joinable()) thread_.join();
}

std::map<std::string, std::size_t> MockServer::request_counts() const {
  std::lock_guard<std::mutex> lock(mu_);
  return counts_;
}

std::size_t MockServer::total_requests() const {
  std::lock_guard<std::mutex> lock(mu_);
  std::size_t n = 0;
  for (const auto& [_, c] : counts_) n += c;
  return n;
}

void MockServer::install_routes() {
  auto& svr = *server_;

  svr.set_pre_routing_handler([this](const httplib::Request& req, httplib::Response& res) {
    {
      std::lock_guard<std::mutex> lock(mu_);
      ++counts_[route_of(req.path)];
    }
    if (failures_left_.fetch_sub(1) > 0) {
      res.status = 503;
      res.set_content("{\"error\":\"unavailable\"}", "application/json");
      return httplib::Server::HandlerResponse::Handled;
    }
    for (const auto& [prefix, status] : options_.forced_status) {
      if (req.path.starts_with(prefix)) {
        res.status = status;
        res.set_content("{\"error\":\"forced\"}", "application/json");
        return httplib::Server::HandlerResponse::Handled;
      }
    }
    return httplib::Server::HandlerResponse::Unhandled;
  });

  svr.Post("/graphql", [this](const httplib::Request& req, httplib::Response& res) {
    Json body;
    try {
      body = Json::parse(req.body);
    } catch (const std::exception&) {
      reply_json(res, Json{{"errors", Json::array({Json{{"message", "bad json"}}})}}, 400);
      return;
    }
    const std::string query = body.value("query", "");
    const Json vars = body.value("variables", Json::object());
    const std::size_t first = vars.value("first", 1000);

    if (query.find("proposals(") != std::string::npos) {
      const auto spaces = vars.value("spaces", std::vector<std::string>{});
      const std::size_t skip = vars.value("skip", 0);
      std::vector<const Proposal*> matches;
      for (const auto& p : dataset_.proposals) {
        if (std::find(spaces.begin(), spaces.end(), p.space_id) != spaces.end()) {
          matches.push_back(&p);
        }
      }
      std::stable_sort(matches.begin(), matches.end(), [](const Proposal* a, const Proposal* b) {
        return a->created_at.value_or(a->start) < b->created_at.value_or(b->start);
      });
      Json page = Json::array();
      for (std::size_t i = skip; i < matches.size() && page.size() < first; ++i) {
        page.push_back(snapshot_proposal(*matches[i]));
      }
      reply_json(res, Json{{"data", Json{{"proposals", page}}}});
    } else if (query.find("proposal(") != std::string::npos) {
      const std::string id = vars.value("id", "");
      Json found = nullptr;
      for (const auto& p : dataset_.proposals) {
        if (p.id == id) found = snapshot_proposal(p);
      }
      reply_json(res, Json{{"data", Json{{"proposal", found}}}});
    } else if (query.find("votes(") != std::string::npos) {
      const std::string id = vars.value("proposal", "");
      const Timestamp gte = vars.value("created_gte", Timestamp{0});
      std::vector<const VoteRecord*> matches;
      for (const auto& v : dataset_.votes) {
        if (v.proposal_id == id && v.timestamp >= gte) matches.push_back(&v);
      }
      std::stable_sort(matches.begin(), matches.end(),
                       [](const VoteRecord* a, const VoteRecord* b) {
                         return a->timestamp != b->timestamp ? a->timestamp < b->timestamp
                                                             : a->voter < b->voter;
                       });
      Json page = Json::array();
      for (std::size_t i = 0; i < matches.size() && page.size() < first; ++i) {
        const auto& v = *matches[i];
        page.push_back(Json{{"id", v.proposal_id + ":" + v.voter + ":" +
                                       std::to_string(v.timestamp)},
                            {"voter", v.voter},
                            {"vp", v.vp},
                            {"choice", choice_to_json(v.choice)},
                            {"created", v.timestamp}});
      }
      reply_json(res, Json{{"data", Json{{"votes", page}}}});
    } else {
      reply_json(res, Json{{"errors", Json::array({Json{{"message", "unsupported query"}}})}});
    }
  });

  auto llama = [this](MarketMetric metric) {
    return [this, metric](const httplib::Request& req, httplib::Response& res) {
      const std::string slug = req.matches[1];
      for (const auto& s : dataset_.market) {
        if (s.protocol == slug && s.metric == metric) {
          Json tvl = Json::array();
          for (const auto& sample : s.samples) {
            tvl.push_back(Json{{"date", sample.day * kSecondsPerDay},
                               {"totalLiquidityUSD", sample.value}});
          }
          reply_json(res, Json{{"name", slug}, {"tvl", tvl}});
          return;
        }
      }
      reply_json(res, Json{{"message", "Protocol not found"}}, 404);
    };
  };
  svr.Get(R"(/protocol/([^/]+))", llama(MarketMetric::kTvl));
  svr.Get(R"(/treasury/([^/]+))", llama(MarketMetric::kTreasury));

  svr.Get("/v2/cryptocurrency/quotes/historical",
          [this](const httplib::Request& req, httplib::Response& res) {
            const std::string symbol = req.get_param_value("symbol");
            for (const auto& s : dataset_.market) {
              if (s.metric == MarketMetric::kPrice && upper(s.protocol) == upper(symbol)) {
                Json quotes = Json::array();
                for (const auto& sample : s.samples) {
                  quotes.push_back(Json{
                      {"timestamp", format_iso8601(sample.day * kSecondsPerDay + 43200)},
                      {"quote", Json{{"USD", Json{{"price", sample.value}}}}}});
                }
                reply_json(res, Json{{"data", Json{{"symbol", symbol}, {"quotes", quotes}}}});
                return;
              }
            }
            reply_json(res, Json{{"status", Json{{"error_message", "Invalid symbol"}}}}, 400);
          });

  svr.Get("/v3/index/cmc100-historical", [this](const httplib::Request&, httplib::Response& res) {
    for (const auto& s : dataset_.market) {
      if (s.metric != MarketMetric::kIndex) continue;
      Json data = Json::array();
      for (const auto& sample : s.samples) {
        data.push_back(Json{{"update_time", format_iso8601(sample.day * kSecondsPerDay)},
                            {"value", sample.value}});
      }
      reply_json(res, Json{{"data", data}});
      return;
    }
    reply_json(res, Json{{"status", Json{{"error_message", "no index"}}}}, 404);
  });

  svr.Get(R"(/forum/(.+))", [this](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    for (const auto& f : dataset_.forum) {
      if (f.proposal_id == id) {
        reply_json(res, to_json(f));
        return;
      }
    }
    reply_json(res, Json{{"error", "no thread"}}, 404);
  });

  svr.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
    Json body;
    try {
      body = Json::parse(req.body);
    } catch (const std::exception&) {
      reply_json(res, Json{{"error", "bad json"}}, 400);
      return;
    }
    const Json& messages = body.at("messages");
    std::string user;
    for (const auto& m : messages) {
      if (m.value("role", "") == "user") {
        user = m.value("content", "");
        break;
      }
    }
    const auto choices = prompt_choices(user);
    const bool reask = messages.size() > 2;
    std::string label = choices.empty() ? std::string("For") : choices.front();
    switch (options_.llm_mode) {
      case LlmMode::kFirst: break;
      case LlmMode::kFixed: label = options_.fixed_label; break;
      case LlmMode::kLeader: {
        std::string leader = prompt_field(user, "current leader");
        if (auto p = leader.find(" (tied)"); p != std::string::npos) leader.erase(p);
        if (!leader.empty()) label = leader;
        break;
      }
      case LlmMode::kGibberish: label.clear(); break;
      case LlmMode::kGibberishOnce:
        if (!reask) label.clear();
        break;
    }
    std::string content;
    if (label.empty()) {
      content = "I would rather not say.";
    } else if (reask) {
      content = label;
    } else {
      content = Json{{"selected_option", label},
                     {"ai_final_reason", "The " + lower(label) +
                                             " option best serves long-term growth given the "
                                             "evidence provided."}}
                    .dump();
    }
    reply_json(res, Json{{"id", "mock-completion"},
                         {"object", "chat.completion"},
                         {"model", body.value("model", "mock")},
                         {"choices", Json::array({Json{
                                         {"index", 0},
                                         {"message", Json{{"role", "assistant"},
                                                          {"content", content}}},
                                         {"finish_reason", "stop"}}})}});
  });
}

}  // namespace daoeval::mock
