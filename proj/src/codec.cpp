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

#include "daoeval/codec.hpp"

#include <cmath>
#include <string>

#include "daoeval/error.hpp"

namespace daoeval {
namespace {

[[noreturn]] void bad(const std::string& why) {
  throw Error(ErrorCode::kInvalidRecord, why);
}

std::size_t parse_index(const Json& v) {
  if (v.is_number_integer() || v.is_number_unsigned()) {
    const auto i = v.get<std::int64_t>();
    if (i < 0) bad("negative choice index");
    return static_cast<std::size_t>(i);
  }
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (d < 0 || std::floor(d) != d) bad("non-integer choice index");
    return static_cast<std::size_t>(d);
  }
  bad("choice index must be an integer");
}

}  // namespace

const Json& require_field(const Json& obj, const char* name) {
  if (!obj.is_object()) bad("expected a JSON object");
  auto it = obj.find(name);
  if (it == obj.end()) bad(std::string("missing field '") + name + "'");
  return *it;
}

std::string require_string(const Json& obj, const char* name) {
  const Json& v = require_field(obj, name);
  if (!v.is_string()) bad(std::string("field '") + name + "' must be a string");
  return v.get<std::string>();
}

double require_number(const Json& obj, const char* name) {
  const Json& v = require_field(obj, name);
  if (v.is_string()) {
    // Some upstreams quote numeric values.
    try {
      std::size_t used = 0;
      const std::string s = v.get<std::string>();
      double d = std::stod(s, &used);
      if (used == s.size()) return d;
    } catch (const std::exception&) {
    }
    bad(std::string("field '") + name + "' must be numeric");
  }
  if (!v.is_number()) bad(std::string("field '") + name + "' must be numeric");
  return v.get<double>();
}

std::int64_t require_integer(const Json& obj, const char* name) {
  const Json& v = require_field(obj, name);
  if (v.is_number_integer() || v.is_number_unsigned()) return v.get<std::int64_t>();
  bad(std::string("field '") + name + "' must be an integer");
}

Timestamp timestamp_from_json(const Json& value) {
  if (value.is_number_integer() || value.is_number_unsigned()) {
    return value.get<std::int64_t>();
  }
  if (value.is_number_float()) {
    return static_cast<Timestamp>(std::floor(value.get<double>()));
  }
  if (value.is_string()) return parse_iso8601(value.get<std::string>());
  bad("timestamp must be an integer or ISO-8601 string");
}

Json choice_to_json(const ChoiceExpr& choice) {
  return std::visit(
      [](const auto& c) -> Json {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, SingleChoice>) {
          return c.option;
        } else if constexpr (std::is_same_v<T, ApprovalChoice>) {
          Json arr = Json::array();
          for (auto o : c.options) arr.push_back(o);
          return arr;
        } else {
          Json obj = Json::object();
          for (const auto& [idx, w] : c.weights) obj[std::to_string(idx)] = w;
          return obj;
        }
      },
      choice);
}

ChoiceExpr choice_from_json(const Json& value) {
  if (value.is_number()) return SingleChoice{parse_index(value)};
  if (value.is_array()) {
    ApprovalChoice a;
    for (const auto& e : value) a.options.push_back(parse_index(e));
    return a;
  }
  if (value.is_object()) {
    WeightedChoice w;
    for (auto it = value.begin(); it != value.end(); ++it) {
      std::size_t idx = 0;
      try {
        std::size_t used = 0;
        const auto parsed = std::stoll(it.key(), &used);
        if (used != it.key().size() || parsed < 0) throw std::invalid_argument("");
        idx = static_cast<std::size_t>(parsed);
      } catch (const std::exception&) {
        bad("weighted choice key '" + it.key() + "' is not an index");
      }
      if (!it.value().is_number()) bad("weighted choice value must be numeric");
      w.weights[idx] = it.value().get<double>();
    }
    return w;
  }
  bad("choice must be an integer, array or object");
}

Json to_json(const Proposal& p) {
  Json j;
  j["id"] = p.id;
  j["space"] = p.space_id;
  j["title"] = p.title;
  if (p.body) j["body"] = *p.body;
  j["choices"] = p.choices;
  if (p.created_at) j["created"] = *p.created_at;
  j["start"] = p.start;
  j["end"] = p.end;
  if (p.calls_for_change) j["calls_for_change"] = *p.calls_for_change;
  if (p.category) j["category"] = *p.category;
  return j;
}

Proposal proposal_from_json(const Json& j) {
  Proposal p;
  p.id = require_string(j, "id");
  p.space_id = require_string(j, "space");
  p.title = require_string(j, "title");
  if (auto it = j.find("body"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) bad("field 'body' must be a string");
    p.body = it->get<std::string>();
  }
  const Json& choices = require_field(j, "choices");
  if (!choices.is_array()) bad("field 'choices' must be an array");
  for (const auto& c : choices) {
    if (!c.is_string()) bad("choice labels must be strings");
    p.choices.push_back(c.get<std::string>());
  }
  if (auto it = j.find("created"); it != j.end() && !it->is_null()) {
    p.created_at = timestamp_from_json(*it);
  }
  p.start = timestamp_from_json(require_field(j, "start"));
  p.end = timestamp_from_json(require_field(j, "end"));
  if (auto it = j.find("calls_for_change"); it != j.end() && !it->is_null()) {
    if (!it->is_boolean()) bad("field 'calls_for_change' must be boolean");
    p.calls_for_change = it->get<bool>();
  }
  if (auto it = j.find("category"); it != j.end() && !it->is_null()) {
    if (!it->is_string()) bad("field 'category' must be a string");
    p.category = it->get<std::string>();
  }
  return p;
}

Json to_json(const VoteRecord& v) {
  Json j;
  j["proposal"] = v.proposal_id;
  j["voter"] = v.voter;
  j["choice"] = choice_to_json(v.choice);
  j["vp"] = v.vp;
  j["created"] = v.timestamp;
  return j;
}

VoteRecord vote_from_json(const Json& j) {
  VoteRecord v;
  v.proposal_id = require_string(j, "proposal");
  v.voter = require_string(j, "voter");
  v.choice = choice_from_json(require_field(j, "choice"));
  v.vp = require_number(j, "vp");
  v.timestamp = timestamp_from_json(require_field(j, "created"));
  return v;
}

Json to_json(const ForumSignal& f) {
  Json j;
  j["proposal"] = f.proposal_id;
  j["url"] = f.url;
  j["stance"] = f.stance_score;
  j["sentiment"] = f.sentiment;
  j["counts"] = Json{{"positive", f.counts.positive},
                     {"negative", f.counts.negative},
                     {"neutral", f.counts.neutral}};
  Json comments = Json::array();
  for (const auto& c : f.comments) {
    comments.push_back(Json{{"t", c.timestamp}, {"polarity", to_string(c.polarity)}});
  }
  j["comments"] = std::move(comments);
  return j;
}

ForumSignal forum_from_json(const Json& j) {
  ForumSignal f;
  f.proposal_id = require_string(j, "proposal");
  f.url = j.contains("url") ? require_string(j, "url") : std::string();
  f.stance_score = require_number(j, "stance");
  f.sentiment = require_number(j, "sentiment");
  if (auto it = j.find("comments"); it != j.end()) {
    if (!it->is_array()) bad("field 'comments' must be an array");
    for (const auto& c : *it) {
      ForumComment fc;
      fc.timestamp = timestamp_from_json(require_field(c, "t"));
      const std::string pol = require_string(c, "polarity");
      if (pol == "positive") fc.polarity = Polarity::kPositive;
      else if (pol == "negative") fc.polarity = Polarity::kNegative;
      else if (pol == "neutral") fc.polarity = Polarity::kNeutral;
      else bad("unknown polarity '" + pol + "'");
      f.comments.push_back(fc);
    }
  }
  if (auto it = j.find("counts"); it != j.end()) {
    auto count = [&](const char* name) {
      const std::int64_t c = require_integer(*it, name);
      if (c < 0) {
        throw Error(ErrorCode::kInvalidRecord,
                    std::string("forum count '") + name + "' is negative");
      }
      return static_cast<std::uint64_t>(c);
    };
    f.counts.positive = count("positive");
    f.counts.negative = count("negative");
    f.counts.neutral = count("neutral");
  } else {
    f.counts = count_polarities(f.comments);
  }
  return f;
}

Json market_sample_to_json(const MarketSeries& series, const MarketSample& sample) {
  Json j;
  j["protocol"] = series.protocol;
  j["metric"] = to_string(series.metric);
  j["day"] = sample.day;
  j["value"] = sample.value;
  return j;
}

}  // namespace daoeval
