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

// JSON encodings of the governance records. Writers emit a fixed field order
// so that serialized datasets are byte-stable; readers throw kInvalidRecord
// on missing or mistyped fields.

#ifndef DAOEVAL_CODEC_HPP_
#define DAOEVAL_CODEC_HPP_

#include <json.hpp>

#include "daoeval/dataset.hpp"
#include "daoeval/model.hpp"

namespace daoeval {

using Json = nlohmann::ordered_json;

/// Integer seconds or an ISO-8601 string.
Timestamp timestamp_from_json(const Json& value);

/// Snapshot wire forms: integer, array of integers, or {"<index>": weight}.
Json choice_to_json(const ChoiceExpr& choice);
ChoiceExpr choice_from_json(const Json& value);

Json to_json(const Proposal& proposal);
Proposal proposal_from_json(const Json& value);

Json to_json(const VoteRecord& vote);
VoteRecord vote_from_json(const Json& value);

Json to_json(const ForumSignal& signal);
ForumSignal forum_from_json(const Json& value);

/// One market sample per line: {"protocol","metric","day","value"}.
Json market_sample_to_json(const MarketSeries& series, const MarketSample& sample);

// Field accessors that raise kInvalidRecord with the field name.
const Json& require_field(const Json& obj, const char* name);
std::string require_string(const Json& obj, const char* name);
double require_number(const Json& obj, const char* name);
std::int64_t require_integer(const Json& obj, const char* name);

}  // namespace daoeval

#endif  // DAOEVAL_CODEC_HPP_
