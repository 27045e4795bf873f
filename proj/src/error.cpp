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

#include "daoeval/error.hpp"

namespace daoeval {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kInvalidProposal: return "InvalidProposal";
    case ErrorCode::kInvalidChoice: return "InvalidChoice";
    case ErrorCode::kInvalidRecord: return "InvalidRecord";
    case ErrorCode::kEmptyTally: return "EmptyTally";
    case ErrorCode::kDegenerateTally: return "DegenerateTally";
    case ErrorCode::kDegenerateSeries: return "DegenerateSeries";
    case ErrorCode::kDegenerateBaseline: return "DegenerateBaseline";
    case ErrorCode::kNoData: return "NoData";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kSourceUnavailable: return "SourceUnavailable";
    case ErrorCode::kSourceProtocolError: return "SourceProtocolError";
    case ErrorCode::kLoadError: return "LoadError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kPolicyInapplicable: return "PolicyInapplicable";
    case ErrorCode::kPolicyFailure: return "PolicyFailure";
    case ErrorCode::kEmptyEvaluation: return "EmptyEvaluation";
    case ErrorCode::kCoverageError: return "CoverageError";
    case ErrorCode::kSpecError: return "SpecError";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace daoeval
