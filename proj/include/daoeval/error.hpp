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

#ifndef DAOEVAL_ERROR_HPP_
#define DAOEVAL_ERROR_HPP_

#include <stdexcept>
#include <string>
#include <string_view>

namespace daoeval {

enum class ErrorCode {
  kInvalidArgument,
  kInvalidProposal,
  kInvalidChoice,
  kInvalidRecord,
  kEmptyTally,
  kDegenerateTally,
  kDegenerateSeries,
  kDegenerateBaseline,
  kNoData,
  kNotFound,
  kSourceUnavailable,
  kSourceProtocolError,
  kLoadError,
  kIoError,
  kPolicyInapplicable,
  kPolicyFailure,
  kEmptyEvaluation,
  kCoverageError,
  kSpecError,
  kConfigError,
};

std::string_view ErrorCodeName(ErrorCode code);

// Every failure raised by the library carries one of the codes above so that
// the C API and the CLI can translate it without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace daoeval

#endif  // DAOEVAL_ERROR_HPP_
