// Copyright 2026 The HQ Retrieval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "hq/error.hpp"

namespace hq {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadMagic: return "BadMagic";
    case ErrorCode::kVersionMismatch: return "VersionMismatch";
    case ErrorCode::kTruncatedFile: return "TruncatedFile";
    case ErrorCode::kNonFiniteValue: return "NonFiniteValue";
    case ErrorCode::kIoFailure: return "IoFailure";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kCountMismatch: return "CountMismatch";
    case ErrorCode::kDimMismatch: return "DimMismatch";
    case ErrorCode::kTooManyClusters: return "TooManyClusters";
    case ErrorCode::kTooManyCandidates: return "TooManyCandidates";
    case ErrorCode::kNotEnoughItems: return "NotEnoughItems";
    case ErrorCode::kSingularSystem: return "SingularSystem";
    case ErrorCode::kZeroNormVector: return "ZeroNormVector";
    case ErrorCode::kKNotPowerOfTwo: return "KNotPowerOfTwo";
    case ErrorCode::kInfeasibleBudget: return "InfeasibleBudget";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kInvalidArgs: return "InvalidArgs";
  }
  return "Unknown";
}

void Throw(ErrorCode code, const std::string& what) {
  throw Error(code, std::string(ErrorCodeName(code)) + ": " + what);
}

}  // namespace hq
