//
// Copyright 2026 The meshsim Authors.
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
//

#include "meshsim/error.h"

namespace meshsim {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kPastEvent: return "PastEvent";
    case ErrorCode::kLivelock: return "Livelock";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnknownKind: return "UnknownKind";
    case ErrorCode::kDuplicateName: return "DuplicateName";
    case ErrorCode::kNameCollision: return "NameCollision";
    case ErrorCode::kUpdateInProgress: return "UpdateInProgress";
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kNoLivePod: return "NoLivePod";
    case ErrorCode::kCyclicTopology: return "CyclicTopology";
    case ErrorCode::kInfeasibleBudget: return "InfeasibleBudget";
    case ErrorCode::kTopologyMismatch: return "TopologyMismatch";
    case ErrorCode::kUnassignableUnit: return "UnassignableUnit";
    case ErrorCode::kValidationFailed: return "ValidationFailed";
    case ErrorCode::kUnknownRevision: return "UnknownRevision";
    case ErrorCode::kAmbiguousKey: return "AmbiguousKey";
    case ErrorCode::kUnknownKey: return "UnknownKey";
    case ErrorCode::kUnknownMap: return "UnknownMap";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
      code_(code),
      message_(message) {}

}  // namespace meshsim
