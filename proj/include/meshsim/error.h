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

#ifndef MESHSIM_ERROR_H
#define MESHSIM_ERROR_H

#include <stdexcept>
#include <string>
#include <string_view>

namespace meshsim {

enum class ErrorCode {
  kPastEvent,
  kLivelock,
  kParseError,
  kUnknownKind,
  kDuplicateName,
  kNameCollision,
  kUpdateInProgress,
  kNotFound,
  kNoLivePod,
  kCyclicTopology,
  kInfeasibleBudget,
  kTopologyMismatch,
  kUnassignableUnit,
  kValidationFailed,
  kUnknownRevision,
  kAmbiguousKey,
  kUnknownKey,
  kUnknownMap,
  kInvalidArgument,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// All recoverable failures in the library surface as this exception. The
// code is stable and is what the CLI prints; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }
  const std::string& message() const { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace meshsim

#endif  // MESHSIM_ERROR_H
