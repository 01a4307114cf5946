/*
 * Copyright 2026 The noiwb Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "noi/error.hpp"

namespace noi {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegreeExceedsPortCap: return "DegreeExceedsPortCap";
    case ErrorCode::PlacementSizeMismatch: return "PlacementSizeMismatch";
    case ErrorCode::InvalidTopology: return "InvalidTopology";
    case ErrorCode::EmptyMemorySet: return "EmptyMemorySet";
    case ErrorCode::NoComputeNodes: return "NoComputeNodes";
    case ErrorCode::WouldDisconnect: return "WouldDisconnect";
    case ErrorCode::PortCapExceeded: return "PortCapExceeded";
    case ErrorCode::DuplicateLink: return "DuplicateLink";
    case ErrorCode::LinkAbsent: return "LinkAbsent";
    case ErrorCode::InfeasibleAugmentation: return "InfeasibleAugmentation";
    case ErrorCode::LOutOfRange: return "LOutOfRange";
    case ErrorCode::UnstableQueue: return "UnstableQueue";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnplacedExpert: return "UnplacedExpert";
    case ErrorCode::EmptyDuration: return "EmptyDuration";
    case ErrorCode::EmptyTrace: return "EmptyTrace";
    case ErrorCode::UnknownNode: return "UnknownNode";
    case ErrorCode::NonMonotoneTrace: return "NonMonotoneTrace";
    case ErrorCode::EmptySamples: return "EmptySamples";
    case ErrorCode::ZeroConcurrentThroughput: return "ZeroConcurrentThroughput";
    case ErrorCode::Unreachable: return "Unreachable";
    case ErrorCode::MaskedActionTaken: return "MaskedActionTaken";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ConfigError: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace noi
