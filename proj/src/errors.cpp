// Copyright 2026 The bgdbs Authors
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

#include "bgdbs/errors.hpp"

namespace bgdbs {

const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::kInvalidArgument: return "InvalidArgument";
    case ErrorKind::kConfig: return "ConfigError";
    case ErrorKind::kIo: return "IoError";
    case ErrorKind::kNumericalDivergence: return "NumericalDivergence";
    case ErrorKind::kPulseOverlap: return "PulseOverlap";
    case ErrorKind::kWindowTooShort: return "WindowTooShort";
    case ErrorKind::kBandOutOfRange: return "BandOutOfRange";
    case ErrorKind::kDegenerateSignal: return "DegenerateSignal";
    case ErrorKind::kDegenerateRange: return "DegenerateRange";
    case ErrorKind::kEpisodeFinished: return "EpisodeFinished";
    case ErrorKind::kNanGradient: return "NanGradient";
    case ErrorKind::kVersionMismatch: return "VersionMismatch";
    case ErrorKind::kCorruptCheckpoint: return "CorruptCheckpoint";
  }
  return "Unknown";
}

}  // namespace bgdbs
