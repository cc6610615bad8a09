// camo/core/error.hpp

// Copyright 2026 The camo authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>

namespace camo {

/// Invalid argument or violated precondition on a value (empty waveform,
/// negative multiplier, shape mismatch, ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// The transcript cannot be aligned to the available number of CTC frames.
class AlignmentError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A backend lacks a capability an operation needs (e.g. input gradients).
class CapabilityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fewer seconds of stream were observed than the context window needs.
class InsufficientContextError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or incompatible file (WAV, archive, manifest, config).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad command line, config value or missing input path.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace camo
