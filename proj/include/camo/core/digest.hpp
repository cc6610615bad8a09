// camo/core/digest.hpp

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

#include <string>
#include <string_view>

#include <torch/nn/module.h>

namespace camo {

/// Hex SHA-256 over raw bytes.
std::string sha256_hex(std::string_view bytes);

/// SHA-256 over every parameter and buffer of a module (names, shapes and
/// contents, in registration order). Used to prove parameters stay frozen.
std::string parameter_digest(const torch::nn::Module& module);

}  // namespace camo
