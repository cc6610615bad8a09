// camo/io/archive.hpp

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

// Self-describing tensor archive.
//
//   bytes 0..7   "CAMOARCH"
//   uint32       format version
//   uint64       header length H
//   H bytes      JSON header: kind, architecture, alphabet, metadata and a
//                tensor table [{name, shape, dtype, offset, nbytes}]
//   ...          raw little-endian tensor data (offsets relative to here)
//
// dtype is "f32" or "i64". The layout is simple enough to read without
// this library, which is what `export` relies on.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>

#include <nlohmann/json.hpp>
#include <torch/nn/module.h>

namespace camo {

inline constexpr std::uint32_t kArchiveVersion = 1;

struct ArchiveHeader {
  std::uint32_t version = kArchiveVersion;
  std::string kind;
  nlohmann::json architecture;
  nlohmann::json metadata;
  nlohmann::json tensors;  // table as stored
};

/// Writes every parameter and buffer of `module`.
void save_archive(const std::filesystem::path& path, const std::string& kind,
                  const nlohmann::json& architecture, const nlohmann::json& metadata,
                  const torch::nn::Module& module);

ArchiveHeader read_archive_header(const std::filesystem::path& path);

/// Loads tensors into `module`. Throws FormatError on a wrong kind, a
/// version mismatch, or any missing/extra/mis-shaped tensor.
ArchiveHeader load_archive_into(const std::filesystem::path& path, const std::string& expected_kind,
                                torch::nn::Module& module);

}  // namespace camo
