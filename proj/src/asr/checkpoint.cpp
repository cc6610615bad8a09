// src/asr/checkpoint.cpp

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

#include <torch/torch.h>

#include "camo/asr/model.hpp"
#include "camo/core/error.hpp"
#include "camo/io/archive.hpp"

namespace camo {

namespace {
constexpr const char* kKind = "asr";
}

void save_asr(const std::filesystem::path& path, AsrModel& model) {
  const auto& m = model->metadata;
  save_archive(path, kKind, model->architecture().to_json(),
               {{"epochs", m.epochs}, {"corpus_id", m.corpus_id}, {"note", m.note}}, *model);
}

AsrModel load_asr(const std::filesystem::path& path) {
  const auto h = read_archive_header(path);
  if (h.kind != kKind) throw FormatError("'" + path.string() + "' holds a '" + h.kind + "', not an ASR model");
  AsrModel model(AsrArchitecture::from_json(h.architecture));
  load_archive_into(path, kKind, *model);
  model->metadata.epochs = h.metadata.value("epochs", 0);
  model->metadata.corpus_id = h.metadata.value("corpus_id", "");
  model->metadata.note = h.metadata.value("note", "");
  model->eval();
  return model;
}

}  // namespace camo
