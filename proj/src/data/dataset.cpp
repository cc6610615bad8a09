// src/data/dataset.cpp

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

#include "camo/data/dataset.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "camo/asr/alphabet.hpp"
#include "camo/audio/wav_io.hpp"
#include "camo/core/error.hpp"

namespace camo {

std::vector<ManifestRecord> read_manifest(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw FormatError("cannot open manifest '" + path.string() + "'");
  std::vector<ManifestRecord> out;
  std::string line;
  int lineno = 0;
  while (std::getline(is, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      auto j = nlohmann::json::parse(line);
      ManifestRecord r;
      r.audio_path = j.at("audio_path").get<std::string>();
      r.transcript = j.at("transcript").get<std::string>();
      r.sample_rate = j.value("sample_rate", kSampleRate);
      r.split = j.value("split", "");
      r.id = j.value("id", "");
      out.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void write_manifest(const std::filesystem::path& path, const std::vector<ManifestRecord>& records) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write manifest '" + path.string() + "'");
  for (const auto& r : records) {
    nlohmann::json j{{"audio_path", r.audio_path}, {"transcript", r.transcript}, {"sample_rate", r.sample_rate}};
    if (!r.split.empty()) j["split"] = r.split;
    if (!r.id.empty()) j["id"] = r.id;
    os << j.dump() << '\n';
  }
}

Dataset load_dataset(const std::vector<ManifestRecord>& records, const std::filesystem::path& base_dir,
                     const std::string& split, LoadReport* report) {
  LoadReport local;
  LoadReport& rep = report ? *report : local;
  Dataset out;
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& r = records[i];
    if (!split.empty() && r.split != split) continue;
    std::filesystem::path p(r.audio_path);
    if (p.is_relative()) p = base_dir / p;
    const auto text = normalize_text(r.transcript);
    if (text.empty()) {
      rep.skipped++;
      rep.warnings.push_back(p.string() + ": empty transcript after normalization");
      continue;
    }
    try {
      IngestInfo info;
      Utterance u;
      u.audio = read_wav(p, &info);
      if (info.resampled) rep.resampled++;
      u.id = r.id.empty() ? p.stem().string() : r.id;
      u.transcript = text;
      out.push_back(std::move(u));
      rep.loaded++;
    } catch (const std::exception& e) {
      rep.skipped++;
      rep.warnings.push_back(e.what());
    }
  }
  return out;
}

std::vector<ManifestRecord> export_dataset(const Dataset& data, const std::filesystem::path& dir,
                                           const std::string& split) {
  std::vector<ManifestRecord> records;
  for (const auto& u : data) {
    const auto rel = std::filesystem::path(split.empty() ? "audio" : split) / (u.id + ".wav");
    write_wav(dir / rel, u.audio);
    records.push_back({rel.string(), u.transcript, u.audio.sample_rate, split, u.id});
  }
  return records;
}

}  // namespace camo
