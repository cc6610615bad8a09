// src/eval/report.cpp

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

#include "camo/eval/report.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

#include "camo/core/error.hpp"

namespace camo {

nlohmann::json EvalReport::to_json() const {
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  for (const auto& r : rows) j["rows"].push_back(r.to_json());
  j["curves"] = nlohmann::json::array();
  for (const auto& c : curves) j["curves"].push_back(c.to_json());
  if (words) j["words"] = words->to_json();
  if (swap) j["swap"] = swap->to_json();
  j["provenance"] = provenance;
  return j;
}

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream os(path);
  if (!os) throw FormatError("cannot write '" + path.string() + "'");
  os.precision(10);
  return os;
}

}  // namespace

void write_grid_csv(const std::filesystem::path& path, const std::vector<GridRow>& rows) {
  auto os = open_out(path);
  os << "attack,defense,m,delta,wer,cer,runtime_s,realtime,feasible,covered_s\n";
  for (const auto& r : rows)
    os << r.attack << ',' << r.defense << ',' << r.m << ',' << r.delta << ',' << r.wer << ',' << r.cer << ','
       << r.runtime_s << ',' << r.realtime << ',' << r.feasible << ',' << r.covered_s << '\n';
}

void write_curve_csv(const std::filesystem::path& path, const Curve& curve) {
  auto os = open_out(path);
  os << "x,y,y_scaled,cer,y_lo,y_hi,covered_s\n";
  for (const auto& p : curve.points)
    os << p.x << ',' << p.y << ',' << p.y_scaled << ',' << p.cer << ',' << p.y_lo << ',' << p.y_hi << ','
       << p.covered_s << '\n';
}

void write_words_csv(const std::filesystem::path& path, const WordAnalysis& words) {
  auto os = open_out(path);
  os << "word,count,length,clean_acc,attacked_acc,drop\n";
  for (const auto& w : words.words)
    os << w.word << ',' << w.count << ',' << w.length << ',' << w.clean_accuracy << ',' << w.attacked_accuracy << ','
       << w.drop() << '\n';
}

std::filesystem::path write_report(const std::filesystem::path& dir, const EvalReport& report) {
  std::filesystem::create_directories(dir);
  if (!report.rows.empty()) write_grid_csv(dir / "table.csv", report.rows);
  for (const auto& c : report.curves) write_curve_csv(dir / ("curve_" + c.name + ".csv"), c);
  if (report.words) write_words_csv(dir / "words.csv", *report.words);
  const auto json_path = dir / "report.json";
  auto os = open_out(json_path);
  os << report.to_json().dump(2) << '\n';
  return json_path;
}

std::string render_table(const nlohmann::json& report) {
  std::ostringstream out;
  if (!report.contains("rows") || report["rows"].empty()) {
    out << "(no table rows)\n";
  } else {
    std::vector<std::string> attacks, defenses;
    std::map<std::pair<std::string, std::string>, nlohmann::json> cell;
    std::map<std::string, nlohmann::json> first;
    for (const auto& r : report["rows"]) {
      const auto a = r["attack"].get<std::string>(), d = r["defense"].get<std::string>();
      if (!first.count(a)) {
        attacks.push_back(a);
        first[a] = r;
      }
      if (std::find(defenses.begin(), defenses.end(), d) == defenses.end()) defenses.push_back(d);
      cell[{a, d}] = r;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%-14s %10s %7s", "approach", "run time", "m");
    out << buf;
    for (const auto& d : defenses) {
      std::snprintf(buf, sizeof buf, " | %-17s", d.c_str());
      out << buf;
    }
    out << '\n';
    for (const auto& a : attacks) {
      const auto& r0 = first[a];
      std::snprintf(buf, sizeof buf, "%-14s %10.4f %7.3f", a.c_str(), r0["runtime_s"].get<double>(),
                    r0["m"].get<double>());
      out << buf;
      for (const auto& d : defenses) {
        auto it = cell.find({a, d});
        if (it == cell.end())
          std::snprintf(buf, sizeof buf, " | %-17s", "-");
        else
          std::snprintf(buf, sizeof buf, " | %6.1f / %6.1f   ", 100 * it->second["wer"].get<double>(),
                        100 * it->second["cer"].get<double>());
        out << buf;
      }
      if (!r0["realtime"].get<bool>()) out << "  (not real-time)";
      out << '\n';
    }
    out << "cells: WER % / CER %\n";
  }
  if (report.contains("swap")) {
    const auto& s = report["swap"];
    out << "swap: matched WER/CER " << 100 * s["matched_wer"].get<double>() << " / "
        << 100 * s["matched_cer"].get<double>() << ", swapped " << 100 * s["swapped_wer"].get<double>() << " / "
        << 100 * s["swapped_cer"].get<double>() << ", clean " << 100 * s["clean_wer"].get<double>() << " / "
        << 100 * s["clean_cer"].get<double>() << '\n';
  }
  if (report.contains("curves"))
    for (const auto& c : report["curves"]) {
      out << "curve " << c["name"].get<std::string>() << " (" << c["x_label"].get<std::string>() << "):";
      for (const auto& p : c["points"])
        out << "  " << p["x"].get<double>() << " -> " << 100 * p["y"].get<double>() << "% ("
            << 100 * p["y_scaled"].get<double>() << "%)";
      out << '\n';
    }
  return out.str();
}

}  // namespace camo
