// src/io/archive.cpp

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

#include "camo/io/archive.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <map>

#include <torch/torch.h>

#include "camo/asr/alphabet.hpp"
#include "camo/core/error.hpp"

namespace camo {

static_assert(std::endian::native == std::endian::little, "archive I/O assumes a little-endian host");

namespace {

constexpr char kMagic[8] = {'C', 'A', 'M', 'O', 'A', 'R', 'C', 'H'};

std::map<std::string, at::Tensor> named_state(const torch::nn::Module& m) {
  std::map<std::string, at::Tensor> out;
  for (const auto& p : m.named_parameters(true)) out.emplace(p.key(), p.value());
  for (const auto& b : m.named_buffers(true)) out.emplace(b.key(), b.value());
  return out;
}

std::string dtype_name(const at::Tensor& t) {
  if (t.scalar_type() == at::kFloat) return "f32";
  if (t.scalar_type() == at::kLong) return "i64";
  throw FormatError("archive: unsupported tensor dtype " + std::string(c10::toString(t.scalar_type())));
}

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is, const std::filesystem::path& p) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw FormatError("archive: truncated file '" + p.string() + "'");
  return v;
}

ArchiveHeader read_header(std::istream& is, const std::filesystem::path& path) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0)
    throw FormatError("'" + path.string() + "' is not a camo archive");
  ArchiveHeader h;
  h.version = get<std::uint32_t>(is, path);
  if (h.version != kArchiveVersion)
    throw FormatError("archive '" + path.string() + "' has version " + std::to_string(h.version) +
                      ", expected " + std::to_string(kArchiveVersion));
  const auto len = get<std::uint64_t>(is, path);
  std::string text(len, '\0');
  if (!is.read(text.data(), static_cast<std::streamsize>(len))) throw FormatError("archive: truncated header");
  try {
    auto j = nlohmann::json::parse(text);
    h.kind = j.at("kind").get<std::string>();
    h.architecture = j.at("architecture");
    h.metadata = j.value("metadata", nlohmann::json::object());
    h.tensors = j.at("tensors");
  } catch (const nlohmann::json::exception& e) {
    throw FormatError("archive '" + path.string() + "': bad header: " + e.what());
  }
  return h;
}

}  // namespace

void save_archive(const std::filesystem::path& path, const std::string& kind, const nlohmann::json& architecture,
                  const nlohmann::json& metadata, const torch::nn::Module& module) {
  const auto state = named_state(module);
  nlohmann::json table = nlohmann::json::array();
  std::vector<at::Tensor> data;
  std::uint64_t offset = 0;
  for (const auto& [name, t] : state) {
    auto c = t.detach().to(at::kCPU).contiguous();
    const auto nbytes = static_cast<std::uint64_t>(c.numel() * c.element_size());
    table.push_back({{"name", name}, {"shape", c.sizes().vec()}, {"dtype", dtype_name(c)},
                     {"offset", offset}, {"nbytes", nbytes}});
    offset += nbytes;
    data.push_back(c);
  }
  nlohmann::json header{{"kind", kind},
                        {"architecture", architecture},
                        {"alphabet", std::string(Alphabet::kSymbols)},
                        {"metadata", metadata},
                        {"tensors", table}};
  const auto text = header.dump();

  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary);
    if (!os) throw FormatError("cannot write '" + tmp + "'");
    os.write(kMagic, 8);
    put<std::uint32_t>(os, kArchiveVersion);
    put<std::uint64_t>(os, text.size());
    os.write(text.data(), static_cast<std::streamsize>(text.size()));
    for (const auto& c : data) os.write(static_cast<const char*>(c.data_ptr()), c.numel() * c.element_size());
    if (!os) throw FormatError("write failed for '" + tmp + "'");
  }
  std::filesystem::rename(tmp, path);
}

ArchiveHeader read_archive_header(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open archive '" + path.string() + "'");
  return read_header(is, path);
}

ArchiveHeader load_archive_into(const std::filesystem::path& path, const std::string& expected_kind,
                                torch::nn::Module& module) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("cannot open archive '" + path.string() + "'");
  auto h = read_header(is, path);
  if (h.kind != expected_kind)
    throw FormatError("archive '" + path.string() + "' holds a '" + h.kind + "', expected '" + expected_kind + "'");
  const auto data_start = is.tellg();

  auto state = named_state(module);
  if (h.tensors.size() != state.size())
    throw FormatError("archive '" + path.string() + "': tensor count " + std::to_string(h.tensors.size()) +
                      " does not match the model's " + std::to_string(state.size()));
  torch::NoGradGuard no_grad;
  for (const auto& e : h.tensors) {
    const auto name = e.at("name").get<std::string>();
    auto it = state.find(name);
    if (it == state.end()) throw FormatError("archive: unexpected tensor '" + name + "'");
    auto& dst = it->second;
    const auto shape = e.at("shape").get<std::vector<std::int64_t>>();
    if (shape != dst.sizes().vec() || e.at("dtype").get<std::string>() != dtype_name(dst))
      throw FormatError("archive: tensor '" + name + "' has an incompatible shape or dtype");
    const auto nbytes = e.at("nbytes").get<std::uint64_t>();
    auto buf = torch::empty(shape, dst.options().device(at::kCPU));
    if (static_cast<std::uint64_t>(buf.numel() * buf.element_size()) != nbytes)
      throw FormatError("archive: tensor '" + name + "' has a bad byte count");
    is.seekg(data_start + static_cast<std::streamoff>(e.at("offset").get<std::uint64_t>()));
    if (!is.read(static_cast<char*>(buf.data_ptr()), static_cast<std::streamsize>(nbytes)))
      throw FormatError("archive: truncated tensor data for '" + name + "'");
    dst.copy_(buf);
  }
  return h;
}

}  // namespace camo
