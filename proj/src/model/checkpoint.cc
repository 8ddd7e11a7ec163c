// Copyright 2026 The CMLA Authors.
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

#include "cmla/checkpoint.h"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <map>
#include <string>

#include "cmla/sentence.h"

namespace cmla {
namespace {

constexpr char kMagic[8] = {'C', 'M', 'L', 'A', 'C', 'K', 'P', 'T'};
// Guards allocations driven by a corrupt header.
constexpr std::uint64_t kMaxElements = std::uint64_t{1} << 32;
constexpr std::uint64_t kMaxDim = std::uint64_t{1} << 16;

template <typename T>
void WriteLe(std::ostream& out, T value) {
  static_assert(std::is_trivially_copyable_v<T>);
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T ReadLe(std::istream& in) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw DataError("checkpoint truncated");
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void WriteCheckpoint(std::ostream& out, const CmlaParams& params) {
  params.Validate();
  out.write(kMagic, sizeof(kMagic));
  WriteLe<std::uint32_t>(out, kCheckpointVersion);
  WriteLe<std::uint64_t>(out, params.config.dim);
  WriteLe<std::uint64_t>(out, params.config.k);
  WriteLe<std::uint64_t>(out, params.config.layers);
  const auto named = params.Named();
  WriteLe<std::uint64_t>(out, named.size());
  for (const auto& [name, tensor] : named) {
    WriteLe<std::uint32_t>(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    WriteLe<std::uint32_t>(out, static_cast<std::uint32_t>(tensor->rank()));
    for (std::size_t d : tensor->shape()) WriteLe<std::uint64_t>(out, d);
    for (double v : tensor->data()) WriteLe<double>(out, v);
  }
  if (!out) throw DataError("failed writing checkpoint");
}

void SaveCheckpoint(const std::filesystem::path& path, const CmlaParams& params) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write " + path.string());
  WriteCheckpoint(out, params);
}

CmlaParams ReadCheckpoint(std::istream& in) {
  char magic[sizeof(kMagic)];
  if (!in.read(magic, sizeof(magic)) || std::memcmp(magic, kMagic, sizeof(kMagic)) != 0) {
    throw DataError("not a CMLA checkpoint (bad magic)");
  }
  const auto version = ReadLe<std::uint32_t>(in);
  if (version != kCheckpointVersion) {
    throw DataError("unsupported checkpoint version " + std::to_string(version));
  }
  ModelConfig config;
  config.dim = ReadLe<std::uint64_t>(in);
  config.k = ReadLe<std::uint64_t>(in);
  config.layers = ReadLe<std::uint64_t>(in);
  if (config.dim == 0 || config.k == 0 || config.layers == 0 ||
      config.dim > kMaxDim || config.k > kMaxDim ||
      config.k * config.dim * config.dim > kMaxElements) {
    throw DataError("checkpoint declares an invalid configuration");
  }

  CmlaParams params = CmlaParams::Zeros(config);
  std::map<std::string, Tensor*> slots;
  for (auto& [name, tensor] : params.Named()) slots.emplace(name, tensor);

  const auto count = ReadLe<std::uint64_t>(in);
  if (count != slots.size()) {
    throw DataError("checkpoint holds " + std::to_string(count) +
                    " parameters, expected " + std::to_string(slots.size()));
  }
  for (std::uint64_t p = 0; p < count; ++p) {
    const auto name_len = ReadLe<std::uint32_t>(in);
    if (name_len > 256) throw DataError("checkpoint parameter name too long");
    std::string name(name_len, '\0');
    if (!in.read(name.data(), name_len)) throw DataError("checkpoint truncated");
    auto slot = slots.find(name);
    if (slot == slots.end() || slot->second == nullptr) {
      throw DataError("unexpected or repeated checkpoint parameter \"" + name + "\"");
    }
    Tensor& target = *slot->second;
    slot->second = nullptr;
    const auto rank = ReadLe<std::uint32_t>(in);
    Shape shape;
    for (std::uint32_t r = 0; r < rank && r < 8; ++r) {
      shape.push_back(static_cast<std::size_t>(ReadLe<std::uint64_t>(in)));
    }
    if (shape != target.shape()) {
      throw DataError("checkpoint parameter \"" + name + "\" has shape " +
                      ShapeToString(shape) + ", expected " +
                      ShapeToString(target.shape()));
    }
    for (double& v : target.data()) v = ReadLe<double>(in);
  }
  return params;
}

CmlaParams LoadCheckpoint(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open " + path.string());
  return ReadCheckpoint(in);
}

}  // namespace cmla
