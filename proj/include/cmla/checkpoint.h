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

#ifndef CMLA_CHECKPOINT_H_
#define CMLA_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <istream>
#include <ostream>

#include "cmla/model.h"

namespace cmla {

inline constexpr std::uint32_t kCheckpointVersion = 1;

// Binary, little-endian:
//
//   "CMLACKPT"  u32 version  u64 dim  u64 k  u64 layers  u64 param_count
//   per parameter: u32 name_len, name bytes, u32 rank, u64 dims[rank],
//                  f64 values (row-major)
//
// Values are stored bit-for-bit, so a reload is bitwise identical.
void WriteCheckpoint(std::ostream& out, const CmlaParams& params);
void SaveCheckpoint(const std::filesystem::path& path, const CmlaParams& params);

// Throws DataError on a bad magic, version, truncation or a parameter set
// that does not match the declared configuration.
CmlaParams ReadCheckpoint(std::istream& in);
CmlaParams LoadCheckpoint(const std::filesystem::path& path);

}  // namespace cmla

#endif  // CMLA_CHECKPOINT_H_
