// Copyright 2026 The PrivForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRIVFORGE_CHECKPOINT_H_
#define PRIVFORGE_CHECKPOINT_H_

#include <cstdint>
#include <filesystem>
#include <limits>
#include <string>
#include <string_view>

#include "privforge/lm.h"

namespace privforge {

// Provenance carried in every checkpoint header. epsilon is +inf for models
// trained without DP.
struct CheckpointStamp {
  std::uint64_t config_hash = 0;
  double epsilon = std::numeric_limits<double>::infinity();
  double delta = 0.0;

  bool operator==(const CheckpointStamp&) const = default;
};

struct Checkpoint {
  LmParams params;
  CheckpointStamp stamp;
};

// Layout (all little-endian):
//   "PFCK"  u32 version(=1)
//   u32 vocab_size  u32 embed_dim  u32 context_window  u32 hidden_dim
//   u64 seed  u64 config_hash  f64 epsilon  f64 delta
//   u64 param_count  f64[param_count]
std::string EncodeCheckpoint(const LmParams& params, const CheckpointStamp& stamp);
Checkpoint DecodeCheckpoint(std::string_view bytes);

void SaveCheckpoint(const std::filesystem::path& path, const LmParams& params,
                    const CheckpointStamp& stamp);
Checkpoint LoadCheckpoint(const std::filesystem::path& path);

// 64-bit FNV-1a, used to stamp configs.
std::uint64_t Fnv1a64(std::string_view bytes);

}  // namespace privforge

#endif  // PRIVFORGE_CHECKPOINT_H_
