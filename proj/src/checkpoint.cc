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

#include "privforge/checkpoint.h"

#include <bit>
#include <cstring>

#include "privforge/error.h"

namespace privforge {
namespace {

constexpr char kMagic[4] = {'P', 'F', 'C', 'K'};
constexpr std::uint32_t kVersion = 1;

template <typename T>
void PutLe(std::string& out, T value) {
  static_assert(sizeof(T) == 4 || sizeof(T) == 8);
  using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
  const U bits = std::bit_cast<U>(value);
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    out.push_back(static_cast<char>((bits >> (8 * i)) & 0xff));
  }
}

class Reader {
 public:
  explicit Reader(std::string_view bytes) : bytes_(bytes) {}

  template <typename T>
  T Get() {
    using U = std::conditional_t<sizeof(T) == 4, std::uint32_t, std::uint64_t>;
    if (pos_ + sizeof(T) > bytes_.size()) throw Error(ErrorCode::kCheckpoint, "truncated");
    U bits = 0;
    for (std::size_t i = 0; i < sizeof(T); ++i) {
      bits |= static_cast<U>(static_cast<unsigned char>(bytes_[pos_ + i])) << (8 * i);
    }
    pos_ += sizeof(T);
    return std::bit_cast<T>(bits);
  }

  std::string_view Take(std::size_t n) {
    if (pos_ + n > bytes_.size()) throw Error(ErrorCode::kCheckpoint, "truncated");
    std::string_view s = bytes_.substr(pos_, n);
    pos_ += n;
    return s;
  }

  bool done() const { return pos_ == bytes_.size(); }

 private:
  std::string_view bytes_;
  std::size_t pos_ = 0;
};

}  // namespace

std::uint64_t Fnv1a64(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

std::string EncodeCheckpoint(const LmParams& params, const CheckpointStamp& stamp) {
  const LmConfig& cfg = params.config();
  std::string out(kMagic, sizeof(kMagic));
  PutLe<std::uint32_t>(out, kVersion);
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.vocab_size));
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.embed_dim));
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.context_window));
  PutLe<std::uint32_t>(out, static_cast<std::uint32_t>(cfg.hidden_dim));
  PutLe<std::uint64_t>(out, cfg.seed);
  PutLe<std::uint64_t>(out, stamp.config_hash);
  PutLe<double>(out, stamp.epsilon);
  PutLe<double>(out, stamp.delta);
  PutLe<std::uint64_t>(out, params.size());
  out.reserve(out.size() + 8 * params.size());
  for (double x : params.flat()) PutLe<double>(out, x);
  return out;
}

Checkpoint DecodeCheckpoint(std::string_view bytes) {
  Reader r(bytes);
  if (r.Take(4) != std::string_view(kMagic, 4)) throw Error(ErrorCode::kCheckpoint, "bad magic");
  const auto version = r.Get<std::uint32_t>();
  if (version != kVersion) {
    throw Error(ErrorCode::kCheckpoint, "unsupported version " + std::to_string(version));
  }
  LmConfig cfg;
  cfg.vocab_size = static_cast<int>(r.Get<std::uint32_t>());
  cfg.embed_dim = static_cast<int>(r.Get<std::uint32_t>());
  cfg.context_window = static_cast<int>(r.Get<std::uint32_t>());
  cfg.hidden_dim = static_cast<int>(r.Get<std::uint32_t>());
  cfg.seed = r.Get<std::uint64_t>();
  Checkpoint ck;
  ck.stamp.config_hash = r.Get<std::uint64_t>();
  ck.stamp.epsilon = r.Get<double>();
  ck.stamp.delta = r.Get<double>();
  const auto count = r.Get<std::uint64_t>();
  if (count != cfg.ParamCount()) throw Error(ErrorCode::kCheckpoint, "parameter count mismatch");
  ck.params = LmParams(cfg);
  for (double& x : ck.params.flat()) x = r.Get<double>();
  if (!r.done()) throw Error(ErrorCode::kCheckpoint, "trailing bytes");
  return ck;
}

void SaveCheckpoint(const std::filesystem::path& path, const LmParams& params,
                    const CheckpointStamp& stamp) {
  WriteFile(path, EncodeCheckpoint(params, stamp));
}

Checkpoint LoadCheckpoint(const std::filesystem::path& path) {
  return DecodeCheckpoint(ReadFile(path));
}

}  // namespace privforge
