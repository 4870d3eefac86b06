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

#include <charconv>
#include <functional>
#include <limits>
#include <sstream>

#include "privforge/checkpoint.h"
#include "privforge/error.h"
#include "privforge/pipeline.h"

namespace privforge {
namespace {

std::string Trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::string FormatDouble(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double ParseDouble(std::string_view key, std::string_view v) {
  double out = 0.0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw Error(ErrorCode::kConfig, "`" + std::string(key) + "`: not a number: " + std::string(v));
  }
  return out;
}

template <typename Int>
Int ParseInt(std::string_view key, std::string_view v) {
  Int out = 0;
  const auto res = std::from_chars(v.data(), v.data() + v.size(), out);
  if (res.ec != std::errc() || res.ptr != v.data() + v.size()) {
    throw Error(ErrorCode::kConfig, "`" + std::string(key) + "`: not an integer: " + std::string(v));
  }
  return out;
}

struct Key {
  std::function<std::string(const PipelineConfig&)> get;
  std::function<void(PipelineConfig&, std::string_view, const std::filesystem::path&)> set;
  bool hashed = true;
};

template <typename Int>
Key IntKey(const char* name, Int PipelineConfig::*member) {
  return {[member](const PipelineConfig& c) { return std::to_string(c.*member); },
          [name, member](PipelineConfig& c, std::string_view v, const std::filesystem::path&) {
            c.*member = ParseInt<Int>(name, v);
          }};
}

template <typename Int, typename Sub>
Key IntKey(const char* name, Sub PipelineConfig::*outer, Int Sub::*inner) {
  return {[outer, inner](const PipelineConfig& c) { return std::to_string(c.*outer.*inner); },
          [name, outer, inner](PipelineConfig& c, std::string_view v, const std::filesystem::path&) {
            c.*outer.*inner = ParseInt<Int>(name, v);
          }};
}

template <typename Sub>
Key DoubleKey(const char* name, Sub PipelineConfig::*outer, double Sub::*inner) {
  return {[outer, inner](const PipelineConfig& c) { return FormatDouble(c.*outer.*inner); },
          [name, outer, inner](PipelineConfig& c, std::string_view v, const std::filesystem::path&) {
            c.*outer.*inner = ParseDouble(name, v);
          }};
}

Key PathKey(std::filesystem::path PipelineConfig::*member, bool hashed = true) {
  return {[member](const PipelineConfig& c) { return (c.*member).generic_string(); },
          [member](PipelineConfig& c, std::string_view v, const std::filesystem::path& base) {
            std::filesystem::path p{std::string(v)};
            if (!p.empty() && p.is_relative() && !base.empty()) p = base / p;
            c.*member = p.lexically_normal();
          },
          hashed};
}

const std::map<std::string, Key>& Keys() {
  static const std::map<std::string, Key> keys = [] {
    std::map<std::string, Key> k;
    k["mode"] = {[](const PipelineConfig& c) { return std::string(PipelineModeName(c.mode)); },
                 [](PipelineConfig& c, std::string_view v, const std::filesystem::path&) {
                   c.mode = ParsePipelineMode(v);
                 }};
    k["seed"] = IntKey("seed", &PipelineConfig::seed);

    k["sensitive"] = PathKey(&PipelineConfig::sensitive_path);
    k["public_code"] = PathKey(&PipelineConfig::public_code_path);
    k["prompts"] = PathKey(&PipelineConfig::prompts_path);
    k["benchmark"] = PathKey(&PipelineConfig::benchmark_path);
    k["canaries"] = PathKey(&PipelineConfig::canaries_path);
    // Where results go does not change what they are.
    k["out_dir"] = PathKey(&PipelineConfig::out_dir, false);

    k["junior.embed_dim"] = IntKey("junior.embed_dim", &PipelineConfig::junior, &LmConfig::embed_dim);
    k["junior.context_window"] =
        IntKey("junior.context_window", &PipelineConfig::junior, &LmConfig::context_window);
    k["junior.hidden_dim"] = IntKey("junior.hidden_dim", &PipelineConfig::junior, &LmConfig::hidden_dim);
    k["premium.embed_dim"] = IntKey("premium.embed_dim", &PipelineConfig::premium, &LmConfig::embed_dim);
    k["premium.context_window"] =
        IntKey("premium.context_window", &PipelineConfig::premium, &LmConfig::context_window);
    k["premium.hidden_dim"] =
        IntKey("premium.hidden_dim", &PipelineConfig::premium, &LmConfig::hidden_dim);

    k["pretrain.epochs"] = IntKey("pretrain.epochs", &PipelineConfig::pretrain, &PlainTrainConfig::epochs);
    k["pretrain.batch_size"] =
        IntKey("pretrain.batch_size", &PipelineConfig::pretrain, &PlainTrainConfig::batch_size);
    k["pretrain.learning_rate"] =
        DoubleKey("pretrain.learning_rate", &PipelineConfig::pretrain, &PlainTrainConfig::learning_rate);

    k["dp.steps"] = {[](const PipelineConfig& c) { return std::to_string(c.dp_train.dp.max_steps); },
                     [](PipelineConfig& c, std::string_view v, const std::filesystem::path&) {
                       c.dp_train.dp.max_steps = ParseInt<std::int64_t>("dp.steps", v);
                     }};
    auto dp_double = [](const char* name, double DpConfig::*m) -> Key {
      return {[m](const PipelineConfig& c) { return FormatDouble(c.dp_train.dp.*m); },
              [name, m](PipelineConfig& c, std::string_view v, const std::filesystem::path&) {
                c.dp_train.dp.*m = ParseDouble(name, v);
              }};
    };
    k["dp.sampling_rate"] = dp_double("dp.sampling_rate", &DpConfig::sampling_rate);
    k["dp.noise_scale"] = dp_double("dp.noise_scale", &DpConfig::noise_scale);
    k["dp.clip_norm"] = dp_double("dp.clip_norm", &DpConfig::clip_norm);
    k["dp.delta"] = dp_double("dp.delta", &DpConfig::delta);
    k["dp.learning_rate"] = DoubleKey("dp.learning_rate", &PipelineConfig::dp_train, &TrainConfig::learning_rate);
    k["dp.target_epsilon"] = {[](const PipelineConfig& c) { return FormatDouble(c.target_epsilon); },
                              [](PipelineConfig& c, std::string_view v, const std::filesystem::path&) {
                                c.target_epsilon = ParseDouble("dp.target_epsilon", v);
                              }};

    auto sched_double = [](const char* name, double LambdaSchedule::*m) -> Key {
      return {[m](const PipelineConfig& c) { return FormatDouble(c.dp_train.schedule.*m); },
              [name, m](PipelineConfig& c, std::string_view v, const std::filesystem::path&) {
                c.dp_train.schedule.*m = ParseDouble(name, v);
              }};
    };
    k["privsa.lambda_max"] = sched_double("privsa.lambda_max", &LambdaSchedule::lambda_max);
    k["privsa.lambda_min"] = sched_double("privsa.lambda_min", &LambdaSchedule::lambda_min);
    k["privsa.decay_rate"] = sched_double("privsa.decay_rate", &LambdaSchedule::decay_rate);
    k["privsa.step_interval"] = {
        [](const PipelineConfig& c) { return std::to_string(c.dp_train.schedule.step_interval); },
        [](PipelineConfig& c, std::string_view v, const std::filesystem::path&) {
          c.dp_train.schedule.step_interval = ParseInt<std::int64_t>("privsa.step_interval", v);
        }};

    k["synth.strategy"] = {
        [](const PipelineConfig& c) { return std::string(DecodeStrategyName(c.sampling.strategy)); },
        [](PipelineConfig& c, std::string_view v, const std::filesystem::path&) {
          for (auto s : {DecodeStrategy::kGreedy, DecodeStrategy::kTopK, DecodeStrategy::kTemperature}) {
            if (DecodeStrategyName(s) == v) {
              c.sampling.strategy = s;
              return;
            }
          }
          throw Error(ErrorCode::kConfig, "`synth.strategy`: unknown strategy " + std::string(v));
        }};
    k["synth.top_k"] = IntKey("synth.top_k", &PipelineConfig::sampling, &SamplingConfig::top_k);
    k["synth.temperature"] =
        DoubleKey("synth.temperature", &PipelineConfig::sampling, &SamplingConfig::temperature);
    k["synth.max_tokens"] = IntKey("synth.max_tokens", &PipelineConfig::sampling, &SamplingConfig::max_tokens);
    k["synth.samples_per_prompt"] = IntKey("synth.samples_per_prompt", &PipelineConfig::samples_per_prompt);

    k["filter.threshold"] =
        DoubleKey("filter.threshold", &PipelineConfig::round_trip, &RoundTripConfig::threshold);
    k["filter.summaries"] =
        IntKey("filter.summaries", &PipelineConfig::round_trip, &RoundTripConfig::summaries_per_snippet);
    k["exec.max_steps"] = IntKey("exec.max_steps", &PipelineConfig::budget, &minilang::ExecBudget::max_steps);
    k["exec.max_output_bytes"] =
        IntKey("exec.max_output_bytes", &PipelineConfig::budget, &minilang::ExecBudget::max_output_bytes);

    k["finetune.epochs"] = IntKey("finetune.epochs", &PipelineConfig::finetune, &PlainTrainConfig::epochs);
    k["finetune.batch_size"] =
        IntKey("finetune.batch_size", &PipelineConfig::finetune, &PlainTrainConfig::batch_size);
    k["finetune.learning_rate"] =
        DoubleKey("finetune.learning_rate", &PipelineConfig::finetune, &PlainTrainConfig::learning_rate);

    k["eval.max_tokens"] = IntKey("eval.max_tokens", &PipelineConfig::eval_max_tokens);
    k["audit.repetition"] = IntKey("audit.repetition", &PipelineConfig::canary_repetition);
    k["audit.generations"] = IntKey("audit.generations", &PipelineConfig::audit_generations);
    return k;
  }();
  return keys;
}

}  // namespace

std::string_view PipelineModeName(PipelineMode m) {
  switch (m) {
    case PipelineMode::kPrivCode: return "privcode";
    case PipelineMode::kDpft: return "dpft";
    case PipelineMode::kJft: return "jft";
    case PipelineMode::kNonDpft: return "nondpft";
  }
  return "?";
}

PipelineMode ParsePipelineMode(std::string_view name) {
  for (auto m : {PipelineMode::kPrivCode, PipelineMode::kDpft, PipelineMode::kJft, PipelineMode::kNonDpft}) {
    if (PipelineModeName(m) == name) return m;
  }
  throw Error(ErrorCode::kConfig, "unknown mode `" + std::string(name) + "`");
}

void PipelineConfig::Validate() const {
  junior.Validate();
  premium.Validate();
  if (premium.ParamCount() <= junior.ParamCount()) {
    throw Error(ErrorCode::kConfig, "premium model must have more parameters than the junior model");
  }
  dp_train.Validate();
  sampling.Validate();
  if (samples_per_prompt < 1) throw Error(ErrorCode::kConfig, "synth.samples_per_prompt must be >= 1");
  if (!(round_trip.threshold >= 0.0 && round_trip.threshold <= 1.0) || round_trip.summaries_per_snippet < 1) {
    throw Error(ErrorCode::kConfig, "invalid round-trip filter settings");
  }
  if (budget.max_steps < 1 || budget.max_output_bytes < 1) {
    throw Error(ErrorCode::kConfig, "execution budget must be positive");
  }
  if (pretrain.epochs < 0 || pretrain.batch_size < 1 || finetune.epochs < 0 || finetune.batch_size < 1) {
    throw Error(ErrorCode::kConfig, "invalid epochs or batch size");
  }
  if (eval_max_tokens < 1 || canary_repetition < 0 || audit_generations < 0) {
    throw Error(ErrorCode::kConfig, "invalid evaluation or audit settings");
  }
  if (!(target_epsilon >= 0.0)) throw Error(ErrorCode::kConfig, "dp.target_epsilon must be >= 0");
  for (const auto* p : {&sensitive_path, &public_code_path, &prompts_path, &benchmark_path}) {
    if (p->empty()) throw Error(ErrorCode::kConfig, "a required data path is not set");
  }
}

std::map<std::string, std::string> PipelineConfig::ToMap() const {
  std::map<std::string, std::string> out;
  for (const auto& [name, key] : Keys()) {
    if (key.hashed) out[name] = key.get(*this);
  }
  return out;
}

std::uint64_t PipelineConfig::Hash() const {
  std::string canon;
  for (const auto& [k, v] : ToMap()) canon += k + "=" + v + "\n";
  return Fnv1a64(canon);
}

void ApplyConfigOverride(PipelineConfig& cfg, std::string_view key, std::string_view value,
                         const std::filesystem::path& base_dir) {
  const auto it = Keys().find(std::string(key));
  if (it == Keys().end()) throw Error(ErrorCode::kConfig, "unknown config key `" + std::string(key) + "`");
  it->second.set(cfg, value, base_dir);
}

PipelineConfig ParsePipelineConfig(std::string_view text, const std::filesystem::path& base_dir) {
  PipelineConfig cfg;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    const std::string body = Trim(hash == std::string::npos ? line : line.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw Error(ErrorCode::kConfig, "line " + std::to_string(line_no) + ": expected key = value");
    }
    try {
      ApplyConfigOverride(cfg, Trim(body.substr(0, eq)), Trim(body.substr(eq + 1)), base_dir);
    } catch (const Error& e) {
      throw Error(ErrorCode::kConfig, "line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return cfg;
}

PipelineConfig LoadPipelineConfig(const std::filesystem::path& path) {
  return ParsePipelineConfig(ReadFile(path), path.parent_path());
}

std::string RenderPipelineConfig(const PipelineConfig& cfg) {
  std::string out;
  for (const auto& [name, key] : Keys()) out += name + " = " + key.get(cfg) + "\n";
  return out;
}

}  // namespace privforge
