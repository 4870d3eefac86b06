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

// Command-line front end. Every subcommand writes its artifacts under the
// report directory (--out-dir, else $PRIVFORGE_REPORT_DIR, else ./privforge_out)
// and exits 0 only when its post-conditions hold.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "privforge/checkpoint.h"
#include "privforge/error.h"
#include "privforge/evaluation.h"
#include "privforge/filters.h"
#include "privforge/pipeline.h"
#include "privforge/privacy.h"
#include "privforge/privsa.h"
#include "privforge/synth.h"

namespace fs = std::filesystem;
using namespace privforge;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitCheckFailed = 1;
constexpr int kExitError = 2;

fs::path ReportDir(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv("PRIVFORGE_REPORT_DIR"); env != nullptr && *env != '\0') return env;
  return "privforge_out";
}

void Emit(const fs::path& path, const nlohmann::json& j) {
  WriteFile(path, j.dump(2) + "\n");
  std::cout << j.dump(2) << "\n";
}

int Verdict(const std::vector<StageCheck>& checks) {
  bool ok = true;
  for (const auto& c : checks) {
    std::cerr << (c.ok ? "ok    " : "FAIL  ") << c.name << "\n";
    ok &= c.ok;
  }
  return ok ? kExitOk : kExitCheckFailed;
}

PipelineConfig BuildConfig(const std::string& config_path, const std::vector<std::string>& sets) {
  PipelineConfig cfg = config_path.empty() ? PipelineConfig{} : LoadPipelineConfig(config_path);
  for (const auto& kv : sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw Error(ErrorCode::kConfig, "--set expects key=value, got " + kv);
    ApplyConfigOverride(cfg, kv.substr(0, eq), kv.substr(eq + 1), fs::current_path());
  }
  return cfg;
}

std::vector<std::string> ReadLines(const fs::path& path) {
  std::istringstream in(ReadFile(path));
  std::vector<std::string> lines;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) lines.push_back(line);
  }
  return lines;
}

DecodeStrategy ParseStrategy(const std::string& s) {
  for (auto d : {DecodeStrategy::kGreedy, DecodeStrategy::kTopK, DecodeStrategy::kTemperature}) {
    if (DecodeStrategyName(d) == s) return d;
  }
  throw Error(ErrorCode::kInvalidArgument, "unknown strategy " + s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"privforge: two-stage private code synthesis on a toy language"};
  app.require_subcommand(1);
  std::string out_dir;
  app.add_option("--out-dir", out_dir, "report directory (default: $PRIVFORGE_REPORT_DIR)");

  // Shared config plumbing for the training-style commands.
  std::string config_path;
  std::vector<std::string> sets;

  auto* train = app.add_subcommand("train-dp", "pretrain and DP-train the junior model on the sensitive corpus");
  train->add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
  train->add_option("--set", sets, "override a config key (key=value)");

  auto* gen = app.add_subcommand("generate", "sample snippets for each prompt");
  std::string ckpt_path, prompts_path, gen_out;
  SamplingConfig sampling;
  std::string strategy = "temperature";
  int samples = 1;
  gen->add_option("--checkpoint", ckpt_path)->required()->check(CLI::ExistingFile);
  gen->add_option("--prompts", prompts_path, "one prompt per line")->required()->check(CLI::ExistingFile);
  gen->add_option("--strategy", strategy)->check(CLI::IsMember({"greedy", "topk", "temperature"}));
  gen->add_option("--top-k", sampling.top_k);
  gen->add_option("--temperature", sampling.temperature);
  gen->add_option("--max-tokens", sampling.max_tokens);
  gen->add_option("--samples", samples, "samples per prompt");
  gen->add_option("--seed", sampling.seed);

  auto* filt = app.add_subcommand("filter", "execution and round-trip validation");
  std::string filter_in;
  RoundTripConfig rt;
  minilang::ExecBudget budget;
  filt->add_option("--input", filter_in, "synthesized jsonl")->required()->check(CLI::ExistingFile);
  std::string stage = "both";
  filt->add_option("--stage", stage)->check(CLI::IsMember({"exec", "roundtrip", "both"}));
  filt->add_option("--tau,--threshold", rt.threshold, "round-trip similarity threshold")->check(CLI::Range(0.0, 1.0));
  filt->add_option("--summaries", rt.summaries_per_snippet);
  filt->add_option("--budget-steps,--max-steps", budget.max_steps);

  auto* eval = app.add_subcommand("evaluate", "greedy pass@1 on the benchmark tasks");
  std::string tasks_path;
  int eval_max_tokens = 160;
  eval->add_option("--checkpoint", ckpt_path)->required()->check(CLI::ExistingFile);
  eval->add_option("--tasks", tasks_path)->required()->check(CLI::ExistingFile);
  eval->add_option("--max-tokens", eval_max_tokens);

  auto* audit = app.add_subcommand("audit", "canary leakage audit");
  std::string canaries_path;
  int generations = 500;
  std::uint64_t audit_seed = 0;
  audit->add_option("--checkpoint", ckpt_path)->required()->check(CLI::ExistingFile);
  audit->add_option("--canaries", canaries_path)->required()->check(CLI::ExistingFile);
  audit->add_option("--prompts", prompts_path, "extra prompts beyond the canary prompts")->check(CLI::ExistingFile);
  audit->add_option("--generations", generations);
  audit->add_option("--seed", audit_seed);

  auto* acct = app.add_subcommand("accountant", "RDP accountant for the subsampled Gaussian mechanism");
  double q = 0.0, sigma = 0.0, delta = 1e-5, target_eps = 0.0;
  std::int64_t steps = 0;
  bool improved = false;
  acct->add_option("--q", q, "sampling rate")->required();
  acct->add_option("--steps", steps)->required();
  acct->add_option("--delta", delta);
  acct->add_option("--sigma", sigma, "noise multiplier");
  acct->add_option("--target-epsilon", target_eps, "calibrate sigma instead");
  acct->add_flag("--improved", improved, "use the tighter RDP-to-DP conversion");

  auto* pipe = app.add_subcommand("pipeline", "run a full mode end to end");
  std::string mode;
  pipe->add_option("--mode", mode)->required()->check(CLI::IsMember({"privcode", "dpft", "jft", "nondpft"}));
  pipe->add_option("--config", config_path, "key=value config file")->check(CLI::ExistingFile);
  pipe->add_option("--set", sets, "override a config key (key=value)");
  std::uint64_t seed = 0;
  auto* seed_opt = pipe->add_option("--seed", seed, "master seed");

  CLI11_PARSE(app, argc, argv);

  try {
    const fs::path dir = ReportDir(out_dir);

    if (*train) {
      PipelineConfig cfg = BuildConfig(config_path, sets);
      fs::create_directories(dir);
      const Dataset public_code = LoadDataset(cfg.public_code_path);
      const Dataset sensitive = LoadDataset(cfg.sensitive_path);
      LmConfig jc = cfg.junior;
      jc.seed = RecordSeed(cfg.seed, "junior-init", 0);
      PlainTrainConfig pre = cfg.pretrain;
      pre.seed = RecordSeed(cfg.seed, "junior-pretrain", 0);
      TrainConfig tc = cfg.dp_train;
      tc.private_training = true;
      tc.dp = ResolveDpConfig(cfg);
      const TrainResult r = PrivsaTrain(sensitive, tc, PretrainPublic(jc, public_code, pre));
      const PrivacyReport& p = r.trace.privacy;
      SaveCheckpoint(dir / artifacts::kJuniorCheckpoint, r.params, {cfg.Hash(), p.epsilon, p.delta});
      nlohmann::json j = PrivacyReportToJson(p);
      j["noise_scale"] = tc.dp.noise_scale;
      j["final_ce"] = r.trace.steps.empty() ? 0.0 : r.trace.steps.back().ce;
      Emit(dir / artifacts::kPrivacyReport, j);
      std::vector<StageCheck> checks{{"epsilon_finite", std::isfinite(p.epsilon)}};
      if (cfg.target_epsilon > 0.0) checks.push_back({"epsilon_within_target", p.epsilon <= cfg.target_epsilon + 1e-9});
      return Verdict(checks);
    }

    if (*gen) {
      const Checkpoint ck = LoadCheckpoint(ckpt_path);
      sampling.strategy = ParseStrategy(strategy);
      const auto prompts = ReadLines(prompts_path);
      const auto records = BatchGenerate(ck.params, prompts, sampling, samples);
      SaveDataset(RecordsToDataset(records, "synth"), dir / artifacts::kSynthesized);
      std::cout << records.size() << " records -> " << (dir / artifacts::kSynthesized).string() << "\n";
      return Verdict({{"records_emitted", records.size() == prompts.size() * static_cast<std::size_t>(samples)}});
    }

    if (*filt) {
      const Dataset d = LoadDataset(filter_in);
      nlohmann::json j;
      j["stage"] = stage;
      j["sizes"]["input"] = d.size();
      Dataset cur = d;
      if (stage != "roundtrip") {
        const ExecutionFilterResult e = ExecutionValidate(cur, budget);
        SaveDataset(e.kept, dir / artifacts::kExecuted);
        j["sizes"]["executed"] = e.kept.size();
        j["execution_filter"] = ValidationStatsToJson(e.stats);
        cur = e.kept;
      }
      if (stage != "exec") {
        const RoundTripResult f = RoundTripValidate(cur, rt);
        SaveDataset(f.kept, dir / artifacts::kFiltered);
        j["sizes"]["filtered"] = f.kept.size();
        j["threshold"] = rt.threshold;
        cur = f.kept;
      }
      Emit(dir / "filter.json", j);
      return Verdict({{"output_subset_of_input", cur.size() <= d.size()}});
    }

    if (*eval) {
      const Checkpoint ck = LoadCheckpoint(ckpt_path);
      const auto tasks = LoadBenchmarkTasks(tasks_path);
      const EvalReport r = RunBenchmark(ck.params, tasks, eval_max_tokens, budget);
      Emit(dir / artifacts::kEvalReport, EvalReportToJson(r));
      const bool exec_ok = r.compile_pass_rate > 0.0
                               ? std::abs(r.execution_pass_rate - r.pass_at_1 / r.compile_pass_rate) <= 1e-12
                               : r.execution_pass_rate == 0.0;
      return Verdict({{"pass_at_1_le_compile_rate", r.pass_at_1 <= r.compile_pass_rate},
                      {"exec_rate_identity", exec_ok}});
    }

    if (*audit) {
      const Checkpoint ck = LoadCheckpoint(ckpt_path);
      const auto specs = LoadCanarySpecs(canaries_path);
      std::vector<std::string> prompts;
      for (const auto& s : specs) prompts.push_back(s.sample.prompt);
      if (!prompts_path.empty()) {
        for (auto& p : ReadLines(prompts_path)) prompts.push_back(std::move(p));
      }
      SamplingConfig t;
      t.strategy = DecodeStrategy::kTemperature;
      t.temperature = 1.0;
      t.seed = audit_seed;
      const int per = (generations + static_cast<int>(prompts.size()) - 1) / static_cast<int>(prompts.size());
      const auto records = BatchGenerate(ck.params, prompts, t, per);
      const LeakageReport r = MeasureLeakage(records, specs);
      nlohmann::json j = LeakageReportToJson(r);
      j["generations"] = records.size();
      Emit(dir / artifacts::kLeakageReport, j);
      return Verdict({{"generations_emitted", !records.empty()}});
    }

    if (*acct) {
      const auto conv = improved ? EpsilonConversion::kImproved : EpsilonConversion::kClassic;
      if (target_eps > 0.0) sigma = CalibrateSigma(q, steps, delta, target_eps, conv);
      const PrivacyReport p = ComputeEpsilon(q, sigma, steps, delta, conv);
      nlohmann::json j = PrivacyReportToJson(p);
      j["q"] = q;
      j["sigma"] = sigma;
      j["steps"] = steps;
      j["conversion"] = improved ? "improved" : "classic";
      std::cout << j.dump(2) << "\n";
      return Verdict({{"epsilon_finite", std::isfinite(p.epsilon)}});
    }

    if (*pipe) {
      PipelineConfig cfg = BuildConfig(config_path, sets);
      cfg.mode = ParsePipelineMode(mode);
      if (*seed_opt) cfg.seed = seed;
      cfg.out_dir = dir;
      const RunReport report = RunPipeline(cfg);
      std::cout << RunReportToJson(report).dump(2) << "\n";
      return Verdict(report.checks);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}
