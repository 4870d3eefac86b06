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

#include "privforge/pipeline.h"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <set>
#include <sstream>

#include "privforge/checkpoint.h"
#include "privforge/error.h"
#include "privforge/secret_detector.h"

namespace privforge {
namespace {

using Clock = std::chrono::steady_clock;

class StageTimer {
 public:
  StageTimer(RunReport& report, std::string name)
      : report_(report), name_(std::move(name)), start_(Clock::now()) {}
  ~StageTimer() {
    report_.timings_sec[name_] = std::chrono::duration<double>(Clock::now() - start_).count();
  }

 private:
  RunReport& report_;
  std::string name_;
  Clock::time_point start_;
};

// Runs one stage, relabelling library errors with the stage name.
template <typename Fn>
auto Stage(RunReport& report, const std::string& name, Fn&& fn) {
  StageTimer timer(report, name);
  try {
    return fn();
  } catch (const Error& e) {
    throw Error(ErrorCode::kStage, name + ": " + e.what());
  }
}

std::uint64_t DeriveSeed(std::uint64_t master, std::string_view purpose) {
  return RecordSeed(master, purpose, 0);
}

std::vector<std::string> LoadPrompts(const std::filesystem::path& path) {
  std::istringstream in(ReadFile(path));
  std::vector<std::string> prompts;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") != std::string::npos) prompts.push_back(line);
  }
  if (prompts.empty()) throw Error(ErrorCode::kEmptyCorpus, path.string() + ": no prompts");
  return prompts;
}

nlohmann::json Number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  return v;
}

void AddCheck(RunReport& report, std::string name, bool ok) {
  report.checks.push_back({std::move(name), ok});
}

void AddEvalChecks(RunReport& report) {
  const EvalReport& e = report.eval;
  AddCheck(report, "eval_pass_at_1_le_compile_rate", e.pass_at_1 <= e.compile_pass_rate);
  const bool exec_ok = e.compile_pass_rate > 0.0
                           ? std::abs(e.execution_pass_rate - e.pass_at_1 / e.compile_pass_rate) <= 1e-12
                           : e.execution_pass_rate == 0.0;
  AddCheck(report, "eval_exec_rate_identity", exec_ok);
}

Dataset LoadSensitive(const PipelineConfig& cfg, std::vector<CanarySpec>& specs) {
  Dataset ds = LoadDataset(cfg.sensitive_path);
  if (ds.empty()) throw Error(ErrorCode::kEmptyCorpus, "sensitive corpus is empty");
  if (!cfg.canaries_path.empty()) {
    specs = LoadCanarySpecs(cfg.canaries_path);
    if (cfg.canary_repetition > 0) {
      for (auto& s : specs) s.repetition_rate = cfg.canary_repetition;
      ds = InjectCanaries(ds, specs, DeriveSeed(cfg.seed, "canaries"));
    }
  }
  return ds;
}

std::vector<TrainingExample> PlainExamples(const Dataset& ds) {
  std::vector<TrainingExample> out;
  out.reserve(ds.size());
  for (const auto& pair : ds.pairs) out.push_back(MakeExample(pair, {}));
  return out;
}

void WriteJson(const std::filesystem::path& path, const nlohmann::json& j) {
  WriteFile(path, j.dump(2) + "\n");
}

void Finish(const PipelineConfig& cfg, RunReport& report, const LmParams& final_model,
            const std::vector<CanarySpec>& specs, const std::vector<BenchmarkTask>& tasks) {
  const auto& out = cfg.out_dir;
  report.eval = Stage(report, "evaluate", [&] {
    return RunBenchmark(final_model, tasks, cfg.eval_max_tokens, cfg.budget);
  });
  WriteJson(out / artifacts::kEvalReport, EvalReportToJson(report.eval));
  AddEvalChecks(report);

  if (!specs.empty()) {
    report.leakage = Stage(report, "audit", [&] {
      return AuditCanaries(final_model, specs, cfg.audit_generations, DeriveSeed(cfg.seed, "audit"));
    });
    WriteJson(out / artifacts::kLeakageReport, LeakageReportToJson(*report.leakage));
  }

  AddCheck(report, "dataset_containment",
           report.filtered_size <= report.executed_size && report.executed_size <= report.synthesized_size);
  WriteJson(out / artifacts::kRunReport, RunReportToJson(report));
  nlohmann::json timings = nlohmann::json::object();
  for (const auto& [k, v] : report.timings_sec) timings[k] = v;
  WriteJson(out / artifacts::kTimings, timings);
}

RunReport NewReport(const PipelineConfig& cfg) {
  RunReport report;
  report.mode = cfg.mode;
  report.seed = cfg.seed;
  report.config_hash = cfg.Hash();
  report.config_echo = cfg.ToMap();
  return report;
}

bool StampMatches(const Checkpoint& ck, const PrivacyReport& p) {
  return ck.stamp.epsilon == p.epsilon && ck.stamp.delta == p.delta;
}

}  // namespace

bool RunReport::AllChecksPass() const {
  return std::all_of(checks.begin(), checks.end(), [](const StageCheck& c) { return c.ok; });
}

nlohmann::json PrivacyReportToJson(const PrivacyReport& r) {
  return {{"epsilon", Number(r.epsilon)}, {"delta", r.delta}, {"best_order", r.best_order}};
}

nlohmann::json EvalReportToJson(const EvalReport& r) {
  nlohmann::json tasks = nlohmann::json::array();
  for (const auto& t : r.tasks) {
    tasks.push_back({{"task_id", t.task_id},
                     {"outcome", TaskOutcomeName(t.outcome)},
                     {"tests_run", t.tests_run},
                     {"tests_failed", t.tests_failed}});
  }
  return {{"pass_at_1", r.pass_at_1},
          {"compile_pass_rate", r.compile_pass_rate},
          {"execution_pass_rate", r.execution_pass_rate},
          {"tasks", tasks}};
}

nlohmann::json LeakageReportToJson(const LeakageReport& r) {
  nlohmann::json counts = nlohmann::json::object();
  for (int i = 0; i < kNumPiiCategories; ++i) {
    counts[std::string(PiiCategoryName(static_cast<PiiCategory>(i)))] = r.counts[static_cast<std::size_t>(i)];
  }
  return {{"counts", counts}, {"leakage_rate", r.leakage_rate}};
}

nlohmann::json ValidationStatsToJson(const ValidationStats& s) {
  return {{"total", s.total},
          {"pass", s.pass},
          {"environment_error", s.environment_error},
          {"compile_error", s.compile_error},
          {"runtime_error", s.runtime_error},
          {"language_mismatch", s.language_mismatch},
          {"other_empty", s.other_empty},
          {"other_timeout", s.other_timeout},
          {"other_unspecified", s.other_unspecified},
          {"acceptance_rate", s.acceptance_rate()}};
}

nlohmann::json RunReportToJson(const RunReport& r) {
  nlohmann::json j;
  j["mode"] = PipelineModeName(r.mode);
  j["seed"] = r.seed;
  j["config_hash"] = r.config_hash;
  j["config"] = r.config_echo;
  j["sizes"] = {{"sensitive", r.sensitive_size},
                {"synthesized", r.synthesized_size},
                {"executed", r.executed_size},
                {"filtered", r.filtered_size}};
  if (r.exec_stats) j["execution_filter"] = ValidationStatsToJson(*r.exec_stats);
  j["privacy"] = nlohmann::json::array();
  for (const auto& p : r.privacy) j["privacy"].push_back(PrivacyReportToJson(p));
  double eps = std::numeric_limits<double>::infinity();
  if (!r.privacy.empty()) eps = r.privacy.back().epsilon;
  j["final_model_epsilon"] = Number(eps);
  j["eval"] = EvalReportToJson(r.eval);
  if (r.leakage) j["leakage"] = LeakageReportToJson(*r.leakage);
  j["checks"] = nlohmann::json::object();
  for (const auto& c : r.checks) j["checks"][c.name] = c.ok;
  j["all_checks_pass"] = r.AllChecksPass();
  return j;
}

LmParams PretrainPublic(const LmConfig& config, const Dataset& public_code, const PlainTrainConfig& cfg) {
  LmParams init = InitParams(config);
  if (public_code.empty() || cfg.epochs == 0) return init;
  return PlainTrain(public_code, cfg, init).params;
}

DpConfig ResolveDpConfig(const PipelineConfig& cfg) {
  DpConfig dp = cfg.dp_train.dp;
  dp.rng_seed = DeriveSeed(cfg.seed, "dp-noise");
  if (cfg.target_epsilon > 0.0 && dp.max_steps > 0) {
    dp.noise_scale = CalibrateSigma(dp.sampling_rate, dp.max_steps, dp.delta, cfg.target_epsilon);
  }
  return dp;
}

RunReport RunPrivcode(const PipelineConfig& cfg) {
  cfg.Validate();
  if (cfg.mode != PipelineMode::kPrivCode) throw Error(ErrorCode::kConfig, "RunPrivcode needs mode privcode");
  RunReport report = NewReport(cfg);
  const auto& out = cfg.out_dir;
  std::filesystem::create_directories(out);
  const std::uint64_t hash = report.config_hash;

  std::vector<CanarySpec> specs;
  const std::vector<BenchmarkTask> tasks =
      Stage(report, "load", [&] { return LoadBenchmarkTasks(cfg.benchmark_path); });
  const Dataset public_code = Stage(report, "load", [&] { return LoadDataset(cfg.public_code_path); });
  const std::vector<std::string> prompts = Stage(report, "load", [&] { return LoadPrompts(cfg.prompts_path); });

  // Stage 1: the only stage that reads the sensitive corpus.
  {
    const Dataset sensitive = Stage(report, "load", [&] { return LoadSensitive(cfg, specs); });
    report.sensitive_size = sensitive.size();
    LmConfig jc = cfg.junior;
    jc.seed = DeriveSeed(cfg.seed, "junior-init");
    PlainTrainConfig pre = cfg.pretrain;
    pre.seed = DeriveSeed(cfg.seed, "junior-pretrain");
    const LmParams warm = Stage(report, "pretrain_junior", [&] { return PretrainPublic(jc, public_code, pre); });

    TrainConfig tc = cfg.dp_train;
    tc.private_training = true;
    tc.dp = ResolveDpConfig(cfg);
    const TrainResult trained = Stage(report, "privsa_train", [&] { return PrivsaTrain(sensitive, tc, warm); });
    const PrivacyReport& privacy = trained.trace.privacy;
    report.privacy.push_back(privacy);
    SaveCheckpoint(out / artifacts::kJuniorCheckpoint, trained.params, {hash, privacy.epsilon, privacy.delta});
    WriteJson(out / artifacts::kPrivacyReport, PrivacyReportToJson(privacy));
    AddCheck(report, "junior_epsilon_finite", std::isfinite(privacy.epsilon));
    if (cfg.target_epsilon > 0.0) {
      AddCheck(report, "junior_epsilon_within_target", privacy.epsilon <= cfg.target_epsilon + 1e-9);
    }
  }

  // Everything below works from files written by the previous stage.
  const Checkpoint junior = LoadCheckpoint(out / artifacts::kJuniorCheckpoint);
  AddCheck(report, "junior_checkpoint_stamped",
           junior.stamp.config_hash == hash && StampMatches(junior, report.privacy.front()));

  Stage(report, "generate", [&] {
    SamplingConfig sampling = cfg.sampling;
    sampling.seed = DeriveSeed(cfg.seed, "synthesis");
    const auto records = BatchGenerate(junior.params, prompts, sampling, cfg.samples_per_prompt);
    SaveDataset(RecordsToDataset(records, "synth"), out / artifacts::kSynthesized);
    return 0;
  });
  const Dataset synthesized = LoadDataset(out / artifacts::kSynthesized);
  report.synthesized_size = synthesized.size();

  Stage(report, "execution_filter", [&] {
    ExecutionFilterResult r = ExecutionValidate(synthesized, cfg.budget);
    report.exec_stats = r.stats;
    SaveDataset(r.kept, out / artifacts::kExecuted);
    return 0;
  });
  const Dataset executed = LoadDataset(out / artifacts::kExecuted);
  report.executed_size = executed.size();

  Stage(report, "round_trip_filter", [&] {
    SaveDataset(RoundTripValidate(executed, cfg.round_trip).kept, out / artifacts::kFiltered);
    return 0;
  });

  // Stage 2: non-private fine-tuning on the filtered artifact only.
  const Dataset filtered = LoadDataset(out / artifacts::kFiltered);
  report.filtered_size = filtered.size();
  AddCheck(report, "filtered_nonempty", !filtered.empty());
  {
    std::set<std::string> exec_sources;
    for (const auto& p : executed.pairs) exec_sources.insert(p.prompt + '\0' + p.snippet.source);
    bool contained = true;
    for (const auto& p : filtered.pairs) contained &= exec_sources.count(p.prompt + '\0' + p.snippet.source) > 0;
    AddCheck(report, "filtered_subset_of_executed", contained);
  }

  LmConfig pc = cfg.premium;
  pc.seed = DeriveSeed(cfg.seed, "premium-init");
  PlainTrainConfig pre = cfg.pretrain;
  pre.seed = DeriveSeed(cfg.seed, "premium-pretrain");
  const LmParams premium_warm =
      Stage(report, "pretrain_premium", [&] { return PretrainPublic(pc, public_code, pre); });
  LmParams premium = premium_warm;
  if (!filtered.empty()) {
    PlainTrainConfig ft = cfg.finetune;
    ft.seed = DeriveSeed(cfg.seed, "premium-finetune");
    premium = Stage(report, "finetune_premium", [&] { return PlainTrain(filtered, ft, premium_warm).params; });
  }
  // Post-processing: the premium model inherits the junior model's guarantee.
  SaveCheckpoint(out / artifacts::kPremiumCheckpoint, premium,
                 {hash, report.privacy.front().epsilon, report.privacy.front().delta});

  Finish(cfg, report, premium, specs, tasks);
  return report;
}

RunReport RunBaseline(const PipelineConfig& cfg) {
  cfg.Validate();
  if (cfg.mode == PipelineMode::kPrivCode) throw Error(ErrorCode::kConfig, "RunBaseline needs a baseline mode");
  RunReport report = NewReport(cfg);
  const auto& out = cfg.out_dir;
  std::filesystem::create_directories(out);
  const std::uint64_t hash = report.config_hash;

  std::vector<CanarySpec> specs;
  const std::vector<BenchmarkTask> tasks =
      Stage(report, "load", [&] { return LoadBenchmarkTasks(cfg.benchmark_path); });
  const Dataset public_code = Stage(report, "load", [&] { return LoadDataset(cfg.public_code_path); });
  const Dataset sensitive = Stage(report, "load", [&] { return LoadSensitive(cfg, specs); });
  report.sensitive_size = sensitive.size();

  LmConfig pc = cfg.premium;
  pc.seed = DeriveSeed(cfg.seed, "premium-init");
  PlainTrainConfig pre = cfg.pretrain;
  pre.seed = DeriveSeed(cfg.seed, "premium-pretrain");
  LmParams model = Stage(report, "pretrain_premium", [&] { return PretrainPublic(pc, public_code, pre); });

  PlainTrainConfig ft = cfg.finetune;
  ft.seed = DeriveSeed(cfg.seed, "premium-finetune");
  TrainConfig tc = cfg.dp_train;
  tc.private_training = true;
  tc.schedule.lambda_max = 0.0;  // plain DP-SGD: no structural term
  tc.schedule.lambda_min = 0.0;
  tc.dp = ResolveDpConfig(cfg);

  switch (cfg.mode) {
    case PipelineMode::kNonDpft:
      model = Stage(report, "finetune", [&] { return PlainTrain(sensitive, ft, model).params; });
      break;
    case PipelineMode::kDpft: {
      const TrainResult r = Stage(report, "dp_finetune", [&] { return PrivsaTrain(PlainExamples(sensitive), tc, model); });
      model = r.params;
      report.privacy.push_back(r.trace.privacy);
      break;
    }
    case PipelineMode::kJft: {
      const SecretDetector det = SecretDetector::Default();
      const Dataset masked = MaskDataset(sensitive, det);
      SaveDataset(masked, out / artifacts::kMaskedCorpus);
      std::size_t leftover = 0;
      for (const auto& p : masked.pairs) leftover += det.Find(p.snippet.source).size();
      AddCheck(report, "jft_masked_corpus_clean", leftover == 0);
      model = Stage(report, "jft_phase1", [&] { return PlainTrain(masked, ft, model).params; });
      const TrainResult r = Stage(report, "jft_phase2", [&] { return PrivsaTrain(PlainExamples(sensitive), tc, model); });
      model = r.params;
      report.privacy.push_back(r.trace.privacy);
      break;
    }
    case PipelineMode::kPrivCode:
      break;
  }

  const double eps = report.privacy.empty() ? std::numeric_limits<double>::infinity() : report.privacy[0].epsilon;
  const double delta = report.privacy.empty() ? 0.0 : report.privacy[0].delta;
  SaveCheckpoint(out / artifacts::kPremiumCheckpoint, model, {hash, eps, delta});
  if (!report.privacy.empty()) {
    WriteJson(out / artifacts::kPrivacyReport, PrivacyReportToJson(report.privacy[0]));
    AddCheck(report, "dp_epsilon_finite", std::isfinite(eps));
    if (cfg.target_epsilon > 0.0) AddCheck(report, "dp_epsilon_within_target", eps <= cfg.target_epsilon + 1e-9);
  } else {
    AddCheck(report, "nondp_reports_no_finite_epsilon", std::isinf(eps));
  }
  const Checkpoint saved = LoadCheckpoint(out / artifacts::kPremiumCheckpoint);
  AddCheck(report, "premium_checkpoint_stamped",
           saved.stamp.config_hash == hash && saved.stamp.epsilon == eps && saved.stamp.delta == delta);

  Finish(cfg, report, model, specs, tasks);
  return report;
}

RunReport RunPipeline(const PipelineConfig& cfg) {
  return cfg.mode == PipelineMode::kPrivCode ? RunPrivcode(cfg) : RunBaseline(cfg);
}

}  // namespace privforge
