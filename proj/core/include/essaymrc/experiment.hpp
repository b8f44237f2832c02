// Multi-stage experiment runner: builds corpora and a vocabulary from a plan,
// trains stage by stage, evaluates after every stage and renders a report.
//
// Plan file (JSON):
//   {
//     "name": "two-stage", "seed": 7, "precision": "float32" | "float64",
//     "model": {"layers": 2, "d_model": 64, "heads": 4, "ffn_inner": 256, "max_len": 512},
//     "vocab": {"size": 4000} | {"path": "vocab.txt"},
//     "corpora": {
//       "<id>": {"path": "file.jsonl"}
//             | {"synthetic": {"profile": "essay", "count": 5000, "answerable_ratio": 0.6, "seed": 1}}
//     },
//     "stages": [{"name": "...", "train": "<id>", "dev": "<id>", "epochs": 2,
//                 "learning_rate": 0.001, "batch_size": 16, "warmup_steps": 0}],
//     "baseline": [ ...stages, trained from a fresh model... ],   (optional)
//     "evaluation": "<id>",
//     "verification": {"beta1": 0.5, "beta2": 0.5},              (optional)
//     "overlap_unit": "word" | "subword"                         (optional)
//   }
#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "essaymrc/encoder.hpp"
#include "essaymrc/heads.hpp"
#include "essaymrc/metrics.hpp"
#include "essaymrc/synthetic.hpp"
#include "essaymrc/train.hpp"

namespace essaymrc {

struct CorpusSource {
  std::optional<std::string> path;
  std::optional<SyntheticConfig> synthetic;
  std::uint64_t synthetic_seed = 0;
};

struct PlanStage {
  std::string name;
  std::string train;
  std::string dev;  // may be empty
  TrainConfig config;
};

struct ExperimentPlan {
  std::string name = "experiment";
  std::uint64_t seed = 0;
  bool double_precision = false;
  EncoderConfig model;
  std::size_t vocab_size = 4000;
  std::string vocab_path;
  std::vector<std::pair<std::string, CorpusSource>> corpora;
  std::vector<PlanStage> stages;
  std::vector<PlanStage> baseline;
  std::string evaluation;
  double beta1 = 0.5;
  double beta2 = 0.5;
  OverlapUnit overlap_unit = OverlapUnit::kWord;

  /// Throws ConfigError when there is no stage or a corpus id does not resolve.
  void validate() const;
};

/// Relative paths in the plan resolve against `base_dir`.
ExperimentPlan parse_plan(const std::string& json_text, const std::string& base_dir = ".");
ExperimentPlan load_plan(const std::string& path);

struct StageReport {
  std::string name;
  std::size_t trained = 0;
  std::size_t skipped = 0;
  std::size_t steps = 0;
  std::vector<double> epoch_losses;
  std::vector<double> step_losses;
  std::optional<double> zeta;
  double accuracy = 0.0;
  double mean_overlap_f1 = 0.0;
  std::string checkpoint_path;
};

struct ExperimentReport {
  std::string name;
  std::size_t evaluation_examples = 0;
  std::vector<StageReport> stages;
  std::vector<StageReport> baseline;

  const StageReport& final_stage() const { return stages.back(); }
  /// Plain-text table; each row shows the change against the row above, and
  /// the final row also against the baseline when one was run.
  std::string table() const;
  std::string json() const;
  /// step,stage,loss rows for every optimizer step.
  std::string loss_curve_csv() const;
};

struct ExperimentOptions {
  /// Per-stage checkpoints go here when non-empty.
  std::string output_dir;
  std::function<void(const std::string& stage, std::size_t step, double loss)> progress;
};

/// Deterministic for a fixed plan. Throws ValidationError for an empty
/// evaluation corpus before any training starts.
ExperimentReport run_experiment(const ExperimentPlan& plan, const ExperimentOptions& options = {});

}  // namespace essaymrc
