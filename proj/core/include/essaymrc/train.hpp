// Supervised training of the encoder and both heads.
//
// Loss per example:
//   span_weight * (-log Prob_start[gold_start] - log Prob_end[gold_end]) / 2
//   + verifier_weight * cross-entropy(softmax(logit_ans, logit_na), answerable ? ans : na)
// Unanswerable examples target position 1 ([CLS]) for both start and end.
#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "essaymrc/corpus.hpp"
#include "essaymrc/errors.hpp"
#include "essaymrc/locator.hpp"
#include "essaymrc/model.hpp"
#include "essaymrc/qnorm.hpp"
#include "essaymrc/seqbuild.hpp"

namespace essaymrc {

struct LossWeights {
  double span = 1.0;
  double verifier = 1.0;
};

struct AdamSettings {
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
};

struct TrainConfig {
  std::size_t epochs = 2;
  double learning_rate = 1e-3;
  std::size_t batch_size = 16;
  std::uint64_t seed = 0;
  LossWeights loss_weights;
  AdamSettings adam;
  /// Linear warmup from 0 to learning_rate over this many steps.
  std::size_t warmup_steps = 0;
  /// Stop after this many optimizer steps (0 = no cap).
  std::size_t max_steps = 0;

  void validate() const;
};

struct TrainingExample {
  std::string example_id;
  InputSequence seq;
  std::size_t gold_start = 1;  // 1-indexed positions in T
  std::size_t gold_end = 1;
  bool answerable = false;
};

struct TrainingSet {
  std::vector<TrainingExample> examples;
  std::vector<std::string> skipped_ids;  // oversized questions or answers cut off by truncation
  std::size_t skipped() const { return skipped_ids.size(); }
};

/// Normalizes each question, assembles T and maps the first gold answer to token positions.
TrainingSet build_training_set(const std::vector<QAExample>& corpus, const Vocabulary& vocab,
                               const RewriteRuleSet& rules, std::size_t max_len);

/// The scalar loss for given distributions and verifier logits (64-bit).
double compute_loss(const SpanDistributions& dist, const FrontVerification& front, const TrainingExample& gold,
                    const LossWeights& weights = {});

/// Forward + backward for one example; accumulates `scale` × gradient into `grad` and returns the loss.
template <typename T>
double loss_and_gradient(const ModelParams<T>& params, const TrainingExample& example, const LossWeights& weights,
                         ModelParams<T>& grad, double scale = 1.0);

template <typename T>
class AdamOptimizer {
 public:
  AdamOptimizer(const ModelParams<T>& like, AdamSettings settings);
  void step(ModelParams<T>& params, const ModelParams<T>& grad, double learning_rate);
  std::size_t steps() const { return steps_; }

 private:
  AdamSettings settings_;
  ModelParams<T> first_;
  ModelParams<T> second_;
  std::size_t steps_ = 0;
};

/// Thrown when the loss becomes NaN or infinite.
class TrainingDiverged : public Error {
 public:
  using Error::Error;
};

struct StageResult {
  std::vector<double> epoch_losses;  // mean loss per epoch
  std::vector<double> step_losses;   // mean batch loss per optimizer step
  std::size_t trained = 0;
  std::size_t skipped = 0;
  std::size_t steps = 0;
};

using ProgressFn = std::function<void(std::size_t step, double batch_loss)>;

/// Mini-batch Adam over `examples` for cfg.epochs epochs with a seeded
/// shuffle per epoch. Throws TrainingDiverged on a non-finite loss.
template <typename T>
StageResult train_stage(ModelParams<T>& params, const std::vector<TrainingExample>& examples, const TrainConfig& cfg,
                        const ProgressFn& progress = {});

/// Converts the corpus first; skipped examples are counted in the result.
template <typename T>
StageResult train_stage(ModelParams<T>& params, const std::vector<QAExample>& corpus, const Vocabulary& vocab,
                        const RewriteRuleSet& rules, const TrainConfig& cfg, const ProgressFn& progress = {});

/// Per-example quantities needed to place the threshold.
struct ThresholdCandidate {
  double score_final = 0.0;
  bool span_valid = false;  // the locator would accept the argmax span
  bool gold_answerable = false;
};

template <typename T>
std::vector<ThresholdCandidate> score_examples(const ModelParams<T>& params, const std::vector<TrainingExample>& dev,
                                               const LocatorOptions& locator = {});

struct ZetaSelection {
  double zeta = 0.0;
  double accuracy = 0.0;
};

/// Sweeps every distinct cut between sorted score_final values and returns the
/// midpoint threshold with the best accuracy (lowest threshold on ties).
ZetaSelection select_zeta(const std::vector<ThresholdCandidate>& candidates, bool paper_literal_threshold = false);

struct StageSpec {
  std::string name;
  std::vector<QAExample> train;
  std::vector<QAExample> dev;  // used to re-select zeta; may be empty
  TrainConfig config;
};

struct StageOutcome {
  std::string name;
  StageResult result;
  std::optional<ZetaSelection> zeta;
  std::string checkpoint_path;
};

struct MultiStageOptions {
  std::size_t max_len = kDefaultMaxLength;
  LocatorOptions locator;
  /// When set, "<dir>/<stage name>.ckpt" is written after every stage.
  std::string checkpoint_dir;
  std::function<void(const StageOutcome&)> on_stage;
  std::function<void(const std::string& stage, std::size_t step, double loss)> on_step;
};

/// Runs the stages in order on the same parameters. After each stage the
/// parameters are rounded to the 32-bit checkpoint representation, so resuming
/// from a stage checkpoint is bit-identical to an uninterrupted run.
template <typename T>
std::vector<StageOutcome> multi_stage_train(ModelParams<T>& params, const std::vector<StageSpec>& stages,
                                            const Vocabulary& vocab, const RewriteRuleSet& rules,
                                            const MultiStageOptions& options = {});

}  // namespace essaymrc
