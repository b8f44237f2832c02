#include "essaymrc/train.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <numeric>
#include <random>

#include "essaymrc/checkpoint.hpp"

namespace essaymrc {
namespace {

template <typename T>
std::vector<Matrix<T>*> tensors(ModelParams<T>& p) {
  std::vector<Matrix<T>*> out;
  visit_model(p, [&](const std::string&, Matrix<T>& m) { out.push_back(&m); });
  return out;
}

template <typename T>
std::vector<const Matrix<T>*> tensors(const ModelParams<T>& p) {
  std::vector<const Matrix<T>*> out;
  visit_model(p, [&](const std::string&, const Matrix<T>& m) { out.push_back(&m); });
  return out;
}

// Softmax of a column vector plus the log-probability of `target`.
template <typename T>
ColVector<T> softmax_col(const ColVector<T>& logits, std::size_t target, double& log_prob) {
  const T max = logits.maxCoeff();
  ColVector<T> e = (logits.array() - max).exp();
  const T sum = e.sum();
  log_prob = static_cast<double>(logits(static_cast<Index>(target)) - max) - std::log(static_cast<double>(sum));
  return e / sum;
}

template <typename T>
void round_to_checkpoint_precision(ModelParams<T>& params) {
  for (auto* m : tensors(params)) *m = m->template cast<float>().template cast<T>();
}

}  // namespace

void TrainConfig::validate() const {
  if (epochs == 0 || batch_size == 0) throw ConfigError("epochs and batch_size must be positive");
  if (!(learning_rate > 0.0)) throw ConfigError("learning_rate must be positive");
  if (loss_weights.span < 0.0 || loss_weights.verifier < 0.0) throw ConfigError("loss weights must be >= 0");
}

TrainingSet build_training_set(const std::vector<QAExample>& corpus, const Vocabulary& vocab,
                               const RewriteRuleSet& rules, std::size_t max_len) {
  TrainingSet set;
  for (const auto& ex : corpus) {
    TrainingExample te;
    te.example_id = ex.example_id;
    te.answerable = ex.answerable;
    try {
      te.seq = assemble(normalize(ex.question, rules), ex.context, vocab, max_len);
    } catch (const ValidationError&) {
      set.skipped_ids.push_back(ex.example_id);
      continue;
    }
    if (ex.answerable) {
      const auto& a = ex.gold_answers.front();
      const std::size_t a_begin = a.char_start;
      const std::size_t a_end = a.char_start + a.text.size();
      std::optional<std::size_t> start;
      std::optional<std::size_t> end;
      for (std::size_t pos = te.seq.first_essay_position(); pos <= te.seq.tau; ++pos) {
        const auto& tok = te.seq.at(pos);
        if (!start && *tok.char_end > a_begin) start = pos;
        if (*tok.char_start < a_end) end = pos;
      }
      const bool cut_off = te.seq.n == 0 || *te.seq.at(te.seq.tau).char_end < a_end;
      if (!start || !end || *start > *end || cut_off) {
        set.skipped_ids.push_back(ex.example_id);
        continue;
      }
      te.gold_start = *start;
      te.gold_end = *end;
    }
    set.examples.push_back(std::move(te));
  }
  return set;
}

double compute_loss(const SpanDistributions& dist, const FrontVerification& front, const TrainingExample& gold,
                    const LossWeights& weights) {
  const double span = -(std::log(dist.p_start(gold.gold_start)) + std::log(dist.p_end(gold.gold_end))) / 2.0;
  const double max = std::max(front.logit_ans, front.logit_na);
  const double lse = max + std::log(std::exp(front.logit_ans - max) + std::exp(front.logit_na - max));
  const double verifier = lse - (gold.answerable ? front.logit_ans : front.logit_na);
  return weights.span * span + weights.verifier * verifier;
}

template <typename T>
double loss_and_gradient(const ModelParams<T>& params, const TrainingExample& example, const LossWeights& weights,
                         ModelParams<T>& grad, double scale) {
  const auto ids = example.seq.ids();
  EncoderTrace<T> trace;
  const auto out = forward(params, ids, &trace);

  double log_ps = 0.0;
  double log_pe = 0.0;
  double log_pv = 0.0;
  const auto gs = example.gold_start - 1;
  const auto ge = example.gold_end - 1;
  const std::size_t target = example.answerable ? 0 : 1;
  ColVector<T> d_start = softmax_col<T>(out.start_logits, gs, log_ps);
  ColVector<T> d_end = softmax_col<T>(out.end_logits, ge, log_pe);
  ColVector<T> verifier_logits = out.verifier_logits.row(0).transpose();
  ColVector<T> d_ver = softmax_col<T>(verifier_logits, target, log_pv);
  const double loss = weights.span * (-(log_ps + log_pe) / 2.0) + weights.verifier * (-log_pv);

  const T span_coef = static_cast<T>(weights.span * scale / 2.0);
  const T ver_coef = static_cast<T>(weights.verifier * scale);
  d_start(static_cast<Index>(gs)) -= T(1);
  d_end(static_cast<Index>(ge)) -= T(1);
  d_ver(static_cast<Index>(target)) -= T(1);
  d_start *= span_coef;
  d_end *= span_coef;
  d_ver *= ver_coef;

  grad.span.w_start.col(0).noalias() += out.hidden.transpose() * d_start;
  grad.span.b_start(0, 0) += d_start.sum();
  grad.span.w_end.col(0).noalias() += out.hidden.transpose() * d_end;
  grad.span.b_end(0, 0) += d_end.sum();
  grad.verifier.weight.noalias() += out.hidden.row(0).transpose() * d_ver.transpose();
  grad.verifier.bias.row(0) += d_ver.transpose();

  Matrix<T> d_hidden = d_start * params.span.w_start.col(0).transpose();
  d_hidden.noalias() += d_end * params.span.w_end.col(0).transpose();
  d_hidden.row(0).noalias() += d_ver.transpose() * params.verifier.weight.transpose();
  encoder_backward(trace, params.encoder, d_hidden, grad.encoder);
  return loss;
}

template <typename T>
AdamOptimizer<T>::AdamOptimizer(const ModelParams<T>& like, AdamSettings settings)
    : settings_(settings), first_(zeros_like(like)), second_(zeros_like(like)) {}

template <typename T>
void AdamOptimizer<T>::step(ModelParams<T>& params, const ModelParams<T>& grad, double learning_rate) {
  ++steps_;
  const double t = static_cast<double>(steps_);
  const T b1 = static_cast<T>(settings_.beta1);
  const T b2 = static_cast<T>(settings_.beta2);
  const T step_size = static_cast<T>(learning_rate * std::sqrt(1.0 - std::pow(settings_.beta2, t)) /
                                     (1.0 - std::pow(settings_.beta1, t)));
  const T eps = static_cast<T>(settings_.epsilon);
  auto p = tensors(params);
  auto g = tensors(grad);
  auto m = tensors(first_);
  auto v = tensors(second_);
  for (std::size_t i = 0; i < p.size(); ++i) {
    m[i]->array() = b1 * m[i]->array() + (T(1) - b1) * g[i]->array();
    v[i]->array() = b2 * v[i]->array() + (T(1) - b2) * g[i]->array().square();
    p[i]->array() -= step_size * m[i]->array() / (v[i]->array().sqrt() + eps);
  }
}

template <typename T>
StageResult train_stage(ModelParams<T>& params, const std::vector<TrainingExample>& examples, const TrainConfig& cfg,
                        const ProgressFn& progress) {
  cfg.validate();
  if (examples.empty()) throw ValidationError("empty training corpus");
  StageResult result;
  result.trained = examples.size();

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(examples.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  AdamOptimizer<T> optimizer(params, cfg.adam);
  ModelParams<T> grad = zeros_like(params);
  auto grad_tensors = tensors(grad);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double epoch_loss = 0.0;
    std::size_t epoch_count = 0;
    for (std::size_t begin = 0; begin < order.size(); begin += cfg.batch_size) {
      if (cfg.max_steps > 0 && result.steps >= cfg.max_steps) break;
      const std::size_t end = std::min(order.size(), begin + cfg.batch_size);
      for (auto* g : grad_tensors) g->setZero();
      const double scale = 1.0 / static_cast<double>(end - begin);
      double batch_loss = 0.0;
      for (std::size_t i = begin; i < end; ++i) {
        batch_loss += loss_and_gradient(params, examples[order[i]], cfg.loss_weights, grad, scale);
      }
      if (!std::isfinite(batch_loss)) {
        throw TrainingDiverged("loss became non-finite at step " + std::to_string(result.steps + 1));
      }
      double lr = cfg.learning_rate;
      if (cfg.warmup_steps > 0 && result.steps < cfg.warmup_steps) {
        lr *= static_cast<double>(result.steps + 1) / static_cast<double>(cfg.warmup_steps);
      }
      optimizer.step(params, grad, lr);
      ++result.steps;
      epoch_loss += batch_loss;
      epoch_count += end - begin;
      result.step_losses.push_back(batch_loss * scale);
      if (progress) progress(result.steps, batch_loss * scale);
    }
    if (epoch_count > 0) result.epoch_losses.push_back(epoch_loss / static_cast<double>(epoch_count));
    if (cfg.max_steps > 0 && result.steps >= cfg.max_steps) break;
  }
  return result;
}

template <typename T>
StageResult train_stage(ModelParams<T>& params, const std::vector<QAExample>& corpus, const Vocabulary& vocab,
                        const RewriteRuleSet& rules, const TrainConfig& cfg, const ProgressFn& progress) {
  const auto set = build_training_set(corpus, vocab, rules, params.config().max_len);
  auto result = train_stage(params, set.examples, cfg, progress);
  result.skipped = set.skipped();
  return result;
}

template <typename T>
std::vector<ThresholdCandidate> score_examples(const ModelParams<T>& params, const std::vector<TrainingExample>& dev,
                                               const LocatorOptions& locator) {
  std::vector<ThresholdCandidate> out;
  out.reserve(dev.size());
  for (const auto& ex : dev) {
    const auto inf = infer(params, ex.seq);
    const auto scores = verify(inf.dist, inf.front, params.verification);
    ThresholdCandidate c;
    c.score_final = scores.score_final;
    c.span_valid = decide_span(inf.dist, ex.seq, true, locator).decision == Decision::kAnswered;
    c.gold_answerable = ex.answerable;
    out.push_back(c);
  }
  return out;
}

ZetaSelection select_zeta(const std::vector<ThresholdCandidate>& candidates, bool paper_literal_threshold) {
  ZetaSelection best;
  if (candidates.empty()) return best;
  std::vector<ThresholdCandidate> sorted = candidates;
  std::stable_sort(sorted.begin(), sorted.end(),
                   [](const auto& a, const auto& b) { return a.score_final < b.score_final; });
  const std::size_t n = sorted.size();

  // correct_if_answered[j] / correct_if_not[j] for each example in sorted order.
  std::vector<std::size_t> prefix_ans(n + 1, 0);
  std::vector<std::size_t> prefix_not(n + 1, 0);
  for (std::size_t j = 0; j < n; ++j) {
    const bool ans_ok = sorted[j].gold_answerable == sorted[j].span_valid;
    const bool not_ok = !sorted[j].gold_answerable;
    prefix_ans[j + 1] = prefix_ans[j] + (ans_ok ? 1 : 0);
    prefix_not[j + 1] = prefix_not[j] + (not_ok ? 1 : 0);
  }

  std::size_t best_correct = 0;
  bool found = false;
  for (std::size_t cut = 0; cut <= n; ++cut) {
    if (cut > 0 && cut < n && !(sorted[cut - 1].score_final < sorted[cut].score_final)) continue;
    // Default orientation answers the `cut` lowest scores; the literal one answers the rest.
    const std::size_t correct =
        paper_literal_threshold ? (prefix_not[cut] + (prefix_ans[n] - prefix_ans[cut]))
                                : (prefix_ans[cut] + (prefix_not[n] - prefix_not[cut]));
    if (!found || correct > best_correct) {
      found = true;
      best_correct = correct;
      if (cut == 0) {
        best.zeta = sorted.front().score_final - 1.0;
      } else if (cut == n) {
        best.zeta = sorted.back().score_final + 1.0;
      } else {
        best.zeta = 0.5 * (sorted[cut - 1].score_final + sorted[cut].score_final);
      }
    }
  }
  best.accuracy = static_cast<double>(best_correct) / static_cast<double>(n);
  return best;
}

template <typename T>
std::vector<StageOutcome> multi_stage_train(ModelParams<T>& params, const std::vector<StageSpec>& stages,
                                            const Vocabulary& vocab, const RewriteRuleSet& rules,
                                            const MultiStageOptions& options) {
  std::vector<StageOutcome> outcomes;
  for (const auto& stage : stages) {
    StageOutcome outcome;
    outcome.name = stage.name;
    ProgressFn progress;
    if (options.on_step) {
      progress = [&](std::size_t step, double loss) { options.on_step(stage.name, step, loss); };
    }
    outcome.result = train_stage(params, stage.train, vocab, rules, stage.config, progress);
    round_to_checkpoint_precision(params);
    if (!stage.dev.empty()) {
      const auto dev = build_training_set(stage.dev, vocab, rules, options.max_len);
      if (!dev.examples.empty()) {
        outcome.zeta = select_zeta(score_examples(params, dev.examples, options.locator),
                                   params.verification.paper_literal_threshold);
        params.verification.zeta = outcome.zeta->zeta;
      }
    }
    if (!options.checkpoint_dir.empty()) {
      std::filesystem::create_directories(options.checkpoint_dir);
      outcome.checkpoint_path = (std::filesystem::path(options.checkpoint_dir) / (stage.name + ".ckpt")).string();
      save_checkpoint(outcome.checkpoint_path, params,
                      CheckpointMeta{vocab.fingerprint(), vocab.size(), "stage " + stage.name});
    }
    if (options.on_stage) options.on_stage(outcome);
    outcomes.push_back(std::move(outcome));
  }
  return outcomes;
}

#define ESSAYMRC_INSTANTIATE_TRAIN(T)                                                                         \
  template double loss_and_gradient<T>(const ModelParams<T>&, const TrainingExample&, const LossWeights&,     \
                                       ModelParams<T>&, double);                                              \
  template class AdamOptimizer<T>;                                                                            \
  template StageResult train_stage<T>(ModelParams<T>&, const std::vector<TrainingExample>&,                   \
                                      const TrainConfig&, const ProgressFn&);                                 \
  template StageResult train_stage<T>(ModelParams<T>&, const std::vector<QAExample>&, const Vocabulary&,      \
                                      const RewriteRuleSet&, const TrainConfig&, const ProgressFn&);          \
  template std::vector<ThresholdCandidate> score_examples<T>(const ModelParams<T>&,                           \
                                                             const std::vector<TrainingExample>&,             \
                                                             const LocatorOptions&);                          \
  template std::vector<StageOutcome> multi_stage_train<T>(ModelParams<T>&, const std::vector<StageSpec>&,     \
                                                          const Vocabulary&, const RewriteRuleSet&,           \
                                                          const MultiStageOptions&);

ESSAYMRC_INSTANTIATE_TRAIN(float)
ESSAYMRC_INSTANTIATE_TRAIN(double)

}  // namespace essaymrc
