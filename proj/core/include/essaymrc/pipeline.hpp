// End-to-end requirement evaluation: normalize -> assemble -> encode -> heads -> locate.
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "essaymrc/checkpoint.hpp"
#include "essaymrc/corpus.hpp"
#include "essaymrc/locator.hpp"
#include "essaymrc/model.hpp"
#include "essaymrc/qnorm.hpp"
#include "essaymrc/seqbuild.hpp"

namespace essaymrc {

struct EvaluationRequest {
  std::string essay;
  std::vector<std::string> requirements;
  std::string essay_id = "essay";

  void validate() const;
};

struct RequirementVerdict {
  std::string requirement;
  NormalizedQuestion question;
  Verdict verdict;
};

template <typename T>
class Engine {
 public:
  /// Throws ValidationError when the vocabulary does not match the model's embedding table.
  Engine(ModelParams<T> model, Vocabulary vocab, RewriteRuleSet rules = default_rules());

  /// Loads a checkpoint and a vocabulary file; throws ValidationError when the
  /// checkpoint was trained against a different vocabulary.
  static Engine load(const std::string& checkpoint_path, const std::string& vocab_path,
                     RewriteRuleSet rules = default_rules());

  /// One verdict per requirement, in request order.
  std::vector<RequirementVerdict> evaluate(const EvaluationRequest& request) const;
  RequirementVerdict evaluate_one(const std::string& requirement, const std::string& essay) const;

  VerificationSettings& verification() { return model_.verification; }
  LocatorOptions& locator() { return locator_; }
  const LocatorOptions& locator() const { return locator_; }
  const RewriteRuleSet& rules() const { return rules_; }
  const ModelParams<T>& model() const { return model_; }
  const Vocabulary& vocab() const { return vocab_; }
  std::size_t max_len() const { return model_.config().max_len; }

 private:
  ModelParams<T> model_;
  Vocabulary vocab_;
  RewriteRuleSet rules_;
  LocatorOptions locator_;
};

/// Runs the model over a labeled corpus and returns one verdict record per
/// example (question_id = example_id). Questions too long for the budget are
/// recorded as not answered.
template <typename T>
std::vector<VerdictRecord> predict_corpus(const ModelParams<T>& params, const Vocabulary& vocab,
                                          const RewriteRuleSet& rules, const std::vector<QAExample>& corpus,
                                          const LocatorOptions& locator = {});

}  // namespace essaymrc
