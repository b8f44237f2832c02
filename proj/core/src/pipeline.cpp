#include "essaymrc/pipeline.hpp"

#include "essaymrc/errors.hpp"

namespace essaymrc {
namespace {

template <typename T>
Verdict run_one(const ModelParams<T>& params, const InputSequence& seq, const std::string& essay,
                const LocatorOptions& locator) {
  const auto inf = infer(params, seq);
  const auto scores = verify(inf.dist, inf.front, params.verification);
  return locate_response(inf.dist, seq, scores, essay, locator);
}

}  // namespace

void EvaluationRequest::validate() const {
  if (essay.empty()) throw ValidationError("essay is empty");
  if (requirements.empty()) throw ValidationError("at least one requirement is needed");
}

template <typename T>
Engine<T>::Engine(ModelParams<T> model, Vocabulary vocab, RewriteRuleSet rules)
    : model_(std::move(model)), vocab_(std::move(vocab)), rules_(std::move(rules)) {
  if (vocab_.size() != model_.config().vocab_size) {
    throw ValidationError("vocabulary has " + std::to_string(vocab_.size()) + " terms but the model expects " +
                          std::to_string(model_.config().vocab_size));
  }
  rules_.validate();
}

template <typename T>
Engine<T> Engine<T>::load(const std::string& checkpoint_path, const std::string& vocab_path, RewriteRuleSet rules) {
  CheckpointMeta meta;
  auto model = load_checkpoint<T>(checkpoint_path, &meta);
  auto vocab = Vocabulary::load(vocab_path);
  if (meta.vocab_fingerprint != 0 && meta.vocab_fingerprint != vocab.fingerprint()) {
    throw ValidationError("checkpoint " + checkpoint_path + " was trained with a different vocabulary than " +
                          vocab_path);
  }
  return Engine(std::move(model), std::move(vocab), std::move(rules));
}

template <typename T>
RequirementVerdict Engine<T>::evaluate_one(const std::string& requirement, const std::string& essay) const {
  RequirementVerdict out;
  out.requirement = requirement;
  out.question = normalize(requirement, rules_);
  const auto seq = assemble(out.question, essay, vocab_, max_len());
  out.verdict = run_one(model_, seq, essay, locator_);
  return out;
}

template <typename T>
std::vector<RequirementVerdict> Engine<T>::evaluate(const EvaluationRequest& request) const {
  request.validate();
  std::vector<RequirementVerdict> out;
  out.reserve(request.requirements.size());
  for (const auto& r : request.requirements) out.push_back(evaluate_one(r, request.essay));
  return out;
}

template <typename T>
std::vector<VerdictRecord> predict_corpus(const ModelParams<T>& params, const Vocabulary& vocab,
                                          const RewriteRuleSet& rules, const std::vector<QAExample>& corpus,
                                          const LocatorOptions& locator) {
  std::vector<VerdictRecord> records;
  records.reserve(corpus.size());
  for (const auto& ex : corpus) {
    Verdict verdict;
    try {
      const auto seq = assemble(normalize(ex.question, rules), ex.context, vocab, params.config().max_len);
      verdict = run_one(params, seq, ex.context, locator);
    } catch (const ValidationError&) {
      verdict = Verdict{};
    }
    records.push_back(make_record(verdict, ex.example_id, ex.essay_id, ex.context));
  }
  return records;
}

template class Engine<float>;
template class Engine<double>;
template std::vector<VerdictRecord> predict_corpus<float>(const ModelParams<float>&, const Vocabulary&,
                                                          const RewriteRuleSet&, const std::vector<QAExample>&,
                                                          const LocatorOptions&);
template std::vector<VerdictRecord> predict_corpus<double>(const ModelParams<double>&, const Vocabulary&,
                                                           const RewriteRuleSet&, const std::vector<QAExample>&,
                                                           const LocatorOptions&);

}  // namespace essaymrc
