#include "essaymrc/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <nlohmann/json.hpp>

#include "essaymrc/corpus.hpp"
#include "essaymrc/errors.hpp"
#include "essaymrc/pipeline.hpp"
#include "essaymrc/text.hpp"

namespace essaymrc {
namespace {

using nlohmann::json;

std::string resolve(const std::string& base, const std::string& path) {
  const std::filesystem::path p(path);
  return p.is_absolute() ? path : (std::filesystem::path(base) / p).string();
}

template <typename V>
V get_or(const json& j, const char* key, V fallback) {
  return j.contains(key) ? j.at(key).get<V>() : fallback;
}

PlanStage parse_stage(const json& j, std::size_t index, std::uint64_t plan_seed) {
  PlanStage s;
  s.name = get_or<std::string>(j, "name", "stage" + std::to_string(index + 1));
  s.train = j.at("train").get<std::string>();
  s.dev = get_or<std::string>(j, "dev", "");
  s.config.epochs = get_or<std::size_t>(j, "epochs", s.config.epochs);
  s.config.learning_rate = get_or<double>(j, "learning_rate", s.config.learning_rate);
  s.config.batch_size = get_or<std::size_t>(j, "batch_size", s.config.batch_size);
  s.config.warmup_steps = get_or<std::size_t>(j, "warmup_steps", 0);
  s.config.max_steps = get_or<std::size_t>(j, "max_steps", 0);
  s.config.loss_weights.span = get_or<double>(j, "span_weight", 1.0);
  s.config.loss_weights.verifier = get_or<double>(j, "verifier_weight", 1.0);
  s.config.seed = get_or<std::uint64_t>(j, "seed", plan_seed + 1000 * (index + 1));
  return s;
}

std::vector<QAExample> materialize(const CorpusSource& src) {
  if (src.path) return load_corpus(*src.path);
  return generate_synthetic(*src.synthetic, src.synthetic_seed).examples;
}

std::string row(const std::string& name, const std::string& acc, const std::string& f1, const std::string& zeta) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-20s %-16s %-16s %s\n", name.c_str(), acc.c_str(), f1.c_str(), zeta.c_str());
  return buf;
}

json stage_json(const StageReport& s) {
  json j;
  j["name"] = s.name;
  j["trained"] = s.trained;
  j["skipped"] = s.skipped;
  j["steps"] = s.steps;
  j["epoch_losses"] = s.epoch_losses;
  j["zeta"] = s.zeta ? json(*s.zeta) : json(nullptr);
  j["accuracy"] = s.accuracy;
  j["mean_overlap_f1"] = s.mean_overlap_f1;
  j["checkpoint"] = s.checkpoint_path;
  return j;
}

struct Corpora {
  std::map<std::string, std::vector<QAExample>> by_id;
  const std::vector<QAExample>& at(const std::string& id) const { return by_id.at(id); }
};

template <typename T>
std::vector<StageReport> run_stages(const ExperimentPlan& plan, const std::vector<PlanStage>& stages,
                                    const Corpora& corpora, const Vocabulary& vocab, const std::string& out_dir,
                                    const std::string& prefix, const ExperimentOptions& options) {
  const auto rules = default_rules();
  EncoderConfig config = plan.model;
  config.vocab_size = vocab.size();
  config.seed = plan.seed;
  auto params = init_model<T>(config);
  params.verification.beta1 = plan.beta1;
  params.verification.beta2 = plan.beta2;
  const auto& eval = corpora.at(plan.evaluation);
  const auto tokenizer = plan.overlap_unit == OverlapUnit::kWord ? word_tokenizer() : subword_tokenizer(vocab);

  MultiStageOptions ms;
  ms.max_len = config.max_len;
  ms.checkpoint_dir = out_dir;
  ms.on_step = options.progress;

  std::vector<StageReport> reports;
  for (const auto& stage : stages) {
    StageSpec stage_spec{prefix + stage.name, corpora.at(stage.train), {}, stage.config};
    if (!stage.dev.empty()) stage_spec.dev = corpora.at(stage.dev);
    const StageOutcome outcome = multi_stage_train(params, std::vector<StageSpec>{std::move(stage_spec)}, vocab, rules, ms).front();
    const auto records = predict_corpus(params, vocab, rules, eval);
    const auto result = evaluate_predictions(records, eval, tokenizer);

    StageReport r;
    r.name = stage.name;
    r.trained = outcome.result.trained;
    r.skipped = outcome.result.skipped;
    r.steps = outcome.result.steps;
    r.epoch_losses = outcome.result.epoch_losses;
    r.step_losses = outcome.result.step_losses;
    if (outcome.zeta) r.zeta = outcome.zeta->zeta;
    r.accuracy = result.accuracy;
    r.mean_overlap_f1 = result.mean_overlap_f1;
    r.checkpoint_path = outcome.checkpoint_path;
    reports.push_back(std::move(r));
  }
  return reports;
}

}  // namespace

void ExperimentPlan::validate() const {
  if (stages.empty()) throw ConfigError("plan needs at least one stage");
  auto known = [&](const std::string& id) {
    return std::any_of(corpora.begin(), corpora.end(), [&](const auto& c) { return c.first == id; });
  };
  auto check = [&](const std::string& id, const std::string& what) {
    if (!known(id)) throw ConfigError(what + " refers to unknown corpus '" + id + "'");
  };
  for (const auto* list : {&stages, &baseline}) {
    for (const auto& s : *list) {
      check(s.train, "stage " + s.name);
      if (!s.dev.empty()) check(s.dev, "stage " + s.name);
      s.config.validate();
    }
  }
  check(evaluation, "evaluation");
  EncoderConfig sized = model;
  sized.vocab_size = std::max<std::size_t>(sized.vocab_size, 1);
  sized.validate();
}

ExperimentPlan parse_plan(const std::string& json_text, const std::string& base_dir) {
  ExperimentPlan plan;
  try {
    const json j = json::parse(json_text);
    plan.name = get_or<std::string>(j, "name", plan.name);
    plan.seed = get_or<std::uint64_t>(j, "seed", 0);
    const auto precision = get_or<std::string>(j, "precision", "float32");
    if (precision != "float32" && precision != "float64") throw ConfigError("precision must be float32 or float64");
    plan.double_precision = precision == "float64";

    if (j.contains("model")) {
      const auto& m = j.at("model");
      plan.model.layers = get_or<std::size_t>(m, "layers", plan.model.layers);
      plan.model.d_model = get_or<std::size_t>(m, "d_model", plan.model.d_model);
      plan.model.heads = get_or<std::size_t>(m, "heads", plan.model.heads);
      plan.model.ffn_inner = get_or<std::size_t>(m, "ffn_inner", plan.model.ffn_inner);
      plan.model.max_len = get_or<std::size_t>(m, "max_len", plan.model.max_len);
    }
    if (j.contains("vocab")) {
      const auto& v = j.at("vocab");
      plan.vocab_size = get_or<std::size_t>(v, "size", plan.vocab_size);
      if (v.contains("path")) plan.vocab_path = resolve(base_dir, v.at("path").get<std::string>());
    }
    std::size_t index = 0;
    for (const auto& [id, c] : j.at("corpora").items()) {
      CorpusSource src;
      if (c.contains("path")) {
        src.path = resolve(base_dir, c.at("path").get<std::string>());
      } else if (c.contains("synthetic")) {
        const auto& s = c.at("synthetic");
        auto cfg = SyntheticConfig::for_profile(parse_profile(get_or<std::string>(s, "profile", "essay")));
        cfg.count = get_or<std::size_t>(s, "count", cfg.count);
        cfg.answerable_ratio = get_or<double>(s, "answerable_ratio", cfg.answerable_ratio);
        cfg.noise_rate = get_or<double>(s, "noise_rate", cfg.noise_rate);
        cfg.id_prefix = get_or<std::string>(s, "id_prefix", id);
        cfg.validate();
        src.synthetic = cfg;
        src.synthetic_seed = get_or<std::uint64_t>(s, "seed", plan.seed + 17 * (index + 1));
      } else {
        throw ConfigError("corpus '" + id + "' needs a path or a synthetic block");
      }
      plan.corpora.emplace_back(id, std::move(src));
      ++index;
    }
    const auto& stages = j.at("stages");
    for (std::size_t i = 0; i < stages.size(); ++i) plan.stages.push_back(parse_stage(stages[i], i, plan.seed));
    if (j.contains("baseline")) {
      const auto& base = j.at("baseline");
      for (std::size_t i = 0; i < base.size(); ++i) plan.baseline.push_back(parse_stage(base[i], i, plan.seed));
    }
    plan.evaluation = j.at("evaluation").get<std::string>();
    if (j.contains("verification")) {
      plan.beta1 = get_or<double>(j.at("verification"), "beta1", plan.beta1);
      plan.beta2 = get_or<double>(j.at("verification"), "beta2", plan.beta2);
    }
    plan.overlap_unit = parse_overlap_unit(get_or<std::string>(j, "overlap_unit", "word"));
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad plan: ") + e.what());
  }
  plan.validate();
  return plan;
}

ExperimentPlan load_plan(const std::string& path) {
  return parse_plan(read_file(path), std::filesystem::path(path).parent_path().string());
}

std::string ExperimentReport::table() const {
  std::string out = "experiment: " + name + " (" + std::to_string(evaluation_examples) + " evaluation examples)\n";
  out += row("stage", "Acc", "F1", "zeta");
  auto zeta_text = [](const StageReport& s) {
    if (!s.zeta) return std::string("-");
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", *s.zeta);
    return std::string(buf);
  };
  for (const auto& s : baseline) {
    out += row("baseline:" + s.name, format_score(s.accuracy), format_score(s.mean_overlap_f1), zeta_text(s));
  }
  for (std::size_t i = 0; i < stages.size(); ++i) {
    const auto& s = stages[i];
    std::string acc = format_score(s.accuracy);
    std::string f1 = format_score(s.mean_overlap_f1);
    if (i > 0) {
      acc = format_with_delta(s.accuracy, stages[i - 1].accuracy);
      f1 = format_with_delta(s.mean_overlap_f1, stages[i - 1].mean_overlap_f1);
    }
    out += row(s.name, acc, f1, zeta_text(s));
  }
  if (!baseline.empty()) {
    const auto& f = final_stage();
    const auto& b = baseline.back();
    out += row("final vs baseline", format_with_delta(f.accuracy, b.accuracy),
               format_with_delta(f.mean_overlap_f1, b.mean_overlap_f1), "");
  }
  return out;
}

std::string ExperimentReport::json() const {
  nlohmann::json j;
  j["name"] = name;
  j["evaluation_examples"] = evaluation_examples;
  j["stages"] = nlohmann::json::array();
  for (const auto& s : stages) j["stages"].push_back(stage_json(s));
  j["baseline"] = nlohmann::json::array();
  for (const auto& s : baseline) j["baseline"].push_back(stage_json(s));
  const auto& f = final_stage();
  j["final"] = {{"accuracy", f.accuracy}, {"mean_overlap_f1", f.mean_overlap_f1}};
  if (stages.size() > 1) {
    j["final"]["accuracy_display"] = format_with_delta(f.accuracy, stages.front().accuracy);
  }
  if (!baseline.empty()) {
    j["final"]["vs_baseline"] = {
        {"accuracy", format_with_delta(f.accuracy, baseline.back().accuracy)},
        {"mean_overlap_f1", format_with_delta(f.mean_overlap_f1, baseline.back().mean_overlap_f1)}};
  }
  return j.dump(2);
}

std::string ExperimentReport::loss_curve_csv() const {
  std::ostringstream out;
  out << "step,stage,loss\n";
  auto emit = [&](const std::vector<StageReport>& list, const std::string& prefix) {
    std::size_t step = 0;
    for (const auto& s : list) {
      for (double loss : s.step_losses) {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.9g", loss);
        out << ++step << ',' << prefix << s.name << ',' << buf << '\n';
      }
    }
  };
  emit(baseline, "baseline:");
  emit(stages, "");
  return out.str();
}

ExperimentReport run_experiment(const ExperimentPlan& plan, const ExperimentOptions& options) {
  plan.validate();
  Corpora corpora;
  for (const auto& [id, src] : plan.corpora) corpora.by_id.emplace(id, materialize(src));
  if (corpora.at(plan.evaluation).empty()) throw ValidationError("evaluation corpus '" + plan.evaluation + "' is empty");

  Vocabulary vocab;
  if (!plan.vocab_path.empty()) {
    vocab = Vocabulary::load(plan.vocab_path);
  } else {
    std::vector<std::string> texts;
    const auto rules = default_rules();
    for (const auto* list : {&plan.stages, &plan.baseline}) {
      for (const auto& s : *list) {
        for (const auto& ex : corpora.at(s.train)) {
          texts.push_back(normalize(ex.question, rules).normalized);
          texts.push_back(ex.context);
        }
      }
    }
    vocab = build_vocabulary(texts, plan.vocab_size);
  }

  if (!options.output_dir.empty()) {
    std::filesystem::create_directories(options.output_dir);
    vocab.save((std::filesystem::path(options.output_dir) / "vocab.txt").string());
  }

  ExperimentReport report;
  report.name = plan.name;
  report.evaluation_examples = corpora.at(plan.evaluation).size();
  auto run = [&](const std::vector<PlanStage>& stages, const std::string& prefix) {
    return plan.double_precision
               ? run_stages<double>(plan, stages, corpora, vocab, options.output_dir, prefix, options)
               : run_stages<float>(plan, stages, corpora, vocab, options.output_dir, prefix, options);
  };
  if (!plan.baseline.empty()) report.baseline = run(plan.baseline, "baseline-");
  report.stages = run(plan.stages, "");
  return report;
}

}  // namespace essaymrc
