#include "essaymrc/cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "essaymrc/checkpoint.hpp"
#include "essaymrc/corpus.hpp"
#include "essaymrc/errors.hpp"
#include "essaymrc/experiment.hpp"
#include "essaymrc/metrics.hpp"
#include "essaymrc/pipeline.hpp"
#include "essaymrc/qnorm.hpp"
#include "essaymrc/synthetic.hpp"
#include "essaymrc/text.hpp"
#include "essaymrc/train.hpp"

namespace essaymrc {
namespace {

struct Globals {
  std::uint64_t seed = 0;
  bool seed_given = false;
};

void write_text(const std::string& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error("cannot write " + path);
  f << text;
}

std::string env_or(const std::string& value, const char* env) {
  if (!value.empty()) return value;
  const char* v = std::getenv(env);
  return v ? std::string(v) : std::string();
}

std::vector<std::string> non_empty_lines(const std::string& path) {
  std::vector<std::string> out;
  for (auto& line : read_lines(path)) {
    auto t = std::string(trim(line));
    if (!t.empty() && t.front() == '*') t = std::string(trim(t.substr(1)));
    if (!t.empty()) out.push_back(t);
  }
  return out;
}

RewriteRuleSet rules_from(const std::string& path, const std::string& policy) {
  const auto case_policy = parse_case_policy(policy);
  if (path.empty()) {
    auto r = default_rules();
    r.case_policy = case_policy;
    return r;
  }
  return load_rules(path, case_policy);
}

std::vector<QAExample> load_all(const std::vector<std::string>& paths) {
  std::vector<QAExample> out;
  for (const auto& p : paths) {
    auto part = load_corpus(p);
    out.insert(out.end(), std::make_move_iterator(part.begin()), std::make_move_iterator(part.end()));
  }
  return out;
}

// ---- normalize ------------------------------------------------------------

struct NormalizeArgs {
  std::vector<std::string> questions;
  std::string in;
  std::string rules;
  std::string case_policy = "capitalize_first";
  bool json = false;
};

void run_normalize(const NormalizeArgs& a, std::ostream& out) {
  const auto rules = rules_from(a.rules, a.case_policy);
  auto questions = a.questions;
  if (!a.in.empty()) {
    auto more = non_empty_lines(a.in);
    questions.insert(questions.end(), more.begin(), more.end());
  }
  if (questions.empty()) throw ValidationError("no questions given (use --question or --in)");
  for (const auto& q : questions) {
    const auto n = normalize(q, rules);
    if (a.json) {
      nlohmann::ordered_json j;
      j["original"] = n.original;
      j["normalized"] = n.normalized;
      j["applied_rules"] = n.applied_rules;
      out << j.dump() << '\n';
    } else {
      out << n.normalized << '\n';
    }
  }
}

// ---- build-vocab ----------------------------------------------------------

struct VocabArgs {
  std::vector<std::string> in;
  std::size_t size = 4000;
  std::string out;
};

Vocabulary vocab_from_corpus(const std::vector<QAExample>& corpus, std::size_t size) {
  const auto rules = default_rules();
  std::vector<std::string> texts;
  for (const auto& ex : corpus) {
    texts.push_back(normalize(ex.question, rules).normalized);
    texts.push_back(ex.context);
  }
  return build_vocabulary(texts, size);
}

void run_build_vocab(const VocabArgs& a, std::ostream& out) {
  const auto vocab = vocab_from_corpus(load_all(a.in), a.size);
  vocab.save(a.out);
  out << "wrote " << vocab.size() << " terms to " << a.out << '\n';
}

// ---- ingest ---------------------------------------------------------------

struct IngestArgs {
  std::string in;
  std::string synthetic;
  std::size_t count = 1000;
  std::optional<double> answerable_ratio;
  std::optional<double> noise_rate;
  std::string templates;
  std::string out;
};

void run_ingest(const IngestArgs& a, const Globals& g, std::ostream& out) {
  std::vector<QAExample> corpus;
  if (!a.synthetic.empty()) {
    auto cfg = SyntheticConfig::for_profile(parse_profile(a.synthetic));
    cfg.count = a.count;
    if (a.answerable_ratio) cfg.answerable_ratio = *a.answerable_ratio;
    if (a.noise_rate) cfg.noise_rate = *a.noise_rate;
    cfg.validate();
    corpus = a.templates.empty() ? generate_synthetic(cfg, g.seed).examples
                                 : generate_synthetic(cfg, load_template_bank(a.templates), g.seed).examples;
  } else if (!a.in.empty()) {
    corpus = load_corpus(a.in);
  } else {
    throw ValidationError("ingest needs --in or --synthetic");
  }
  write_sed_format(a.out, corpus);
  std::size_t answerable = 0;
  for (const auto& ex : corpus) answerable += ex.answerable ? 1 : 0;
  out << "wrote " << corpus.size() << " examples (" << answerable << " answerable) to " << a.out << '\n';
}

// ---- stats ----------------------------------------------------------------

struct StatsArgs {
  std::vector<std::string> in;
  std::size_t bin_width = 5;
  std::string out;
  bool json = false;
};

void run_stats(const StatsArgs& a, std::ostream& out) {
  std::vector<QAExample> all;
  nlohmann::ordered_json report;
  report["files"] = nlohmann::ordered_json::array();
  for (const auto& path : a.in) {
    auto corpus = load_corpus(path);
    const auto s = answer_length_stats(corpus, a.bin_width);
    report["files"].push_back({{"path", path},
                               {"examples", s.example_count},
                               {"answerable", s.answerable_count},
                               {"answers", s.answer_count}});
    all.insert(all.end(), std::make_move_iterator(corpus.begin()), std::make_move_iterator(corpus.end()));
  }
  const auto total = answer_length_stats(all, a.bin_width);
  report["examples"] = total.example_count;
  report["answerable"] = total.answerable_count;
  report["answers"] = total.answer_count;
  report["mean_answer_length_chars"] =
      total.mean_answer_length_chars ? nlohmann::ordered_json(*total.mean_answer_length_chars) : nlohmann::ordered_json(nullptr);
  if (!a.out.empty()) write_text(a.out, histogram_csv(total));
  if (a.json) {
    out << report.dump(2) << '\n';
    return;
  }
  for (const auto& f : report["files"]) {
    out << f["path"].get<std::string>() << ": " << f["examples"] << " examples, " << f["answerable"]
        << " answerable, " << f["answers"] << " answers\n";
  }
  out << "total: " << total.example_count << " examples, " << total.answerable_count << " answerable, "
      << total.answer_count << " answers\n";
  if (total.mean_answer_length_chars) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.2f", *total.mean_answer_length_chars);
    out << "mean answer length (chars): " << buf << '\n';
  }
}

// ---- train ----------------------------------------------------------------

struct TrainArgs {
  std::string train;
  std::string dev;
  std::string vocab;
  std::size_t vocab_size = 4000;
  std::string out;
  std::string init;
  std::string loss_csv;
  std::string precision = "float32";
  TrainConfig cfg;
  EncoderConfig model;
  bool quiet = false;
};

template <typename T>
void train_with(const TrainArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  const auto rules = default_rules();
  const auto corpus = load_corpus(a.train);
  Vocabulary vocab;
  if (!a.vocab.empty() && std::filesystem::exists(a.vocab)) {
    vocab = Vocabulary::load(a.vocab);
  } else {
    vocab = vocab_from_corpus(corpus, a.vocab_size);
    if (!a.vocab.empty()) vocab.save(a.vocab);
  }

  ModelParams<T> params;
  if (!a.init.empty()) {
    CheckpointMeta meta;
    params = load_checkpoint<T>(a.init, &meta);
    if (meta.vocab_fingerprint != vocab.fingerprint()) {
      throw ValidationError("checkpoint " + a.init + " does not match the vocabulary");
    }
  } else {
    EncoderConfig config = a.model;
    config.vocab_size = vocab.size();
    config.seed = g.seed;
    params = init_model<T>(config);
  }

  TrainConfig cfg = a.cfg;
  cfg.seed = g.seed;
  StageSpec stage{"train", corpus, {}, cfg};
  if (!a.dev.empty()) stage.dev = load_corpus(a.dev);
  MultiStageOptions options;
  options.max_len = params.config().max_len;
  if (!a.quiet) {
    options.on_step = [&](const std::string&, std::size_t step, double loss) {
      if (step % 50 == 0) err << "step " << step << " loss " << loss << '\n';
    };
  }
  const auto outcome = multi_stage_train(params, std::vector<StageSpec>{stage}, vocab, rules, options).front();
  save_checkpoint(a.out, params, CheckpointMeta{vocab.fingerprint(), vocab.size(), "trained on " + a.train});

  if (!a.loss_csv.empty()) {
    std::string csv = "step,loss\n";
    for (std::size_t i = 0; i < outcome.result.step_losses.size(); ++i) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%zu,%.9g\n", i + 1, outcome.result.step_losses[i]);
      csv += buf;
    }
    write_text(a.loss_csv, csv);
  }
  out << "trained " << outcome.result.trained << " examples (" << outcome.result.skipped << " skipped) in "
      << outcome.result.steps << " steps\n";
  for (std::size_t e = 0; e < outcome.result.epoch_losses.size(); ++e) {
    out << "epoch " << e + 1 << " mean loss " << outcome.result.epoch_losses[e] << '\n';
  }
  if (outcome.zeta) out << "zeta " << outcome.zeta->zeta << " (dev accuracy " << outcome.zeta->accuracy << ")\n";
  out << "checkpoint " << a.out << '\n';
}

void run_train(const TrainArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  if (a.precision == "float64") {
    train_with<double>(a, g, out, err);
  } else if (a.precision == "float32") {
    train_with<float>(a, g, out, err);
  } else {
    throw ConfigError("precision must be float32 or float64");
  }
}

// ---- experiment -----------------------------------------------------------

struct ExperimentArgs {
  std::string plan;
  std::string out_dir;
  std::string report;
  bool quiet = false;
};

void run_experiment_cmd(const ExperimentArgs& a, const Globals& g, std::ostream& out, std::ostream& err) {
  auto j = nlohmann::json::parse(read_file(a.plan));
  if (g.seed_given) j["seed"] = g.seed;
  const auto plan = parse_plan(j.dump(), std::filesystem::path(a.plan).parent_path().string());
  ExperimentOptions options;
  options.output_dir = a.out_dir;
  if (!a.quiet) {
    options.progress = [&](const std::string& stage, std::size_t step, double loss) {
      if (step % 50 == 0) err << stage << " step " << step << " loss " << loss << '\n';
    };
  }
  const auto report = run_experiment(plan, options);
  out << report.table();
  if (!a.report.empty()) write_text(a.report, report.json() + "\n");
  if (!a.out_dir.empty()) {
    write_text((std::filesystem::path(a.out_dir) / "report.json").string(), report.json() + "\n");
    write_text((std::filesystem::path(a.out_dir) / "loss_curve.csv").string(), report.loss_curve_csv());
  }
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
  std::string pred;
  std::string gold;
  std::string overlap_unit = "word";
  std::string vocab;
  std::string per_example;
};

void run_eval(const EvalArgs& a, std::ostream& out) {
  const auto unit = parse_overlap_unit(a.overlap_unit);
  SpanTokenizer tokenizer;
  std::optional<Vocabulary> vocab;
  if (unit == OverlapUnit::kSubword) {
    const auto path = env_or(a.vocab, kVocabEnv);
    if (path.empty()) throw ValidationError("--overlap-unit subword needs --vocab");
    vocab = Vocabulary::load(path);
    tokenizer = subword_tokenizer(*vocab);
  } else {
    tokenizer = word_tokenizer();
  }
  const auto result = evaluate_predictions(load_verdicts(a.pred), load_corpus(a.gold), tokenizer);
  if (!a.per_example.empty()) {
    std::string csv = "example_id,answered_pred,answered_gold,precision,recall,f1\n";
    for (const auto& e : result.per_example) {
      char buf[128];
      std::snprintf(buf, sizeof buf, ",%d,%d,%.6f,%.6f,%.6f\n", e.answered_pred ? 1 : 0, e.answered_gold ? 1 : 0,
                    e.precision, e.recall, e.f1);
      csv += e.example_id + buf;
    }
    write_text(a.per_example, csv);
  }
  nlohmann::ordered_json j;
  j["examples"] = result.per_example.size();
  j["accuracy"] = result.accuracy;
  j["mean_overlap_f1"] = result.mean_overlap_f1;
  j["overlap_unit"] = a.overlap_unit;
  out << "Acc " << format_score(result.accuracy) << "  F1 " << format_score(result.mean_overlap_f1) << '\n';
  out << j.dump() << '\n';
}

// ---- predict --------------------------------------------------------------

struct PredictArgs {
  std::string model;
  std::string vocab;
  std::string essay;
  std::string requirements;
  std::string corpus;
  std::string essay_id;
  std::string rules;
  std::string case_policy = "capitalize_first";
  std::optional<double> beta1, beta2, zeta;
  bool literal_threshold = false;
  bool literal_region = false;
  bool pretty = false;
};

void print_pretty(const std::vector<RequirementVerdict>& verdicts, std::ostream& out) {
  std::size_t i = 0;
  for (const auto& rv : verdicts) {
    const auto& v = rv.verdict;
    char score[32];
    std::snprintf(score, sizeof score, "%+.4f", v.scores.score_final);
    out << '[' << ++i << "] " << rv.requirement << '\n';
    out << "    normalized: " << rv.question.normalized << '\n';
    out << "    verdict:    " << (v.answered ? "answered" : "not answered") << " (" << decision_name(v.decision)
        << ", score_final " << score << ")\n";
    if (v.span) out << "    response:   \"" << v.span->text << "\"\n";
  }
}

void run_predict(const PredictArgs& a, std::ostream& out) {
  const auto model = env_or(a.model, kModelEnv);
  const auto vocab = env_or(a.vocab, kVocabEnv);
  if (model.empty()) throw ValidationError(std::string("no model given (use --model or ") + kModelEnv + ")");
  if (vocab.empty()) throw ValidationError(std::string("no vocabulary given (use --vocab or ") + kVocabEnv + ")");

  auto engine = Engine<float>::load(model, vocab, rules_from(a.rules, a.case_policy));
  if (a.beta1) engine.verification().beta1 = *a.beta1;
  if (a.beta2) engine.verification().beta2 = *a.beta2;
  if (a.zeta) engine.verification().zeta = *a.zeta;
  if (a.literal_threshold) engine.verification().paper_literal_threshold = true;
  engine.locator().paper_literal_region = a.literal_region;

  if (!a.corpus.empty()) {
    const auto corpus = load_corpus(a.corpus);
    for (const auto& rec : predict_corpus(engine.model(), engine.vocab(), engine.rules(), corpus, engine.locator())) {
      out << to_json_line(rec) << '\n';
    }
    return;
  }
  if (a.essay.empty() || a.requirements.empty()) {
    throw ValidationError("predict needs --essay and --requirements, or --corpus");
  }
  EvaluationRequest request;
  request.essay = read_file(a.essay);
  request.requirements = non_empty_lines(a.requirements);
  request.essay_id = a.essay_id.empty() ? std::filesystem::path(a.essay).stem().string() : a.essay_id;
  const auto verdicts = engine.evaluate(request);
  if (a.pretty) {
    print_pretty(verdicts, out);
    return;
  }
  for (std::size_t i = 0; i < verdicts.size(); ++i) {
    const auto rec = make_record(verdicts[i].verdict, "q" + std::to_string(i + 1), request.essay_id, request.essay);
    out << to_json_line(rec) << '\n';
  }
}

std::string help_for(const CLI::App& app) {
  for (const auto* sub : app.get_subcommands()) return sub->help();
  return app.help();
}

}  // namespace

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Task-requirement evaluation for student essays", "essaymrc"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--seed", g.seed, "Seed for every random choice (default 0)")
      ->each([&](const std::string&) { g.seed_given = true; });

  NormalizeArgs na;
  auto* normalize_cmd = app.add_subcommand("normalize", "Rewrite requirements from the examinee's perspective");
  normalize_cmd->add_option("-q,--question", na.questions, "Question text (repeatable)");
  normalize_cmd->add_option("--in", na.in, "File with one question per line")->check(CLI::ExistingFile);
  normalize_cmd->add_option("--rules", na.rules, "Rewrite rule file")->check(CLI::ExistingFile);
  normalize_cmd->add_option("--case-policy", na.case_policy, "preserve | capitalize_first");
  normalize_cmd->add_flag("--json", na.json, "Emit records with the applied rules");

  VocabArgs va;
  auto* vocab_cmd = app.add_subcommand("build-vocab", "Build a subword vocabulary from corpora");
  vocab_cmd->add_option("--in", va.in, "Corpus files (SQuAD .json or .jsonl)")->required()->check(CLI::ExistingFile);
  vocab_cmd->add_option("--size", va.size, "Maximum number of terms");
  vocab_cmd->add_option("--out", va.out, "Output vocabulary file")->required();

  IngestArgs ia;
  auto* ingest_cmd = app.add_subcommand("ingest", "Convert a corpus or generate a synthetic one as .jsonl");
  ingest_cmd->add_option("--in", ia.in, "SQuAD .json or .jsonl input")->check(CLI::ExistingFile);
  ingest_cmd->add_option("--synthetic", ia.synthetic, "Generate instead: essay | encyclopedia");
  ingest_cmd->add_option("--count", ia.count, "Synthetic example count");
  ingest_cmd->add_option("--answerable-ratio", ia.answerable_ratio, "Synthetic answerable ratio");
  ingest_cmd->add_option("--noise-rate", ia.noise_rate, "Synthetic grammar-noise rate");
  ingest_cmd->add_option("--templates", ia.templates, "Template bank JSON")->check(CLI::ExistingFile);
  ingest_cmd->add_option("--out", ia.out, "Output .jsonl")->required();

  StatsArgs sa;
  auto* stats_cmd = app.add_subcommand("stats", "Answer length statistics");
  stats_cmd->add_option("--in", sa.in, "Corpus files; totals cover all of them")->required()->check(CLI::ExistingFile);
  stats_cmd->add_option("--bin-width", sa.bin_width, "Histogram bin width in characters");
  stats_cmd->add_option("--out", sa.out, "Histogram CSV (bin_start,bin_end,count)");
  stats_cmd->add_flag("--json", sa.json, "Machine-readable output");

  TrainArgs ta;
  auto* train_cmd = app.add_subcommand("train", "Train a model on one corpus");
  train_cmd->add_option("--train", ta.train, "Training corpus")->required()->check(CLI::ExistingFile);
  train_cmd->add_option("--dev", ta.dev, "Dev corpus used to choose zeta")->check(CLI::ExistingFile);
  train_cmd->add_option("--vocab", ta.vocab, "Vocabulary file (built from --train and written here if missing)");
  train_cmd->add_option("--vocab-size", ta.vocab_size, "Size when building the vocabulary");
  train_cmd->add_option("--out", ta.out, "Output checkpoint")->required();
  train_cmd->add_option("--init", ta.init, "Continue from this checkpoint")->check(CLI::ExistingFile);
  train_cmd->add_option("--loss-csv", ta.loss_csv, "Write the per-step loss curve here");
  train_cmd->add_option("--precision", ta.precision, "float32 | float64");
  train_cmd->add_option("--epochs", ta.cfg.epochs);
  train_cmd->add_option("--lr", ta.cfg.learning_rate, "Learning rate");
  train_cmd->add_option("--batch-size", ta.cfg.batch_size);
  train_cmd->add_option("--warmup-steps", ta.cfg.warmup_steps);
  train_cmd->add_option("--max-steps", ta.cfg.max_steps);
  train_cmd->add_option("--span-weight", ta.cfg.loss_weights.span);
  train_cmd->add_option("--verifier-weight", ta.cfg.loss_weights.verifier);
  train_cmd->add_option("--layers", ta.model.layers);
  train_cmd->add_option("--d-model", ta.model.d_model);
  train_cmd->add_option("--heads", ta.model.heads);
  train_cmd->add_option("--ffn", ta.model.ffn_inner, "Feed-forward inner width");
  train_cmd->add_option("--max-len", ta.model.max_len);
  train_cmd->add_flag("--quiet", ta.quiet, "No progress lines");

  ExperimentArgs ea;
  auto* experiment_cmd = app.add_subcommand("experiment", "Run a multi-stage experiment plan");
  experiment_cmd->add_option("--plan", ea.plan, "Plan JSON")->required()->check(CLI::ExistingFile);
  experiment_cmd->add_option("--out-dir", ea.out_dir, "Checkpoints, vocabulary, report.json, loss_curve.csv");
  experiment_cmd->add_option("--report", ea.report, "Write the JSON report here");
  experiment_cmd->add_flag("--quiet", ea.quiet, "No progress lines");

  EvalArgs va2;
  auto* eval_cmd = app.add_subcommand("eval", "Score verdict records against a gold corpus");
  eval_cmd->add_option("--pred", va2.pred, "Verdict .jsonl")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--gold", va2.gold, "Gold corpus")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--overlap-unit", va2.overlap_unit, "word | subword");
  eval_cmd->add_option("--vocab", va2.vocab, "Vocabulary for subword overlap");
  eval_cmd->add_option("--per-example", va2.per_example, "Per-example CSV");

  PredictArgs pa;
  auto* predict_cmd = app.add_subcommand("predict", "Evaluate an essay against its requirements");
  predict_cmd->add_option("--model", pa.model, std::string("Checkpoint (default $") + kModelEnv + ")");
  predict_cmd->add_option("--vocab", pa.vocab, std::string("Vocabulary (default $") + kVocabEnv + ")");
  predict_cmd->add_option("--essay", pa.essay, "Essay text file")->check(CLI::ExistingFile);
  predict_cmd->add_option("--requirements", pa.requirements, "One requirement per line")->check(CLI::ExistingFile);
  predict_cmd->add_option("--corpus", pa.corpus, "Predict every example of a corpus instead")
      ->check(CLI::ExistingFile)
      ->excludes("--essay")
      ->excludes("--requirements");
  predict_cmd->add_option("--essay-id", pa.essay_id, "Defaults to the essay file name");
  predict_cmd->add_option("--rules", pa.rules, "Rewrite rule file")->check(CLI::ExistingFile);
  predict_cmd->add_option("--case-policy", pa.case_policy, "preserve | capitalize_first");
  predict_cmd->add_option("--beta1", pa.beta1, "Weight of score_diff");
  predict_cmd->add_option("--beta2", pa.beta2, "Weight of score_ext");
  predict_cmd->add_option("--zeta", pa.zeta, "Decision threshold");
  predict_cmd->add_flag("--paper-literal-threshold", pa.literal_threshold, "Answer when score_final > zeta");
  predict_cmd->add_flag("--paper-literal-region", pa.literal_region, "Accept span positions from m+1");
  predict_cmd->add_flag("--pretty", pa.pretty, "Human-readable output");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << help_for(app);
    return kExitUsage;
  }

  try {
    if (*normalize_cmd) run_normalize(na, out);
    else if (*vocab_cmd) run_build_vocab(va, out);
    else if (*ingest_cmd) run_ingest(ia, g, out);
    else if (*stats_cmd) run_stats(sa, out);
    else if (*train_cmd) run_train(ta, g, out, err);
    else if (*experiment_cmd) run_experiment_cmd(ea, g, out, err);
    else if (*eval_cmd) run_eval(va2, out);
    else if (*predict_cmd) run_predict(pa, out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitOk;
}

}  // namespace essaymrc
