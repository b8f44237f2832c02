#include "essaymrc/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <optional>
#include <random>
#include <set>

#include "essaymrc/errors.hpp"
#include "essaymrc/text.hpp"

namespace essaymrc {
namespace detail {
extern const char* const kEssayBankJson;
extern const char* const kEncyclopediaBankJson;
}  // namespace detail

namespace {

using nlohmann::json;
using Rng = std::mt19937_64;

std::size_t pick(Rng& rng, std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng); }

template <typename C>
const auto& pick_from(Rng& rng, const C& c) {
  return c[pick(rng, c.size())];
}

std::vector<std::string> slot_names(const std::string& text) {
  std::vector<std::string> out;
  std::size_t pos = 0;
  while ((pos = text.find('{', pos)) != std::string::npos) {
    const auto close = text.find('}', pos);
    if (close == std::string::npos) break;
    out.push_back(text.substr(pos + 1, close - pos - 1));
    pos = close + 1;
  }
  return out;
}

class SlotBinder {
 public:
  SlotBinder(const TemplateBank& bank, Rng& rng) : bank_(bank), rng_(rng) {}

  std::string render(const std::string& text) {
    std::string out;
    std::size_t pos = 0;
    while (pos < text.size()) {
      const auto open = text.find('{', pos);
      if (open == std::string::npos) {
        out.append(text, pos);
        break;
      }
      const auto close = text.find('}', open);
      out.append(text, pos, open - pos);
      out.append(bind(text.substr(open + 1, close - open - 1)));
      pos = close + 1;
    }
    return out;
  }

 private:
  std::string expand(const std::string& text, int depth) {
    if (depth > 8) throw ConfigError("slot expansion too deep in '" + text + "'");
    std::string out;
    std::size_t pos = 0;
    while (pos < text.size()) {
      const auto open = text.find('{', pos);
      if (open == std::string::npos) {
        out.append(text, pos);
        break;
      }
      const auto close = text.find('}', open);
      out.append(text, pos, open - pos);
      const auto& values = bank_.slots.at(text.substr(open + 1, close - open - 1));
      out.append(expand(pick_from(rng_, values), depth + 1));
      pos = close + 1;
    }
    return out;
  }

  const std::string& bind(const std::string& name) {
    auto it = bound_.find(name);
    if (it == bound_.end()) {
      it = bound_.emplace(name, expand(pick_from(rng_, bank_.slots.at(name)), 0)).first;
    }
    return it->second;
  }

  const TemplateBank& bank_;
  Rng& rng_;
  std::map<std::string, std::string> bound_;
};

void replace_first(std::string& s, const std::string& from, const std::string& to) {
  const auto pos = s.find(from);
  if (pos != std::string::npos) s.replace(pos, from.size(), to);
}

// One grammar error of the kind second-language writers make.
void inject_noise(std::string& sentence, Rng& rng) {
  static const std::vector<std::pair<std::string, std::string>> kEdits = {
      {" the ", " "}, {" a ", " "},       {" is ", " are "},  {" has ", " have "},
      {" was ", " were "}, {"I am ", "I is "}, {" went ", " go "}, {" bought ", " buyed "},
  };
  std::vector<std::size_t> order(kEdits.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (auto i : order) {
    if (sentence.find(kEdits[i].first) != std::string::npos) {
      replace_first(sentence, kEdits[i].first, kEdits[i].second);
      return;
    }
  }
}

struct MarkedSentence {
  std::string text;
  std::size_t answer_begin = 0;  // byte range of the bracketed span within text
  std::size_t answer_end = 0;
};

MarkedSentence strip_brackets(const std::string& marked) {
  MarkedSentence out;
  for (char c : marked) {
    if (c == '[') {
      out.answer_begin = out.text.size();
    } else if (c == ']') {
      out.answer_end = out.text.size();
    } else {
      out.text.push_back(c);
    }
  }
  return out;
}

RequirementTemplate requirement_from_json(const json& j) {
  RequirementTemplate r;
  r.id = j.at("id").get<std::string>();
  r.questions = j.at("questions").get<std::vector<std::string>>();
  r.answers = j.at("answers").get<std::vector<std::string>>();
  return r;
}

}  // namespace

void TemplateBank::validate() const {
  if (scenarios.empty()) throw ConfigError("template bank has no scenarios");
  auto check_slots = [&](const std::string& text) {
    for (const auto& s : slot_names(text)) {
      auto it = slots.find(s);
      if (it == slots.end() || it->second.empty()) throw ConfigError("unknown or empty slot '{" + s + "}'");
    }
  };
  for (const auto& sc : scenarios) {
    if (sc.requirements.empty()) throw ConfigError("scenario " + sc.id + " has no requirements");
    check_slots(sc.opening);
    for (const auto& r : sc.requirements) {
      if (r.questions.empty() || r.answers.empty()) throw ConfigError("requirement " + r.id + " is incomplete");
      for (const auto& q : r.questions) check_slots(q);
      for (const auto& a : r.answers) {
        check_slots(a);
        const auto open = a.find('[');
        const auto close = a.find(']');
        if (open == std::string::npos || close == std::string::npos || close <= open + 1 ||
            a.find('[', open + 1) != std::string::npos) {
          throw ConfigError("answer template needs exactly one non-empty [span]: " + a);
        }
      }
    }
  }
  for (const auto& [name, values] : slots) {
    for (const auto& v : values) check_slots(v);
  }
  for (const auto& f : fillers) check_slots(f);
}

TemplateBank parse_template_bank(const std::string& json_text) {
  TemplateBank bank;
  try {
    const auto j = json::parse(json_text);
    for (const auto& sc : j.at("scenarios")) {
      ScenarioTemplate s;
      s.id = sc.at("id").get<std::string>();
      s.opening = sc.value("opening", "");
      for (const auto& r : sc.at("requirements")) s.requirements.push_back(requirement_from_json(r));
      bank.scenarios.push_back(std::move(s));
    }
    bank.slots = j.value("slots", json::object()).get<std::map<std::string, std::vector<std::string>>>();
    bank.fillers = j.value("fillers", std::vector<std::string>{});
    bank.closings = j.value("closings", std::vector<std::string>{});
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad template bank: ") + e.what());
  }
  bank.validate();
  return bank;
}

TemplateBank load_template_bank(const std::string& path) { return parse_template_bank(read_file(path)); }

TemplateBank default_bank(SyntheticProfile profile) {
  return parse_template_bank(profile == SyntheticProfile::kEssay ? detail::kEssayBankJson
                                                                 : detail::kEncyclopediaBankJson);
}

SyntheticConfig SyntheticConfig::for_profile(SyntheticProfile profile) {
  SyntheticConfig c;
  c.profile = profile;
  if (profile == SyntheticProfile::kEncyclopedia) {
    c.noise_rate = 0.0;
    c.min_answer_chars = 3;
    c.max_answer_chars = 30;
    c.id_prefix = "enc";
  }
  return c;
}

void SyntheticConfig::validate() const {
  if (!(answerable_ratio >= 0.0 && answerable_ratio <= 1.0)) throw ConfigError("answerable_ratio must be in [0,1]");
  if (!(noise_rate >= 0.0 && noise_rate <= 1.0)) throw ConfigError("noise_rate must be in [0,1]");
  if (min_answer_chars == 0 || min_answer_chars > max_answer_chars) throw ConfigError("bad answer length band");
  if (min_sentences == 0 || min_sentences > max_sentences) throw ConfigError("bad sentence count range");
  if (requirements_per_essay == 0) throw ConfigError("requirements_per_essay must be positive");
  if (requirements_per_essay > max_sentences) {
    throw ConfigError("requirements_per_essay cannot exceed max_sentences");
  }
}

SyntheticProfile parse_profile(const std::string& name) {
  if (name == "essay") return SyntheticProfile::kEssay;
  if (name == "encyclopedia") return SyntheticProfile::kEncyclopedia;
  throw ConfigError("unknown synthetic profile: " + name);
}

const char* profile_name(SyntheticProfile profile) {
  return profile == SyntheticProfile::kEssay ? "essay" : "encyclopedia";
}

SyntheticCorpus generate_synthetic(const SyntheticConfig& config, std::uint64_t seed) {
  return generate_synthetic(config, default_bank(config.profile), seed);
}

SyntheticCorpus generate_synthetic(const SyntheticConfig& config, const TemplateBank& bank, std::uint64_t seed) {
  config.validate();
  bank.validate();
  Rng rng(seed);

  const auto answerable_total =
      static_cast<std::size_t>(std::llround(config.answerable_ratio * static_cast<double>(config.count)));
  std::vector<bool> labels(config.count, false);
  std::fill(labels.begin(), labels.begin() + static_cast<std::ptrdiff_t>(answerable_total), true);
  std::shuffle(labels.begin(), labels.end(), rng);

  SyntheticCorpus corpus;
  corpus.examples.reserve(config.count);
  std::size_t next = 0;
  std::size_t essay_index = 0;
  constexpr int kMaxAttempts = 1000;

  while (next < config.count) {
    const auto& scenario = pick_from(rng, bank.scenarios);
    const std::size_t k = std::min({config.requirements_per_essay, scenario.requirements.size(),
                                    config.count - next});
    std::vector<std::size_t> order(scenario.requirements.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);

    struct Planned {
      std::string question;
      std::optional<MarkedSentence> answer;
    };
    std::vector<Planned> planned;
    std::vector<std::string> body;
    std::vector<std::optional<std::size_t>> body_answer;  // index into planned
    std::string opening;
    bool ok = false;

    for (int attempt = 0; attempt < kMaxAttempts && !ok; ++attempt) {
      SlotBinder binder(bank, rng);
      planned.clear();
      body.clear();
      body_answer.clear();
      ok = true;
      for (std::size_t j = 0; j < k && ok; ++j) {
        const auto& req = scenario.requirements[order[j]];
        Planned p;
        p.question = binder.render(pick_from(rng, req.questions));
        if (labels[next + j]) {
          std::string marked = binder.render(pick_from(rng, req.answers));
          if (std::bernoulli_distribution(config.noise_rate)(rng)) inject_noise(marked, rng);
          auto sentence = strip_brackets(marked);
          const auto len = utf8_length(trim(sentence.text.substr(sentence.answer_begin,
                                                                 sentence.answer_end - sentence.answer_begin)));
          if (len < config.min_answer_chars || len > config.max_answer_chars) ok = false;
          p.answer = std::move(sentence);
        }
        planned.push_back(std::move(p));
      }
      if (!ok) continue;

      std::vector<std::string> pool;
      for (const auto& f : bank.fillers) pool.push_back(binder.render(f));
      for (std::size_t j = k; j < order.size(); ++j) {
        const auto& req = scenario.requirements[order[j]];
        pool.push_back(strip_brackets(binder.render(pick_from(rng, req.answers))).text);
      }
      std::shuffle(pool.begin(), pool.end(), rng);

      std::size_t answers = 0;
      for (std::size_t j = 0; j < planned.size(); ++j) {
        if (planned[j].answer) {
          body.push_back(planned[j].answer->text);
          body_answer.push_back(j);
          ++answers;
        }
      }
      const auto lo = std::max(config.min_sentences, answers);
      const auto hi = std::max(config.max_sentences, lo);
      const auto total = std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
      for (std::size_t i = 0; body.size() < total && i < pool.size(); ++i) {
        std::string s = pool[i];
        if (std::bernoulli_distribution(config.noise_rate)(rng)) inject_noise(s, rng);
        body.push_back(std::move(s));
        body_answer.push_back(std::nullopt);
      }
      std::vector<std::size_t> perm(body.size());
      for (std::size_t i = 0; i < perm.size(); ++i) perm[i] = i;
      std::shuffle(perm.begin(), perm.end(), rng);
      std::vector<std::string> b2;
      std::vector<std::optional<std::size_t>> a2;
      for (auto i : perm) {
        b2.push_back(body[i]);
        a2.push_back(body_answer[i]);
      }
      body = std::move(b2);
      body_answer = std::move(a2);
      opening = binder.render(scenario.opening);
    }
    if (!ok) throw ConfigError("could not generate answers inside the configured length band");

    std::string essay;
    if (!opening.empty()) essay = opening + "\n";
    std::vector<std::optional<GoldAnswer>> gold(planned.size());
    for (std::size_t i = 0; i < body.size(); ++i) {
      if (i > 0) essay.push_back(' ');
      if (body_answer[i]) {
        const auto& sentence = *planned[*body_answer[i]].answer;
        gold[*body_answer[i]] =
            GoldAnswer{sentence.text.substr(sentence.answer_begin, sentence.answer_end - sentence.answer_begin),
                       essay.size() + sentence.answer_begin};
      }
      essay += body[i];
    }
    if (!bank.closings.empty()) essay += "\n" + pick_from(rng, bank.closings);

    const std::string essay_id = config.id_prefix + "-e" + std::to_string(essay_index);
    for (std::size_t j = 0; j < planned.size(); ++j) {
      QAExample ex;
      ex.example_id = essay_id + "-r" + std::to_string(j);
      ex.essay_id = essay_id;
      ex.question = planned[j].question;
      ex.context = essay;
      ex.answerable = gold[j].has_value();
      if (gold[j]) {
        corpus.answer_lengths.push_back(answer_length_chars(*gold[j]));
        ex.gold_answers.push_back(std::move(*gold[j]));
      }
      ex.validate();
      corpus.examples.push_back(std::move(ex));
    }
    next += planned.size();
    ++essay_index;
  }
  return corpus;
}

}  // namespace essaymrc
