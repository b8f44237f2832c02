#include "essaymrc/corpus.hpp"

#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "essaymrc/errors.hpp"
#include "essaymrc/text.hpp"

namespace essaymrc {
namespace {

using nlohmann::json;

GoldAnswer answer_from_codepoints(const std::string& context, const std::string& text, std::size_t cp_start,
                                  const std::string& id) {
  const auto byte = utf8_byte_offset(context, cp_start);
  if (byte == std::string::npos) {
    throw ValidationError("example " + id + ": answer_start " + std::to_string(cp_start) + " is past the context");
  }
  return GoldAnswer{text, byte};
}

QAExample example_from_record(const json& j) {
  QAExample ex;
  ex.example_id = j.at("id").get<std::string>();
  ex.essay_id = j.value("essay_id", "");
  ex.question = j.at("question").get<std::string>();
  ex.context = j.at("context").get<std::string>();
  ex.answerable = j.at("answerable").get<bool>();
  for (const auto& a : j.value("answers", json::array())) {
    ex.gold_answers.push_back(answer_from_codepoints(ex.context, a.at("text").get<std::string>(),
                                                     a.at("answer_start").get<std::size_t>(), ex.example_id));
  }
  return ex;
}

}  // namespace

void QAExample::validate() const {
  if (answerable == gold_answers.empty()) {
    throw ValidationError("example " + example_id +
                          (answerable ? ": answerable but has no gold answers" : ": unanswerable but has gold answers"));
  }
  for (const auto& a : gold_answers) {
    if (a.char_start > context.size() || context.compare(a.char_start, a.text.size(), a.text) != 0) {
      throw ValidationError("example " + example_id + ": answer '" + a.text + "' does not match the context at offset " +
                            std::to_string(utf8_codepoint_index(context, a.char_start)));
    }
  }
}

std::vector<QAExample> parse_squad(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed SQuAD file: ") + e.what());
  }
  std::vector<QAExample> out;
  try {
    for (const auto& article : root.at("data")) {
      const auto title = article.value("title", "");
      std::size_t paragraph_index = 0;
      for (const auto& paragraph : article.at("paragraphs")) {
        const auto context = paragraph.at("context").get<std::string>();
        const auto essay_id = title + "#" + std::to_string(paragraph_index++);
        for (const auto& qa : paragraph.at("qas")) {
          QAExample ex;
          ex.example_id = qa.at("id").get<std::string>();
          ex.essay_id = essay_id;
          ex.question = qa.at("question").get<std::string>();
          ex.context = context;
          ex.answerable = !qa.value("is_impossible", false);
          if (ex.answerable) {
            for (const auto& a : qa.at("answers")) {
              ex.gold_answers.push_back(answer_from_codepoints(context, a.at("text").get<std::string>(),
                                                               a.at("answer_start").get<std::size_t>(),
                                                               ex.example_id));
            }
          }
          ex.validate();
          out.push_back(std::move(ex));
        }
      }
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("SQuAD schema error: ") + e.what());
  }
  return out;
}

std::vector<QAExample> load_squad(const std::string& path) { return parse_squad(read_file(path)); }

std::vector<QAExample> parse_sed_format(const std::string& text) {
  std::vector<QAExample> out;
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    try {
      out.push_back(example_from_record(json::parse(line)));
    } catch (const json::exception& e) {
      throw ParseError("record line " + std::to_string(line_no) + ": " + e.what());
    }
    out.back().validate();
  }
  return out;
}

std::vector<QAExample> load_sed_format(const std::string& path) { return parse_sed_format(read_file(path)); }

std::string format_sed_record(const QAExample& ex) {
  nlohmann::ordered_json j;
  j["id"] = ex.example_id;
  if (!ex.essay_id.empty()) j["essay_id"] = ex.essay_id;
  j["question"] = ex.question;
  j["context"] = ex.context;
  j["answerable"] = ex.answerable;
  j["answers"] = nlohmann::ordered_json::array();
  for (const auto& a : ex.gold_answers) {
    j["answers"].push_back({{"text", a.text}, {"answer_start", utf8_codepoint_index(ex.context, a.char_start)}});
  }
  return j.dump();
}

void write_sed_format(const std::string& path, const std::vector<QAExample>& examples) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write corpus: " + path);
  for (const auto& ex : examples) out << format_sed_record(ex) << '\n';
}

std::vector<QAExample> load_corpus(const std::string& path) {
  if (path.size() >= 5 && path.compare(path.size() - 5, 5, ".json") == 0) return load_squad(path);
  return load_sed_format(path);
}

std::size_t answer_length_chars(const GoldAnswer& answer) { return utf8_length(trim(answer.text)); }

CorpusStats answer_length_stats(const std::vector<QAExample>& examples, std::size_t bin_width) {
  if (bin_width == 0) throw ConfigError("histogram bin width must be positive");
  CorpusStats stats;
  stats.example_count = examples.size();
  std::vector<std::size_t> counts;
  std::size_t total = 0;
  for (const auto& ex : examples) {
    if (!ex.answerable) continue;
    ++stats.answerable_count;
    for (const auto& a : ex.gold_answers) {
      const auto len = answer_length_chars(a);
      const auto bin = len / bin_width;
      if (bin >= counts.size()) counts.resize(bin + 1, 0);
      ++counts[bin];
      total += len;
      ++stats.answer_count;
    }
  }
  for (std::size_t b = 0; b < counts.size(); ++b) {
    stats.answer_length_histogram.push_back({b * bin_width, (b + 1) * bin_width, counts[b]});
  }
  if (stats.answer_count > 0) {
    stats.mean_answer_length_chars = static_cast<double>(total) / static_cast<double>(stats.answer_count);
  }
  return stats;
}

std::string histogram_csv(const CorpusStats& stats) {
  std::ostringstream out;
  out << "bin_start,bin_end,count\n";
  for (const auto& b : stats.answer_length_histogram) out << b.bin_start << ',' << b.bin_end << ',' << b.count << '\n';
  return out.str();
}

}  // namespace essaymrc
