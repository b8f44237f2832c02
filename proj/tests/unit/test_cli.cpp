#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "essaymrc/cli.hpp"
#include "essaymrc/corpus.hpp"
#include "essaymrc/pipeline.hpp"

namespace essaymrc {
namespace {

namespace fs = std::filesystem;

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "essaymrc");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli_main(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("essaymrc_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  std::string path(const std::string& name) const { return (dir_ / name).string(); }

  fs::path dir_;
};

TEST_F(CliTest, UsageErrorsExitTwoWithHelp) {
  const auto unknown = run({"frobnicate"});
  EXPECT_EQ(unknown.code, kExitUsage);
  EXPECT_NE(unknown.err.find("error:"), std::string::npos);
  EXPECT_NE(unknown.err.find("Usage"), std::string::npos);
  EXPECT_EQ(run({}).code, kExitUsage);
  EXPECT_EQ(run({"stats"}).code, kExitUsage);
  EXPECT_EQ(run({"train", "--train", path("missing.jsonl"), "--out", path("m.ckpt")}).code, kExitUsage);
}

TEST_F(CliTest, HelpExitsZero) {
  const auto help = run({"--help"});
  EXPECT_EQ(help.code, kExitOk);
  EXPECT_NE(help.out.find("predict"), std::string::npos);
  const auto sub = run({"predict", "--help"});
  EXPECT_EQ(sub.code, kExitOk);
  EXPECT_NE(sub.out.find("--paper-literal-threshold"), std::string::npos);
  EXPECT_NE(sub.out.find(kModelEnv), std::string::npos);
}

TEST_F(CliTest, Normalize) {
  const auto r = run({"normalize", "-q", "explain why you need to change the time", "-q", "tell her what to bring"});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  EXPECT_EQ(r.out, "Why I need to change the time\nWhat to bring\n");
  const auto j = run({"normalize", "--json", "-q", "explain why you need to change the time"});
  const auto rec = nlohmann::json::parse(j.out);
  EXPECT_EQ(rec.at("normalized"), "Why I need to change the time");
}

TEST_F(CliTest, IngestIsReproducibleUnderAFixedSeed) {
  for (const char* name : {"a.jsonl", "b.jsonl"}) {
    ASSERT_EQ(run({"--seed", "5", "ingest", "--synthetic", "essay", "--count", "60", "--out", path(name)}).code, kExitOk);
  }
  EXPECT_EQ(slurp(path("a.jsonl")), slurp(path("b.jsonl")));
  ASSERT_EQ(run({"--seed", "6", "ingest", "--synthetic", "essay", "--count", "60", "--out", path("c.jsonl")}).code, kExitOk);
  EXPECT_NE(slurp(path("a.jsonl")), slurp(path("c.jsonl")));
  EXPECT_EQ(load_corpus(path("a.jsonl")).size(), 60u);
}

TEST_F(CliTest, StatsMatchesTheCorpusModule) {
  ASSERT_EQ(run({"--seed", "1", "ingest", "--synthetic", "encyclopedia", "--count", "80", "--out", path("g.jsonl")}).code,
            kExitOk);
  const auto r = run({"stats", "--in", path("g.jsonl"), "--json", "--out", path("h.csv")});
  ASSERT_EQ(r.code, kExitOk) << r.err;
  const auto stats = answer_length_stats(load_corpus(path("g.jsonl")));
  const auto j = nlohmann::json::parse(r.out);
  EXPECT_EQ(j.at("examples").get<std::size_t>(), 80u);
  EXPECT_DOUBLE_EQ(j.at("mean_answer_length_chars").get<double>(), *stats.mean_answer_length_chars);
  EXPECT_EQ(slurp(path("h.csv")), histogram_csv(stats));
}

TEST_F(CliTest, TrainPredictEvalRoundTrip) {
  ASSERT_EQ(run({"--seed", "2", "ingest", "--synthetic", "essay", "--count", "30", "--out", path("t.jsonl")}).code,
            kExitOk);
  const auto train = run({"--seed", "3", "train", "--train", path("t.jsonl"), "--dev", path("t.jsonl"), "--vocab",
                          path("v.txt"), "--vocab-size", "300", "--out", path("m.ckpt"), "--epochs", "1", "--d-model",
                          "16", "--heads", "2", "--ffn", "32", "--layers", "1", "--max-len", "128", "--quiet",
                          "--loss-csv", path("loss.csv")});
  ASSERT_EQ(train.code, kExitOk) << train.err;
  EXPECT_TRUE(fs::exists(path("v.txt")));
  EXPECT_NE(slurp(path("loss.csv")).find("step"), std::string::npos);

  const auto corpus = load_corpus(path("t.jsonl"));
  std::ofstream(path("essay.txt")) << corpus[0].context;
  std::ofstream(path("reqs.txt")) << "* " << corpus[0].question << "\n\n" << corpus[1].question << "\n";

  const auto pred = run({"predict", "--model", path("m.ckpt"), "--vocab", path("v.txt"), "--essay", path("essay.txt"),
                         "--requirements", path("reqs.txt")});
  ASSERT_EQ(pred.code, kExitOk) << pred.err;
  const auto engine = Engine<float>::load(path("m.ckpt"), path("v.txt"));
  const auto expected = engine.evaluate({corpus[0].context, {corpus[0].question, corpus[1].question}, "essay"});
  std::istringstream lines(pred.out);
  std::string line;
  std::size_t i = 0;
  while (std::getline(lines, line)) {
    ASSERT_LT(i, expected.size());
    const auto rec = parse_verdict_line(line);
    EXPECT_EQ(rec.question_id, "q" + std::to_string(i + 1));
    EXPECT_EQ(rec.essay_id, "essay");
    EXPECT_EQ(to_json_line(rec), to_json_line(make_record(expected[i].verdict, rec.question_id, "essay", corpus[0].context)));
    ++i;
  }
  EXPECT_EQ(i, 2u);

  const auto pretty = run({"predict", "--model", path("m.ckpt"), "--vocab", path("v.txt"), "--essay",
                           path("essay.txt"), "--requirements", path("reqs.txt"), "--pretty"});
  EXPECT_NE(pretty.out.find("normalized:"), std::string::npos);

  ASSERT_EQ(setenv(kModelEnv, path("m.ckpt").c_str(), 1), 0);
  ASSERT_EQ(setenv(kVocabEnv, path("v.txt").c_str(), 1), 0);
  const auto via_env = run({"predict", "--essay", path("essay.txt"), "--requirements", path("reqs.txt")});
  unsetenv(kModelEnv);
  unsetenv(kVocabEnv);
  EXPECT_EQ(via_env.out, pred.out);

  const auto corpus_pred = run({"predict", "--model", path("m.ckpt"), "--vocab", path("v.txt"), "--corpus", path("t.jsonl")});
  ASSERT_EQ(corpus_pred.code, kExitOk) << corpus_pred.err;
  std::ofstream(path("p.jsonl")) << corpus_pred.out;
  const auto eval = run({"eval", "--pred", path("p.jsonl"), "--gold", path("t.jsonl"), "--per-example", path("per.csv")});
  ASSERT_EQ(eval.code, kExitOk) << eval.err;
  EXPECT_EQ(eval.out.rfind("Acc ", 0), 0u);
  EXPECT_TRUE(fs::exists(path("per.csv")));
}

TEST_F(CliTest, TrainingIsBitReproducible) {
  ASSERT_EQ(run({"--seed", "2", "ingest", "--synthetic", "essay", "--count", "20", "--out", path("t.jsonl")}).code,
            kExitOk);
  for (const char* name : {"a.ckpt", "b.ckpt"}) {
    const auto r = run({"--seed", "9", "train", "--train", path("t.jsonl"), "--vocab", path("v.txt"), "--out",
                        path(name), "--epochs", "1", "--d-model", "16", "--heads", "2", "--ffn", "32", "--layers", "1",
                        "--max-len", "128", "--quiet"});
    ASSERT_EQ(r.code, kExitOk) << r.err;
  }
  EXPECT_EQ(slurp(path("a.ckpt")), slurp(path("b.ckpt")));
}

TEST_F(CliTest, RuntimeErrorsExitOne) {
  std::ofstream(path("bad.ckpt")) << "not a checkpoint";
  std::ofstream(path("v.txt")) << "[PAD]\n[UNK]\n[CLS]\n[SEP]\n";
  std::ofstream(path("essay.txt")) << "Hello.";
  std::ofstream(path("reqs.txt")) << "say hello\n";
  const auto r = run({"predict", "--model", path("bad.ckpt"), "--vocab", path("v.txt"), "--essay", path("essay.txt"),
                      "--requirements", path("reqs.txt")});
  EXPECT_EQ(r.code, kExitRuntime);
  EXPECT_NE(r.err.find("error:"), std::string::npos);
  unsetenv(kModelEnv);
  EXPECT_EQ(run({"predict", "--vocab", path("v.txt"), "--essay", path("essay.txt"), "--requirements", path("reqs.txt")}).code,
            kExitRuntime);
}

TEST(CliBinary, ExitCodeReachesTheShell) {
  const std::string cmd = std::string(ESSAYMRC_TOOL_PATH) + " frobnicate > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  ASSERT_TRUE(WIFEXITED(status));
  EXPECT_EQ(WEXITSTATUS(status), kExitUsage);
}

}  // namespace
}  // namespace essaymrc
