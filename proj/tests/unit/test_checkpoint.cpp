#include <gtest/gtest.h>

#include <filesystem>
#include <sstream>

#include "essaymrc/checkpoint.hpp"
#include "essaymrc/errors.hpp"
#include "test_support.hpp"

namespace essaymrc {
namespace {

using testing::scramble;
using testing::small_vocab;
using testing::tiny_config;

template <typename T>
void expect_same_tensors(ModelParams<T>& a, ModelParams<T>& b) {
  std::vector<Matrix<T>> left;
  visit_model(a, [&](const std::string&, Matrix<T>& m) { left.push_back(m); });
  std::size_t i = 0;
  visit_model(b, [&](const std::string& name, Matrix<T>& m) {
    ASSERT_LT(i, left.size());
    EXPECT_TRUE(left[i++] == m) << name;
  });
  EXPECT_EQ(i, left.size());
}

ModelParams<float> sample_model() {
  auto p = init_model<float>(tiny_config(small_vocab().size(), 5));
  scramble(p, 8);
  p.verification = {0.25, 0.75, -1.5, true};
  return p;
}

std::string serialized(const ModelParams<float>& p, const CheckpointMeta& meta = {42, 16, "note"}) {
  std::ostringstream out(std::ios::binary);
  write_checkpoint(out, p, meta);
  return out.str();
}

TEST(Checkpoint, FloatRoundTripIsExact) {
  auto p = sample_model();
  std::istringstream in(serialized(p), std::ios::binary);
  CheckpointMeta meta;
  auto q = read_checkpoint<float>(in, &meta);
  expect_same_tensors(p, q);
  EXPECT_EQ(meta.vocab_fingerprint, 42u);
  EXPECT_EQ(meta.vocab_size, 16u);
  EXPECT_EQ(meta.note, "note");
  EXPECT_EQ(q.config().d_model, p.config().d_model);
  EXPECT_EQ(q.config().residual_norm, p.config().residual_norm);
  EXPECT_EQ(q.verification.beta1, 0.25);
  EXPECT_EQ(q.verification.beta2, 0.75);
  EXPECT_EQ(q.verification.zeta, -1.5);
  EXPECT_TRUE(q.verification.paper_literal_threshold);
}

TEST(Checkpoint, DoubleParamsRoundToFloat) {
  auto p = init_model<double>(tiny_config(small_vocab().size(), 3));
  scramble(p, 2);
  std::ostringstream out(std::ios::binary);
  write_checkpoint(out, p, {});
  std::istringstream in(out.str(), std::ios::binary);
  auto q = read_checkpoint<double>(in);
  auto rounded = cast_model<double>(cast_model<float>(p));
  expect_same_tensors(rounded, q);
}

TEST(Checkpoint, ReserializationIsByteIdentical) {
  const auto bytes = serialized(sample_model());
  std::istringstream in(bytes, std::ios::binary);
  EXPECT_EQ(serialized(read_checkpoint<float>(in)), bytes);
}

TEST(Checkpoint, FileRoundTrip) {
  auto p = sample_model();
  const auto path = (std::filesystem::temp_directory_path() / "essaymrc_test.ckpt").string();
  save_checkpoint(path, p, {7, 16, ""});
  auto q = load_checkpoint<float>(path);
  expect_same_tensors(p, q);
  std::filesystem::remove(path);
  EXPECT_THROW(load_checkpoint<float>(path), Error);
}

TEST(Checkpoint, BadMagic) {
  auto bytes = serialized(sample_model());
  bytes[0] = 'X';
  std::istringstream in(bytes, std::ios::binary);
  EXPECT_THROW(read_checkpoint<float>(in), ParseError);
}

TEST(Checkpoint, UnsupportedVersion) {
  auto bytes = serialized(sample_model());
  bytes[kCheckpointMagic.size()] = 9;
  std::istringstream in(bytes, std::ios::binary);
  EXPECT_THROW(read_checkpoint<float>(in), ParseError);
}

TEST(Checkpoint, TruncatedAtEveryPrefixLength) {
  const auto bytes = serialized(sample_model());
  for (std::size_t cut = 0; cut < bytes.size(); cut += 97) {
    std::istringstream in(bytes.substr(0, cut), std::ios::binary);
    EXPECT_THROW(read_checkpoint<float>(in), ParseError) << cut;
  }
}

TEST(Checkpoint, RenamedTensorIsRejected) {
  auto bytes = serialized(sample_model());
  const auto pos = bytes.find("span.w_start");
  ASSERT_NE(pos, std::string::npos);
  bytes[pos] = 'x';
  std::istringstream in(bytes, std::ios::binary);
  EXPECT_THROW(read_checkpoint<float>(in), ParseError);
}

}  // namespace
}  // namespace essaymrc
