#include "essaymrc/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <nlohmann/json.hpp>
#include <ostream>
#include <vector>

#include "essaymrc/errors.hpp"

namespace essaymrc {
namespace {

using nlohmann::json;

void put_u32(std::ostream& out, std::uint32_t v) {
  std::array<char, 4> b{};
  for (int i = 0; i < 4; ++i) b[static_cast<std::size_t>(i)] = static_cast<char>((v >> (8 * i)) & 0xFFu);
  out.write(b.data(), 4);
}

std::uint32_t get_u32(std::istream& in) {
  std::array<unsigned char, 4> b{};
  if (!in.read(reinterpret_cast<char*>(b.data()), 4)) throw ParseError("truncated checkpoint");
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | b[static_cast<std::size_t>(i)];
  return v;
}

std::string get_bytes(std::istream& in, std::size_t n) {
  std::string s(n, '\0');
  if (n > 0 && !in.read(s.data(), static_cast<std::streamsize>(n))) throw ParseError("truncated checkpoint");
  return s;
}

json config_to_json(const EncoderConfig& c) {
  return json{{"layers", c.layers},       {"d_model", c.d_model},   {"heads", c.heads},
              {"ffn_inner", c.ffn_inner}, {"max_len", c.max_len},   {"vocab_size", c.vocab_size},
              {"seed", c.seed},           {"residual_norm", c.residual_norm},
              {"init_std", c.init_std},   {"norm_eps", c.norm_eps}};
}

EncoderConfig config_from_json(const json& j) {
  EncoderConfig c;
  c.layers = j.at("layers").get<std::size_t>();
  c.d_model = j.at("d_model").get<std::size_t>();
  c.heads = j.at("heads").get<std::size_t>();
  c.ffn_inner = j.at("ffn_inner").get<std::size_t>();
  c.max_len = j.at("max_len").get<std::size_t>();
  c.vocab_size = j.at("vocab_size").get<std::size_t>();
  c.seed = j.at("seed").get<std::uint64_t>();
  c.residual_norm = j.at("residual_norm").get<bool>();
  c.init_std = j.at("init_std").get<double>();
  c.norm_eps = j.at("norm_eps").get<double>();
  return c;
}

}  // namespace

template <typename T>
void write_checkpoint(std::ostream& out, const ModelParams<T>& params, const CheckpointMeta& meta) {
  std::size_t count = 0;
  visit_model(params, [&](const std::string&, const Matrix<T>&) { ++count; });

  const auto& v = params.verification;
  json header{{"config", config_to_json(params.config())},
              {"verification",
               {{"beta1", v.beta1}, {"beta2", v.beta2}, {"zeta", v.zeta},
                {"paper_literal_threshold", v.paper_literal_threshold}}},
              {"vocab_fingerprint", meta.vocab_fingerprint},
              {"vocab_size", meta.vocab_size},
              {"note", meta.note},
              {"tensor_count", count}};
  const std::string text = header.dump();

  out.write(kCheckpointMagic.data(), static_cast<std::streamsize>(kCheckpointMagic.size()));
  put_u32(out, kCheckpointVersion);
  put_u32(out, static_cast<std::uint32_t>(text.size()));
  out.write(text.data(), static_cast<std::streamsize>(text.size()));

  visit_model(params, [&](const std::string& name, const Matrix<T>& m) {
    put_u32(out, static_cast<std::uint32_t>(name.size()));
    out.write(name.data(), static_cast<std::streamsize>(name.size()));
    put_u32(out, static_cast<std::uint32_t>(m.rows()));
    put_u32(out, static_cast<std::uint32_t>(m.cols()));
    for (Index i = 0; i < m.size(); ++i) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(m.data()[i]));
      put_u32(out, bits);
    }
  });
  if (!out) throw Error("failed writing checkpoint");
}

template <typename T>
ModelParams<T> read_checkpoint(std::istream& in, CheckpointMeta* meta) {
  if (get_bytes(in, kCheckpointMagic.size()) != kCheckpointMagic) throw ParseError("not a checkpoint (bad magic)");
  const auto version = get_u32(in);
  if (version != kCheckpointVersion) {
    throw ParseError("unsupported checkpoint version " + std::to_string(version));
  }
  json header;
  try {
    header = json::parse(get_bytes(in, get_u32(in)));
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad checkpoint header: ") + e.what());
  }

  ModelParams<T> params;
  try {
    const auto config = config_from_json(header.at("config"));
    config.validate();
    params = init_model<T>(config);
    const auto& v = header.at("verification");
    params.verification.beta1 = v.at("beta1").get<double>();
    params.verification.beta2 = v.at("beta2").get<double>();
    params.verification.zeta = v.at("zeta").get<double>();
    params.verification.paper_literal_threshold = v.at("paper_literal_threshold").get<bool>();
    if (meta) {
      meta->vocab_fingerprint = header.at("vocab_fingerprint").get<std::uint64_t>();
      meta->vocab_size = header.at("vocab_size").get<std::size_t>();
      meta->note = header.value("note", "");
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad checkpoint header: ") + e.what());
  }

  visit_model(params, [&](const std::string& name, Matrix<T>& m) {
    const auto stored = get_bytes(in, get_u32(in));
    if (stored != name) throw ParseError("checkpoint tensor '" + stored + "' where '" + name + "' was expected");
    const auto rows = get_u32(in);
    const auto cols = get_u32(in);
    if (rows != m.rows() || cols != m.cols()) throw ParseError("shape mismatch for tensor " + name);
    for (Index i = 0; i < m.size(); ++i) m.data()[i] = static_cast<T>(std::bit_cast<float>(get_u32(in)));
  });
  return params;
}

template <typename T>
void save_checkpoint(const std::string& path, const ModelParams<T>& params, const CheckpointMeta& meta) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write checkpoint: " + path);
  write_checkpoint(out, params, meta);
}

template <typename T>
ModelParams<T> load_checkpoint(const std::string& path, CheckpointMeta* meta) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open checkpoint: " + path);
  return read_checkpoint<T>(in, meta);
}

template void write_checkpoint(std::ostream&, const ModelParams<float>&, const CheckpointMeta&);
template void write_checkpoint(std::ostream&, const ModelParams<double>&, const CheckpointMeta&);
template ModelParams<float> read_checkpoint<float>(std::istream&, CheckpointMeta*);
template ModelParams<double> read_checkpoint<double>(std::istream&, CheckpointMeta*);
template void save_checkpoint(const std::string&, const ModelParams<float>&, const CheckpointMeta&);
template void save_checkpoint(const std::string&, const ModelParams<double>&, const CheckpointMeta&);
template ModelParams<float> load_checkpoint<float>(const std::string&, CheckpointMeta*);
template ModelParams<double> load_checkpoint<double>(const std::string&, CheckpointMeta*);

}  // namespace essaymrc
