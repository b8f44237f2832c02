// Checkpoint container, little-endian throughout:
//
//   magic        "ESSAYMRC-CKPT" (13 bytes)
//   version      uint32 (currently 1)
//   header_len   uint32, followed by a UTF-8 JSON header holding the encoder
//                config, verification settings (beta1, beta2, zeta, orientation),
//                the vocabulary fingerprint and the tensor count
//   per tensor   uint32 name_len, name bytes, uint32 rows, uint32 cols,
//                rows*cols IEEE-754 float32 values in row-major order
#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>

#include "essaymrc/model.hpp"

namespace essaymrc {

inline constexpr std::string_view kCheckpointMagic = "ESSAYMRC-CKPT";
inline constexpr std::uint32_t kCheckpointVersion = 1;

struct CheckpointMeta {
  std::uint64_t vocab_fingerprint = 0;
  std::size_t vocab_size = 0;
  std::string note;
};

template <typename T>
void write_checkpoint(std::ostream& out, const ModelParams<T>& params, const CheckpointMeta& meta);

/// Throws ParseError on a bad magic string, unsupported version, or a tensor
/// whose name or shape does not match the config in the header.
template <typename T>
ModelParams<T> read_checkpoint(std::istream& in, CheckpointMeta* meta = nullptr);

template <typename T>
void save_checkpoint(const std::string& path, const ModelParams<T>& params, const CheckpointMeta& meta);

template <typename T>
ModelParams<T> load_checkpoint(const std::string& path, CheckpointMeta* meta = nullptr);

}  // namespace essaymrc
