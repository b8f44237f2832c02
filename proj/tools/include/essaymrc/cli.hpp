// Command-line front end. Exit codes: 0 success, 1 runtime error, 2 usage error.
#pragma once

#include <iosfwd>

namespace essaymrc {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Environment variables consulted when --model / --vocab are omitted.
inline constexpr const char* kModelEnv = "ESSAYMRC_MODEL";
inline constexpr const char* kVocabEnv = "ESSAYMRC_VOCAB";

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace essaymrc
