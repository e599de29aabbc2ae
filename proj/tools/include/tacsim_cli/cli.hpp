#pragma once

#include <ostream>

namespace tacsim::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumerical = 3;

/// Environment variable naming the default config file.
inline constexpr const char* kConfigEnv = "TACSIM_CONFIG";

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace tacsim::cli
