#pragma once

namespace tailreg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

/// Entry point of the `tailreg` executable.
int run_main(int argc, char** argv);

}  // namespace tailreg::cli
