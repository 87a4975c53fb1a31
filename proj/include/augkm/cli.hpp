#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace augkm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigError = 1;
inline constexpr int kExitDataError = 2;

/// Entry point of the `augkm` tool. args[0] is the program name.
/// Subcommands: run, pca, kmeans, inspect. Returns 0 on success, 1 on a
/// usage or configuration error, 2 on a data error.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace augkm
