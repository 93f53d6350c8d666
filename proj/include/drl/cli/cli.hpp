#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace drl::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Entry point: `drl <command> [--config FILE] [--out DIR] [--set key=value]...`
/// with commands train, selfplay, match, sweep, oracle, gradcheck and
/// determinism. Returns 0 on success, 1 on usage errors and 2 on runtime or
/// training failures.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run(int argc, char** argv);

}  // namespace drl::cli
