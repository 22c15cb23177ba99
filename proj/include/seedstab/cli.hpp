#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace seedstab {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;

/// Entry point of the `seedstab` tool. `args` excludes the program name.
/// Returns 0 on success, 1 on usage errors, 2 on data errors.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int cli_main(int argc, const char* const* argv);

} // namespace seedstab
