#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace effstab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDomainError = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kReportSchemaVersion = 1;

// Runs one invocation. `args` excludes the program name. The report goes to
// `out` unless --out names a file; usage text and diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err);

}  // namespace effstab::cli
