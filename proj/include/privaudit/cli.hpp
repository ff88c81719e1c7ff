#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

namespace privaudit {

// Exit codes shared by all subcommands.
inline constexpr int kExitOk = 0;
inline constexpr int kExitAnalysisError = 1;
inline constexpr int kExitUsageError = 2;
inline constexpr int kExitDiscrepancies = 3;

struct RunConfig {
    std::filesystem::path datasets_dir; // empty -> bundled seed datasets
    std::string domain = "unknown";
    enum class Format { Table, Json } format = Format::Table;
    bool fail_on_warnings = false;
    bool timestamps = false;
    int workers = 1;
};

/// Runs the CLI with explicit streams; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace privaudit
