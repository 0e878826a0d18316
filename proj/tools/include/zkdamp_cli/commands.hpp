#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "zkdamp/functionals.hpp"
#include "zkdamp_cli/config.hpp"

namespace zkdamp::cli {

enum ExitCode : int { kPass = 0, kCriteriaFailed = 1, kUsageError = 2, kBlowUp = 3 };

inline constexpr const char* kTimeseriesHeader =
    "t,E,H,grad_sq,h1_sq,dissipation,local_E,local_grad_sq_weighted";

/// One row per record, 17 significant digits, '\n' line endings.
void write_timeseries(const History& history, const std::filesystem::path& path);
/// Inverse of write_timeseries for the eight recorded columns.
History read_timeseries(const std::filesystem::path& path);

/// Commands accepted by run_command: "simulate", every suite name and "all".
const std::vector<std::string>& command_names();

struct CommandOptions {
  bool quiet = false;
};

/// Executes `command`, writes CSV series and summary.jsonl into the output
/// directory and prints one summary line per suite to `out`.
int run_command(const RunConfig& config, const std::string& command, const CommandOptions& options,
                std::ostream& out, std::ostream& err);

}  // namespace zkdamp::cli
