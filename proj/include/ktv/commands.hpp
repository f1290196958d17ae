#pragma once

#include "ktv/config.hpp"

#include <filesystem>
#include <iosfwd>

namespace ktv {

enum ExitCode : int { exit_ok = 0, exit_usage = 1, exit_solver = 2, exit_verification = 3 };

/// Output files land in `out`; `log` receives one-line progress messages and
/// `err` warnings. Exceptions propagate; run_command maps them to exit codes.
int cmd_solve(RunConfig const &cfg, std::filesystem::path const &out, std::ostream &log);
int cmd_analytic(RunConfig const &cfg, std::filesystem::path const &out, std::ostream &log);
int cmd_verify(RunConfig const &cfg, std::filesystem::path const &out, std::ostream &log, std::ostream &err);
/// Runs concurrently, at most TVFLOW_THREADS at a time (default: hardware threads).
int cmd_sweep(RunConfig const &cfg, std::filesystem::path const &out, std::ostream &log);

/// Dispatches and converts failures: configuration errors give exit_usage,
/// numerical and I/O failures exit_solver.
int run_command(Command cmd, RunConfig const &cfg, std::filesystem::path const &out, std::ostream &log,
                std::ostream &err);

} // namespace ktv
