#pragma once

#include "config.hpp"

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace cvloss::cli {

enum ExitCode : int { exit_ok = 0, exit_config = 2, exit_inconclusive = 3, exit_numerical = 4 };

struct CommandResult {
    nlohmann::json results;
    int exit_code = exit_ok;
};

CommandResult single_mode_sweep(const RunConfig& cfg, const std::filesystem::path& out);
CommandResult graph_demo(const RunConfig& cfg, const std::filesystem::path& out);
CommandResult negativity_threshold(const RunConfig& cfg, const std::filesystem::path& out);
CommandResult subtract_map(const RunConfig& cfg, const std::filesystem::path& out);
CommandResult oracle_check(const RunConfig& cfg, const std::filesystem::path& out);

const std::vector<std::string>& command_names();

/// Runs one subcommand, writes schema.json, the command's files and run.json.
int run_command(const std::string& name, const RunConfig& cfg, const std::filesystem::path& out);

// Pieces shared with the tests.

/// Largest e^{-2 xi} in [0, 1] at which W(0) changes sign for the single-mode
/// state diag(n s, n / s) with loss rate gamma on its only mode.
struct Crossing {
    std::string status;  ///< "crossing", "never negative" or "always negative"
    double exp_minus_2xi = 0.0;
};
Crossing single_mode_crossing(double s_db, double n, double gamma, double tolerance = 1e-13);

struct ThresholdResult {
    std::string status;  ///< "crossing", "never negative" or "always negative in range"
    double xi_star = 0.0;
    double lhs = 0.0;
    double lifted_lhs = 0.0;
    double lifted_rhs = 0.0;
};
ThresholdResult find_threshold(const System& sys, Order order, double xi_max, double tolerance);

}  // namespace cvloss::cli
