#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "cbctl/problem_file.hpp"

namespace cbctl {

/// Process exit codes of the command-line front end.
enum ExitCode : int {
    kExitOk = 0,
    kExitFailure = 1,  //!< I/O problems, failed plan verification
    kExitParse = 2,
    kExitUnreachable = 3,
    kExitPrecondition = 4,
};

struct CommandOptions {
    std::filesystem::path problem;
    std::filesystem::path out = ".";
    std::optional<std::string> h;  //!< integer or "auto"
    std::optional<int> b;
    std::optional<Regime> regime;
    std::optional<double> tol_term;
    std::optional<double> tol_cb;
    std::optional<int> max_order;
    bool plot = true;
    bool write_report = true;
    std::optional<std::filesystem::path> inputs;  //!< simulate: per-step input CSV
    int h_min = 2;
    int h_max = 6;
};

struct RunReport {
    int exit_code = kExitOk;
    nlohmann::json body;
    std::vector<std::filesystem::path> manifest;
    std::vector<std::string> lines;  //!< human-readable summary
};

/// Folds command-line overrides into the problem (h, b, regime, tolerances).
void apply_overrides(ProblemFile& problem, const CommandOptions& opts);

nlohmann::json to_json(const ControllabilityVerdict& v);

RunReport cmd_analyze(const ProblemFile& problem, const CommandOptions& opts);
RunReport cmd_design(const ProblemFile& problem, const CommandOptions& opts);
RunReport cmd_sweep_h(const ProblemFile& problem, const CommandOptions& opts);
RunReport cmd_simulate(const ProblemFile& problem, const CommandOptions& opts);

/// Loads the problem, runs `verb` and maps failures onto ExitCode values.
int run_command(const std::string& verb, const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace cbctl
