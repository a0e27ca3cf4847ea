#pragma once

#include <iosfwd>
#include <optional>
#include <string>

#include "json.hpp"

#include "arcfit/certifier.hpp"
#include "arcfit/config.hpp"
#include "arcfit/dualsolver.hpp"
#include "arcfit/problem.hpp"

namespace arcfit {

/// Process exit codes.
enum ExitCode : int {
    kExitOk = 0,        ///< certified or grid_feasible_only
    kExitInput = 1,     ///< bad config, data, flags or document
    kExitFailed = 2,    ///< certificate verdict failed
    kExitInternal = 3,  ///< unexpected numerical breakdown
};

/// `arcfit/result-v1` document. Everything except the "timing" object is a
/// deterministic function of the config and the data.
[[nodiscard]] nlohmann::json result_document(const SolveConfig& config, const ProblemInputs& inputs,
                                             const AssembledProblem& assembled, const SolveResult& result,
                                             const Certificate& certificate, double solve_seconds);

[[nodiscard]] nlohmann::json certificate_to_json(const Certificate& certificate);

/// Throws InputError describing the first structural mismatch.
void validate_result_document(const nlohmann::json& doc);
void validate_plot_document(const nlohmann::json& doc);

/// `arcfit/plot-v1` document: |g| on `points` angles over the whole circle,
/// the data moduli on I, the arcs and the bound on every J component.
[[nodiscard]] nlohmann::json plot_document(const nlohmann::json& result, const SampledBoundaryData& data,
                                           const ArcSystem& arcs, int points = 2048);

/// Subcommands. solve, sweep and generate write to config.out; certify and
/// emit-plot write to `out`. An empty path or "-" means `stdout_stream`.
/// Diagnostics go to `log`; the return value is an ExitCode.
int cmd_solve(const SolveConfig& config, std::ostream& stdout_stream, std::ostream& log);
int cmd_certify(const nlohmann::json& result, const std::optional<SolveConfig>& config, const std::string& out,
                std::ostream& stdout_stream, std::ostream& log);
int cmd_sweep(const SolveConfig& config, std::ostream& stdout_stream, std::ostream& log);
int cmd_emit_plot(const nlohmann::json& result, const std::optional<SolveConfig>& config, const std::string& out,
                  int points, std::ostream& stdout_stream, std::ostream& log);
int cmd_generate(const SolveConfig& config, std::ostream& stdout_stream, std::ostream& log);

/// Full command line (argv[0] is the program name).
int run_cli(int argc, char** argv, std::ostream& stdout_stream, std::ostream& log);

}  // namespace arcfit
