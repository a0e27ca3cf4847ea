#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "arcfit/certifier.hpp"
#include "arcfit/dualsolver.hpp"
#include "arcfit/problem.hpp"

namespace arcfit {

/// Result of one (n, m) cell.
struct SweepRecord {
    int n = 0;
    int m = 0;
    double misfit = 0.0;
    double max_modulus = 0.0;          ///< max_k |g(x_k)|
    double saturation_fraction = 0.0;  ///< share of grid points with |g(x_k)| >= 0.9 rho_k
    std::optional<double> delta;       ///< ||c(n, m) - c(n, next m)||_2 (m sweeps only)
    double coefficient_norm = 0.0;
    int iterations = 0;
    std::string status;                ///< solver status, or "error"
    std::string verdict;               ///< certificate verdict, empty on error
    std::string gram;                  ///< Gram matrix actually used
    std::string message;
    double runtime_seconds = 0.0;
    Eigen::VectorXcd coefficients;     ///< kept for distances; not serialized
};

struct SweepReport {
    std::string kind;  ///< "m" or "n"
    std::vector<SweepRecord> records;
    // Trend checks over consecutive cells.
    bool delta_monotone = true;          ///< delta_{i+1} <= 1.1 delta_i (m sweep)
    bool converged = false;              ///< last delta < 1e-6 ||c|| (m sweep)
    bool misfit_nonincreasing = true;    ///< misfit_{i+1} <= misfit_i + 1e-10 (n sweep)
    bool saturation_nondecreasing = true;  ///< fraction_{i+1} >= fraction_i - 1e-12 (n sweep)
    nlohmann::json metadata;             ///< arcs, bounds, data digest, solver settings
};

struct SweepOptions {
    SolverOptions solver;
    CertifyOptions certify;
    int jobs = 1;
};

/// Fixed degree, increasing grid sizes.
[[nodiscard]] SweepReport sweep_m(const ProblemInputs& inputs, int n, const std::vector<int>& m_values,
                                  const SweepOptions& options = {});

/// Increasing degrees with m = coupling * n (at least 1), or a fixed grid size.
[[nodiscard]] SweepReport sweep_n(const ProblemInputs& inputs, const std::vector<int>& n_values, double coupling,
                                  std::optional<int> fixed_m, const SweepOptions& options = {});

/// `arcfit/sweep-v1` document. Runtime fields live under "runtime_seconds" keys.
[[nodiscard]] nlohmann::json sweep_to_json(const SweepReport& report);
void write_sweep_csv(std::ostream& out, const SweepReport& report);

}  // namespace arcfit
