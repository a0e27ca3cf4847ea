#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "arcfit/certifier.hpp"
#include "arcfit/dualsolver.hpp"
#include "arcfit/ingest.hpp"
#include "arcfit/problem.hpp"

namespace arcfit {

/// Key/value pairs of a config file, after overrides.
using ConfigEntries = std::map<std::string, std::string>;

enum class DataKind { synthetic, measurements, samples };

struct DataSource {
    DataKind kind = DataKind::synthetic;
    std::string path;           ///< measurements / samples
    FrequencyMap band;          ///< measurements: Hz band onto an arc of I
    SyntheticCase synthetic;    ///< synthetic
    double density = 200.0;     ///< synthetic samples per radian
};

/// Typed view of a config file. Angles are written in units of pi.
///
///     arcs = 0.25 1.75          # I as consecutive (lo, hi) pairs
///     degree = 16
///     grid = 32
///     bound = 1                 # one value or one per J component
///     case = constant           # or: data = measurements.csv
///     case.value = 2
struct SolveConfig {
    std::vector<Arc> arcs;  ///< radians
    int degree = 8;
    int grid = 16;
    std::vector<double> bound{1.0};
    double tol = 1e-8;
    int max_iter = 500;
    GramChoice gram = GramChoice::automatic;
    WarmStart warm_start = WarmStart::automatic;
    DataSource data;
    std::string out;

    std::string sweep_kind = "m";
    std::vector<int> sweep_values;
    double sweep_coupling = 2.0;
    std::optional<int> sweep_grid;
    std::string sweep_csv;
    int jobs = 1;

    bool certify_refined = false;
    int refine_factor = 8;
    double stationarity_tol = 1e-7;

    ConfigEntries entries;  ///< normalized source of every field above
};

/// Parses `key = value` lines; `#` starts a comment. Errors carry the line number.
[[nodiscard]] ConfigEntries parse_config_entries(std::istream& in);

/// Builds the typed config. Relative data paths are resolved against `base_dir`.
/// Throws InputError naming the offending key.
[[nodiscard]] SolveConfig config_from_entries(ConfigEntries entries, const std::string& base_dir = ".");

/// Reads a config file (optional) and applies overrides, which win.
[[nodiscard]] SolveConfig load_config(const std::optional<std::string>& path, const ConfigEntries& overrides);

[[nodiscard]] std::vector<std::string> known_config_keys();

[[nodiscard]] ArcSystem arc_system(const SolveConfig& config);
[[nodiscard]] SampledBoundaryData load_data(const SolveConfig& config, const ArcSystem& arcs);
[[nodiscard]] ProblemInputs problem_inputs(const SolveConfig& config);
[[nodiscard]] SolverOptions solver_options(const SolveConfig& config);
[[nodiscard]] CertifyOptions certify_options(const SolveConfig& config);

}  // namespace arcfit
