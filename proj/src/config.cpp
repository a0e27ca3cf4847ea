#include "arcfit/config.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <istream>
#include <sstream>

#include "arcfit/errors.hpp"

namespace arcfit {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0;
    std::size_t e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

// Whitespace- or comma-separated tokens.
std::vector<std::string> tokens(const std::string& value) {
    std::string spaced = value;
    std::replace(spaced.begin(), spaced.end(), ',', ' ');
    std::istringstream in(spaced);
    std::vector<std::string> out;
    for (std::string t; in >> t;) out.push_back(t);
    return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& why) { throw InputError("config key '" + key + "': " + why); }

double to_double(const std::string& key, const std::string& text) {
    char* end = nullptr;
    errno = 0;
    const double v = std::strtod(text.c_str(), &end);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE || !std::isfinite(v))
        bad(key, "expected a number, got '" + text + "'");
    return v;
}

long to_long(const std::string& key, const std::string& text) {
    char* end = nullptr;
    errno = 0;
    const long v = std::strtol(text.c_str(), &end, 10);
    if (text.empty() || end != text.c_str() + text.size() || errno == ERANGE)
        bad(key, "expected an integer, got '" + text + "'");
    return v;
}

int to_int(const std::string& key, const std::string& text, long lo) {
    const long v = to_long(key, text);
    if (v < lo || v > 100000000L) bad(key, "value " + text + " out of range");
    return static_cast<int>(v);
}

std::vector<double> to_doubles(const std::string& key, const std::string& value) {
    std::vector<double> out;
    for (const auto& t : tokens(value)) out.push_back(to_double(key, t));
    if (out.empty()) bad(key, "expected at least one number");
    return out;
}

std::vector<cplx> to_complex_list(const std::string& key, const std::string& value) {
    std::vector<cplx> out;
    std::istringstream in(value);
    for (std::string item; std::getline(in, item, ',');) {
        item = trim(item);
        if (item.empty()) bad(key, "empty list element");
        try {
            out.push_back(parse_complex(item));
        } catch (const InputError& e) {
            bad(key, e.what());
        }
    }
    if (out.empty()) bad(key, "expected at least one value");
    return out;
}

bool to_bool(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1" || value == "yes") return true;
    if (value == "false" || value == "0" || value == "no") return false;
    bad(key, "expected true or false");
}

const std::vector<std::string>& keys() {
    static const std::vector<std::string> list = {
        "arcs",       "degree",          "grid",          "bound",          "tol",
        "max_iter",   "gram",            "warm_start",    "data",           "data.format",
        "band",       "band.arc",        "case",          "case.value",     "case.coefficients",
        "case.zeros", "case.scale",      "case.expression", "case.noise",   "case.seed",
        "density",    "out",             "sweep.kind",    "sweep.values",   "sweep.coupling",
        "sweep.grid", "sweep.csv",       "jobs",          "certify.refined", "certify.refine_factor",
        "certify.stationarity_tol",
    };
    return list;
}

}  // namespace

std::vector<std::string> known_config_keys() { return keys(); }

ConfigEntries parse_config_entries(std::istream& in) {
    ConfigEntries entries;
    std::string raw;
    std::size_t line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const auto hash = raw.find('#');
        const std::string text = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
        if (text.empty()) continue;
        const auto eq = text.find('=');
        if (eq == std::string::npos)
            throw LocatedInputError("config line " + std::to_string(line) + ": expected 'key = value'", line);
        const std::string key = trim(text.substr(0, eq));
        const std::string value = trim(text.substr(eq + 1));
        if (std::find(keys().begin(), keys().end(), key) == keys().end())
            throw LocatedInputError("config line " + std::to_string(line) + ": unknown key '" + key + "'", line);
        if (entries.count(key))
            throw LocatedInputError("config line " + std::to_string(line) + ": duplicate key '" + key + "'", line);
        entries[key] = value;
    }
    return entries;
}

SolveConfig config_from_entries(ConfigEntries entries, const std::string& base_dir) {
    for (const auto& [key, value] : entries)
        if (std::find(keys().begin(), keys().end(), key) == keys().end()) bad(key, "unknown key");

    SolveConfig cfg;
    auto has = [&](const char* key) { return entries.count(key) > 0; };
    const auto get = [&](const char* key) -> const std::string& { return entries.at(key); };

    if (!has("arcs")) bad("arcs", "missing; give I as pairs of angles in units of pi");
    {
        const auto v = to_doubles("arcs", get("arcs"));
        if (v.size() % 2 != 0) bad("arcs", "expected an even number of angles (lo hi pairs)");
        for (std::size_t i = 0; i < v.size(); i += 2) cfg.arcs.push_back({v[i] * kPi, v[i + 1] * kPi});
    }
    if (has("degree")) cfg.degree = to_int("degree", get("degree"), 0);
    if (has("grid")) cfg.grid = to_int("grid", get("grid"), 1);
    if (has("bound")) {
        cfg.bound = to_doubles("bound", get("bound"));
        for (double b : cfg.bound)
            if (!(b > 0.0)) bad("bound", "bounds must be positive");
    }
    if (has("tol")) {
        cfg.tol = to_double("tol", get("tol"));
        if (!(cfg.tol > 0.0)) bad("tol", "must be positive");
    }
    if (has("max_iter")) cfg.max_iter = to_int("max_iter", get("max_iter"), 0);
    if (has("gram")) {
        const auto g = gram_choice_from_string(get("gram"));
        if (!g) bad("gram", "expected closed_form, quadrature or automatic");
        cfg.gram = *g;
    }
    if (has("warm_start")) {
        const std::string& w = get("warm_start");
        if (w == "automatic")
            cfg.warm_start = WarmStart::automatic;
        else if (w == "interior_point")
            cfg.warm_start = WarmStart::interior_point;
        else if (w == "none")
            cfg.warm_start = WarmStart::none;
        else
            bad("warm_start", "expected automatic, interior_point or none");
    }

    // Data source: a file or a synthetic case, not both.
    if (has("data") == has("case")) bad(has("data") ? "data" : "case", "give exactly one of 'data' and 'case'");
    if (has("data")) {
        std::filesystem::path p(get("data"));
        if (p.is_relative()) p = std::filesystem::path(base_dir) / p;
        cfg.data.path = p.lexically_normal().string();
        entries["data"] = cfg.data.path;
        const std::string format = has("data.format") ? get("data.format") : "measurements";
        if (format == "measurements") {
            cfg.data.kind = DataKind::measurements;
            if (!has("band") || !has("band.arc")) bad("band", "measurement files need 'band' (Hz) and 'band.arc' (units of pi)");
            const auto hz = to_doubles("band", get("band"));
            const auto arc = to_doubles("band.arc", get("band.arc"));
            if (hz.size() != 2) bad("band", "expected two frequencies");
            if (arc.size() != 2) bad("band.arc", "expected two angles");
            cfg.data.band = {hz[0], hz[1], arc[0] * kPi, arc[1] * kPi};
            cfg.data.band.validate();
        } else if (format == "samples") {
            cfg.data.kind = DataKind::samples;
        } else {
            bad("data.format", "expected measurements or samples");
        }
    } else {
        cfg.data.kind = DataKind::synthetic;
        const auto kind = case_kind_from_string(get("case"));
        if (!kind) bad("case", "expected polynomial_trace, constant, blaschke_like, filterlike or custom");
        SyntheticCase& sc = cfg.data.synthetic;
        sc.kind = *kind;
        if (has("case.value")) sc.value = to_complex_list("case.value", get("case.value")).at(0);
        if (has("case.coefficients")) sc.coefficients = to_complex_list("case.coefficients", get("case.coefficients"));
        if (has("case.zeros")) sc.zeros = to_complex_list("case.zeros", get("case.zeros"));
        if (has("case.scale")) sc.scale = to_double("case.scale", get("case.scale"));
        if (has("case.expression")) sc.expression = get("case.expression");
        if (has("case.noise")) sc.noise = to_double("case.noise", get("case.noise"));
        if (has("case.seed")) sc.seed = static_cast<std::uint64_t>(to_long("case.seed", get("case.seed")));
        if (has("density")) {
            cfg.data.density = to_double("density", get("density"));
            if (!(cfg.data.density > 0.0)) bad("density", "must be positive");
        }
        try {
            sc.validate();
        } catch (const InputError& e) {
            bad("case", e.what());
        }
    }

    if (has("out")) cfg.out = get("out");
    if (has("sweep.kind")) {
        cfg.sweep_kind = get("sweep.kind");
        if (cfg.sweep_kind != "m" && cfg.sweep_kind != "n") bad("sweep.kind", "expected m or n");
    }
    if (has("sweep.values"))
        for (const auto& t : tokens(get("sweep.values"))) cfg.sweep_values.push_back(to_int("sweep.values", t, 0));
    if (has("sweep.coupling")) cfg.sweep_coupling = to_double("sweep.coupling", get("sweep.coupling"));
    if (has("sweep.grid")) cfg.sweep_grid = to_int("sweep.grid", get("sweep.grid"), 1);
    if (has("sweep.csv")) cfg.sweep_csv = get("sweep.csv");
    if (has("jobs")) cfg.jobs = to_int("jobs", get("jobs"), 1);
    if (has("certify.refined")) cfg.certify_refined = to_bool("certify.refined", get("certify.refined"));
    if (has("certify.refine_factor")) cfg.refine_factor = to_int("certify.refine_factor", get("certify.refine_factor"), 1);
    if (has("certify.stationarity_tol"))
        cfg.stationarity_tol = to_double("certify.stationarity_tol", get("certify.stationarity_tol"));

    // Validate the arcs now so that errors surface at load time.
    (void)arc_system(cfg);
    cfg.entries = std::move(entries);
    return cfg;
}

SolveConfig load_config(const std::optional<std::string>& path, const ConfigEntries& overrides) {
    ConfigEntries entries;
    std::string base_dir = ".";
    if (path) {
        std::ifstream in(*path);
        if (!in) throw InputError("cannot open config '" + *path + "'");
        entries = parse_config_entries(in);
        base_dir = std::filesystem::path(*path).parent_path().string();
        if (base_dir.empty()) base_dir = ".";
    }
    for (const auto& [key, value] : overrides) entries[key] = value;
    return config_from_entries(std::move(entries), base_dir);
}

ArcSystem arc_system(const SolveConfig& config) { return ArcSystem(config.arcs); }

SampledBoundaryData load_data(const SolveConfig& config, const ArcSystem& arcs) {
    switch (config.data.kind) {
        case DataKind::synthetic: return generate_synthetic(config.data.synthetic, arcs, config.data.density);
        case DataKind::samples: return read_samples_file(config.data.path);
        case DataKind::measurements:
            if (!config.data.band.lands_in(arcs))
                throw InputError("band.arc does not lie inside a single arc of I");
            return load_measurements(config.data.path, config.data.band);
    }
    throw InternalError("unknown data kind");
}

ProblemInputs problem_inputs(const SolveConfig& config) {
    ArcSystem arcs = arc_system(config);
    SampledBoundaryData data = load_data(config, arcs);
    return ProblemInputs{std::move(arcs), std::move(data), config.bound, config.gram};
}

SolverOptions solver_options(const SolveConfig& config) {
    SolverOptions options;
    options.tol_kkt = config.tol;
    options.max_iter = config.max_iter;
    options.warm_start = config.warm_start;
    return options;
}

CertifyOptions certify_options(const SolveConfig& config) {
    CertifyOptions options;
    options.feasibility_tol = config.tol;
    options.stationarity_tol = config.stationarity_tol;
    options.refined = config.certify_refined;
    options.refine_factor = config.refine_factor;
    return options;
}

}  // namespace arcfit
