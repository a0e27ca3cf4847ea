#include "arcfit/cli.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"

#include "arcfit/errors.hpp"
#include "arcfit/sweep.hpp"

namespace arcfit {

namespace {

using nlohmann::json;

json arcs_json(const std::vector<Arc>& arcs) {
    json out = json::array();
    for (const Arc& a : arcs) out.push_back({a.lo, a.hi});
    return out;
}

json complex_json(const Eigen::VectorXcd& v) {
    json out = json::array();
    for (Eigen::Index j = 0; j < v.size(); ++j) out.push_back({v(j).real(), v(j).imag()});
    return out;
}

json real_json(const Eigen::VectorXd& v) {
    json out = json::array();
    for (Eigen::Index j = 0; j < v.size(); ++j) out.push_back(v(j));
    return out;
}

Eigen::VectorXcd complex_from_json(const json& arr) {
    Eigen::VectorXcd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t j = 0; j < arr.size(); ++j)
        v(static_cast<Eigen::Index>(j)) = {arr[j].at(0).get<double>(), arr[j].at(1).get<double>()};
    return v;
}

Eigen::VectorXd real_from_json(const json& arr) {
    Eigen::VectorXd v(static_cast<Eigen::Index>(arr.size()));
    for (std::size_t j = 0; j < arr.size(); ++j) v(static_cast<Eigen::Index>(j)) = arr[j].get<double>();
    return v;
}

// Bound of every J component (zero-length ones included) as configured.
std::vector<double> bound_per_component(const ArcSystem& arcs, const std::vector<double>& bound) {
    const std::size_t comps = arcs.constraint_arcs().size();
    if (bound.size() == 1) return std::vector<double>(comps, bound[0]);
    if (bound.size() != comps)
        throw InputError("bound needs one value or one per J component (" + std::to_string(comps) + ")");
    return bound;
}

void write_document(const json& doc, const std::string& path, std::ostream& stdout_stream) {
    const std::string text = doc.dump(2) + "\n";
    if (path.empty() || path == "-") {
        stdout_stream << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw InputError("cannot write '" + path + "'");
    out << text;
    if (!out) throw InputError("failed writing '" + path + "'");
}

template <typename F>
int guarded(std::ostream& log, F&& body) {
    try {
        return body();
    } catch (const ConditioningError& e) {
        log << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const InputError& e) {
        log << "error: " << e.what() << '\n';
        return kExitInput;
    } catch (const json::exception& e) {
        log << "error: malformed document: " << e.what() << '\n';
        return kExitInput;
    } catch (const InternalError& e) {
        log << "internal error: " << e.what() << '\n';
        return kExitInternal;
    } catch (const std::exception& e) {
        log << "internal error: " << e.what() << '\n';
        return kExitInternal;
    }
}

void require(bool condition, const std::string& what) {
    if (!condition) throw InputError("document does not match schema: " + what);
}

bool number_array(const json& v) {
    if (!v.is_array()) return false;
    for (const auto& x : v)
        if (!x.is_number()) return false;
    return true;
}

bool pair_array(const json& v) {
    if (!v.is_array()) return false;
    for (const auto& x : v)
        if (!x.is_array() || x.size() != 2 || !x[0].is_number() || !x[1].is_number()) return false;
    return true;
}

}  // namespace

json certificate_to_json(const Certificate& c) {
    json extremal = json::array();
    for (const auto& p : c.extremal_points)
        extremal.push_back({{"index", p.index},
                            {"angle", p.angle},
                            {"modulus", p.modulus},
                            {"multiplier", p.multiplier},
                            {"density", p.density}});
    json out = {{"verdict", to_string(c.verdict)},
                {"stationarity_residual", c.stationarity_residual},
                {"feasibility_margin", c.feasibility_margin},
                {"sup_norm_bound", c.sup_norm.bound},
                {"grid_max_modulus", c.sup_norm.grid_max},
                {"lipschitz_bound", c.sup_norm.lipschitz},
                {"max_violation", c.max_violation},
                {"complementarity", c.complementarity},
                {"min_multiplier", c.min_multiplier},
                {"multiplier_sum", c.multiplier_sum},
                {"multiplier_bound_ok", c.multiplier_bound_ok},
                {"extremal_count", c.extremal_points.size()},
                {"extremal_limit", c.extremal_limit},
                {"extremal_points", extremal},
                {"notes", c.notes}};
    out["suggested_grid"] = c.suggested_grid ? json(*c.suggested_grid) : json(nullptr);
    return out;
}

json result_document(const SolveConfig& config, const ProblemInputs& inputs, const AssembledProblem& assembled,
                     const SolveResult& result, const Certificate& certificate, double solve_seconds) {
    const DualProblem& p = assembled.problem;
    json problem = {{"degree", p.degree()},
                    {"grid", p.grid.m},
                    {"arcs_I", arcs_json(inputs.arcs.approximation_arcs())},
                    {"arcs_J", arcs_json(inputs.arcs.constraint_arcs())},
                    {"bound_per_component", bound_per_component(inputs.arcs, inputs.bound)},
                    {"grid_points", p.grid.points},
                    {"grid_spacing", p.grid.spacing},
                    {"bounds", real_json(p.bounds)},
                    {"gram", to_string(assembled.gram_used)},
                    {"gram_pivot", assembled.gram_pivot},
                    {"samples", inputs.data.samples.size()},
                    {"data_digest", data_digest(inputs.data)},
                    {"norm_f_sq", p.moments.norm_f_sq}};
    json solution = {{"coefficients", complex_json(result.coefficients)},
                     {"multipliers", real_json(result.multipliers)},
                     {"misfit", result.misfit},
                     {"dual_value", result.dual_value},
                     {"duality_gap", result.duality_gap},
                     {"max_violation", result.max_violation},
                     {"max_complementarity", result.max_complementarity},
                     {"iterations", result.iterations},
                     {"interior_iterations", result.interior_iterations},
                     {"start", result.start},
                     {"status", to_string(result.status)},
                     {"message", result.message}};
    return {{"schema", "arcfit/result-v1"},
            {"config", config.entries},
            {"problem", problem},
            {"solution", solution},
            {"certificate", certificate_to_json(certificate)},
            {"timing", {{"solve_seconds", solve_seconds}}}};
}

void validate_result_document(const json& doc) {
    require(doc.is_object(), "top level must be an object");
    require(doc.value("schema", "") == "arcfit/result-v1", "schema must be arcfit/result-v1");
    for (const char* key : {"config", "problem", "solution", "certificate", "timing"})
        require(doc.contains(key) && doc[key].is_object(), std::string("missing object '") + key + "'");
    for (const auto& [key, value] : doc["config"].items()) require(value.is_string(), "config values must be strings");

    const json& p = doc["problem"];
    require(p.contains("degree") && p["degree"].is_number_integer() && p["degree"].get<int>() >= 0, "problem.degree");
    require(p.contains("grid") && p["grid"].is_number_integer() && p["grid"].get<int>() >= 1, "problem.grid");
    require(p.contains("arcs_I") && pair_array(p["arcs_I"]), "problem.arcs_I");
    require(p.contains("arcs_J") && pair_array(p["arcs_J"]), "problem.arcs_J");
    require(p.contains("grid_points") && number_array(p["grid_points"]), "problem.grid_points");
    require(p.contains("bounds") && number_array(p["bounds"]) && p["bounds"].size() == p["grid_points"].size(),
            "problem.bounds");
    require(p.contains("bound_per_component") && number_array(p["bound_per_component"]) &&
                p["bound_per_component"].size() == p["arcs_J"].size(),
            "problem.bound_per_component");
    require(p.contains("gram") && gram_choice_from_string(p["gram"].get<std::string>()).has_value(), "problem.gram");

    const json& s = doc["solution"];
    const std::size_t n = p["degree"].get<std::size_t>();
    require(s.contains("coefficients") && pair_array(s["coefficients"]) && s["coefficients"].size() == n + 1,
            "solution.coefficients must hold degree+1 [re, im] pairs");
    require(s.contains("multipliers") && number_array(s["multipliers"]) &&
                s["multipliers"].size() == p["grid_points"].size(),
            "solution.multipliers must hold one value per grid point");
    for (const char* key : {"misfit", "dual_value", "duality_gap", "max_violation", "max_complementarity"})
        require(s.contains(key) && s[key].is_number(), std::string("solution.") + key);
    require(s.contains("status") && solve_status_from_string(s["status"].get<std::string>()).has_value(),
            "solution.status");

    const json& c = doc["certificate"];
    require(c.contains("verdict") && c["verdict"].is_string() &&
                verdict_from_string(c["verdict"].get<std::string>()).has_value(),
            "certificate.verdict");
    for (const char* key : {"stationarity_residual", "feasibility_margin", "multiplier_sum", "complementarity"})
        require(c.contains(key) && c[key].is_number(), std::string("certificate.") + key);
    require(c.contains("multiplier_bound_ok") && c["multiplier_bound_ok"].is_boolean(),
            "certificate.multiplier_bound_ok");
    require(c.contains("extremal_points") && c["extremal_points"].is_array(), "certificate.extremal_points");
}

void validate_plot_document(const json& doc) {
    require(doc.is_object(), "top level must be an object");
    require(doc.value("schema", "") == "arcfit/plot-v1", "schema must be arcfit/plot-v1");
    require(doc.contains("theta") && number_array(doc["theta"]), "theta");
    require(doc.contains("modulus") && number_array(doc["modulus"]) && doc["modulus"].size() == doc["theta"].size(),
            "modulus must match theta");
    require(doc.contains("overlay") && doc["overlay"].is_object(), "overlay");
    const json& o = doc["overlay"];
    require(o.contains("theta") && number_array(o["theta"]), "overlay.theta");
    require(o.contains("modulus") && number_array(o["modulus"]) && o["modulus"].size() == o["theta"].size(),
            "overlay.modulus must match overlay.theta");
    require(doc.contains("arcs_I") && pair_array(doc["arcs_I"]), "arcs_I");
    require(doc.contains("bounds") && doc["bounds"].is_array(), "bounds");
    for (const auto& b : doc["bounds"])
        require(b.is_object() && b.contains("lo") && b.contains("hi") && b.contains("rho") && b["rho"].is_number(),
                "bounds entries need lo, hi and rho");
}

json plot_document(const json& result, const SampledBoundaryData& data, const ArcSystem& arcs, int points) {
    validate_result_document(result);
    if (points < 2) throw InputError("plot needs at least two points");
    const Eigen::VectorXcd c = complex_from_json(result["solution"]["coefficients"]);
    std::vector<double> theta(static_cast<std::size_t>(points));
    for (int s = 0; s < points; ++s) theta[static_cast<std::size_t>(s)] = kTwoPi * s / points;
    const Eigen::VectorXd modulus = evaluate_polynomial(c, theta).cwiseAbs();

    json overlay_theta = json::array();
    json overlay_modulus = json::array();
    for (const Sample& s : data.samples) {
        overlay_theta.push_back(s.theta);
        overlay_modulus.push_back(std::abs(s.value));
    }
    json bounds = json::array();
    const json& per_component = result["problem"]["bound_per_component"];
    const auto& comps = arcs.constraint_arcs();
    if (per_component.size() != comps.size()) throw InputError("result bounds do not match the arc system");
    for (std::size_t k = 0; k < comps.size(); ++k)
        bounds.push_back({{"lo", comps[k].lo}, {"hi", comps[k].hi}, {"rho", per_component[k]}});

    return {{"schema", "arcfit/plot-v1"},
            {"degree", result["problem"]["degree"]},
            {"grid", result["problem"]["grid"]},
            {"theta", theta},
            {"modulus", real_json(modulus)},
            {"overlay", {{"theta", overlay_theta}, {"modulus", overlay_modulus}}},
            {"arcs_I", arcs_json(arcs.approximation_arcs())},
            {"arcs_J", arcs_json(comps)},
            {"bounds", bounds}};
}

int cmd_solve(const SolveConfig& config, std::ostream& stdout_stream, std::ostream& log) {
    return guarded(log, [&] {
        const ProblemInputs inputs = problem_inputs(config);
        const AssembledProblem assembled = assemble_problem(inputs, config.degree, config.grid);
        const auto start = std::chrono::steady_clock::now();
        const SolveResult result = maximize_dual(assembled.problem, solver_options(config));
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const Certificate cert =
            certify(result.coefficients, result.multipliers, assembled.problem, certify_options(config));
        write_document(result_document(config, inputs, assembled, result, cert, seconds), config.out, stdout_stream);
        log << "status " << to_string(result.status) << ", verdict " << to_string(cert.verdict) << ", misfit "
            << result.misfit << ", iterations " << result.iterations << ", " << seconds << " s\n";
        return cert.verdict == Verdict::failed ? kExitFailed : kExitOk;
    });
}

namespace {

SolveConfig config_for(const json& result, const std::optional<SolveConfig>& config) {
    if (config) return *config;
    if (!result.contains("config") || !result["config"].is_object())
        throw InputError("result has no embedded config; pass --config");
    return config_from_entries(result["config"].get<ConfigEntries>());
}

}  // namespace

int cmd_certify(const json& result, const std::optional<SolveConfig>& config, const std::string& out,
                std::ostream& stdout_stream, std::ostream& log) {
    return guarded(log, [&] {
        validate_result_document(result);
        const SolveConfig cfg = config_for(result, config);
        const ProblemInputs inputs = problem_inputs(cfg);
        const int degree = result["problem"]["degree"].get<int>();
        const int grid = result["problem"]["grid"].get<int>();
        const AssembledProblem assembled = assemble_problem(inputs, degree, grid);
        const Eigen::VectorXcd c = complex_from_json(result["solution"]["coefficients"]);
        const Eigen::VectorXd lambda = real_from_json(result["solution"]["multipliers"]);
        if (lambda.size() != assembled.problem.constraint_count())
            throw InputError("result grid does not match the config's grid");
        const Certificate cert = certify(c, lambda, assembled.problem, certify_options(cfg));
        json doc = certificate_to_json(cert);
        doc["schema"] = "arcfit/certificate-v1";
        write_document(doc, out, stdout_stream);
        log << "verdict " << to_string(cert.verdict) << '\n';
        return cert.verdict == Verdict::failed ? kExitFailed : kExitOk;
    });
}

int cmd_sweep(const SolveConfig& config, std::ostream& stdout_stream, std::ostream& log) {
    return guarded(log, [&] {
        const ProblemInputs inputs = problem_inputs(config);
        SweepOptions options;
        options.solver = solver_options(config);
        options.certify = certify_options(config);
        options.jobs = config.jobs;
        SweepReport report;
        if (config.sweep_kind == "m") {
            const std::vector<int> ms = config.sweep_values.empty()
                                            ? std::vector<int>{2 * std::max(1, config.degree), 4 * std::max(1, config.degree),
                                                               8 * std::max(1, config.degree)}
                                            : config.sweep_values;
            report = sweep_m(inputs, config.degree, ms, options);
        } else {
            if (config.sweep_values.empty()) throw InputError("an n sweep needs sweep.values");
            report = sweep_n(inputs, config.sweep_values, config.sweep_coupling, config.sweep_grid, options);
        }
        json doc = sweep_to_json(report);
        doc["config"] = config.entries;
        write_document(doc, config.out, stdout_stream);
        if (!config.sweep_csv.empty()) {
            std::ofstream csv(config.sweep_csv, std::ios::binary);
            if (!csv) throw InputError("cannot write '" + config.sweep_csv + "'");
            write_sweep_csv(csv, report);
        }
        int errors = 0;
        for (const auto& r : report.records) {
            log << "n=" << r.n << " m=" << r.m << " " << r.status << " misfit " << r.misfit << " saturation "
                << r.saturation_fraction;
            if (r.delta) log << " delta " << *r.delta;
            log << '\n';
            if (r.status == "error") ++errors;
        }
        return errors > 0 ? kExitFailed : kExitOk;
    });
}

int cmd_emit_plot(const json& result, const std::optional<SolveConfig>& config, const std::string& out, int points,
                  std::ostream& stdout_stream, std::ostream& log) {
    return guarded(log, [&] {
        validate_result_document(result);
        const SolveConfig cfg = config_for(result, config);
        const ArcSystem arcs = arc_system(cfg);
        const SampledBoundaryData data = load_data(cfg, arcs);
        write_document(plot_document(result, data, arcs, points), out, stdout_stream);
        return kExitOk;
    });
}

int cmd_generate(const SolveConfig& config, std::ostream& stdout_stream, std::ostream& log) {
    return guarded(log, [&] {
        const ArcSystem arcs = arc_system(config);
        const SampledBoundaryData data = load_data(config, arcs);
        if (config.out.empty() || config.out == "-") {
            write_samples(stdout_stream, data);
        } else {
            std::ofstream out(config.out, std::ios::binary);
            if (!out) throw InputError("cannot write '" + config.out + "'");
            write_samples(out, data);
        }
        log << data.samples.size() << " samples, digest " << data_digest(data) << '\n';
        return kExitOk;
    });
}

namespace {

json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw InputError("cannot open '" + path + "'");
    return json::parse(in);
}

}  // namespace

int run_cli(int argc, char** argv, std::ostream& stdout_stream, std::ostream& log) {
    CLI::App app{"arcfit: bounded L2 polynomial approximation on circle arcs"};
    app.require_subcommand(1);

    std::optional<std::string> config_path;
    std::optional<int> degree;
    std::optional<int> grid;
    std::vector<double> bound;
    std::optional<double> tol;
    std::optional<int> jobs;
    std::string out;
    std::string csv;
    std::vector<std::string> sets;
    std::string result_path;
    int points = 2048;

    auto add_problem_flags = [&](CLI::App* cmd) {
        cmd->add_option("--config", config_path, "config file (key = value)");
        cmd->add_option("--degree", degree, "polynomial degree n")->check(CLI::NonNegativeNumber);
        cmd->add_option("--grid", grid, "constraint grid parameter m")->check(CLI::PositiveNumber);
        cmd->add_option("--bound", bound, "modulus bound rho (one value or one per J component)")->delimiter(',');
        cmd->add_option("--tol", tol, "relative KKT tolerance")->check(CLI::PositiveNumber);
        cmd->add_option("--out", out, "output path ('-' for stdout)");
        cmd->add_option("--set", sets, "extra config entry key=value (repeatable)");
    };

    CLI::App* solve = app.add_subcommand("solve", "solve at degree n on grid m and write the result JSON");
    add_problem_flags(solve);
    CLI::App* certify_cmd = app.add_subcommand("certify", "re-run the certifier on a stored result");
    certify_cmd->add_option("result", result_path, "result JSON")->required();
    add_problem_flags(certify_cmd);
    CLI::App* sweep = app.add_subcommand("sweep", "run an m or n convergence sweep");
    add_problem_flags(sweep);
    sweep->add_option("--jobs", jobs, "parallel cells")->check(CLI::PositiveNumber);
    sweep->add_option("--csv", csv, "also write the flat CSV table");
    CLI::App* plot = app.add_subcommand("emit-plot", "write plot data for a stored result");
    plot->add_option("result", result_path, "result JSON")->required();
    add_problem_flags(plot);
    plot->add_option("--points", points, "angles on the circle")->check(CLI::Range(2, 10000000));
    CLI::App* generate = app.add_subcommand("generate", "write the configured data as a canonical samples CSV");
    add_problem_flags(generate);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, stdout_stream, log);
        return code == 0 ? kExitOk : kExitInput;
    }

    auto overrides = [&]() {
        ConfigEntries o;
        for (const auto& s : sets) {
            const auto eq = s.find('=');
            if (eq == std::string::npos) throw InputError("--set expects key=value, got '" + s + "'");
            o[s.substr(0, eq)] = s.substr(eq + 1);
        }
        if (degree) o["degree"] = std::to_string(*degree);
        if (grid) o["grid"] = std::to_string(*grid);
        if (!bound.empty()) {
            std::ostringstream b;
            for (std::size_t i = 0; i < bound.size(); ++i) b << (i ? " " : "") << format_double(bound[i]);
            o["bound"] = b.str();
        }
        if (tol) o["tol"] = format_double(*tol);
        if (jobs) o["jobs"] = std::to_string(*jobs);
        if (!out.empty()) o["out"] = out;
        if (!csv.empty()) o["sweep.csv"] = csv;
        return o;
    };
    const bool has_overrides = config_path || degree || grid || !bound.empty() || tol || jobs || !sets.empty();

    return guarded(log, [&]() -> int {
        if (solve->parsed()) return cmd_solve(load_config(config_path, overrides()), stdout_stream, log);
        if (sweep->parsed()) return cmd_sweep(load_config(config_path, overrides()), stdout_stream, log);
        if (generate->parsed()) return cmd_generate(load_config(config_path, overrides()), stdout_stream, log);

        const json result = read_json_file(result_path);
        std::optional<SolveConfig> cfg;
        if (has_overrides) {
            ConfigEntries merged;
            if (!config_path && result.contains("config")) merged = result["config"].get<ConfigEntries>();
            if (config_path) {
                std::ifstream in(*config_path);
                if (!in) throw InputError("cannot open config '" + *config_path + "'");
                merged = parse_config_entries(in);
            }
            for (const auto& [k, v] : overrides()) merged[k] = v;
            std::string base = config_path ? std::filesystem::path(*config_path).parent_path().string() : ".";
            cfg = config_from_entries(merged, base.empty() ? "." : base);
        }
        if (certify_cmd->parsed()) return cmd_certify(result, cfg, out, stdout_stream, log);
        return cmd_emit_plot(result, cfg, out, points, stdout_stream, log);
    });
}

}  // namespace arcfit
