#include "arcfit/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <ostream>
#include <thread>

#include "arcfit/errors.hpp"
#include "arcfit/ingest.hpp"

namespace arcfit {

namespace {

SweepRecord run_cell(const ProblemInputs& inputs, int n, int m, const SweepOptions& options) {
    SweepRecord rec;
    rec.n = n;
    rec.m = m;
    const auto start = std::chrono::steady_clock::now();
    try {
        const AssembledProblem assembled = assemble_problem(inputs, n, m);
        const DualProblem& problem = assembled.problem;
        const SolveResult result = maximize_dual(problem, options.solver);
        const Eigen::VectorXd modulus = evaluate_polynomial(result.coefficients, problem.grid.points).cwiseAbs();
        rec.misfit = result.misfit;
        rec.max_modulus = modulus.maxCoeff();
        rec.saturation_fraction =
            static_cast<double>((modulus.array() >= 0.9 * problem.bounds.array()).count()) / modulus.size();
        rec.coefficient_norm = result.coefficients.norm();
        rec.iterations = result.iterations;
        rec.status = to_string(result.status);
        rec.message = result.message;
        rec.gram = to_string(assembled.gram_used);
        rec.verdict = to_string(certify(result.coefficients, result.multipliers, problem, options.certify).verdict);
        rec.coefficients = result.coefficients;
    } catch (const std::exception& e) {
        rec.status = "error";
        rec.message = e.what();
    }
    rec.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return rec;
}

// Cells are independent; workers pull indices and write into their own slot,
// so the merged report does not depend on scheduling.
std::vector<SweepRecord> run_cells(const ProblemInputs& inputs, const std::vector<std::pair<int, int>>& cells,
                                   const SweepOptions& options) {
    std::vector<SweepRecord> records(cells.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < cells.size(); i = next++)
            records[i] = run_cell(inputs, cells[i].first, cells[i].second, options);
    };
    const int jobs = std::clamp(options.jobs, 1, static_cast<int>(std::max<std::size_t>(1, cells.size())));
    std::vector<std::thread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    return records;
}

nlohmann::json metadata_of(const ProblemInputs& inputs, const SweepOptions& options) {
    nlohmann::json arcs = nlohmann::json::array();
    for (const Arc& a : inputs.arcs.approximation_arcs()) arcs.push_back({a.lo, a.hi});
    return {{"arcs_I", arcs},
            {"bound", inputs.bound},
            {"gram", to_string(inputs.gram)},
            {"samples", inputs.data.samples.size()},
            {"data_digest", data_digest(inputs.data)},
            {"tol_kkt", options.solver.tol_kkt},
            {"max_iter", options.solver.max_iter}};
}

bool ok(const SweepRecord& r) { return r.status != "error"; }

}  // namespace

SweepReport sweep_m(const ProblemInputs& inputs, int n, const std::vector<int>& m_values, const SweepOptions& options) {
    if (m_values.empty()) throw InputError("m sweep needs at least one grid size");
    for (std::size_t i = 1; i < m_values.size(); ++i)
        if (m_values[i] <= m_values[i - 1]) throw InputError("m values must be strictly increasing");
    std::vector<std::pair<int, int>> cells;
    for (int m : m_values) cells.emplace_back(n, m);

    SweepReport report;
    report.kind = "m";
    report.records = run_cells(inputs, cells, options);
    report.metadata = metadata_of(inputs, options);
    report.metadata["degree"] = n;

    auto& recs = report.records;
    for (std::size_t i = 0; i + 1 < recs.size(); ++i)
        if (ok(recs[i]) && ok(recs[i + 1])) recs[i].delta = (recs[i].coefficients - recs[i + 1].coefficients).norm();
    std::optional<double> previous;
    for (const auto& r : recs) {
        if (!r.delta) continue;
        if (previous && *r.delta > 1.1 * *previous) report.delta_monotone = false;
        previous = r.delta;
    }
    for (auto it = recs.rbegin(); it != recs.rend(); ++it) {
        if (!it->delta) continue;
        report.converged = *it->delta < 1e-6 * std::max(it->coefficient_norm, 1e-300);
        break;
    }
    return report;
}

SweepReport sweep_n(const ProblemInputs& inputs, const std::vector<int>& n_values, double coupling,
                    std::optional<int> fixed_m, const SweepOptions& options) {
    if (n_values.empty()) throw InputError("n sweep needs at least one degree");
    for (std::size_t i = 1; i < n_values.size(); ++i)
        if (n_values[i] <= n_values[i - 1]) throw InputError("n values must be strictly increasing");
    if (!fixed_m && !(coupling > 0.0)) throw InputError("coupling factor must be positive");
    std::vector<std::pair<int, int>> cells;
    for (int n : n_values)
        cells.emplace_back(n, fixed_m ? *fixed_m : std::max(1, static_cast<int>(std::lround(coupling * n))));

    SweepReport report;
    report.kind = "n";
    report.records = run_cells(inputs, cells, options);
    report.metadata = metadata_of(inputs, options);
    if (fixed_m)
        report.metadata["grid"] = *fixed_m;
    else
        report.metadata["coupling"] = coupling;

    const SweepRecord* previous = nullptr;
    for (const auto& r : report.records) {
        if (!ok(r)) continue;
        if (previous) {
            if (r.misfit > previous->misfit + 1e-10) report.misfit_nonincreasing = false;
            if (r.saturation_fraction < previous->saturation_fraction - 1e-12) report.saturation_nondecreasing = false;
        }
        previous = &r;
    }
    return report;
}

nlohmann::json sweep_to_json(const SweepReport& report) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& r : report.records) {
        nlohmann::json cell = {{"n", r.n},
                               {"m", r.m},
                               {"status", r.status},
                               {"verdict", r.verdict},
                               {"gram", r.gram},
                               {"misfit", r.misfit},
                               {"max_modulus", r.max_modulus},
                               {"saturation_fraction", r.saturation_fraction},
                               {"coefficient_norm", r.coefficient_norm},
                               {"iterations", r.iterations},
                               {"message", r.message},
                               {"runtime_seconds", r.runtime_seconds}};
        cell["delta"] = r.delta ? nlohmann::json(*r.delta) : nlohmann::json(nullptr);
        cells.push_back(cell);
    }
    nlohmann::json checks;
    if (report.kind == "m") {
        checks = {{"delta_monotone", report.delta_monotone}, {"converged", report.converged}};
    } else {
        checks = {{"misfit_nonincreasing", report.misfit_nonincreasing},
                  {"saturation_nondecreasing", report.saturation_nondecreasing}};
    }
    return {{"schema", "arcfit/sweep-v1"},
            {"kind", report.kind},
            {"metadata", report.metadata},
            {"checks", checks},
            {"cells", cells}};
}

void write_sweep_csv(std::ostream& out, const SweepReport& report) {
    out << "n,m,status,verdict,gram,misfit,max_modulus,saturation_fraction,delta,iterations,runtime_seconds\n";
    for (const auto& r : report.records) {
        out << r.n << ',' << r.m << ',' << r.status << ',' << r.verdict << ',' << r.gram << ','
            << format_double(r.misfit) << ',' << format_double(r.max_modulus) << ','
            << format_double(r.saturation_fraction) << ',' << (r.delta ? format_double(*r.delta) : std::string()) << ','
            << r.iterations << ',' << format_double(r.runtime_seconds) << '\n';
    }
}

}  // namespace arcfit
