#include "arcfit/certifier.hpp"

#include <algorithm>
#include <cmath>

#include "arcfit/errors.hpp"

namespace arcfit {

std::string to_string(Verdict verdict) {
    switch (verdict) {
        case Verdict::certified: return "certified";
        case Verdict::grid_feasible_only: return "grid_feasible_only";
        case Verdict::failed: return "failed";
    }
    return "unknown";
}

std::optional<Verdict> verdict_from_string(const std::string& text) {
    for (Verdict v : {Verdict::certified, Verdict::grid_feasible_only, Verdict::failed})
        if (to_string(v) == text) return v;
    return std::nullopt;
}

double check_stationarity(const Eigen::VectorXcd& coefficients, const Eigen::VectorXd& lambda,
                          const DualProblem& problem) {
    if (coefficients.size() != problem.degree() + 1) throw InputError("coefficient count does not match the degree");
    if (lambda.size() != problem.constraint_count()) throw InputError("one multiplier per grid point is required");
    const Eigen::MatrixXcd V = evaluation_matrix(problem.grid.points, problem.degree());
    const Eigen::VectorXcd values = V * coefficients;
    const Eigen::VectorXcd residual = problem.gram.entries * coefficients - problem.moments.b +
                                      V.adjoint() * lambda.cast<cplx>().cwiseProduct(values);
    return residual.cwiseAbs().maxCoeff() / std::max(1.0, std::sqrt(problem.moments.norm_f_sq));
}

namespace {

double coefficient_bound(const Eigen::VectorXcd& c) { return c.cwiseAbs().sum(); }

// Per component: largest |g| on the grid, rho of the component, spacing.
struct ComponentStats {
    double grid_max = 0.0;
    double rho = 0.0;
    double spacing = 0.0;
    bool used = false;
};

std::vector<ComponentStats> component_stats(const Eigen::VectorXcd& coefficients, const ConstraintGrid& grid,
                                            const Eigen::VectorXd& bounds) {
    if (static_cast<std::size_t>(bounds.size()) != grid.size()) throw InputError("one bound per grid point is required");
    const Eigen::VectorXd modulus = evaluate_polynomial(coefficients, grid.points).cwiseAbs();
    std::vector<ComponentStats> stats(grid.components.size());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        ComponentStats& s = stats[grid.component[k]];
        const auto idx = static_cast<Eigen::Index>(k);
        s.rho = s.used ? std::min(s.rho, bounds(idx)) : bounds(idx);
        s.grid_max = std::max(s.grid_max, modulus(idx));
        s.used = true;
    }
    for (std::size_t c = 0; c < stats.size(); ++c) stats[c].spacing = grid.component_spacing[c];
    return stats;
}

SupNormBound assemble(const std::vector<ComponentStats>& stats, const std::vector<double>& bound_per_component,
                      double lipschitz) {
    SupNormBound out;
    out.lipschitz = lipschitz;
    bool first = true;
    for (std::size_t c = 0; c < stats.size(); ++c) {
        if (!stats[c].used) continue;
        const double margin = bound_per_component[c] - stats[c].rho;
        out.component_margins.push_back(margin);
        out.grid_max = std::max(out.grid_max, stats[c].grid_max);
        out.bound = first ? bound_per_component[c] : std::max(out.bound, bound_per_component[c]);
        out.margin = first ? margin : std::max(out.margin, margin);
        first = false;
    }
    return out;
}

}  // namespace

SupNormBound certify_sup_norm(const Eigen::VectorXcd& coefficients, const ConstraintGrid& grid,
                              const Eigen::VectorXd& bounds) {
    const auto stats = component_stats(coefficients, grid, bounds);
    const int n = static_cast<int>(coefficients.size()) - 1;
    // Any point of a component lies within h/2 of a grid point and |g'| <= n ||g||_inf <= n sum|c_j|.
    const double lipschitz = n * coefficient_bound(coefficients);
    std::vector<double> bound(stats.size(), 0.0);
    for (std::size_t c = 0; c < stats.size(); ++c) bound[c] = stats[c].grid_max + 0.5 * lipschitz * stats[c].spacing;
    return assemble(stats, bound, lipschitz);
}

SupNormBound certify_sup_norm_refined(const Eigen::VectorXcd& coefficients, const ConstraintGrid& grid,
                                      const Eigen::VectorXd& bounds, int factor) {
    if (factor < 1) throw InputError("refinement factor must be at least 1");
    const SupNormBound crude = certify_sup_norm(coefficients, grid, bounds);
    const int n = static_cast<int>(coefficients.size()) - 1;

    // Samples with spacing delta on the whole circle give
    // ||g||_inf <= max|g(samples)| / (1 - n delta / 2) as long as n delta / 2 < 1.
    const int circle_points = std::max(64, 8 * (n + 1));
    std::vector<double> circle(static_cast<std::size_t>(circle_points));
    for (int s = 0; s < circle_points; ++s) circle[static_cast<std::size_t>(s)] = kTwoPi * s / circle_points;
    const double delta = kTwoPi / circle_points;
    const double sup_circle =
        evaluate_polynomial(coefficients, circle).cwiseAbs().maxCoeff() / (1.0 - 0.5 * n * delta);
    const double lipschitz = n * std::min(sup_circle, coefficient_bound(coefficients));

    auto stats = component_stats(coefficients, grid, bounds);
    std::vector<double> bound(stats.size(), 0.0);
    for (std::size_t c = 0; c < stats.size(); ++c) {
        if (!stats[c].used) continue;
        const Arc& arc = grid.components[c];
        const double h = stats[c].spacing;
        double fine_max = stats[c].grid_max;
        double fine_spacing = 0.0;
        if (h > 0.0) {
            const int intervals = static_cast<int>(std::lround(arc.length() / h)) * factor;
            fine_spacing = arc.length() / intervals;
            std::vector<double> fine(static_cast<std::size_t>(intervals + 1));
            for (int s = 0; s <= intervals; ++s) fine[static_cast<std::size_t>(s)] = arc.lo + fine_spacing * s;
            fine_max = std::max(fine_max, evaluate_polynomial(coefficients, fine).cwiseAbs().maxCoeff());
        }
        const double crude_c = stats[c].grid_max + 0.5 * n * coefficient_bound(coefficients) * h;
        bound[c] = std::min(crude_c, fine_max + 0.5 * lipschitz * fine_spacing);
    }
    SupNormBound out = assemble(stats, bound, lipschitz);
    out.grid_max = crude.grid_max;
    return out;
}

bool check_multiplier_bound(const Eigen::VectorXd& lambda, const Eigen::VectorXd& bounds, double norm_f_sq) {
    if (lambda.size() != bounds.size()) throw InputError("one multiplier per bound is required");
    return lambda.dot(bounds.cwiseAbs2()) <= 2.0 * norm_f_sq * (1.0 + 1e-9);
}

std::vector<ExtremalPoint> extract_extremal_points(const Eigen::VectorXcd& coefficients, const Eigen::VectorXd& lambda,
                                                   const ConstraintGrid& grid, double tol) {
    if (static_cast<std::size_t>(lambda.size()) != grid.size()) throw InputError("one multiplier per grid point is required");
    const Eigen::VectorXd modulus = evaluate_polynomial(coefficients, grid.points).cwiseAbs();
    std::vector<ExtremalPoint> out;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const auto idx = static_cast<Eigen::Index>(k);
        if (!(lambda(idx) > tol)) continue;
        const double h = grid.component_spacing[grid.component[k]];
        out.push_back({k, grid.points[k], modulus(idx), lambda(idx), h > 0.0 ? lambda(idx) / h : 0.0});
    }
    return out;
}

Certificate certify(const Eigen::VectorXcd& coefficients, const Eigen::VectorXd& lambda, const DualProblem& problem,
                    const CertifyOptions& options) {
    Certificate cert;
    const double scale = std::max(1.0, problem.moments.norm_f_sq);
    const Eigen::VectorXd rho2 = problem.bounds.cwiseAbs2();
    const Eigen::VectorXd slack =
        evaluate_polynomial(coefficients, problem.grid.points).cwiseAbs2() - rho2;

    cert.stationarity_residual = check_stationarity(coefficients, lambda, problem);
    cert.sup_norm = options.refined
                        ? certify_sup_norm_refined(coefficients, problem.grid, problem.bounds, options.refine_factor)
                        : certify_sup_norm(coefficients, problem.grid, problem.bounds);
    cert.feasibility_margin = cert.sup_norm.margin;
    cert.max_violation = slack.maxCoeff();
    cert.complementarity = (lambda.array() * slack.array().abs()).maxCoeff();
    cert.min_multiplier = lambda.minCoeff();
    cert.multiplier_sum = lambda.dot(rho2);
    cert.multiplier_bound_ok = check_multiplier_bound(lambda, problem.bounds, problem.moments.norm_f_sq);
    const double active_tol = options.active_tol.value_or(1e-10 * std::max(1.0, lambda.sum()));
    cert.extremal_points = extract_extremal_points(coefficients, lambda, problem.grid, active_tol);
    cert.extremal_limit = 2 * static_cast<std::size_t>(problem.degree()) + 2;
    if (cert.extremal_points.size() > cert.extremal_limit)
        cert.notes.push_back("more active multipliers than 2n+2; the discrete multipliers spread over clustered points");

    const double feas_tol = options.feasibility_tol * scale;
    bool ok = true;
    if (cert.min_multiplier < 0.0) {
        ok = false;
        cert.notes.push_back("negative multiplier");
    }
    if (!(cert.stationarity_residual <= options.stationarity_tol)) {
        ok = false;
        cert.notes.push_back("stationarity residual above tolerance");
    }
    if (!(cert.max_violation <= feas_tol)) {
        ok = false;
        cert.notes.push_back("modulus bound violated on the grid");
    }
    if (!(cert.complementarity <= 10.0 * feas_tol)) {
        ok = false;
        cert.notes.push_back("complementary slackness violated");
    }
    if (!cert.multiplier_bound_ok) {
        ok = false;
        cert.notes.push_back("multiplier sum exceeds 2 ||f||^2");
    }

    if (!ok) {
        cert.verdict = Verdict::failed;
    } else if (cert.feasibility_margin <= 0.0) {
        cert.verdict = Verdict::certified;
    } else {
        cert.verdict = Verdict::grid_feasible_only;
        // Grid size at which the crude Lipschitz term would fit under the
        // remaining headroom of every component, if there is headroom.
        const auto stats = component_stats(coefficients, problem.grid, problem.bounds);
        const double lipschitz = problem.degree() * coefficient_bound(coefficients);
        double factor = 1.0;
        bool attainable = true;
        for (const auto& s : stats) {
            if (!s.used || s.spacing == 0.0) continue;
            const double headroom = s.rho - s.grid_max;
            if (headroom <= 0.0) {
                attainable = false;
                break;
            }
            factor = std::max(factor, 0.5 * lipschitz * s.spacing / headroom);
        }
        if (attainable) {
            const double m = std::ceil(1.1 * factor * problem.grid.m);
            if (m < 1e9) cert.suggested_grid = static_cast<int>(m);
        } else {
            cert.notes.push_back("|g| reaches rho on the grid; no grid refinement can prove a strict continuum bound");
        }
    }
    return cert;
}

}  // namespace arcfit
