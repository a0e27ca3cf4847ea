#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arcfit/dualsolver.hpp"

namespace arcfit {

enum class Verdict {
    certified,           ///< KKT holds and |g| <= rho is proven on all of J
    grid_feasible_only,  ///< KKT holds on the grid, continuum bound not proven
    failed,
};

[[nodiscard]] std::string to_string(Verdict verdict);
[[nodiscard]] std::optional<Verdict> verdict_from_string(const std::string& text);

/// Grid point carrying a non-negligible multiplier.
struct ExtremalPoint {
    std::size_t index = 0;
    double angle = 0.0;
    double modulus = 0.0;     ///< |g(x_k)|
    double multiplier = 0.0;  ///< lambda_k
    double density = 0.0;     ///< lambda_k / spacing of its component (diagnostic only)
};

/// Upper bound of |g| on the closure of J derived from the grid values.
struct SupNormBound {
    double grid_max = 0.0;        ///< max_k |g(x_k)|
    double bound = 0.0;           ///< certified sup of |g| on J (worst component)
    double margin = 0.0;          ///< max over components of (bound_c - rho_c)
    double lipschitz = 0.0;       ///< n * B, the derivative bound used
    std::vector<double> component_margins;
};

struct CertifyOptions {
    double stationarity_tol = 1e-7;
    double feasibility_tol = 1e-8;  ///< grid violation allowed, relative to max(1, ||f||^2)
    /// Replace the coefficient bound sum |c_j| by a sampled bound of ||g||_inf on
    /// the whole circle and refine the grid on J by `refine_factor`.
    bool refined = false;
    int refine_factor = 8;
    /// Activity threshold for multipliers; default 1e-10 * max(1, sum lambda).
    std::optional<double> active_tol;
};

struct Certificate {
    double stationarity_residual = 0.0;
    SupNormBound sup_norm;
    double feasibility_margin = 0.0;
    double max_violation = 0.0;         ///< max_k |g(x_k)|^2 - rho_k^2
    double complementarity = 0.0;       ///< max_k lambda_k |rho_k^2 - |g(x_k)|^2|
    double min_multiplier = 0.0;
    double multiplier_sum = 0.0;        ///< sum_k lambda_k rho_k^2
    bool multiplier_bound_ok = false;
    std::vector<ExtremalPoint> extremal_points;
    std::size_t extremal_limit = 0;     ///< 2n + 2, reported for comparison only
    Verdict verdict = Verdict::failed;
    std::optional<int> suggested_grid;  ///< grid size expected to certify, when one exists
    std::vector<std::string> notes;
};

/// max_j |(G c - b + sum_k lambda_k g(x_k) v_k)_j| / max(1, ||f||).
[[nodiscard]] double check_stationarity(const Eigen::VectorXcd& coefficients, const Eigen::VectorXd& lambda,
                                        const DualProblem& problem);

/// Bernstein bound: on each J component sup |g| <= M + n B h / 2 with
/// B = sum |c_j| >= ||g||_inf on the circle. Returns the bound minus rho.
[[nodiscard]] SupNormBound certify_sup_norm(const Eigen::VectorXcd& coefficients, const ConstraintGrid& grid,
                                            const Eigen::VectorXd& bounds);

/// Same bound with a sampled estimate of ||g||_inf and a grid refined by `factor`.
[[nodiscard]] SupNormBound certify_sup_norm_refined(const Eigen::VectorXcd& coefficients, const ConstraintGrid& grid,
                                                    const Eigen::VectorXd& bounds, int factor);

/// sum_k lambda_k rho_k^2 <= 2 ||f||^2 (1 + 1e-9).
[[nodiscard]] bool check_multiplier_bound(const Eigen::VectorXd& lambda, const Eigen::VectorXd& bounds,
                                          double norm_f_sq);

[[nodiscard]] std::vector<ExtremalPoint> extract_extremal_points(const Eigen::VectorXcd& coefficients,
                                                                 const Eigen::VectorXd& lambda,
                                                                 const ConstraintGrid& grid, double tol);

/// Runs every check on a candidate (c, lambda) and derives the verdict.
[[nodiscard]] Certificate certify(const Eigen::VectorXcd& coefficients, const Eigen::VectorXd& lambda,
                                  const DualProblem& problem, const CertifyOptions& options = {});

}  // namespace arcfit
