#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "arcfit/arcgeom.hpp"
#include "arcfit/moments.hpp"

namespace arcfit {

/// Quadratic data of the discretized bounded extremal problem
///
///     minimize ||f - g||^2_{L2(I)}  over g in P_n,  |g(x_k)| <= rho_k on the grid.
///
/// With g(z) = sum_j c_j z^j the objective is ||f||^2 - 2 Re(b^H c) + c^H G c and
/// each constraint reads |v_k^H c|^2 <= rho_k^2 where v_k^H is row k of the
/// evaluation matrix.
struct DualProblem {
    GramMatrix gram;
    MomentVector moments;
    ConstraintGrid grid;
    Eigen::VectorXd bounds;  ///< rho_k > 0 per grid point

    [[nodiscard]] int degree() const { return gram.degree(); }
    [[nodiscard]] Eigen::Index constraint_count() const { return bounds.size(); }
};

/// Checks sizes and positivity of the bounds; throws InputError.
[[nodiscard]] DualProblem make_dual_problem(GramMatrix gram, MomentVector moments, ConstraintGrid grid,
                                            Eigen::VectorXd bounds);

/// One bound per grid point from one bound per J component (a single value is broadcast).
[[nodiscard]] Eigen::VectorXd expand_bounds(const ConstraintGrid& grid, const std::vector<double>& per_component);

/// V(k, j) = x_k^j, so that (V c)_k = g(x_k).
[[nodiscard]] Eigen::MatrixXcd evaluation_matrix(const std::vector<double>& angles, int n);

/// Values g(e^{i theta}) for a coefficient vector.
[[nodiscard]] Eigen::VectorXcd evaluate_polynomial(const Eigen::VectorXcd& coefficients,
                                                   const std::vector<double>& angles);

/// Minimizer of the Lagrangian over P_n at fixed multipliers.
struct InnerSolution {
    Eigen::VectorXcd coefficients;
    double dual_value = 0.0;
    Eigen::VectorXd gradient;  ///< |g(x_k)|^2 - rho_k^2
};

/// Solves A(lambda) c = b with A(lambda) = G + sum_k lambda_k v_k v_k^H.
/// Throws InputError for negative multipliers and InternalError when A(lambda)
/// cannot be factored.
[[nodiscard]] InnerSolution inner_minimize(const Eigen::VectorXd& lambda, const DualProblem& problem);

/// Hessian of the dual function:
///     H(k,l) = -2 Re[(v_k^H A^{-1} v_l) (v_l^H c) (c^H v_k)].
[[nodiscard]] Eigen::MatrixXd dual_hessian(const Eigen::VectorXd& lambda, const DualProblem& problem);

/// ||f||^2 - 2 Re(b^H c) + c^H G c.
[[nodiscard]] double primal_value(const Eigen::VectorXcd& coefficients, const GramMatrix& gram,
                                  const MomentVector& moments);

/// How the multipliers are initialized before the projected Newton ascent.
enum class WarmStart {
    none,            ///< lambda = 0 (positive spread start if G alone is singular)
    interior_point,  ///< primal-dual interior-point estimate of the multipliers
    automatic,       ///< interior point unless lambda = 0 already satisfies the KKT test
};

struct SolverOptions {
    double tol_kkt = 1e-8;  ///< relative to max(1, ||f||^2)
    int max_iter = 500;
    WarmStart warm_start = WarmStart::automatic;
    int interior_max_iter = 100;
    /// Explicit starting multipliers; overrides warm_start.
    std::optional<Eigen::VectorXd> initial_multipliers;
};

enum class SolveStatus { converged, max_iter, infeasible_input };

[[nodiscard]] std::string to_string(SolveStatus status);
[[nodiscard]] std::optional<SolveStatus> solve_status_from_string(const std::string& text);

struct SolveResult {
    Eigen::VectorXcd coefficients;
    Eigen::VectorXd multipliers;
    Eigen::VectorXd gradient;
    double misfit = 0.0;
    double dual_value = 0.0;
    double duality_gap = 0.0;
    double max_violation = 0.0;        ///< max_k gradient_k
    double max_complementarity = 0.0;  ///< max_k lambda_k |gradient_k|
    int iterations = 0;
    SolveStatus status = SolveStatus::max_iter;
    std::string start;  ///< "zero", "given", "spread" or "interior_point"
    int interior_iterations = 0;
    std::vector<double> dual_history;  ///< dual value at every accepted iterate
    std::string message;
};

/// Maximizes the concave dual over lambda >= 0 by projected Newton ascent on
/// the free variables, falling back to projected gradient steps with Armijo
/// backtracking when the Newton direction does not make progress.
[[nodiscard]] SolveResult maximize_dual(const DualProblem& problem, const SolverOptions& options = {});

}  // namespace arcfit
