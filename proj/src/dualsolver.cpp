#include "arcfit/dualsolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "arcfit/errors.hpp"

namespace arcfit {

DualProblem make_dual_problem(GramMatrix gram, MomentVector moments, ConstraintGrid grid,
                              Eigen::VectorXd bounds) {
    const Eigen::Index size = gram.entries.rows();
    if (size < 1 || gram.entries.cols() != size) throw InputError("Gram matrix must be square and nonempty");
    if (moments.b.size() != size) throw InputError("moment vector length does not match the degree");
    if (static_cast<std::size_t>(bounds.size()) != grid.size())
        throw InputError("one bound per constraint grid point is required");
    if (grid.size() == 0) throw InputError("constraint grid is empty");
    for (Eigen::Index k = 0; k < bounds.size(); ++k)
        if (!(bounds(k) > 0.0) || !std::isfinite(bounds(k))) throw InputError("bounds must be positive and finite");
    if (!(moments.norm_f_sq >= 0.0) || !std::isfinite(moments.norm_f_sq) || !moments.b.allFinite())
        throw InputError("moments must be finite");
    return DualProblem{std::move(gram), std::move(moments), std::move(grid), std::move(bounds)};
}

Eigen::VectorXd expand_bounds(const ConstraintGrid& grid, const std::vector<double>& per_component) {
    if (per_component.empty()) throw InputError("at least one bound value is required");
    const std::size_t comps = grid.components.size();
    if (per_component.size() != 1 && per_component.size() != comps)
        throw InputError("bound needs one value or one per J component (" + std::to_string(comps) + ")");
    Eigen::VectorXd out(static_cast<Eigen::Index>(grid.size()));
    for (std::size_t k = 0; k < grid.size(); ++k)
        out(static_cast<Eigen::Index>(k)) = per_component.size() == 1 ? per_component[0] : per_component[grid.component[k]];
    return out;
}

Eigen::MatrixXcd evaluation_matrix(const std::vector<double>& angles, int n) {
    Eigen::MatrixXcd V(static_cast<Eigen::Index>(angles.size()), n + 1);
    for (std::size_t k = 0; k < angles.size(); ++k)
        for (int j = 0; j <= n; ++j) V(static_cast<Eigen::Index>(k), j) = std::polar(1.0, j * angles[k]);
    return V;
}

Eigen::VectorXcd evaluate_polynomial(const Eigen::VectorXcd& coefficients, const std::vector<double>& angles) {
    return evaluation_matrix(angles, static_cast<int>(coefficients.size()) - 1) * coefficients;
}

double primal_value(const Eigen::VectorXcd& coefficients, const GramMatrix& gram, const MomentVector& moments) {
    const double cross = moments.b.dot(coefficients).real();
    const double quad = coefficients.dot(gram.entries * coefficients).real();
    return moments.norm_f_sq - 2.0 * cross + quad;
}

std::string to_string(SolveStatus status) {
    switch (status) {
        case SolveStatus::converged: return "converged";
        case SolveStatus::max_iter: return "max_iter";
        case SolveStatus::infeasible_input: return "infeasible_input";
    }
    return "unknown";
}

std::optional<SolveStatus> solve_status_from_string(const std::string& text) {
    for (SolveStatus s : {SolveStatus::converged, SolveStatus::max_iter, SolveStatus::infeasible_input})
        if (to_string(s) == text) return s;
    return std::nullopt;
}

namespace {

// Relative Cholesky pivot below which A(lambda) is treated as not positive definite.
constexpr double kSystemPivotFloor = 1e-15;
// Residual of A(lambda) c = b, relative to max(1, ||b||), accepted for a primal-dual pair.
constexpr double kPairResidualTol = 1e-10;

struct Evaluation {
    Eigen::VectorXd lambda;
    Eigen::LLT<Eigen::MatrixXcd> factor;
    Eigen::VectorXcd c;
    Eigen::VectorXcd values;  // g(x_k)
    Eigen::VectorXd gradient;
    double dual = 0.0;
};

class DualEvaluator {
public:
    explicit DualEvaluator(const DualProblem& problem)
        : problem_(problem), V_(evaluation_matrix(problem.grid.points, problem.degree())) {}

    [[nodiscard]] const Eigen::MatrixXcd& V() const { return V_; }

    // Returns nullopt when A(lambda) is not safely positive definite.
    [[nodiscard]] std::optional<Evaluation> evaluate(const Eigen::VectorXd& lambda) const {
        // sum_k lambda_k v_k v_k^H is Hermitian Toeplitz with symbol s(d) = sum_k lambda_k x_k^d.
        const Eigen::VectorXcd symbol = V_.transpose() * lambda.cast<cplx>();
        Eigen::MatrixXcd A = problem_.gram.entries + hermitian_toeplitz(symbol);
        Evaluation ev;
        ev.factor.compute(A);
        if (ev.factor.info() != Eigen::Success) return std::nullopt;
        const Eigen::VectorXd pivots = ev.factor.matrixLLT().diagonal().real().cwiseAbs2();
        if (!(pivots.minCoeff() >= kSystemPivotFloor * pivots.maxCoeff())) return std::nullopt;

        ev.lambda = lambda;
        ev.c = ev.factor.solve(problem_.moments.b);
        ev.values = V_ * ev.c;
        ev.gradient = ev.values.cwiseAbs2() - problem_.bounds.cwiseAbs2();
        ev.dual = problem_.moments.norm_f_sq - problem_.moments.b.dot(ev.c).real() -
                  lambda.dot(problem_.bounds.cwiseAbs2());
        if (!std::isfinite(ev.dual) || !ev.c.allFinite()) throw InternalError("non-finite value in dual evaluation");
        return ev;
    }

    // Evaluation at a (lambda, c) pair whose c already solves A(lambda) c = b to
    // within `tol` (relative to max(1, ||b||)). When A(lambda) is nearly singular
    // such a c is more accurate than a fresh solve. Returns nullopt otherwise.
    [[nodiscard]] std::optional<Evaluation> evaluate_pair(const Eigen::VectorXd& lambda, const Eigen::VectorXcd& c,
                                                          double tol) const {
        const Eigen::VectorXcd symbol = V_.transpose() * lambda.cast<cplx>();
        const Eigen::MatrixXcd A = problem_.gram.entries + hermitian_toeplitz(symbol);
        const double residual = (A * c - problem_.moments.b).cwiseAbs().maxCoeff();
        if (!(residual <= tol * std::max(1.0, problem_.moments.b.norm()))) return std::nullopt;
        Evaluation ev;
        ev.factor.compute(A);
        ev.lambda = lambda;
        ev.c = c;
        ev.values = V_ * c;
        ev.gradient = ev.values.cwiseAbs2() - problem_.bounds.cwiseAbs2();
        // Lagrangian at (c, lambda); equals the dual value when c is the exact minimizer.
        ev.dual = primal_value(c, problem_.gram, problem_.moments) + lambda.dot(ev.gradient);
        if (!std::isfinite(ev.dual) || !ev.c.allFinite()) throw InternalError("non-finite value in dual evaluation");
        return ev;
    }

    // Hessian restricted to the index set `free`.
    [[nodiscard]] Eigen::MatrixXd hessian(const Evaluation& ev, const std::vector<Eigen::Index>& free) const {
        const Eigen::Index count = static_cast<Eigen::Index>(free.size());
        Eigen::MatrixXcd VfH(V_.cols(), count);
        Eigen::VectorXcd g(count);
        for (Eigen::Index a = 0; a < count; ++a) {
            VfH.col(a) = V_.row(free[a]).adjoint();
            g(a) = ev.values(free[a]);
        }
        // v_k^H A^{-1} v_l = (L^{-1} v_k)^H (L^{-1} v_l)
        ev.factor.matrixL().solveInPlace(VfH);
        const Eigen::MatrixXcd M = VfH.adjoint() * VfH;
        Eigen::MatrixXd H(count, count);
        for (Eigen::Index a = 0; a < count; ++a)
            for (Eigen::Index b = 0; b < count; ++b) H(a, b) = -2.0 * (std::conj(g(a)) * M(a, b) * g(b)).real();
        return H;
    }

private:
    const DualProblem& problem_;
    Eigen::MatrixXcd V_;
};

std::vector<Eigen::Index> all_indices(Eigen::Index count) {
    std::vector<Eigen::Index> idx(static_cast<std::size_t>(count));
    for (Eigen::Index k = 0; k < count; ++k) idx[static_cast<std::size_t>(k)] = k;
    return idx;
}

// Starting point used when G alone is numerically singular: multipliers shaped
// like trapezoid weights on J, scaled to the best of a few decades.
std::optional<Evaluation> spread_start(const DualEvaluator& evaluator, const DualProblem& problem) {
    const ConstraintGrid& grid = problem.grid;
    Eigen::VectorXd shape = Eigen::VectorXd::Zero(problem.constraint_count());
    for (std::size_t k = 0; k < grid.size(); ++k) {
        const double h = grid.component_spacing[grid.component[k]] / kTwoPi;
        const bool first = k == 0 || grid.component[k - 1] != grid.component[k];
        const bool last = k + 1 == grid.size() || grid.component[k + 1] != grid.component[k];
        shape(static_cast<Eigen::Index>(k)) = (first || last) ? 0.5 * h : h;
    }
    const double scale = std::max(1.0, problem.moments.norm_f_sq) / problem.bounds.cwiseAbs2().maxCoeff();
    std::optional<Evaluation> best;
    for (int e = -6; e <= 3; ++e) {
        auto ev = evaluator.evaluate(std::pow(10.0, e) * scale * shape);
        if (ev && (!best || ev->dual > best->dual)) best = std::move(ev);
    }
    return best;
}

Eigen::VectorXd project(const Eigen::VectorXd& lambda) { return lambda.cwiseMax(0.0); }

// Real 2N x 2N matrix of the real-linear map c -> A c for Hermitian A.
Eigen::MatrixXd real_form(const Eigen::MatrixXcd& A) {
    const Eigen::Index N = A.rows();
    Eigen::MatrixXd out(2 * N, 2 * N);
    out.topLeftCorner(N, N) = A.real();
    out.topRightCorner(N, N) = -A.imag();
    out.bottomLeftCorner(N, N) = A.imag();
    out.bottomRightCorner(N, N) = A.real();
    return out;
}

Eigen::VectorXd stack(const Eigen::VectorXcd& z) {
    Eigen::VectorXd out(2 * z.size());
    out << z.real(), z.imag();
    return out;
}

Eigen::VectorXcd unstack(const Eigen::VectorXd& x) {
    const Eigen::Index N = x.size() / 2;
    Eigen::VectorXcd out(N);
    out.real() = x.head(N);
    out.imag() = x.tail(N);
    return out;
}

double max_step(const Eigen::VectorXd& value, const Eigen::VectorXd& step) {
    double alpha = 1.0;
    for (Eigen::Index k = 0; k < value.size(); ++k)
        if (step(k) < 0.0) alpha = std::min(alpha, -value(k) / step(k));
    return alpha;
}

struct InteriorPointEstimate {
    Eigen::VectorXd lambda;
    Eigen::VectorXcd c;
    int iterations = 0;
    bool converged = false;
};

// Mehrotra predictor-corrector on the joint system
//     2(G c - b) + 2 sum_k lambda_k g_k v_k = 0
//     |g_k|^2 - rho_k^2 + s_k = 0
//     lambda_k s_k = mu
// in the real unknowns [Re c; Im c]. The constraint gradient of |g_k|^2 is the
// complex vector z_k = 2 g_k v_k, and J^T (Lambda/S) J splits into a Toeplitz part
// sum d_k z_k z_k^H and a Hankel part sum d_k z_k z_k^T, so a step costs O(m n + n^3).
InteriorPointEstimate interior_point_estimate(const DualProblem& problem, const Eigen::MatrixXcd& V, int max_iter) {
    const Eigen::Index N = V.cols();
    const Eigen::Index M = V.rows();
    const double scale = std::max(1.0, problem.moments.norm_f_sq);
    const Eigen::VectorXd rho2 = problem.bounds.cwiseAbs2();
    const Eigen::MatrixXcd& G = problem.gram.entries;
    const Eigen::VectorXcd& b = problem.moments.b;

    Eigen::MatrixXcd powers(M, 2 * N - 1);
    for (Eigen::Index k = 0; k < M; ++k)
        for (Eigen::Index d = 0; d < 2 * N - 1; ++d)
            powers(k, d) = std::polar(1.0, static_cast<double>(d) * problem.grid.points[static_cast<std::size_t>(k)]);
    const Eigen::MatrixXcd low_powers_t = powers.leftCols(N).transpose();
    const Eigen::MatrixXcd conj_powers_t = powers.conjugate().transpose();

    Eigen::VectorXcd c = Eigen::VectorXcd::Zero(N);
    Eigen::VectorXd s = rho2;
    Eigen::VectorXd lambda = (scale / static_cast<double>(M)) * rho2.cwiseInverse();

    const double tol_dual = 1e-11 * scale;
    const double tol_primal = 1e-11 * rho2.maxCoeff();
    const double tol_gap = 1e-13 * scale;

    InteriorPointEstimate out;
    for (int iter = 0; iter < max_iter; ++iter) {
        const Eigen::VectorXcd g = V * c;
        const Eigen::VectorXcd r_dual = 2.0 * (G * c - b) + 2.0 * V.adjoint() * (lambda.cast<cplx>().cwiseProduct(g));
        const Eigen::VectorXd r_primal = g.cwiseAbs2() - rho2 + s;
        const double mu = lambda.dot(s) / static_cast<double>(M);
        out.iterations = iter;
        if (r_dual.cwiseAbs().maxCoeff() <= tol_dual && r_primal.cwiseAbs().maxCoeff() <= tol_primal && mu <= tol_gap) {
            out.converged = true;
            break;
        }

        const Eigen::VectorXd ratio = lambda.cwiseQuotient(s);
        const Eigen::VectorXcd toeplitz_a = low_powers_t * lambda.cast<cplx>();
        const Eigen::VectorXcd toeplitz_p = low_powers_t * (4.0 * ratio.cwiseProduct(g.cwiseAbs2())).cast<cplx>();
        const Eigen::VectorXcd hankel_s = conj_powers_t * (4.0 * ratio.cast<cplx>().cwiseProduct(g.cwiseProduct(g)));
        const Eigen::MatrixXcd P = hermitian_toeplitz(toeplitz_p);
        Eigen::MatrixXcd S(N, N);
        for (Eigen::Index j = 0; j < N; ++j)
            for (Eigen::Index l = 0; l < N; ++l) S(j, l) = hankel_s(j + l);

        Eigen::MatrixXd K = 2.0 * real_form(G + hermitian_toeplitz(toeplitz_a));
        K.topLeftCorner(N, N) += 0.5 * (P.real() + S.real());
        K.topRightCorner(N, N) += 0.5 * (S.imag() - P.imag());
        K.bottomLeftCorner(N, N) += 0.5 * (S.imag() + P.imag());
        K.bottomRightCorner(N, N) += 0.5 * (P.real() - S.real());
        // Near the solution K mixes huge and tiny ratios lambda/s on top of a
        // possibly singular G; a tiny diagonal shift keeps the step computable.
        Eigen::LLT<Eigen::MatrixXd> llt(K);
        for (double shift = 1e-15 * K.diagonal().maxCoeff(); llt.info() != Eigen::Success && shift < 1e-6 * K.diagonal().maxCoeff();
             shift *= 100.0) {
            Eigen::MatrixXd shifted = K;
            shifted.diagonal().array() += shift;
            llt.compute(shifted);
        }
        if (llt.info() != Eigen::Success) break;

        struct Step {
            Eigen::VectorXcd dc;
            Eigen::VectorXd ds, dlambda;
        };
        auto solve = [&](const Eigen::VectorXd& r_comp) {
            const Eigen::VectorXd y = (lambda.cwiseProduct(r_primal) - r_comp).cwiseQuotient(s);
            const Eigen::VectorXcd rhs = -r_dual - 2.0 * V.adjoint() * (y.cast<cplx>().cwiseProduct(g));
            Step st;
            st.dc = unstack(llt.solve(stack(rhs)));
            const Eigen::VectorXd jdx = 2.0 * (g.conjugate().cwiseProduct(V * st.dc)).real();
            st.ds = -r_primal - jdx;
            st.dlambda = (lambda.cwiseProduct(r_primal + jdx) - r_comp).cwiseQuotient(s);
            return st;
        };

        const Step affine = solve(lambda.cwiseProduct(s));
        const double alpha_aff = std::min(max_step(s, affine.ds), max_step(lambda, affine.dlambda));
        const double mu_aff = (s + alpha_aff * affine.ds).dot(lambda + alpha_aff * affine.dlambda) / static_cast<double>(M);
        const double sigma = std::pow(std::clamp(mu_aff / mu, 0.0, 1.0), 3);
        const Eigen::VectorXd r_comp = lambda.cwiseProduct(s) + affine.ds.cwiseProduct(affine.dlambda) -
                                       Eigen::VectorXd::Constant(M, sigma * mu);
        const Step step = solve(r_comp);
        const double alpha = std::min(1.0, 0.995 * std::min(max_step(s, step.ds), max_step(lambda, step.dlambda)));
        if (!step.dc.allFinite() || !(alpha > 0.0)) break;
        c += alpha * step.dc;
        s += alpha * step.ds;
        lambda += alpha * step.dlambda;
        out.iterations = iter + 1;
    }
    out.lambda = lambda;
    out.c = c;
    return out;
}

}  // namespace

InnerSolution inner_minimize(const Eigen::VectorXd& lambda, const DualProblem& problem) {
    if (lambda.size() != problem.constraint_count()) throw InputError("one multiplier per grid point is required");
    if ((lambda.array() < 0.0).any()) throw InputError("multipliers must be nonnegative");
    DualEvaluator evaluator(problem);
    auto ev = evaluator.evaluate(lambda);
    if (!ev) throw InternalError("A(lambda) = G + sum lambda_k v_k v_k^H failed to factor; G is not positive definite");
    return InnerSolution{ev->c, ev->dual, ev->gradient};
}

Eigen::MatrixXd dual_hessian(const Eigen::VectorXd& lambda, const DualProblem& problem) {
    if (lambda.size() != problem.constraint_count()) throw InputError("one multiplier per grid point is required");
    DualEvaluator evaluator(problem);
    auto ev = evaluator.evaluate(lambda);
    if (!ev) throw InternalError("A(lambda) failed to factor");
    return evaluator.hessian(*ev, all_indices(lambda.size()));
}

SolveResult maximize_dual(const DualProblem& problem, const SolverOptions& options) {
    SolveResult result;
    const Eigen::Index count = problem.constraint_count();
    if (count == 0 || !(problem.bounds.array() > 0.0).all() || !problem.moments.b.allFinite() ||
        !std::isfinite(problem.moments.norm_f_sq)) {
        result.status = SolveStatus::infeasible_input;
        result.message = "bounds must be positive and data finite";
        return result;
    }

    const double scale = std::max(1.0, problem.moments.norm_f_sq);
    const double eps = options.tol_kkt * scale;
    DualEvaluator evaluator(problem);

    auto satisfies_kkt = [&](const Evaluation& ev) {
        return ev.gradient.maxCoeff() <= eps && (ev.lambda.array() * ev.gradient.array().abs()).maxCoeff() <= eps;
    };

    std::optional<Evaluation> current;
    if (options.initial_multipliers) {
        if (options.initial_multipliers->size() != count || (options.initial_multipliers->array() < 0.0).any())
            throw InputError("initial multipliers must be nonnegative, one per grid point");
        current = evaluator.evaluate(*options.initial_multipliers);
        result.start = "given";
    } else {
        current = evaluator.evaluate(Eigen::VectorXd::Zero(count));
        result.start = "zero";
        const bool done = current && satisfies_kkt(*current);
        if (!done && options.warm_start != WarmStart::none) {
            InteriorPointEstimate estimate = interior_point_estimate(problem, evaluator.V(), options.interior_max_iter);
            result.interior_iterations = estimate.iterations;
            // A converged interior-point pair is kept as is when it passes the KKT
            // test: re-solving for c from lambda alone can lose accuracy when G is
            // nearly singular and the multipliers are small.
            std::optional<Evaluation> warm;
            if (estimate.converged) {
                warm = evaluator.evaluate_pair(estimate.lambda, estimate.c, kPairResidualTol);
                if (warm && !satisfies_kkt(*warm)) warm.reset();
            }
            if (!warm) warm = evaluator.evaluate(estimate.lambda);
            if (warm && (!current || warm->dual >= current->dual || satisfies_kkt(*warm))) {
                current = std::move(warm);
                result.start = "interior_point";
            }
        }
    }
    if (!current) {
        current = spread_start(evaluator, problem);
        result.start = "spread";
        if (!current)
            throw ConditioningError("A(lambda) is numerically singular for every starting point; try a lower degree",
                                    0.0);
    }
    result.dual_history.push_back(current->dual);

    constexpr double kArmijo = 1e-4;
    constexpr int kMaxBacktracks = 40;
    const double dual_slack = 1e-12 * scale;

    // Armijo ascent on the dual; once dual differences drop below what floating
    // point resolves, a step that halves the projected-gradient residual without
    // losing more than the slack is also taken.
    auto residual = [](const Evaluation& ev) {
        return (ev.lambda - project(ev.lambda + ev.gradient)).cwiseAbs().maxCoeff();
    };
    auto accept = [&](const Evaluation& from, const Eigen::VectorXd& trial) -> std::optional<Evaluation> {
        auto ev = evaluator.evaluate(trial);
        if (!ev || ev->dual < from.dual - dual_slack) return std::nullopt;
        const double predicted = from.gradient.dot(trial - from.lambda);
        if (predicted > 0.0 && ev->dual >= from.dual + kArmijo * predicted) return ev;
        if (residual(*ev) <= 0.5 * residual(from)) return ev;
        return std::nullopt;
    };

    // Stop early when the projected-gradient residual has not improved for a
    // while: the iterate is then as good as double precision allows.
    constexpr int kStallWindow = 25;
    double best_residual = residual(*current);
    int since_improvement = 0;

    int iter = 0;
    bool converged = false;
    for (; iter < options.max_iter; ++iter) {
        if (satisfies_kkt(*current)) {
            converged = true;
            break;
        }
        const Eigen::VectorXd& lambda = current->lambda;
        const Eigen::VectorXd& grad = current->gradient;

        // Variables at (or within a shrinking band of) the bound whose gradient
        // pulls them down are moved by a scaled gradient step; the rest are free
        // and get a regularized Newton step.
        const double width = std::min(residual(*current), 1e-3 * lambda.maxCoeff());
        std::vector<Eigen::Index> free;
        std::vector<Eigen::Index> held;
        for (Eigen::Index k = 0; k < count; ++k) {
            if (lambda(k) <= width && grad(k) <= eps)
                held.push_back(k);
            else
                free.push_back(k);
        }

        std::optional<Evaluation> next;
        Eigen::MatrixXd neg_hessian;
        double curvature = 0.0;
        if (!free.empty()) {
            neg_hessian = -evaluator.hessian(*current, free);
            curvature = neg_hessian.diagonal().maxCoeff();
        }
        if (!(curvature > 0.0)) curvature = std::max(1.0, grad.cwiseAbs().maxCoeff());

        if (!free.empty()) {
            Eigen::VectorXd grad_free(static_cast<Eigen::Index>(free.size()));
            for (std::size_t a = 0; a < free.size(); ++a) grad_free(static_cast<Eigen::Index>(a)) = grad(free[a]);
            double mu = std::max(1e-12 * curvature, std::min(grad_free.cwiseAbs().maxCoeff(), curvature));
            Eigen::VectorXd step_free;
            for (int attempt = 0; attempt < 6 && step_free.size() == 0; ++attempt, mu *= 100.0) {
                Eigen::MatrixXd system = neg_hessian;
                system.diagonal().array() += mu;
                Eigen::LLT<Eigen::MatrixXd> llt(system);
                if (llt.info() != Eigen::Success) continue;
                step_free = llt.solve(grad_free);
                if (!step_free.allFinite()) step_free.resize(0);
            }
            if (step_free.size() > 0) {
                Eigen::VectorXd direction = Eigen::VectorXd::Zero(count);
                for (std::size_t a = 0; a < free.size(); ++a) direction(free[a]) = step_free(static_cast<Eigen::Index>(a));
                for (Eigen::Index k : held) direction(k) = grad(k) / curvature;
                double alpha = 1.0;
                for (int bt = 0; bt < kMaxBacktracks && !next; ++bt, alpha *= 0.5)
                    next = accept(*current, project(lambda + alpha * direction));
            }
        }

        if (!next) {
            double alpha = 1.0 / curvature;
            for (int bt = 0; bt < 2 * kMaxBacktracks && !next; ++bt, alpha *= 0.5)
                next = accept(*current, project(lambda + alpha * grad));
        }
        if (!next) {
            result.message = "line search stalled at the precision floor";
            break;
        }
        current = std::move(next);
        result.dual_history.push_back(current->dual);
        const double r = residual(*current);
        if (r < 0.99 * best_residual) {
            best_residual = r;
            since_improvement = 0;
        } else if (++since_improvement >= kStallWindow) {
            ++iter;
            result.message = "no progress in the KKT residual for " + std::to_string(kStallWindow) + " iterations";
            break;
        }
    }

    result.coefficients = current->c;
    result.multipliers = current->lambda;
    result.gradient = current->gradient;
    result.dual_value = current->dual;
    const double primal = primal_value(current->c, problem.gram, problem.moments);
    result.misfit = std::max(0.0, primal);
    result.duality_gap = primal - result.dual_value;
    result.max_violation = current->gradient.maxCoeff();
    result.max_complementarity = (current->lambda.array() * current->gradient.array().abs()).maxCoeff();
    result.iterations = iter;
    result.status = converged ? SolveStatus::converged : SolveStatus::max_iter;
    if (converged)
        result.message.clear();
    else if (result.message.empty())
        result.message = "iteration limit reached";
    return result;
}

}  // namespace arcfit
