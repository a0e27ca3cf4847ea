#include "doctest.h"

#include <cmath>
#include <random>

#include "arcfit/dualsolver.hpp"
#include "arcfit/errors.hpp"
#include "arcfit/problem.hpp"
#include "support.hpp"

using namespace arcfit;
using testsupport::constant_case;
using testsupport::custom_case;
using testsupport::inputs_for;
using testsupport::polynomial_case;

namespace {

DualProblem small_problem(int n, int m, const SyntheticCase& data_case, double rho = 1.0,
                          GramChoice gram = GramChoice::automatic) {
    return assemble_problem(inputs_for({{0.25, 1.75}}, data_case, 150.0, {rho}, gram), n, m).problem;
}

Eigen::VectorXd positive_lambda(Eigen::Index size, unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> u(0.01, 0.3);
    Eigen::VectorXd lambda(size);
    for (Eigen::Index k = 0; k < size; ++k) lambda(k) = u(rng);
    return lambda;
}

}  // namespace

TEST_CASE("bounds expand per J component") {
    ArcSystem arcs({{0.0, 0.5 * kPi}, {0.8 * kPi, 1.4 * kPi}});
    const ConstraintGrid grid = build_constraint_grid(arcs, 6);
    const Eigen::VectorXd single = expand_bounds(grid, {0.7});
    CHECK(single.size() == static_cast<Eigen::Index>(grid.size()));
    CHECK((single.array() == 0.7).all());
    const Eigen::VectorXd per = expand_bounds(grid, {0.5, 2.0});
    for (std::size_t k = 0; k < grid.size(); ++k) CHECK(per(static_cast<Eigen::Index>(k)) == (grid.component[k] == 0 ? 0.5 : 2.0));
    CHECK_THROWS_AS(expand_bounds(grid, {1.0, 2.0, 3.0}), InputError);
    CHECK_THROWS_AS(make_dual_problem(gram_closed_form(arcs, 2), MomentVector{Eigen::VectorXcd::Zero(3), 0.0}, grid,
                                      expand_bounds(grid, {0.0})),
                    InputError);
}

TEST_CASE("evaluation matrix agrees with Horner") {
    const Eigen::VectorXcd c = (Eigen::VectorXcd(4) << cplx(1, 2), cplx(-0.5, 0), cplx(0, 0.25), cplx(3, -1)).finished();
    const std::vector<double> angles = {0.0, 0.7, 2.0, 4.4};
    const Eigen::VectorXcd g = evaluate_polynomial(c, angles);
    const Eigen::MatrixXcd V = evaluation_matrix(angles, 3);
    for (std::size_t k = 0; k < angles.size(); ++k) {
        const cplx z = std::polar(1.0, angles[k]);
        cplx horner = 0.0;
        for (int j = 3; j >= 0; --j) horner = horner * z + c(j);
        CHECK(std::abs(g(static_cast<Eigen::Index>(k)) - horner) < 1e-13);
        CHECK(std::abs((V * c)(static_cast<Eigen::Index>(k)) - horner) < 1e-13);
    }
}

TEST_CASE("inner problem at lambda = 0 is the unconstrained projection") {
    const DualProblem p = small_problem(4, 8, custom_case("exp(z)"));
    const InnerSolution s = inner_minimize(Eigen::VectorXd::Zero(p.constraint_count()), p);
    const Eigen::VectorXcd direct = p.gram.entries.ldlt().solve(p.moments.b);
    CHECK((s.coefficients - direct).cwiseAbs().maxCoeff() < 1e-10);
    CHECK(s.dual_value == doctest::Approx(primal_value(s.coefficients, p.gram, p.moments)).epsilon(1e-12));
    CHECK_THROWS_AS(inner_minimize(-Eigen::VectorXd::Ones(p.constraint_count()), p), InputError);
}

TEST_CASE("dual gradient and Hessian match finite differences") {
    const DualProblem p = small_problem(6, 12, constant_case(1.6));
    for (unsigned seed = 1; seed <= 4; ++seed) {
        const Eigen::VectorXd lambda = positive_lambda(p.constraint_count(), seed);
        const auto dual = [&](const Eigen::VectorXd& l) { return inner_minimize(l, p).dual_value; };
        const auto grad = [&](const Eigen::VectorXd& l) { return Eigen::VectorXd(inner_minimize(l, p).gradient); };

        const Eigen::VectorXd g = inner_minimize(lambda, p).gradient;
        const Eigen::VectorXd fd = testsupport::fd_gradient(dual, lambda, 1e-5);
        CHECK((g - fd).cwiseAbs().maxCoeff() / std::max(1.0, g.cwiseAbs().maxCoeff()) < 1e-6);

        const Eigen::MatrixXd H = dual_hessian(lambda, p);
        CHECK((H - H.transpose()).cwiseAbs().maxCoeff() < 1e-12);
        Eigen::MatrixXd fdH(H.rows(), H.cols());
        for (Eigen::Index k = 0; k < lambda.size(); ++k) {
            const double h = 1e-6;
            Eigen::VectorXd lp = lambda, lm = lambda;
            lp(k) += h;
            lm(k) -= h;
            fdH.col(k) = (grad(lp) - grad(lm)) / (2 * h);
        }
        CHECK((H - fdH).cwiseAbs().maxCoeff() / std::max(1.0, H.cwiseAbs().maxCoeff()) < 1e-5);
        // concavity
        CHECK(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(H).eigenvalues().maxCoeff() < 1e-10);
    }
}

TEST_CASE("weak duality: every dual value bounds the primal optimum from below") {
    const DualProblem p = small_problem(5, 10, constant_case(2.0));
    const SolveResult r = maximize_dual(p);
    REQUIRE(r.status == SolveStatus::converged);
    for (unsigned seed = 1; seed <= 5; ++seed)
        CHECK(inner_minimize(positive_lambda(p.constraint_count(), seed), p).dual_value <= r.misfit + 1e-9);
    // g = 0 is feasible
    CHECK(r.misfit <= p.moments.norm_f_sq);
    CHECK(std::abs(r.duality_gap) < 1e-7);
}

TEST_CASE("n = 0: the best constant under |g| <= 1 for f = 2 is 1") {
    const DualProblem p = assemble_problem(inputs_for({{0.0, 1.0}}, constant_case(2.0), 400.0, {1.0}), 0, 1).problem;
    const SolveResult r = maximize_dual(p);
    REQUIRE(r.status == SolveStatus::converged);
    CHECK(std::abs(r.coefficients(0) - 1.0) < 1e-8);
    // f - g = 1 on half the circle
    CHECK(r.misfit == doctest::Approx(0.5).epsilon(1e-8));
    CHECK((r.multipliers.array() >= 0.0).all());
    CHECK(r.multipliers.sum() == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("a feasible polynomial trace is reproduced with zero multipliers") {
    const SyntheticCase trace = polynomial_case({cplx(0.2, 0.1), cplx(0.3, 0), cplx(0, -0.2), cplx(0.1, 0.05)});
    const DualProblem p = small_problem(3, 24, trace, 1.0, GramChoice::quadrature);
    const SolveResult r = maximize_dual(p);
    REQUIRE(r.status == SolveStatus::converged);
    CHECK(r.misfit <= 1e-12);
    CHECK(r.multipliers.cwiseAbs().maxCoeff() == 0.0);
    CHECK(r.start == "zero");
    for (int j = 0; j < 4; ++j) CHECK(std::abs(r.coefficients(j) - trace.coefficients[static_cast<std::size_t>(j)]) < 1e-10);
}

TEST_CASE("KKT conditions hold at the returned point") {
    for (double value : {1.2, 2.0, 5.0}) {
        for (int n : {1, 4, 9}) {
            const DualProblem p = small_problem(n, 3 * n, constant_case(value));
            const SolveResult r = maximize_dual(p);
            CAPTURE(value);
            CAPTURE(n);
            REQUIRE(r.status == SolveStatus::converged);
            const double scale = std::max(1.0, p.moments.norm_f_sq);
            CHECK((r.multipliers.array() >= 0.0).all());
            CHECK(r.max_violation <= 1e-8 * scale);
            CHECK(r.max_complementarity <= 1e-8 * scale);
            CHECK(std::abs(r.duality_gap) <= 1e-7 * scale);
            const Eigen::VectorXcd g = evaluate_polynomial(r.coefficients, p.grid.points);
            CHECK((g.cwiseAbs().array() <= 1.0 + 1e-8).all());
        }
    }
}

TEST_CASE("warm starts do not change the optimum") {
    const DualProblem p = small_problem(8, 16, custom_case("1.5*exp(2*i*theta) + 0.3"));
    SolverOptions cold;
    cold.warm_start = WarmStart::none;
    SolverOptions warm;
    warm.warm_start = WarmStart::interior_point;
    const SolveResult a = maximize_dual(p, cold);
    const SolveResult b = maximize_dual(p, warm);
    REQUIRE(a.status == SolveStatus::converged);
    REQUIRE(b.status == SolveStatus::converged);
    CHECK(a.start == "zero");
    CHECK(b.start == "interior_point");
    CHECK(b.interior_iterations > 0);
    CHECK((a.coefficients - b.coefficients).cwiseAbs().maxCoeff() < 1e-5);
    CHECK(a.misfit == doctest::Approx(b.misfit).epsilon(1e-7));

    SolverOptions given;
    given.initial_multipliers = b.multipliers;
    const SolveResult c = maximize_dual(p, given);
    CHECK(c.start == "given");
    CHECK(c.iterations <= 1);

    // accepted iterates never lose dual value beyond round-off
    for (std::size_t i = 1; i < a.dual_history.size(); ++i)
        CHECK(a.dual_history[i] >= a.dual_history[i - 1] - 1e-11 * std::max(1.0, p.moments.norm_f_sq));
}

TEST_CASE("solver input checks") {
    DualProblem p = small_problem(2, 4, constant_case(2.0));
    SolverOptions bad;
    bad.initial_multipliers = Eigen::VectorXd::Ones(3);
    CHECK_THROWS_AS(maximize_dual(p, bad), InputError);

    p.bounds(0) = 0.0;
    CHECK(maximize_dual(p).status == SolveStatus::infeasible_input);
    CHECK(to_string(SolveStatus::max_iter) == "max_iter");
    CHECK(solve_status_from_string("converged") == SolveStatus::converged);
    CHECK_FALSE(solve_status_from_string("nope").has_value());
}

TEST_CASE("iteration cap is reported") {
    const DualProblem p = small_problem(10, 20, constant_case(3.0));
    SolverOptions opts;
    opts.warm_start = WarmStart::none;
    opts.max_iter = 1;
    const SolveResult r = maximize_dual(p, opts);
    CHECK(r.status == SolveStatus::max_iter);
    CHECK(r.iterations == 1);
}
