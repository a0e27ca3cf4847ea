#pragma once

// Reference computations used by the tests. None of them goes through the
// library's Gram/moment assembly or dual solver, so agreement is meaningful.

#include <algorithm>
#include <cmath>
#include <complex>
#include <functional>
#include <limits>
#include <random>
#include <vector>

#include <Eigen/Dense>

#include "arcfit/arcgeom.hpp"
#include "arcfit/dualsolver.hpp"
#include "arcfit/ingest.hpp"
#include "arcfit/moments.hpp"
#include "arcfit/problem.hpp"

namespace testsupport {

using arcfit::cplx;

/// <z^k, z^j>_I by composite Simpson with `nodes` (even) intervals per arc.
/// Each offset k - j is integrated once and spread along its diagonal.
inline Eigen::MatrixXcd simpson_gram(const arcfit::ArcSystem& arcs, int n, int nodes) {
    std::vector<cplx> t(static_cast<std::size_t>(2 * n + 1), cplx(0.0, 0.0));  // t[d + n] = int e^{i d theta}
    for (const arcfit::Arc& arc : arcs.approximation_arcs()) {
        const double h = arc.length() / nodes;
        for (int s = 0; s <= nodes; ++s) {
            const double w = (s == 0 || s == nodes) ? 1.0 : (s % 2 ? 4.0 : 2.0);
            const double theta = arc.lo + s * h;
            for (int d = -n; d <= n; ++d) t[static_cast<std::size_t>(d + n)] += w * h / 3.0 * std::polar(1.0, d * theta);
        }
    }
    Eigen::MatrixXcd G(n + 1, n + 1);
    for (int j = 0; j <= n; ++j)
        for (int k = 0; k <= n; ++k) G(j, k) = t[static_cast<std::size_t>(k - j + n)];
    return G / arcfit::kTwoPi;
}

/// Trapezoid weights (including 1/2pi) of samples laid out arc by arc in
/// increasing order along each arc, computed from angle offsets.
inline std::vector<double> trapezoid_weights(const arcfit::SampledBoundaryData& data, const arcfit::ArcSystem& arcs) {
    std::vector<double> q(data.samples.size(), 0.0);
    for (const arcfit::Arc& arc : arcs.approximation_arcs()) {
        std::vector<std::size_t> idx;
        for (std::size_t s = 0; s < data.samples.size(); ++s)
            if (arc.contains_closed(data.samples[s].theta)) idx.push_back(s);
        auto off = [&](std::size_t s) {
            const double u = arc.offset(data.samples[s].theta);
            return u > arc.length() + 1e-9 ? 0.0 : u;
        };
        for (std::size_t a = 0; a + 1 < idx.size(); ++a) {
            const double h = off(idx[a + 1]) - off(idx[a]);
            q[idx[a]] += 0.5 * h / arcfit::kTwoPi;
            q[idx[a + 1]] += 0.5 * h / arcfit::kTwoPi;
        }
    }
    return q;
}

/// Discrete primal objective sum_s q_s |f_s - g(theta_s)|^2 evaluated sample by sample.
struct SampleObjective {
    std::vector<double> q;
    std::vector<cplx> f;
    Eigen::MatrixXcd E;  // E(s, j) = e^{i j theta_s}

    SampleObjective(const arcfit::SampledBoundaryData& data, const arcfit::ArcSystem& arcs, int n)
        : q(trapezoid_weights(data, arcs)), E(static_cast<Eigen::Index>(data.samples.size()), n + 1) {
        for (std::size_t s = 0; s < data.samples.size(); ++s) {
            f.push_back(data.samples[s].value);
            for (int j = 0; j <= n; ++j) E(static_cast<Eigen::Index>(s), j) = std::polar(1.0, j * data.samples[s].theta);
        }
    }

    double value(const Eigen::VectorXcd& c) const {
        const Eigen::VectorXcd g = E * c;
        double acc = 0.0;
        for (std::size_t s = 0; s < q.size(); ++s) acc += q[s] * std::norm(f[s] - g(static_cast<Eigen::Index>(s)));
        return acc;
    }
    /// Gradient with respect to conj(c) times 2 (the steepest-ascent direction in C^N).
    Eigen::VectorXcd gradient(const Eigen::VectorXcd& c) const {
        Eigen::VectorXcd r = E * c;
        for (std::size_t s = 0; s < q.size(); ++s) {
            const auto i = static_cast<Eigen::Index>(s);
            r(i) = q[s] * (r(i) - f[s]);
        }
        return 2.0 * E.adjoint() * r;
    }
};

/// Projection onto {c : |v_k^H c| <= rho_k for all k} by Dykstra's alternating projections.
inline Eigen::VectorXcd dykstra_project(const Eigen::VectorXcd& x, const Eigen::MatrixXcd& V, const Eigen::VectorXd& rho,
                                        int sweeps = 400) {
    const Eigen::Index K = V.rows();
    std::vector<Eigen::VectorXcd> increments(static_cast<std::size_t>(K), Eigen::VectorXcd::Zero(x.size()));
    Eigen::VectorXcd y = x;
    for (int sweep = 0; sweep < sweeps; ++sweep) {
        double change = 0.0;
        for (Eigen::Index k = 0; k < K; ++k) {
            const Eigen::VectorXcd w = y + increments[static_cast<std::size_t>(k)];
            const Eigen::VectorXcd v = V.row(k).adjoint();  // g(x_k) = v^H c
            const cplx val = v.dot(w);
            Eigen::VectorXcd p = w;
            if (std::abs(val) > rho(k)) p -= (val - rho(k) * val / std::abs(val)) / v.squaredNorm() * v;
            increments[static_cast<std::size_t>(k)] = w - p;
            change = std::max(change, (p - y).cwiseAbs().maxCoeff());
            y = p;
        }
        if (change < 1e-15) break;
    }
    return y;
}

/// Brute-force primal oracle: feasible grid search over a coefficient box,
/// then projected gradient on the sample objective.
inline Eigen::VectorXcd brute_force_primal(const SampleObjective& obj, const std::vector<double>& grid_angles,
                                           const Eigen::VectorXd& rho, double box, int per_dim, int pg_iters) {
    const Eigen::Index N = obj.E.cols();
    Eigen::MatrixXcd V(static_cast<Eigen::Index>(grid_angles.size()), N);
    for (std::size_t k = 0; k < grid_angles.size(); ++k)
        for (Eigen::Index j = 0; j < N; ++j)
            V(static_cast<Eigen::Index>(k), j) = std::polar(1.0, static_cast<double>(j) * grid_angles[k]);

    // Grid search over the 2N real coordinates.
    const int dims = static_cast<int>(2 * N);
    std::vector<int> counter(static_cast<std::size_t>(dims), 0);
    Eigen::VectorXcd best = Eigen::VectorXcd::Zero(N);
    double best_value = obj.value(best);
    for (;;) {
        Eigen::VectorXcd c(N);
        for (Eigen::Index j = 0; j < N; ++j) {
            const double re = -box + 2.0 * box * counter[static_cast<std::size_t>(2 * j)] / (per_dim - 1);
            const double im = -box + 2.0 * box * counter[static_cast<std::size_t>(2 * j + 1)] / (per_dim - 1);
            c(j) = {re, im};
        }
        if (((V * c).cwiseAbs().array() <= rho.array()).all()) {
            const double v = obj.value(c);
            if (v < best_value) {
                best_value = v;
                best = c;
            }
        }
        int d = 0;
        while (d < dims && ++counter[static_cast<std::size_t>(d)] == per_dim) counter[static_cast<std::size_t>(d++)] = 0;
        if (d == dims) break;
    }

    // Projected gradient with step 1/L, L = 2 * largest eigenvalue of the sample Gram.
    Eigen::MatrixXcd Q = obj.E.adjoint() * Eigen::Map<const Eigen::VectorXd>(obj.q.data(), static_cast<Eigen::Index>(obj.q.size())).cast<cplx>().asDiagonal() * obj.E;
    const double L = 2.0 * Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd>(Q).eigenvalues().maxCoeff();
    Eigen::VectorXcd c = best;
    for (int it = 0; it < pg_iters; ++it) {
        const Eigen::VectorXcd next = dykstra_project(c - obj.gradient(c) / L, V, rho);
        const double step = (next - c).norm();
        c = next;
        if (step < 1e-14) break;
    }
    return c;
}

/// Central finite-difference gradient of a scalar function of a real vector.
inline Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f, const Eigen::VectorXd& x,
                                   double rel_step) {
    Eigen::VectorXd g(x.size());
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        const double h = rel_step * std::max(1.0, std::abs(x(k)));
        Eigen::VectorXd xp = x, xm = x;
        xp(k) += h;
        xm(k) -= h;
        g(k) = (f(xp) - f(xm)) / (2.0 * h);
    }
    return g;
}

/// ProblemInputs for a single-arc I given in units of pi with a synthetic case.
inline arcfit::ProblemInputs inputs_for(const std::vector<std::pair<double, double>>& arcs_pi,
                                       const arcfit::SyntheticCase& data_case, double density,
                                       std::vector<double> bound, arcfit::GramChoice gram = arcfit::GramChoice::automatic) {
    std::vector<arcfit::Arc> arcs;
    for (const auto& [lo, hi] : arcs_pi) arcs.push_back({lo * arcfit::kPi, hi * arcfit::kPi});
    arcfit::ArcSystem system(arcs);
    arcfit::SampledBoundaryData data = arcfit::generate_synthetic(data_case, system, density);
    return arcfit::ProblemInputs{system, std::move(data), std::move(bound), gram};
}

inline arcfit::SyntheticCase constant_case(cplx value) {
    arcfit::SyntheticCase c;
    c.kind = arcfit::CaseKind::constant;
    c.value = value;
    return c;
}

inline arcfit::SyntheticCase polynomial_case(std::vector<cplx> coefficients) {
    arcfit::SyntheticCase c;
    c.kind = arcfit::CaseKind::polynomial_trace;
    c.coefficients = std::move(coefficients);
    return c;
}

inline arcfit::SyntheticCase custom_case(std::string expression) {
    arcfit::SyntheticCase c;
    c.kind = arcfit::CaseKind::custom;
    c.expression = std::move(expression);
    return c;
}

}  // namespace testsupport
