#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "arcfit/arcgeom.hpp"

namespace arcfit {

using cplx = std::complex<double>;

/// One boundary measurement f(e^{i theta}) with its quadrature weight.
struct Sample {
    double theta = 0.0;
    cplx value{0.0, 0.0};
    double weight = 1.0;
};

/// Samples of the data f on I. Within each I arc the samples are kept in
/// increasing order along the arc.
struct SampledBoundaryData {
    std::vector<Sample> samples;

    [[nodiscard]] bool unit_weights() const;
};

/// G(j,k) = <z^k, z^j>_I for 0 <= j,k <= n. Hermitian Toeplitz, positive definite.
struct GramMatrix {
    Eigen::MatrixXcd entries;

    [[nodiscard]] int degree() const { return static_cast<int>(entries.rows()) - 1; }
};

/// b(j) = <f, z^j>_I together with ||f||^2 on I.
struct MomentVector {
    Eigen::VectorXcd b;
    double norm_f_sq = 0.0;
};

/// First column of the Toeplitz Gram: t(d) = <z^d, 1>_I = (1/2pi) int_I e^{i d theta}.
[[nodiscard]] Eigen::VectorXcd gram_symbol_closed_form(const ArcSystem& arcs, int n);

[[nodiscard]] GramMatrix gram_closed_form(const ArcSystem& arcs, int n);

/// Gram matrix of the (weighted) trapezoid rule on the sample grid. Used when
/// sample weights are not all one, and whenever the solver should see the exact
/// discrete least-squares problem on the samples.
[[nodiscard]] GramMatrix gram_from_samples(const SampledBoundaryData& data, const ArcSystem& arcs, int n);

/// Composite trapezoid moments per I arc. Throws LocatedInputError for a
/// sample outside I or out of order, InputError for an arc with fewer than two
/// samples.
[[nodiscard]] MomentVector moments_from_samples(const SampledBoundaryData& data,
                                                const ArcSystem& arcs, int n);

/// Per-sample trapezoid weights including 1/2pi and the sample weight, in sample
/// order. Validates exactly like moments_from_samples.
[[nodiscard]] std::vector<double> quadrature_weights(const SampledBoundaryData& data,
                                                     const ArcSystem& arcs);

/// Smallest Cholesky pivot over the largest, or 0 when factorization fails.
[[nodiscard]] double relative_pivot(const Eigen::MatrixXcd& hermitian);

/// Relative pivot below which a Gram matrix is rejected as numerically singular.
inline constexpr double kGramPivotFloor = 1e-13;

/// Throws ConditioningError (suggesting a lower degree) if the Gram matrix fails
/// the pivot floor.
void require_well_conditioned(const GramMatrix& gram);

/// Hermitian Toeplitz matrix with first column `symbol` (entries (j,k) = symbol(k-j)
/// for k >= j, conjugated below the diagonal).
[[nodiscard]] Eigen::MatrixXcd hermitian_toeplitz(const Eigen::VectorXcd& symbol);

}  // namespace arcfit
