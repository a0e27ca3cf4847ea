#include "arcfit/moments.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "arcfit/errors.hpp"

namespace arcfit {

bool SampledBoundaryData::unit_weights() const {
    return std::all_of(samples.begin(), samples.end(), [](const Sample& s) { return s.weight == 1.0; });
}

Eigen::MatrixXcd hermitian_toeplitz(const Eigen::VectorXcd& symbol) {
    const Eigen::Index size = symbol.size();
    Eigen::MatrixXcd out(size, size);
    for (Eigen::Index j = 0; j < size; ++j) {
        for (Eigen::Index k = 0; k < size; ++k) {
            out(j, k) = k >= j ? symbol(k - j) : std::conj(symbol(j - k));
        }
    }
    return out;
}

Eigen::VectorXcd gram_symbol_closed_form(const ArcSystem& arcs, int n) {
    if (n < 0) throw InputError("degree must be nonnegative");
    Eigen::VectorXcd t = Eigen::VectorXcd::Zero(n + 1);
    for (const Arc& arc : arcs.approximation_arcs()) {
        t(0) += arc.length() / kTwoPi;
        for (int d = 1; d <= n; ++d) {
            const cplx num = std::polar(1.0, d * arc.hi) - std::polar(1.0, d * arc.lo);
            t(d) += num / cplx(0.0, kTwoPi * d);
        }
    }
    return t;
}

GramMatrix gram_closed_form(const ArcSystem& arcs, int n) {
    return GramMatrix{hermitian_toeplitz(gram_symbol_closed_form(arcs, n))};
}

std::vector<double> quadrature_weights(const SampledBoundaryData& data, const ArcSystem& arcs) {
    const auto& arc_list = arcs.approximation_arcs();
    const std::size_t count = data.samples.size();
    std::vector<int> arc_of(count);
    std::vector<double> offset(count);
    for (std::size_t s = 0; s < count; ++s) {
        const Sample& smp = data.samples[s];
        if (!std::isfinite(smp.theta) || !std::isfinite(smp.value.real()) || !std::isfinite(smp.value.imag()))
            throw LocatedInputError("sample " + std::to_string(s) + " is not finite", s);
        if (!(smp.weight > 0.0) || !std::isfinite(smp.weight))
            throw LocatedInputError("sample " + std::to_string(s) + " has a non-positive weight", s);
        const int a = arcs.arc_index_of(smp.theta);
        if (a < 0) throw LocatedInputError("sample " + std::to_string(s) + " lies outside I", s);
        arc_of[s] = a;
        double u = arc_list[a].offset(smp.theta);
        if (u >= kTwoPi - kArcTolerance) u = 0.0;
        offset[s] = u;
    }

    std::vector<double> weights(count, 0.0);
    for (std::size_t a = 0; a < arc_list.size(); ++a) {
        std::vector<std::size_t> idx;
        for (std::size_t s = 0; s < count; ++s)
            if (arc_of[s] == static_cast<int>(a)) idx.push_back(s);
        if (idx.size() < 2)
            throw InputError("approximation arc " + std::to_string(a) + " has fewer than two samples");
        for (std::size_t r = 1; r < idx.size(); ++r) {
            if (!(offset[idx[r]] > offset[idx[r - 1]]))
                throw LocatedInputError("sample " + std::to_string(idx[r]) +
                                            " is not strictly increasing along its arc",
                                        idx[r]);
        }
        for (std::size_t r = 0; r + 1 < idx.size(); ++r) {
            const double half = 0.5 * (offset[idx[r + 1]] - offset[idx[r]]) / kTwoPi;
            weights[idx[r]] += half;
            weights[idx[r + 1]] += half;
        }
    }
    for (std::size_t s = 0; s < count; ++s) weights[s] *= data.samples[s].weight;
    return weights;
}

MomentVector moments_from_samples(const SampledBoundaryData& data, const ArcSystem& arcs, int n) {
    if (n < 0) throw InputError("degree must be nonnegative");
    const std::vector<double> q = quadrature_weights(data, arcs);
    MomentVector out{Eigen::VectorXcd::Zero(n + 1), 0.0};
    for (std::size_t s = 0; s < q.size(); ++s) {
        const Sample& smp = data.samples[s];
        out.norm_f_sq += q[s] * std::norm(smp.value);
        for (int j = 0; j <= n; ++j) out.b(j) += q[s] * smp.value * std::polar(1.0, -j * smp.theta);
    }
    return out;
}

GramMatrix gram_from_samples(const SampledBoundaryData& data, const ArcSystem& arcs, int n) {
    if (n < 0) throw InputError("degree must be nonnegative");
    const std::vector<double> q = quadrature_weights(data, arcs);
    Eigen::VectorXcd t = Eigen::VectorXcd::Zero(n + 1);
    for (std::size_t s = 0; s < q.size(); ++s)
        for (int d = 0; d <= n; ++d) t(d) += q[s] * std::polar(1.0, d * data.samples[s].theta);
    t(0) = t(0).real();
    return GramMatrix{hermitian_toeplitz(t)};
}

double relative_pivot(const Eigen::MatrixXcd& hermitian) {
    Eigen::LLT<Eigen::MatrixXcd> llt(hermitian);
    if (llt.info() != Eigen::Success) return 0.0;
    const Eigen::VectorXd pivots = llt.matrixLLT().diagonal().real().cwiseAbs2();
    const double hi = pivots.maxCoeff();
    return hi > 0.0 ? pivots.minCoeff() / hi : 0.0;
}

void require_well_conditioned(const GramMatrix& gram) {
    const double pivot = relative_pivot(gram.entries);
    if (pivot < kGramPivotFloor) {
        throw ConditioningError("Gram matrix of degree " + std::to_string(gram.degree()) +
                                    " is numerically singular on I (relative pivot " +
                                    std::to_string(pivot) + "); try a lower degree",
                                pivot);
    }
}

}  // namespace arcfit
