#pragma once

#include <optional>
#include <string>
#include <vector>

#include "arcfit/arcgeom.hpp"
#include "arcfit/dualsolver.hpp"
#include "arcfit/moments.hpp"

namespace arcfit {

/// Which Gram matrix the solver sees.
enum class GramChoice {
    closed_form,  ///< exact integrals over I; rejected when numerically singular
    quadrature,   ///< same trapezoid rule as the moments (exact discrete least squares)
    automatic,    ///< closed form for unit weights when well conditioned, quadrature otherwise
};

[[nodiscard]] std::string to_string(GramChoice choice);
[[nodiscard]] std::optional<GramChoice> gram_choice_from_string(const std::string& text);

/// Everything needed to assemble the problem for one (degree, grid) pair.
struct ProblemInputs {
    ArcSystem arcs;
    SampledBoundaryData data;
    std::vector<double> bound;  ///< one value, or one per J component
    GramChoice gram = GramChoice::automatic;
};

struct AssembledProblem {
    DualProblem problem;
    GramChoice gram_used = GramChoice::closed_form;
    double gram_pivot = 0.0;  ///< relative Cholesky pivot of the Gram matrix used
};

/// Builds grid, Gram matrix, moments and per-point bounds. Throws InputError for
/// invalid inputs and ConditioningError when an explicit closed-form Gram
/// matrix is numerically singular.
[[nodiscard]] AssembledProblem assemble_problem(const ProblemInputs& inputs, int degree, int grid_m);

}  // namespace arcfit
