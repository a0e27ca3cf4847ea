#include "arcfit/problem.hpp"

#include "arcfit/errors.hpp"

namespace arcfit {

std::string to_string(GramChoice choice) {
    switch (choice) {
        case GramChoice::closed_form: return "closed_form";
        case GramChoice::quadrature: return "quadrature";
        case GramChoice::automatic: return "automatic";
    }
    return "unknown";
}

std::optional<GramChoice> gram_choice_from_string(const std::string& text) {
    for (GramChoice g : {GramChoice::closed_form, GramChoice::quadrature, GramChoice::automatic})
        if (to_string(g) == text) return g;
    return std::nullopt;
}

AssembledProblem assemble_problem(const ProblemInputs& inputs, int degree, int grid_m) {
    if (degree < 0) throw InputError("degree must be nonnegative");
    ConstraintGrid grid = build_constraint_grid(inputs.arcs, grid_m);
    Eigen::VectorXd bounds = expand_bounds(grid, inputs.bound);
    MomentVector moments = moments_from_samples(inputs.data, inputs.arcs, degree);

    GramChoice used = inputs.gram;
    GramMatrix gram;
    double pivot = 0.0;
    if (used == GramChoice::automatic) {
        used = GramChoice::quadrature;
        // Weighted data needs the weighted Gram matrix, which only the quadrature provides.
        if (inputs.data.unit_weights()) {
            GramMatrix exact = gram_closed_form(inputs.arcs, degree);
            pivot = relative_pivot(exact.entries);
            if (pivot >= kGramPivotFloor) {
                gram = std::move(exact);
                used = GramChoice::closed_form;
            }
        }
    } else if (used == GramChoice::closed_form) {
        if (!inputs.data.unit_weights())
            throw InputError("closed-form Gram matrix requires unit sample weights; use gram = quadrature");
        gram = gram_closed_form(inputs.arcs, degree);
        require_well_conditioned(gram);
        pivot = relative_pivot(gram.entries);
    }
    if (used == GramChoice::quadrature) {
        // A singular quadrature Gram matrix is acceptable: the constraints make
        // A(lambda) definite, and the solver guards its own factorizations.
        gram = gram_from_samples(inputs.data, inputs.arcs, degree);
        pivot = relative_pivot(gram.entries);
    }
    return {make_dual_problem(std::move(gram), std::move(moments), std::move(grid), std::move(bounds)), used, pivot};
}

}  // namespace arcfit
