#pragma once

#include <cstddef>
#include <numbers>
#include <vector>

namespace arcfit {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Tolerance (radians) for arc membership; grid endpoints sit exactly on the arc boundary.
inline constexpr double kArcTolerance = 1e-12;

/// Reduce an angle to [0, 2pi).
[[nodiscard]] double canonical_angle(double theta);

/// Counter-clockwise arc from `lo` to `hi`. `lo` is canonical, `hi` may exceed 2pi
/// when the arc wraps through angle 0.
struct Arc {
    double lo = 0.0;
    double hi = 0.0;

    [[nodiscard]] double length() const { return hi - lo; }
    /// Offset of `theta` along the arc, in [0, 2pi).
    [[nodiscard]] double offset(double theta) const { return canonical_angle(theta - lo); }
    [[nodiscard]] bool contains_closed(double theta, double tol = kArcTolerance) const;
    [[nodiscard]] bool contains_open(double theta, double tol = kArcTolerance) const;
};

/// Partition of the unit circle into approximation arcs I (where data lives)
/// and their complement J (where the modulus bound is enforced).
class ArcSystem {
public:
    /// Validates and normalizes. Throws InputError when arcs are empty, have
    /// non-positive length, overlap modulo 2pi, or exceed the full circle.
    /// A system whose I covers the whole circle is accepted here; operations
    /// that need J reject it.
    explicit ArcSystem(std::vector<Arc> arcs_I);

    [[nodiscard]] const std::vector<Arc>& approximation_arcs() const { return arcs_I_; }
    /// Connected components of the closure of J, in the same cyclic order as I.
    /// Components of zero length (touching I arcs) are included.
    [[nodiscard]] const std::vector<Arc>& constraint_arcs() const { return arcs_J_; }

    [[nodiscard]] double measure_I() const;
    [[nodiscard]] double measure_J() const { return kTwoPi - measure_I(); }
    [[nodiscard]] bool J_has_interior() const;

    /// Index of the I arc whose closure holds theta, or -1.
    [[nodiscard]] int arc_index_of(double theta, double tol = kArcTolerance) const;
    [[nodiscard]] bool in_I_interior(double theta, double tol = kArcTolerance) const;
    [[nodiscard]] bool in_J_closure(double theta, double tol = kArcTolerance) const;

private:
    std::vector<Arc> arcs_I_;
    std::vector<Arc> arcs_J_;
};

/// Finite set of angles in the closure of J on which |g| <= rho is enforced.
struct ConstraintGrid {
    std::vector<double> points;          ///< canonical angles, grouped per J component
    std::vector<std::size_t> component;  ///< J component index of each point
    std::vector<Arc> components;         ///< J components (closure), as in ArcSystem
    std::vector<double> component_spacing;  ///< uniform spacing inside each component (0 if unused)
    int m = 0;
    double spacing = 0.0;  ///< max gap between consecutive points inside a component

    [[nodiscard]] std::size_t size() const { return points.size(); }
};

/// Uniform grid on every positive-length J component, endpoints included, with
/// m intervals split across components in proportion to their lengths (at least
/// one interval each). Throws InputError for m < 1 or J without interior.
[[nodiscard]] ConstraintGrid build_constraint_grid(const ArcSystem& arcs, int m);

/// Affine map from a physical frequency band onto an angle range.
struct FrequencyMap {
    double f_lo = 0.0;
    double f_hi = 1.0;
    double theta_lo = 0.0;
    double theta_hi = 1.0;

    /// Throws InputError unless f_lo < f_hi and theta_lo < theta_hi.
    void validate() const;
    /// True when [theta_lo, theta_hi] lies in the closure of one I arc.
    [[nodiscard]] bool lands_in(const ArcSystem& arcs) const;
    [[nodiscard]] double angle_of(double freq_hz) const;
};

/// Maps each frequency to its angle. Throws LocatedInputError carrying the index
/// of the first frequency outside [f_lo, f_hi].
[[nodiscard]] std::vector<double> map_frequencies(const std::vector<double>& freqs_hz,
                                                  const FrequencyMap& map);

}  // namespace arcfit
