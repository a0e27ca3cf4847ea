#include "arcfit/arcgeom.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "arcfit/errors.hpp"

namespace arcfit {

double canonical_angle(double theta) {
    double t = std::fmod(theta, kTwoPi);
    if (t < 0.0) t += kTwoPi;
    if (t >= kTwoPi) t = 0.0;
    return t;
}

bool Arc::contains_closed(double theta, double tol) const {
    const double u = offset(theta);
    return u <= length() + tol || u >= kTwoPi - tol;
}

bool Arc::contains_open(double theta, double tol) const {
    const double u = offset(theta);
    return u > tol && u < length() - tol;
}

ArcSystem::ArcSystem(std::vector<Arc> arcs_I) {
    if (arcs_I.empty()) throw InputError("arc system needs at least one approximation arc");
    for (auto& arc : arcs_I) {
        if (!std::isfinite(arc.lo) || !std::isfinite(arc.hi))
            throw InputError("arc endpoints must be finite");
        const double len = arc.hi - arc.lo;
        if (!(len > 0.0)) throw InputError("arc must satisfy lo < hi");
        if (len > kTwoPi + kArcTolerance) throw InputError("arc longer than the full circle");
        arc.lo = canonical_angle(arc.lo);
        arc.hi = arc.lo + std::min(len, kTwoPi);
    }
    std::sort(arcs_I.begin(), arcs_I.end(), [](const Arc& a, const Arc& b) { return a.lo < b.lo; });

    const std::size_t count = arcs_I.size();
    for (std::size_t i = 0; i < count; ++i) {
        const double next_lo = (i + 1 < count) ? arcs_I[i + 1].lo : arcs_I[0].lo + kTwoPi;
        if (arcs_I[i].hi > next_lo + kArcTolerance)
            throw InputError("approximation arcs overlap (modulo 2pi)");
    }
    arcs_I_ = std::move(arcs_I);
    if (measure_I() > kTwoPi + kArcTolerance) throw InputError("approximation arcs exceed the circle");

    arcs_J_.reserve(count);
    for (std::size_t i = 0; i < count; ++i) {
        const double next_lo = (i + 1 < count) ? arcs_I_[i + 1].lo : arcs_I_[0].lo + kTwoPi;
        const double len = std::max(0.0, next_lo - arcs_I_[i].hi);
        const double lo = canonical_angle(arcs_I_[i].hi);
        arcs_J_.push_back(Arc{lo, lo + len});
    }
}

double ArcSystem::measure_I() const {
    return std::accumulate(arcs_I_.begin(), arcs_I_.end(), 0.0,
                           [](double acc, const Arc& a) { return acc + a.length(); });
}

bool ArcSystem::J_has_interior() const {
    return std::any_of(arcs_J_.begin(), arcs_J_.end(),
                       [](const Arc& a) { return a.length() > kArcTolerance; });
}

int ArcSystem::arc_index_of(double theta, double tol) const {
    for (std::size_t i = 0; i < arcs_I_.size(); ++i)
        if (arcs_I_[i].contains_closed(theta, tol)) return static_cast<int>(i);
    return -1;
}

bool ArcSystem::in_I_interior(double theta, double tol) const {
    return std::any_of(arcs_I_.begin(), arcs_I_.end(),
                       [&](const Arc& a) { return a.contains_open(theta, tol); });
}

bool ArcSystem::in_J_closure(double theta, double tol) const {
    return std::any_of(arcs_J_.begin(), arcs_J_.end(), [&](const Arc& a) {
        return a.length() > 0.0 && a.contains_closed(theta, tol);
    });
}

namespace {

// Largest-remainder split of m intervals proportional to lengths, >= 1 each.
std::vector<int> allocate_intervals(const std::vector<double>& lengths, int m) {
    const std::size_t count = lengths.size();
    std::vector<int> intervals(count, 1);
    if (static_cast<std::size_t>(m) <= count) return intervals;

    const double total = std::accumulate(lengths.begin(), lengths.end(), 0.0);
    std::vector<double> quota(count);
    int assigned = 0;
    for (std::size_t i = 0; i < count; ++i) {
        quota[i] = m * lengths[i] / total;
        intervals[i] = std::max(1, static_cast<int>(std::floor(quota[i])));
        assigned += intervals[i];
    }
    // Hand out (or take back, when the minimum of one overshoots) one interval at
    // a time where the allocation is furthest from its quota.
    while (assigned != m) {
        const int dir = assigned < m ? 1 : -1;
        std::size_t best = count;
        double best_gap = 0.0;
        for (std::size_t i = 0; i < count; ++i) {
            if (dir < 0 && intervals[i] <= 1) continue;
            const double gap = dir * (quota[i] - intervals[i]);
            if (best == count || gap > best_gap) {
                best = i;
                best_gap = gap;
            }
        }
        intervals[best] += dir;
        assigned += dir;
    }
    return intervals;
}

}  // namespace

ConstraintGrid build_constraint_grid(const ArcSystem& arcs, int m) {
    if (m < 1) throw InputError("constraint grid needs m >= 1, got " + std::to_string(m));
    if (!arcs.J_has_interior()) throw InputError("constraint set J has empty interior");

    ConstraintGrid grid;
    grid.m = m;
    grid.components = arcs.constraint_arcs();
    grid.component_spacing.assign(grid.components.size(), 0.0);

    std::vector<std::size_t> used;
    std::vector<double> lengths;
    for (std::size_t i = 0; i < grid.components.size(); ++i) {
        if (grid.components[i].length() > kArcTolerance) {
            used.push_back(i);
            lengths.push_back(grid.components[i].length());
        }
    }
    const std::vector<int> intervals = allocate_intervals(lengths, m);

    for (std::size_t u = 0; u < used.size(); ++u) {
        const Arc& comp = grid.components[used[u]];
        const double step = comp.length() / intervals[u];
        grid.component_spacing[used[u]] = step;
        grid.spacing = std::max(grid.spacing, step);
        for (int k = 0; k <= intervals[u]; ++k) {
            const double t = (k == intervals[u]) ? comp.hi : comp.lo + k * step;
            grid.points.push_back(canonical_angle(t));
            grid.component.push_back(used[u]);
        }
    }
    return grid;
}

void FrequencyMap::validate() const {
    if (!std::isfinite(f_lo) || !std::isfinite(f_hi) || !(f_lo < f_hi))
        throw InputError("frequency map needs finite f_lo < f_hi");
    if (!std::isfinite(theta_lo) || !std::isfinite(theta_hi) || !(theta_lo < theta_hi))
        throw InputError("frequency map needs finite theta_lo < theta_hi");
}

bool FrequencyMap::lands_in(const ArcSystem& arcs) const {
    for (const Arc& arc : arcs.approximation_arcs()) {
        if (!arc.contains_closed(theta_lo)) continue;
        const double start = arc.offset(theta_lo) >= kTwoPi - kArcTolerance ? 0.0 : arc.offset(theta_lo);
        if (start + (theta_hi - theta_lo) <= arc.length() + kArcTolerance) return true;
    }
    return false;
}

double FrequencyMap::angle_of(double freq_hz) const {
    const double s = (freq_hz - f_lo) / (f_hi - f_lo);
    return theta_lo + s * (theta_hi - theta_lo);
}

std::vector<double> map_frequencies(const std::vector<double>& freqs_hz, const FrequencyMap& map) {
    map.validate();
    std::vector<double> angles;
    angles.reserve(freqs_hz.size());
    for (std::size_t i = 0; i < freqs_hz.size(); ++i) {
        const double f = freqs_hz[i];
        if (!(f >= map.f_lo && f <= map.f_hi))
            throw LocatedInputError("frequency at index " + std::to_string(i) + " (" +
                                        std::to_string(f) + " Hz) outside the mapped band",
                                    i);
        angles.push_back(map.angle_of(f));
    }
    return angles;
}

}  // namespace arcfit
