#include "cascadelab/criticality.hpp"

#include <cmath>

#include "cascadelab/errors.hpp"
#include "cascadelab/numeric.hpp"

namespace cascade {

std::string to_string(CriticalRootKind kind) {
    switch (kind) {
        case CriticalRootKind::totally_critical: return "totally_critical";
        case CriticalRootKind::root: return "root";
        case CriticalRootKind::none_subcritical: return "none_subcritical";
        case CriticalRootKind::none_supercritical: return "none_supercritical";
    }
    return "unknown";
}

std::string to_string(Regime regime) {
    switch (regime) {
        case Regime::subcritical: return "subcritical";
        case Regime::critical: return "critical";
        case Regime::supercritical: return "supercritical";
    }
    return "unknown";
}

StructureFunction::StructureFunction(unsigned branching, WeightDistribution dist)
    : b_(branching), dist_(std::move(dist)) {
    if (b_ < 2) throw ConfigError("structure function: branching must be >= 2");
    if (!dist_.mean_is_one())
        throw ConfigError("structure function: the weight law must have mean 1");
}

double StructureFunction::log_b_moment(double q) const {
    return dist_.log_moment(q) / std::log(static_cast<double>(b_));
}

double StructureFunction::phi(double q) const {
    if (!(q > 0.0)) throw ConfigError("structure function: q must be positive");
    const double lm = log_b_moment(q);
    if (std::isinf(lm) && lm < 0.0)
        throw ConfigError("structure function: E[W^q] is zero at q = " +
                          format_double(q));
    return lm - (q - 1.0);
}

bool StructureFunction::is_totally_critical() const {
    const auto& a = dist_.atoms();
    const auto& p = dist_.probs();
    const double b = static_cast<double>(b_);
    if (a.size() != 2) return false;
    // Atoms are stored sorted ascending, so the zero atom comes first.
    return std::abs(a[0]) <= kTcAtomTol &&
           std::abs(a[1] - b) <= kTcAtomTol &&
           std::abs(p[0] - (1.0 - 1.0 / b)) <= kTcAtomTol &&
           std::abs(p[1] - 1.0 / b) <= kTcAtomTol;
}

CriticalRootResult StructureFunction::find_critical_exponent(double q_max,
                                                             double tol) const {
    if (q_max <= 2.0) throw ConfigError("critical exponent search: q_max must exceed 2");
    if (!(tol > 0.0)) throw ConfigError("critical exponent search: tol must be positive");
    if (is_totally_critical())
        return {CriticalRootKind::totally_critical, std::nullopt};

    // phi is convex with phi(1) = 0, so its initial slope decides everything:
    // a non-negative slope at 1 keeps phi >= 0 on (1, inf) and no second root
    // exists.  The slope is E[W log W]/log b - 1, exact for atomic laws.
    const double log_b = std::log(static_cast<double>(b_));
    if (dist_.mean_w_log_w() >= log_b)
        return {CriticalRootKind::none_supercritical, std::nullopt};

    // phi dips below zero right of 1; by convexity it crosses back at most
    // once.  Double the probe until the sign flips, then bisect.
    double lo = 1.0;
    double hi = 0.0;
    for (double q = 2.0; q <= q_max; q *= 2.0) {
        const double v = phi(q);
        if (v == 0.0) return {CriticalRootKind::root, q};
        if (v > 0.0) {
            hi = q;
            break;
        }
        lo = q;
    }
    if (hi == 0.0) {
        // The doubling probes may overshoot q_max without testing it.
        if (lo < q_max) {
            const double v = phi(q_max);
            if (v == 0.0) return {CriticalRootKind::root, q_max};
            if (v > 0.0) hi = q_max;
        }
        if (hi == 0.0) return {CriticalRootKind::none_subcritical, std::nullopt};
    }
    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        const double v = phi(mid);
        if (v == 0.0) return {CriticalRootKind::root, mid};
        (v < 0.0 ? lo : hi) = mid;
    }
    return {CriticalRootKind::root, 0.5 * (lo + hi)};
}

CriticalityReport StructureFunction::classify(double q, double tol) const {
    if (!(q >= 1.0)) throw ConfigError("classification: q must be >= 1");
    const double v = phi(q);
    Regime regime;
    if (std::abs(v) <= tol)
        regime = Regime::critical;
    else
        regime = v < 0.0 ? Regime::subcritical : Regime::supercritical;
    const CriticalRootResult root = find_critical_exponent();
    return CriticalityReport{regime, q, v, root.q_crit, is_totally_critical()};
}

bool StructureFunction::verify_strict_subcritical_interior(
    double q, const std::vector<double>& grid, double tol) const {
    if (!(q > 1.0))
        throw ConfigError("subcritical interior check: q must exceed 1");
    if (is_totally_critical())
        throw PreconditionError(
            "subcritical interior check: the law is totally critical; phi "
            "vanishes everywhere and no strict interior margin exists");
    if (phi(q) > tol)
        throw PreconditionError(
            "subcritical interior check: E[W^q] exceeds b^(q-1) at q = " +
            format_double(q) + "; the check applies to sub/critical pairs only");
    for (double p : grid) {
        if (!(p > 1.0) || !(p < q))
            throw ConfigError("subcritical interior check: grid point " +
                              format_double(p) + " outside (1, q)");
        if (!(phi(p) < -tol)) return false;
    }
    return true;
}

bool StructureFunction::verify_strict_subcritical_interior(double q, int grid_points,
                                                           double tol) const {
    if (grid_points < 1)
        throw ConfigError("subcritical interior check: need at least one grid point");
    std::vector<double> grid(grid_points);
    for (int i = 0; i < grid_points; ++i)
        grid[i] = 1.0 + (q - 1.0) * static_cast<double>(i + 1) / (grid_points + 1);
    return verify_strict_subcritical_interior(q, grid, tol);
}

} // namespace cascade
