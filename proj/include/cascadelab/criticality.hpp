#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cascadelab/distribution.hpp"

namespace cascade {

// Outcome of the search for a second root of the structure function.
enum class CriticalRootKind {
    totally_critical,      // phi vanishes identically; every q > 1 is a root
    root,                  // a unique second root q_crit > 1 was located
    none_subcritical,      // phi < 0 on all of (1, q_max]; no crossing
    none_supercritical,    // phi > 0 immediately to the right of 1
};

struct CriticalRootResult {
    CriticalRootKind kind;
    std::optional<double> q_crit;  // present only when kind == root
};

// Regime of a fixed pair (distribution, exponent q).
enum class Regime {
    subcritical,     // E[W^q] < b^{q-1}
    critical,        // E[W^q] = b^{q-1} within tolerance
    supercritical,   // E[W^q] > b^{q-1}
};

std::string to_string(CriticalRootKind kind);
std::string to_string(Regime regime);

struct CriticalityReport {
    Regime regime;
    double q;
    double phi_value;
    std::optional<double> q_crit;  // from the root search, when one exists
    bool totally_critical;
};

// phi(q) = log_b E[W^q] - (q - 1) on q > 0.  Convex, phi(1) = 0.
class StructureFunction {
public:
    StructureFunction(unsigned branching, WeightDistribution dist);

    unsigned branching() const { return b_; }
    const WeightDistribution& dist() const { return dist_; }

    double phi(double q) const;

    // log_b E[W^q] computed in the log domain (stable for large q).
    double log_b_moment(double q) const;

    // True when the law is {0 w.p. 1-1/b, b w.p. 1/b} within atom/prob
    // tolerance 1e-12; phi then vanishes for every q.
    bool is_totally_critical() const;

    // Locates the second root of phi on (1, q_max] by doubling the bracket
    // from q = 2 and bisecting to within tol.  See CriticalRootKind for the
    // degenerate outcomes.
    CriticalRootResult find_critical_exponent(double q_max = 128.0,
                                              double tol = 1e-10) const;

    // Classifies a fixed exponent q >= 1; |phi(q)| <= tol counts as critical.
    CriticalityReport classify(double q, double tol = kClassifyTol) const;

    // Self-check used before iterated reductions: every grid point p must
    // satisfy E[W^p] < b^{p-1} with margin, i.e. phi(p) < -tol.  Grid points
    // must lie in (1, q).  Throws PreconditionError when the law is totally
    // critical or when E[W^q] > b^{q-1} beyond tolerance, since the check is
    // only meaningful for sub/critical pairs.
    bool verify_strict_subcritical_interior(double q, const std::vector<double>& grid,
                                            double tol = kClassifyTol) const;
    // Same check on a uniform interior grid.
    bool verify_strict_subcritical_interior(double q, int grid_points = 63,
                                            double tol = kClassifyTol) const;

    static constexpr double kTcAtomTol = 1e-12;
    static constexpr double kClassifyTol = 1e-9;

private:
    unsigned b_;
    WeightDistribution dist_;
};

} // namespace cascade
