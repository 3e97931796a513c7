#pragma once

#include <string>
#include <utility>
#include <vector>

#include "cascadelab/distribution.hpp"
#include "cascadelab/tree.hpp"

namespace cascade {

// Integer moments m(k), k = 0..q_max, of one random quantity.  Values are
// carried in the linear domain while magnitudes stay below kLinearLimit and
// in the log domain afterwards; `log_domain` records which representation
// is authoritative (log_value is always populated; value is exp(log) when
// it fits and +inf otherwise).
struct MomentRow {
    std::vector<double> value;
    std::vector<double> log_value;
    bool log_domain = false;
};

inline constexpr double kLinearLimit = 1e300;

// m_n(k) for n = 0..N of the depth-n cascade average Y_n.  Rows flip to the
// log domain permanently once any entry would exceed kLinearLimit.
struct MomentTable {
    unsigned branching;
    unsigned q_max;
    std::vector<MomentRow> rows;  // rows[n], n = 0..N

    double value(unsigned n, unsigned k) const { return rows[n].value[k]; }
    double log_value(unsigned n, unsigned k) const { return rows[n].log_value[k]; }
};

inline constexpr unsigned kMaxMomentN = 10'000;
inline constexpr unsigned kMaxMomentOrder = 64;

// Exact integer moments of Y_n via the one-level recursion: Y_n equals
// b^{-1} times a sum of b independent copies of W * Y_{n-1}.  Per step the
// scaled moment vector E[(W Y)^k]/k! is raised to the b-th truncated
// convolution power by repeated squaring.  Refuses N > 10^4 or q_max > 64.
MomentTable cascade_moments(unsigned branching, const WeightDistribution& dist,
                            unsigned q_max, unsigned N);

// Exact integer moments of Theta(X, alpha) by the subtree recursion
// S_v = alpha(v) + sum over children of X(child) * S_child, combining
// children through truncated convolution of scaled moment vectors.  The
// profile path exploits identical children via convolution powers.
MomentRow theta_moments(const LevelProfile& profile, const WeightDistribution& dist,
                        unsigned q_max);
MomentRow theta_moments(const SparseTree& shape, const std::vector<double>& alpha,
                        const WeightDistribution& dist, unsigned q_max);

// The (n, log m_n(k)) sequence for one moment order, ready for growth fits.
std::vector<std::pair<unsigned, double>> growth_series(const MomentTable& table,
                                                       unsigned k);

// CSV with header `n,k,value,log_value,domain`.
std::string to_csv(const MomentTable& table);

} // namespace cascade
