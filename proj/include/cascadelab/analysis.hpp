#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "cascadelab/criticality.hpp"
#include "cascadelab/distribution.hpp"
#include "cascadelab/monte_carlo.hpp"

namespace cascade {

enum class FitMode {
    log_log,      // log moment against log n
    log_linear,   // log moment against n
};

std::string to_string(FitMode mode);

struct GrowthFit {
    double slope;
    double intercept;
    double r_squared;           // clamped to [0, 1]; exact fits report 1
    double target;              // theoretical rate attached for reporting
    double abs_error;           // |slope - target|
    std::pair<unsigned, unsigned> window;
    FitMode mode;
};

// Ordinary least squares of log_moment against log n or n.  Requires at
// least 4 points; log-log mode requires every n >= 1.  All logarithms are
// natural, so log-linear slopes compare against log(E[W^q] b^{1-q}).
GrowthFit fit_growth(const std::vector<std::pair<unsigned, double>>& series,
                     FitMode mode, double target);

enum class Engine { exact, mc };

struct ReportConfig {
    Engine engine = Engine::exact;
    double tolerance = 0.1;     // on the slope, or on |slope| for boundedness
    unsigned window_min = 0;    // 0 = auto: max(1, N/16)
    unsigned window_max = 0;    // 0 = auto: N
    // Monte Carlo engine parameters (ignored for Engine::exact); the MC
    // series samples every integer depth in the window.
    std::uint64_t seed = 0;
    std::uint64_t samples = 10'000;
    unsigned batches = 32;
    unsigned threads = 1;
};

// Structured verdict for one (b, dist, q) experiment against the predicted
// moment growth: log-log slope q-1 when the law is totally critical; log-log
// slope 1 for other critical pairs with q >= 2; boundedness (and at q = 2
// the affine fixed-point bound) for subcritical pairs; log-linear slope
// log(E[W^q]/b^{q-1}) for supercritical pairs, demanded as two-sided for
// q <= 2 and as a lower bound only for q > 2.
struct Verdict {
    std::string theorem;        // which growth law was tested
    std::string regime;         // subcritical | critical | supercritical |
                                // totally_critical
    double target;
    double slope;
    double tolerance;
    bool pass;
    std::pair<unsigned, unsigned> window;
    GrowthFit fit;
    std::string comparison;     // two_sided | lower_bound | boundedness
    std::optional<double> sup_value;   // subcritical q=2: sup_n m_n(2)
    std::optional<double> sup_bound;   // subcritical q=2: (b-1)/(b-E[W^2])
    std::optional<double> max_share;   // MC engine: worst heavy-tail share
    std::vector<std::pair<unsigned, double>> series;  // (n, log moment)
    std::vector<std::pair<unsigned, McEstimate>> mc_series;
};

Verdict theorem_report(unsigned branching, const WeightDistribution& dist, double q,
                       unsigned N, const ReportConfig& cfg);

// JSON object with keys theorem, regime, target, slope, tolerance, pass,
// window, plus the diagnostic extras when present.
std::string to_json(const Verdict& verdict);

} // namespace cascade
