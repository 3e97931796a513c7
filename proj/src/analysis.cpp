#include "cascadelab/analysis.hpp"

#include <algorithm>
#include <cmath>

#include <nlohmann/json.hpp>

#include "cascadelab/errors.hpp"
#include "cascadelab/exact_moments.hpp"
#include "cascadelab/numeric.hpp"

namespace cascade {

std::string to_string(FitMode mode) {
    return mode == FitMode::log_log ? "log-log" : "log-linear";
}

GrowthFit fit_growth(const std::vector<std::pair<unsigned, double>>& series,
                     FitMode mode, double target) {
    if (series.size() < 4)
        throw ConfigError("growth fit: need at least 4 points, got " +
                          std::to_string(series.size()));
    std::vector<double> x(series.size());
    std::vector<double> y(series.size());
    unsigned n_min = series.front().first;
    unsigned n_max = series.front().first;
    for (std::size_t i = 0; i < series.size(); ++i) {
        const unsigned n = series[i].first;
        n_min = std::min(n_min, n);
        n_max = std::max(n_max, n);
        if (mode == FitMode::log_log) {
            if (n < 1) throw ConfigError("growth fit: log-log mode requires n >= 1");
            x[i] = std::log(static_cast<double>(n));
        } else {
            x[i] = static_cast<double>(n);
        }
        y[i] = series[i].second;
        if (!std::isfinite(y[i]))
            throw ConfigError("growth fit: non-finite log moment at n = " +
                              std::to_string(n));
    }
    const double count = static_cast<double>(series.size());
    double x_bar = 0.0, y_bar = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        x_bar += x[i];
        y_bar += y[i];
    }
    x_bar /= count;
    y_bar /= count;
    double sxx = 0.0, sxy = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double dx = x[i] - x_bar;
        const double dy = y[i] - y_bar;
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if (sxx == 0.0) throw ConfigError("growth fit: degenerate window (constant n)");

    GrowthFit fit{};
    fit.slope = sxy / sxx;
    fit.intercept = y_bar - fit.slope * x_bar;
    double ss_res = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double r = y[i] - (fit.intercept + fit.slope * x[i]);
        ss_res += r * r;
    }
    // A constant series is fitted exactly by its mean; report a perfect fit
    // rather than 0/0.
    fit.r_squared = syy == 0.0 ? 1.0 : std::clamp(1.0 - ss_res / syy, 0.0, 1.0);
    fit.target = target;
    fit.abs_error = std::abs(fit.slope - target);
    fit.window = {n_min, n_max};
    fit.mode = mode;
    return fit;
}

namespace {

constexpr double kSupSlack = 1e-9;

bool nearly_integer(double q, unsigned& k) {
    const double r = std::round(q);
    if (std::abs(q - r) > 1e-12 || r < 1.0) return false;
    k = static_cast<unsigned>(r);
    return true;
}

} // namespace

Verdict theorem_report(unsigned branching, const WeightDistribution& dist, double q,
                       unsigned N, const ReportConfig& cfg) {
    if (!(q > 1.0)) throw ConfigError("theorem report: q must exceed 1");
    const unsigned wmin = cfg.window_min != 0 ? cfg.window_min : std::max(1u, N / 16);
    const unsigned wmax = cfg.window_max != 0 ? cfg.window_max : N;
    if (wmin >= wmax || wmax > N)
        throw ConfigError("theorem report: bad fit window");

    const StructureFunction sf(branching, dist);
    const CriticalityReport cls = sf.classify(q);

    Verdict v{};
    v.tolerance = cfg.tolerance;
    v.window = {wmin, wmax};

    FitMode mode;
    if (sf.is_totally_critical()) {
        v.theorem = "totally_critical_moment_growth";
        v.regime = "totally_critical";
        v.target = q - 1.0;
        v.comparison = "two_sided";
        mode = FitMode::log_log;
    } else if (cls.regime == Regime::critical) {
        if (q < 2.0)
            throw ConfigError(
                "theorem report: no predicted rate for critical pairs with q < 2; "
                "slopes there are exploratory only");
        v.theorem = "critical_moment_growth";
        v.regime = "critical";
        v.target = 1.0;
        v.comparison = "two_sided";
        mode = FitMode::log_log;
    } else if (cls.regime == Regime::subcritical) {
        v.theorem = "subcritical_boundedness";
        v.regime = "subcritical";
        v.target = 0.0;
        v.comparison = "boundedness";
        mode = FitMode::log_linear;
    } else {
        v.theorem = "supercritical_geometric_growth";
        v.regime = "supercritical";
        // Natural-log growth rate per level: log E[W^q] - (q-1) log b.
        v.target = dist.log_moment(q) -
                   (q - 1.0) * std::log(static_cast<double>(branching));
        v.comparison = q <= 2.0 ? "two_sided" : "lower_bound";
        mode = FitMode::log_linear;
    }

    if (cfg.engine == Engine::exact) {
        unsigned k = 0;
        if (!nearly_integer(q, k))
            throw ConfigError("theorem report: the exact engine requires integer q");
        const MomentTable table = cascade_moments(branching, dist, k, N);
        const auto full = growth_series(table, k);
        for (const auto& [n, logm] : full)
            if (n >= wmin && n <= wmax) v.series.emplace_back(n, logm);
        if (cls.regime == Regime::subcritical && k == 2) {
            double sup = 0.0;
            for (unsigned n = 0; n < table.rows.size(); ++n)
                sup = std::max(sup, table.value(n, 2));
            v.sup_value = sup;
            v.sup_bound = (branching - 1.0) /
                          (static_cast<double>(branching) - dist.moment(2.0));
        }
    } else {
        double worst_share = 0.0;
        for (unsigned n = wmin; n <= wmax; ++n) {
            McConfig mc{branching, dist, n, q, cfg.seed, cfg.samples, cfg.batches};
            const McEstimate est = estimate_moment(mc, cfg.threads);
            if (!(est.mean > 0.0))
                throw ConfigError("theorem report: Monte Carlo mean vanished at n = " +
                                  std::to_string(n) + "; cannot take logs");
            v.series.emplace_back(n, std::log(est.mean));
            v.mc_series.emplace_back(n, est);
            worst_share = std::max(worst_share, est.max_share);
        }
        v.max_share = worst_share;
    }

    v.fit = fit_growth(v.series, mode, v.target);
    v.slope = v.fit.slope;
    if (v.comparison == "lower_bound")
        v.pass = v.slope >= v.target - v.tolerance;
    else if (v.comparison == "boundedness")
        v.pass = std::abs(v.slope) <= v.tolerance;
    else
        v.pass = v.fit.abs_error <= v.tolerance;
    if (v.sup_value && v.sup_bound)
        v.pass = v.pass && *v.sup_value <= *v.sup_bound + kSupSlack;
    return v;
}

std::string to_json(const Verdict& v) {
    nlohmann::ordered_json j;
    j["theorem"] = v.theorem;
    j["regime"] = v.regime;
    j["target"] = v.target;
    j["slope"] = v.slope;
    j["tolerance"] = v.tolerance;
    j["pass"] = v.pass;
    j["window"] = {v.window.first, v.window.second};
    j["comparison"] = v.comparison;
    j["mode"] = to_string(v.fit.mode);
    j["intercept"] = v.fit.intercept;
    j["r_squared"] = v.fit.r_squared;
    j["abs_error"] = v.fit.abs_error;
    if (v.sup_value) j["sup_value"] = *v.sup_value;
    if (v.sup_bound) j["sup_bound"] = *v.sup_bound;
    if (v.max_share) j["max_share"] = *v.max_share;
    return j.dump(2);
}

} // namespace cascade
