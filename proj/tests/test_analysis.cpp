#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include <nlohmann/json.hpp>

#include "cascadelab/analysis.hpp"
#include "cascadelab/errors.hpp"
#include "cascadelab/numeric.hpp"

using namespace cascade;

namespace {

WeightDistribution w_tc(unsigned b) {
    const double bd = static_cast<double>(b);
    return WeightDistribution({0.0, bd}, {1.0 - 1.0 / bd, 1.0 / bd});
}

std::vector<std::pair<unsigned, double>> power_series(double exponent, unsigned lo,
                                                      unsigned hi) {
    std::vector<std::pair<unsigned, double>> out;
    for (unsigned n = lo; n <= hi; ++n)
        out.emplace_back(n, exponent * std::log(double(n)));
    return out;
}

} // namespace

TEST_CASE("least squares recovers an exact power law") {
    const auto fit = fit_growth(power_series(3.0, 4, 40), FitMode::log_log, 3.0);
    CHECK(fit.slope == doctest::Approx(3.0).epsilon(1e-9));
    CHECK(fit.abs_error <= 1e-9);
    CHECK(fit.r_squared == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(fit.window == std::pair<unsigned, unsigned>{4, 40});
    CHECK(fit.mode == FitMode::log_log);
}

TEST_CASE("least squares recovers an exact geometric law") {
    std::vector<std::pair<unsigned, double>> series;
    for (unsigned n = 1; n <= 20; ++n) series.emplace_back(n, 0.7 * n - 2.0);
    const auto fit = fit_growth(series, FitMode::log_linear, 0.7);
    CHECK(fit.slope == doctest::Approx(0.7).epsilon(1e-12));
    CHECK(fit.intercept == doctest::Approx(-2.0).epsilon(1e-9));
}

TEST_CASE("a constant series fits with slope zero and r_squared one") {
    std::vector<std::pair<unsigned, double>> series;
    for (unsigned n = 1; n <= 10; ++n) series.emplace_back(n, 1.25);
    const auto fit = fit_growth(series, FitMode::log_linear, 0.0);
    CHECK(fit.slope == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(fit.r_squared == doctest::Approx(1.0));
}

TEST_CASE("fit preconditions") {
    CHECK_THROWS_AS(fit_growth(power_series(1.0, 1, 3), FitMode::log_log, 1.0),
                    ConfigError);
    CHECK_THROWS_AS(fit_growth({{0, 1.0}, {1, 1.0}, {2, 1.0}, {3, 1.0}},
                               FitMode::log_log, 1.0),
                    ConfigError);
    std::vector<std::pair<unsigned, double>> degenerate(5, {3, 1.0});
    CHECK_THROWS_AS(fit_growth(degenerate, FitMode::log_linear, 0.0), ConfigError);
    std::vector<std::pair<unsigned, double>> with_nan = power_series(1.0, 1, 5);
    with_nan[2].second = kNegInf;
    CHECK_THROWS_AS(fit_growth(with_nan, FitMode::log_log, 1.0), ConfigError);
}

TEST_CASE("totally critical verdict: slope q-1 on the exact engine") {
    ReportConfig cfg;
    cfg.tolerance = 0.01;
    const auto v = theorem_report(2, w_tc(2), 2.0, 4096, cfg);
    CHECK(v.theorem == "totally_critical_moment_growth");
    CHECK(v.regime == "totally_critical");
    CHECK(v.target == 1.0);
    CHECK(v.comparison == "two_sided");
    CHECK(v.window == std::pair<unsigned, unsigned>{256, 4096});
    CHECK(v.slope == doctest::Approx(1.0).epsilon(0.01));
    CHECK(v.pass);
    CHECK_FALSE(v.sup_value.has_value());
    CHECK(v.series.size() == 4096 - 256 + 1);
}

TEST_CASE("totally critical verdict at q = 4: slope approaches 3") {
    ReportConfig cfg;
    cfg.tolerance = 0.2;
    const auto v = theorem_report(2, w_tc(2), 4.0, 4096, cfg);
    CHECK(v.target == 3.0);
    CHECK(std::abs(v.slope - 3.0) <= 0.2);
    CHECK(v.pass);
}

TEST_CASE("critical non-totally-critical verdict targets slope 1") {
    const WeightDistribution law({1.0 + std::sqrt(3.0), 1.0 - 1.0 / std::sqrt(3.0)},
                                 {0.25, 0.75});
    ReportConfig cfg;
    cfg.tolerance = 0.01;
    const auto v = theorem_report(2, law, 2.0, 4096, cfg);
    CHECK(v.theorem == "critical_moment_growth");
    CHECK(v.regime == "critical");
    CHECK(v.target == 1.0);
    CHECK(v.slope == doctest::Approx(1.0).epsilon(0.01));
    CHECK(v.pass);

    // Below q = 2 no growth law is claimed for merely-critical pairs.
    CHECK_THROWS_AS(theorem_report(2, law, 1.5, 256, cfg), ConfigError);
}

TEST_CASE("subcritical verdict: bounded with the affine fixed-point cap") {
    const WeightDistribution law({0.5, 1.5}, {0.5, 0.5});
    ReportConfig cfg;
    cfg.tolerance = 0.05;
    const auto v = theorem_report(2, law, 2.0, 512, cfg);
    CHECK(v.theorem == "subcritical_boundedness");
    CHECK(v.comparison == "boundedness");
    CHECK(std::abs(v.slope) <= 0.05);
    REQUIRE(v.sup_value.has_value());
    REQUIRE(v.sup_bound.has_value());
    CHECK(*v.sup_bound == doctest::Approx(4.0 / 3.0).epsilon(1e-12));
    CHECK(*v.sup_value <= *v.sup_bound + 1e-9);
    CHECK(v.pass);
}

TEST_CASE("supercritical verdict: log-linear slope log(E[W^q]/b^{q-1})") {
    const WeightDistribution law({3.0, 0.0}, {1.0 / 3, 2.0 / 3});
    ReportConfig cfg;
    cfg.tolerance = 1e-3;
    const auto v = theorem_report(2, law, 2.0, 256, cfg);
    CHECK(v.theorem == "supercritical_geometric_growth");
    CHECK(v.comparison == "two_sided");
    CHECK(v.target == doctest::Approx(std::log(1.5)).epsilon(1e-12));
    CHECK(v.slope == doctest::Approx(std::log(1.5)).epsilon(1e-5));
    CHECK(v.pass);
    CHECK(v.fit.mode == FitMode::log_linear);

    // Beyond q = 2 only the lower bound is claimed; a slope at or above
    // target - tolerance passes.
    const auto v4 = theorem_report(2, w_tc(2), 4.0, 64,
                                   [] { ReportConfig c; c.tolerance = 0.5; return c; }());
    CHECK(v4.comparison == "two_sided");  // TC is critical, not supercritical

    const WeightDistribution sup4({0.0, 2.5}, {0.6, 0.4});
    ReportConfig cfg4;
    cfg4.tolerance = 0.05;
    const auto vs = theorem_report(2, sup4, 4.0, 256, cfg4);
    CHECK(vs.comparison == "lower_bound");
    const double target4 = sup4.log_moment(4.0) - 3.0 * std::log(2.0);
    CHECK(vs.target == doctest::Approx(target4).epsilon(1e-12));
    CHECK(vs.slope >= target4 - 0.05);
    CHECK(vs.pass);
}

TEST_CASE("window resolution and validation") {
    ReportConfig cfg;
    cfg.window_min = 16;
    cfg.window_max = 64;
    const auto v = theorem_report(2, w_tc(2), 2.0, 64, cfg);
    CHECK(v.window == std::pair<unsigned, unsigned>{16, 64});

    cfg.window_min = 64;
    cfg.window_max = 16;
    CHECK_THROWS_AS(theorem_report(2, w_tc(2), 2.0, 64, cfg), ConfigError);
    cfg.window_min = 1;
    cfg.window_max = 128;
    CHECK_THROWS_AS(theorem_report(2, w_tc(2), 2.0, 64, cfg), ConfigError);
    CHECK_THROWS_AS(theorem_report(2, w_tc(2), 0.9, 64, ReportConfig{}), ConfigError);
}

TEST_CASE("monte carlo engine agrees with the exact engine on the verdict") {
    ReportConfig exact;
    exact.tolerance = 0.35;
    exact.window_min = 4;
    exact.window_max = 12;
    const auto ve = theorem_report(2, w_tc(2), 2.0, 12, exact);

    ReportConfig mc = exact;
    mc.engine = Engine::mc;
    mc.seed = 424242;
    mc.samples = 20000;
    const auto vm = theorem_report(2, w_tc(2), 2.0, 12, mc);
    CHECK(ve.pass);
    CHECK(vm.pass);
    CHECK(vm.max_share.has_value());
    CHECK(vm.mc_series.size() == 9);
    CHECK(std::abs(vm.slope - ve.slope) < 0.3);
}

TEST_CASE("verdict serializes to a json object with the agreed keys") {
    ReportConfig cfg;
    cfg.tolerance = 0.01;
    // Depth 4096 keeps the default window [N/16, N] clear of the small-n
    // curvature of log(1 + n), which costs ~1/n in the fitted slope.
    const auto v = theorem_report(2, w_tc(2), 2.0, 4096, cfg);
    const auto j = nlohmann::json::parse(to_json(v));
    for (const char* key : {"theorem", "regime", "target", "slope", "tolerance",
                            "pass", "window", "comparison", "mode", "intercept",
                            "r_squared", "abs_error"})
        CHECK(j.contains(key));
    CHECK(j["theorem"] == "totally_critical_moment_growth");
    CHECK(j["pass"] == true);
    CHECK(j["window"].is_array());
    CHECK(j["window"][0] == 256);  // auto minimum: N/16
    CHECK(j["window"][1] == 4096);

    // Byte-identical on repeat evaluation.
    CHECK(to_json(v) == to_json(theorem_report(2, w_tc(2), 2.0, 4096, cfg)));
}
