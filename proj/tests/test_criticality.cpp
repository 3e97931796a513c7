#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "cascadelab/criticality.hpp"
#include "cascadelab/errors.hpp"

using namespace cascade;

namespace {

WeightDistribution w_tc(unsigned b) {
    const double bd = static_cast<double>(b);
    return WeightDistribution({0.0, bd}, {1.0 - 1.0 / bd, 1.0 / bd});
}

WeightDistribution sqrt3_law() {
    return WeightDistribution({1.0 + std::sqrt(3.0), 1.0 - 1.0 / std::sqrt(3.0)},
                              {0.25, 0.75});
}

} // namespace

TEST_CASE("phi vanishes identically for the 0/b law and at q=1 for every law") {
    const StructureFunction tc(2, w_tc(2));
    for (double q : {1.0, 2.0, 3.5, 7.3, 40.0})
        CHECK(std::abs(tc.phi(q)) <= 1e-12);
    const StructureFunction f(2, WeightDistribution({0.5, 1.5}, {0.5, 0.5}));
    CHECK(std::abs(f.phi(1.0)) <= 1e-12);
    const StructureFunction g(3, WeightDistribution({0.25, 1.75}, {0.5, 0.5}));
    CHECK(std::abs(g.phi(1.0)) <= 1e-12);
}

TEST_CASE("phi value for a supercritical pair") {
    const StructureFunction sf(2, WeightDistribution({3.0, 0.0}, {1.0 / 3, 2.0 / 3}));
    CHECK(sf.phi(2.0) == doctest::Approx(std::log2(3.0) - 1.0).epsilon(1e-12));
}

TEST_CASE("totally critical detection") {
    CHECK(StructureFunction(2, w_tc(2)).is_totally_critical());
    CHECK(StructureFunction(3, w_tc(3)).is_totally_critical());
    CHECK_FALSE(StructureFunction(2, WeightDistribution({1.0}, {1.0})).is_totally_critical());
    // Atom 3 with b=2 is not the 0/b law even with a zero atom present.
    CHECK_FALSE(StructureFunction(2, WeightDistribution::relaxed({0.0, 3.0}, {2.0 / 3, 1.0 / 3}))
                    .is_totally_critical());
    // Wrong branching: the 0/2 law is not the 0/3 law.
    CHECK_FALSE(StructureFunction(3, w_tc(2)).is_totally_critical());
}

TEST_CASE("root search sentinels") {
    const auto tc = StructureFunction(2, w_tc(2)).find_critical_exponent();
    CHECK(tc.kind == CriticalRootKind::totally_critical);
    CHECK_FALSE(tc.q_crit.has_value());

    // Bounded law with esssup 1.5 < 2: phi stays negative forever.
    const auto sub = StructureFunction(2, WeightDistribution({0.5, 1.5}, {0.5, 0.5}))
                         .find_critical_exponent();
    CHECK(sub.kind == CriticalRootKind::none_subcritical);

    // E[W log W] = log 3 > log 2: phi has positive slope already at 1, so it
    // never dips below zero and no second root exists.
    const auto sup = StructureFunction(2, WeightDistribution({3.0, 0.0}, {1.0 / 3, 2.0 / 3}))
                         .find_critical_exponent();
    CHECK(sup.kind == CriticalRootKind::none_supercritical);
}

TEST_CASE("root search finds a genuine crossing") {
    // mean 1, E[W^2] = 2.28 > 2, but E[W log W] < log 2: root in (1, 2).
    const StructureFunction sf(2, WeightDistribution({0.2, 2.6}, {2.0 / 3, 1.0 / 3}));
    const auto res = sf.find_critical_exponent();
    REQUIRE(res.kind == CriticalRootKind::root);
    REQUIRE(res.q_crit.has_value());
    const double r = *res.q_crit;
    CHECK(r > 1.0);
    CHECK(r < 2.0);
    CHECK(std::abs(sf.phi(r)) < 1e-9);
    CHECK(sf.dist().moment(r) == doctest::Approx(std::pow(2.0, r - 1.0)).epsilon(1e-8));
}

TEST_CASE("the asymmetric critical law has its root at 2") {
    const auto res = StructureFunction(2, sqrt3_law()).find_critical_exponent();
    REQUIRE(res.kind == CriticalRootKind::root);
    CHECK(*res.q_crit == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("classification regimes") {
    const auto sub = StructureFunction(2, WeightDistribution({0.5, 1.5}, {0.5, 0.5}))
                         .classify(2.0);
    CHECK(sub.regime == Regime::subcritical);
    CHECK(sub.phi_value < 0.0);
    CHECK_FALSE(sub.totally_critical);
    CHECK_FALSE(sub.q_crit.has_value());

    const auto crit = StructureFunction(2, sqrt3_law()).classify(2.0);
    CHECK(crit.regime == Regime::critical);
    REQUIRE(crit.q_crit.has_value());
    CHECK(*crit.q_crit == doctest::Approx(2.0).epsilon(1e-8));

    const auto sup = StructureFunction(2, sqrt3_law()).classify(3.0);
    CHECK(sup.regime == Regime::supercritical);

    const auto tc = StructureFunction(2, w_tc(2)).classify(5.0);
    CHECK(tc.regime == Regime::critical);
    CHECK(tc.totally_critical);
}

TEST_CASE("interior strict subcriticality check") {
    const StructureFunction crit(2, sqrt3_law());
    CHECK(crit.verify_strict_subcritical_interior(2.0, {1.25, 1.5, 1.75}));
    CHECK(crit.verify_strict_subcritical_interior(2.0));

    const StructureFunction one(2, WeightDistribution({1.0}, {1.0}));
    CHECK(one.verify_strict_subcritical_interior(2.0, std::vector<double>{1.5}));

    CHECK_THROWS_AS(StructureFunction(2, w_tc(2)).verify_strict_subcritical_interior(2.0),
                    PreconditionError);
    const StructureFunction sup(2, WeightDistribution({3.0, 0.0}, {1.0 / 3, 2.0 / 3}));
    CHECK_THROWS_AS(sup.verify_strict_subcritical_interior(2.0), PreconditionError);
    CHECK_THROWS_AS(crit.verify_strict_subcritical_interior(2.0, std::vector<double>{0.5}),
                    ConfigError);
    CHECK_THROWS_AS(crit.verify_strict_subcritical_interior(2.0, std::vector<double>{2.5}),
                    ConfigError);
}

TEST_CASE("convexity of phi on random laws") {
    std::mt19937 gen(20240817);
    std::uniform_real_distribution<double> u01(0.05, 0.95);
    std::uniform_real_distribution<double> uq(0.1, 64.0);
    for (int trial = 0; trial < 200; ++trial) {
        // Random two-point mean-1 law: pick the low atom and its mass.
        const double p0 = u01(gen);
        const double a0 = u01(gen);  // below 1
        const double a1 = (1.0 - a0 * p0) / (1.0 - p0);
        const StructureFunction sf(2, WeightDistribution({a0, a1}, {p0, 1.0 - p0}));
        const double q1 = uq(gen);
        const double q2 = uq(gen);
        for (double lambda : {0.25, 0.5, 0.75}) {
            const double mid = lambda * q1 + (1.0 - lambda) * q2;
            const double lhs = sf.phi(mid);
            const double rhs = lambda * sf.phi(q1) + (1.0 - lambda) * sf.phi(q2);
            CHECK(lhs <= rhs + 1e-9);
        }
    }
}

TEST_CASE("two well-separated near-roots imply the totally critical law") {
    // Sign sweep on a fixed grid: any law showing |phi| below tolerance at
    // two exponents more than 0.5 apart must be the 0/b law (convexity
    // forbids two isolated roots beyond 1).  The sweep includes the 0/b law
    // itself so the implication is exercised, not vacuous.
    std::mt19937 gen(96245);
    std::uniform_real_distribution<double> u01(0.05, 0.95);
    for (int trial = 0; trial < 300; ++trial) {
        StructureFunction sf = [&] {
            if (trial % 25 == 0) return StructureFunction(2, w_tc(2));
            const double p0 = u01(gen);
            const double a0 = u01(gen);
            const double a1 = (1.0 - a0 * p0) / (1.0 - p0);
            return StructureFunction(2, WeightDistribution({a0, a1}, {p0, 1.0 - p0}));
        }();
        double first_root = -1.0;
        bool two_roots = false;
        for (double q = 1.25; q <= 16.0; q += 0.25) {
            if (std::abs(sf.phi(q)) <= 1e-9) {
                if (first_root < 0.0)
                    first_root = q;
                else if (q - first_root > 0.5)
                    two_roots = true;
            }
        }
        if (two_roots) CHECK(sf.is_totally_critical());
        if (sf.is_totally_critical()) CHECK(two_roots);
    }
}

TEST_CASE("rejects bad construction inputs") {
    CHECK_THROWS_AS(StructureFunction(1, w_tc(2)), ConfigError);
    CHECK_THROWS_AS(StructureFunction(2, WeightDistribution::relaxed({2.0}, {1.0})),
                    ConfigError);
    const StructureFunction sf(2, w_tc(2));
    CHECK_THROWS_AS(sf.phi(0.0), ConfigError);
    CHECK_THROWS_AS(sf.classify(0.5), ConfigError);
    CHECK_THROWS_AS(sf.find_critical_exponent(1.5), ConfigError);
}

TEST_CASE("enum names") {
    CHECK(to_string(CriticalRootKind::totally_critical) == "totally_critical");
    CHECK(to_string(CriticalRootKind::none_subcritical) == "none_subcritical");
    CHECK(to_string(Regime::supercritical) == "supercritical");
}
