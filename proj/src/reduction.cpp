#include "cascadelab/reduction.hpp"

#include <cmath>

#include "cascadelab/numeric.hpp"

namespace cascade {

LevelProfile cascade_profile(unsigned branching, unsigned depth) {
    if (branching < 2) throw ConfigError("cascade profile: branching must be >= 2");
    std::vector<double> coeffs(depth + 1, 0.0);
    coeffs[depth] = std::pow(static_cast<double>(branching), -static_cast<double>(depth));
    return LevelProfile{branching, std::move(coeffs)};
}

ProfileReduction reduce(const LevelProfile& weights, const WeightDistribution& dist) {
    const double mean = dist.mean();
    const double var = dist.variance();
    std::vector<double> beta = reduce_profile<double>(weights.branching, weights.coeffs,
                                                      mean, var);
    return ProfileReduction{LevelProfile{weights.branching, std::move(beta)},
                            mean, var, dist.power_law(2)};
}

SparseWeightsReduction reduce(const SparseTree& shape, const std::vector<double>& alpha,
                              const WeightDistribution& dist) {
    const double mean = dist.mean();
    const double var = dist.variance();
    SparseReduction<double> r = reduce_sparse<double>(shape, alpha, mean, var);
    return SparseWeightsReduction{std::move(r.shape), std::move(r.beta),
                                  std::move(r.source), mean, var, dist.power_law(2)};
}

PipelineResult reduction_pipeline(const StructureFunction& sf, double q, unsigned depth) {
    if (!(q >= 2.0)) throw ConfigError("reduction pipeline: q must be >= 2");
    const unsigned b = sf.branching();
    const double log_b = std::log(static_cast<double>(b));

    // The preflight reports where (W, q) sits relative to E[W^q] = b^{q-1};
    // it is informational — validity is re-checked stage by stage below.
    PipelineResult result{sf.classify(q), {}};
    PipelineStage stage{0, q, cascade_profile(b, depth), sf.dist(), {}};
    result.stages.push_back(stage);

    while (stage.exponent >= 2.0) {
        if (stage.index >= 1) {
            // The factor law at this stage is W^(2^index); its mean must stay
            // strictly below b^(2^index - 1) for the reduced coefficients to
            // remain summable against the reference profile.
            const double pow2 = std::ldexp(1.0, static_cast<int>(stage.index));
            const std::string where =
                "reduction pipeline: stage " + std::to_string(stage.index) + ": ";
            if (sf.is_totally_critical())
                throw PreconditionError(
                    where + "the factor law is totally critical, so "
                    "E[W^" + format_double(pow2) + "] = b^" +
                    format_double(pow2 - 1.0) + " exactly and the strict "
                    "subcriticality needed for further reduction fails");
            if (!(sf.phi(pow2) < -StructureFunction::kClassifyTol))
                throw PreconditionError(
                    where + "E[W^" + format_double(pow2) + "] >= b^" +
                    format_double(pow2 - 1.0) + " within tolerance; further "
                    "reduction is not justified");
            if (!sf.verify_strict_subcritical_interior(pow2))
                throw PreconditionError(
                    where + "an interior exponent below " + format_double(pow2) +
                    " is not strictly subcritical");
        }
        const double mean = stage.dist.mean();
        const double var = stage.dist.variance();
        std::vector<double> beta = reduce_profile<double>(b, stage.profile.coeffs, mean, var);
        stage.index += 1;
        stage.exponent *= 0.5;
        stage.profile = LevelProfile{b, std::move(beta)};
        stage.dist = stage.dist.power_law(2);
        // Diagnostic: stage coefficients against the reference profile
        // b^{-2^index * k}.  The reference is meaningful from stage 1 on.
        stage.ratio_to_ideal.assign(stage.profile.coeffs.size(), 0.0);
        const double scale = std::ldexp(1.0, static_cast<int>(stage.index)) * log_b;
        for (std::size_t k = 0; k < stage.profile.coeffs.size(); ++k) {
            const double c = stage.profile.coeffs[k];
            stage.ratio_to_ideal[k] =
                c == 0.0 ? 0.0 : std::exp(std::log(c) + scale * static_cast<double>(k));
        }
        result.stages.push_back(stage);
    }
    return result;
}

namespace {

BoundsReport bounds_from_log_terms(double q, std::vector<double> lower_terms,
                                   std::vector<double> upper_terms, bool with_upper) {
    BoundsReport report{};
    report.q = q;
    report.log_lower = log_add(lower_terms);
    report.lower = std::exp(report.log_lower);
    if (with_upper) {
        report.log_upper_core = log_add(upper_terms);
        report.upper_core = std::exp(*report.log_upper_core);
    }
    return report;
}

} // namespace

BoundsReport evaluate_bounds_profile(const LevelProfile& profile,
                                     const WeightDistribution& x, double q) {
    if (!(q >= 1.0)) throw ConfigError("bounds: q must be >= 1");
    const unsigned b = profile.branching;
    const double log_b = std::log(static_cast<double>(b));
    const double log_mq = x.log_moment(q);
    const bool with_upper = q <= 2.0;

    std::vector<double> lower_terms;
    std::vector<double> upper_terms;
    const std::vector<double>& a = profile.coeffs;
    std::vector<double> kappa;
    if (with_upper) kappa = kappa_profile<double>(b, a, x.mean());
    for (std::size_t m = 0; m < a.size(); ++m) {
        const double base = static_cast<double>(m) * (log_b + log_mq);
        if (a[m] > 0.0) lower_terms.push_back(base + q * std::log(a[m]));
        if (with_upper && kappa[m] > 0.0)
            upper_terms.push_back(base + q * std::log(kappa[m]));
    }
    return bounds_from_log_terms(q, std::move(lower_terms), std::move(upper_terms),
                                 with_upper);
}

BoundsReport evaluate_bounds_sparse(const SparseTree& shape,
                                    const std::vector<double>& alpha,
                                    const WeightDistribution& x, double q) {
    if (!(q >= 1.0)) throw ConfigError("bounds: q must be >= 1");
    if (alpha.size() != shape.vertex_count())
        throw ConfigError("bounds: coefficient count does not match vertex count");
    const double log_mq = x.log_moment(q);
    const bool with_upper = q <= 2.0;

    std::vector<double> lower_terms;
    std::vector<double> upper_terms;
    std::vector<double> kappa;
    if (with_upper) kappa = kappa_sparse<double>(shape, alpha, x.mean());
    for (std::size_t i = 0; i < alpha.size(); ++i) {
        const VertexId v = static_cast<VertexId>(i);
        const double base = static_cast<double>(shape.depth(v)) * log_mq;
        if (alpha[i] > 0.0) lower_terms.push_back(base + q * std::log(alpha[i]));
        if (with_upper && kappa[i] > 0.0)
            upper_terms.push_back(base + q * std::log(kappa[i]));
    }
    return bounds_from_log_terms(q, std::move(lower_terms), std::move(upper_terms),
                                 with_upper);
}

} // namespace cascade
