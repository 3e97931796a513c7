#pragma once

#include <optional>
#include <string>
#include <vector>

namespace cascade {

/// Finite discrete law of a non-negative random variable.
///
/// The primary constructor enforces the cascade normalization E[W] = 1 and
/// rejects anything else; `relaxed` admits an arbitrary non-negative law
/// (needed for squared laws, whose mean is E[X^2], not 1). Atoms are sorted
/// ascending and exact duplicates are merged, so two distributions with the
/// same law compare equal field-by-field.
class WeightDistribution {
public:
    static constexpr double kProbSumTol = 1e-12;
    static constexpr double kMeanTol = 1e-12;

    WeightDistribution(std::vector<double> atoms, std::vector<double> probs);

    static WeightDistribution relaxed(std::vector<double> atoms,
                                      std::vector<double> probs);

    const std::vector<double>& atoms() const { return atoms_; }
    const std::vector<double>& probs() const { return probs_; }
    bool mean_is_one() const { return mean_is_one_; }

    double mean() const;
    double variance() const;

    /// E[W^q] for q >= 0. Atoms at 0 contribute 0 for q > 0 and 1 for q = 0.
    /// Falls back to log-domain accumulation when a^q leaves double range.
    double moment(double q) const;

    /// log E[W^q]; -inf if the moment is zero (only possible for W ≡ 0,
    /// which the constructors exclude).
    double log_moment(double q) const;

    /// E[W log W] with 0 log 0 = 0; diagnostic only (compared against log b
    /// for the non-degeneracy printout).
    double mean_w_log_w() const;

    /// ||X - E[X]||_q / sqrt(Var X); NaN when Var = 0. Diagnostic only: the
    /// reduction's equivalence constants depend on it but are never computed.
    double centered_norm_ratio(double q) const;

    /// Law of W^e for integer e >= 1 (atoms powered, probs unchanged).
    WeightDistribution power_law(unsigned e) const;
    WeightDistribution squared_law() const { return power_law(2); }

    std::string to_literal() const;
    std::string to_json() const;

    /// Parses `atoms=0,2;probs=0.5,0.5`. Errors carry the byte offset of
    /// the offending token. `require_mean_one` selects the constructor.
    static WeightDistribution parse_literal(const std::string& text,
                                            bool require_mean_one = true);
    static WeightDistribution parse_json(const std::string& text,
                                         bool require_mean_one = true);

private:
    WeightDistribution(std::vector<double> atoms, std::vector<double> probs,
                       bool require_mean_one);

    std::vector<double> atoms_;
    std::vector<double> probs_;
    bool mean_is_one_ = false;
};

} // namespace cascade
