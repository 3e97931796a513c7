#include "cascadelab/exact_moments.hpp"

#include <algorithm>
#include <cmath>

#include "cascadelab/errors.hpp"
#include "cascadelab/numeric.hpp"

namespace cascade {

namespace {

// Truncated series with non-negative coefficients, in one of two domains.
// All sums are of non-negative terms, so no cancellation occurs and the
// log-domain mirror only needs log-sum-exp.

std::vector<double> conv_linear(const std::vector<double>& u,
                                const std::vector<double>& v) {
    std::vector<double> out(u.size(), 0.0);
    for (std::size_t k = 0; k < out.size(); ++k) {
        CompensatedSum sum;
        for (std::size_t i = 0; i <= k; ++i) sum.add(u[i] * v[k - i]);
        out[k] = sum.value();
    }
    return out;
}

std::vector<double> conv_log(const std::vector<double>& u,
                             const std::vector<double>& v) {
    std::vector<double> out(u.size(), kNegInf);
    std::vector<double> terms;
    for (std::size_t k = 0; k < out.size(); ++k) {
        terms.clear();
        for (std::size_t i = 0; i <= k; ++i) terms.push_back(u[i] + v[k - i]);
        out[k] = log_add(terms);
    }
    return out;
}

std::vector<double> conv_power_linear(std::vector<double> base, std::uint64_t e) {
    std::vector<double> result(base.size(), 0.0);
    result[0] = 1.0;
    while (e > 0) {
        if (e & 1) result = conv_linear(result, base);
        e >>= 1;
        if (e > 0) base = conv_linear(base, base);
    }
    return result;
}

std::vector<double> conv_power_log(std::vector<double> base, std::uint64_t e) {
    std::vector<double> result(base.size(), kNegInf);
    result[0] = 0.0;
    while (e > 0) {
        if (e & 1) result = conv_log(result, base);
        e >>= 1;
        if (e > 0) base = conv_log(base, base);
    }
    return result;
}

// Extended-precision mirrors for the depth recursion.  The log values grow
// linearly with n, so double rounding (half an ulp of a number near n log r
// per level) would accumulate to ~1e-10 by n ~ 4000; carrying the working
// row in long double keeps the per-level error at the 80-bit ulp instead.

constexpr long double kNegInfL = -std::numeric_limits<long double>::infinity();

long double log_add_l(const std::vector<long double>& terms) {
    long double mx = kNegInfL;
    for (const long double t : terms) mx = std::max(mx, t);
    if (mx == kNegInfL) return kNegInfL;
    long double sum = 0.0L;
    for (const long double t : terms) sum += std::exp(t - mx);
    return mx + std::log(sum);
}

std::vector<long double> conv_log_l(const std::vector<long double>& u,
                                    const std::vector<long double>& v) {
    std::vector<long double> out(u.size(), kNegInfL);
    std::vector<long double> terms;
    for (std::size_t k = 0; k < out.size(); ++k) {
        terms.clear();
        for (std::size_t i = 0; i <= k; ++i) terms.push_back(u[i] + v[k - i]);
        out[k] = log_add_l(terms);
    }
    return out;
}

std::vector<long double> conv_power_log_l(std::vector<long double> base,
                                          std::uint64_t e) {
    std::vector<long double> result(base.size(), kNegInfL);
    result[0] = 0.0L;
    while (e > 0) {
        if (e & 1) result = conv_log_l(result, base);
        e >>= 1;
        if (e > 0) base = conv_log_l(base, base);
    }
    return result;
}

double log_factorial(unsigned k) { return std::lgamma(static_cast<double>(k) + 1.0); }

bool row_fits_linear(const std::vector<double>& values) {
    for (double v : values)
        if (!std::isfinite(v) || v > kLinearLimit) return false;
    return true;
}

MomentRow row_from_linear(std::vector<double> values) {
    MomentRow row;
    row.log_value.resize(values.size());
    for (std::size_t k = 0; k < values.size(); ++k)
        row.log_value[k] = values[k] > 0.0 ? std::log(values[k]) : kNegInf;
    row.value = std::move(values);
    row.log_domain = false;
    return row;
}

MomentRow row_from_log(std::vector<double> log_values) {
    MomentRow row;
    row.value.resize(log_values.size());
    for (std::size_t k = 0; k < log_values.size(); ++k)
        row.value[k] = std::exp(log_values[k]);
    row.log_value = std::move(log_values);
    row.log_domain = true;
    return row;
}

} // namespace

MomentTable cascade_moments(unsigned branching, const WeightDistribution& dist,
                            unsigned q_max, unsigned N) {
    if (branching < 2) throw ConfigError("cascade moments: branching must be >= 2");
    if (q_max < 1) throw ConfigError("cascade moments: q_max must be >= 1");
    if (q_max > kMaxMomentOrder)
        throw ResourceError("cascade moments: q_max above the supported limit of " +
                            std::to_string(kMaxMomentOrder));
    if (N > kMaxMomentN)
        throw ResourceError("cascade moments: N above the supported limit of " +
                            std::to_string(kMaxMomentN));

    std::vector<double> w_moment(q_max + 1);
    for (unsigned k = 0; k <= q_max; ++k)
        w_moment[k] = dist.moment(static_cast<double>(k));

    // Long-double constants for the log-domain recursion.  The logs come
    // from the same double moments the linear phase uses, so the two phases
    // agree exactly; in particular a weight law with total mass 1.0 keeps
    // log E[W^0] = 0 exactly, which matters because any error in the k = 0
    // lane doubles at every level of the recursion.
    const long double log_b_l = std::log(static_cast<long double>(branching));
    std::vector<long double> log_w_l(q_max + 1);
    std::vector<long double> log_fact_l(q_max + 1);
    {
        const std::vector<double>& atoms = dist.atoms();
        const std::vector<double>& probs = dist.probs();
        std::vector<long double> terms;
        for (unsigned k = 0; k <= q_max; ++k) {
            log_fact_l[k] = std::lgamma(static_cast<long double>(k) + 1.0L);
            if (std::isfinite(w_moment[k])) {
                log_w_l[k] = w_moment[k] > 0.0
                                 ? std::log(static_cast<long double>(w_moment[k]))
                                 : kNegInfL;
                continue;
            }
            terms.clear();
            for (std::size_t i = 0; i < atoms.size(); ++i) {
                if (probs[i] <= 0.0) continue;
                if (atoms[i] <= 0.0) {
                    if (k == 0) terms.push_back(std::log(static_cast<long double>(probs[i])));
                    continue;
                }
                terms.push_back(std::log(static_cast<long double>(probs[i])) +
                                static_cast<long double>(k) *
                                    std::log(static_cast<long double>(atoms[i])));
            }
            log_w_l[k] = log_add_l(terms);
        }
    }

    MomentTable table{branching, q_max, {}};
    table.rows.reserve(N + 1);
    table.rows.push_back(row_from_linear(std::vector<double>(q_max + 1, 1.0)));

    // Once the values outgrow double range the recursion runs on this
    // long-double log row; the stored rows are rounded copies of it.
    bool log_mode = !row_fits_linear(w_moment);
    std::vector<long double> carry;
    const auto row_to_log_l = [q_max](const MomentRow& row) {
        std::vector<long double> out(q_max + 1);
        for (unsigned k = 0; k <= q_max; ++k) {
            if (row.log_domain)
                out[k] = static_cast<long double>(row.log_value[k]);
            else
                out[k] = row.value[k] > 0.0
                             ? std::log(static_cast<long double>(row.value[k]))
                             : kNegInfL;
        }
        return out;
    };
    if (log_mode) carry = row_to_log_l(table.rows.back());

    for (unsigned n = 1; n <= N; ++n) {
        const MomentRow& prev = table.rows.back();
        if (!log_mode) {
            // Per-child scaled vector c_k = E[W^k] m_{n-1}(k) / k!, then the
            // b-th convolution power; read back m_n(k) = k! p_k b^{-k}.
            std::vector<double> c(q_max + 1);
            double fact = 1.0;
            for (unsigned k = 0; k <= q_max; ++k) {
                if (k > 0) fact *= static_cast<double>(k);
                c[k] = w_moment[k] * prev.value[k] / fact;
            }
            const std::vector<double> p = conv_power_linear(std::move(c), branching);
            std::vector<double> m(q_max + 1);
            fact = 1.0;
            double b_pow = 1.0;
            for (unsigned k = 0; k <= q_max; ++k) {
                if (k > 0) {
                    fact *= static_cast<double>(k);
                    b_pow *= static_cast<double>(branching);
                }
                m[k] = fact * p[k] / b_pow;
            }
            if (row_fits_linear(m)) {
                table.rows.push_back(row_from_linear(std::move(m)));
                continue;
            }
            log_mode = true;  // redo this step from the previous row's logs
            carry = row_to_log_l(prev);
        }
        std::vector<long double> c(q_max + 1);
        for (unsigned k = 0; k <= q_max; ++k)
            c[k] = log_w_l[k] + carry[k] - log_fact_l[k];
        const std::vector<long double> p = conv_power_log_l(std::move(c), branching);
        std::vector<double> m(q_max + 1);
        for (unsigned k = 0; k <= q_max; ++k) {
            carry[k] = log_fact_l[k] + p[k] - static_cast<long double>(k) * log_b_l;
            m[k] = static_cast<double>(carry[k]);
        }
        table.rows.push_back(row_from_log(std::move(m)));
    }
    return table;
}

namespace {

// Scaled moment vector E[S^k]/k! for the subtree sum at one vertex, given
// the already-combined children product (EGF of the sum of child terms).
// Adding the constant alpha(v) is convolution with the EGF of a constant.

std::vector<double> const_egf_linear(double a, unsigned q_max) {
    std::vector<double> e(q_max + 1);
    double term = 1.0;
    e[0] = 1.0;
    for (unsigned k = 1; k <= q_max; ++k) {
        term *= a / static_cast<double>(k);
        e[k] = term;
    }
    return e;
}

std::vector<double> const_egf_log(double a, unsigned q_max) {
    std::vector<double> e(q_max + 1, kNegInf);
    e[0] = 0.0;
    if (a > 0.0) {
        const double log_a = std::log(a);
        for (unsigned k = 1; k <= q_max; ++k)
            e[k] = static_cast<double>(k) * log_a - log_factorial(k);
    }
    return e;
}

struct ThetaEngine {
    unsigned q_max;
    bool log_mode;
    std::vector<double> x_moment;      // E[X^k] or its log
    std::vector<double> one;           // EGF identity element

    ThetaEngine(const WeightDistribution& dist, unsigned q, bool log_domain)
        : q_max(q), log_mode(log_domain) {
        x_moment.resize(q_max + 1);
        for (unsigned k = 0; k <= q_max; ++k)
            x_moment[k] = log_mode ? dist.log_moment(static_cast<double>(k))
                                   : dist.moment(static_cast<double>(k));
        one.assign(q_max + 1, log_mode ? kNegInf : 0.0);
        one[0] = log_mode ? 0.0 : 1.0;
    }

    std::vector<double> scale_by_x(const std::vector<double>& egf) const {
        std::vector<double> out(egf.size());
        for (std::size_t k = 0; k < egf.size(); ++k)
            out[k] = log_mode ? x_moment[k] + egf[k] : x_moment[k] * egf[k];
        return out;
    }

    std::vector<double> conv(const std::vector<double>& u,
                             const std::vector<double>& v) const {
        return log_mode ? conv_log(u, v) : conv_linear(u, v);
    }

    std::vector<double> conv_power(const std::vector<double>& base,
                                   std::uint64_t e) const {
        return log_mode ? conv_power_log(base, e) : conv_power_linear(base, e);
    }

    std::vector<double> const_egf(double a) const {
        return log_mode ? const_egf_log(a, q_max) : const_egf_linear(a, q_max);
    }

    // Converts the root EGF back to raw moments m(k) = k! egf_k.
    MomentRow finish(const std::vector<double>& egf) const {
        std::vector<double> m(q_max + 1);
        if (log_mode) {
            for (unsigned k = 0; k <= q_max; ++k)
                m[k] = log_factorial(k) + egf[k];
            return row_from_log(std::move(m));
        }
        double fact = 1.0;
        for (unsigned k = 0; k <= q_max; ++k) {
            if (k > 0) fact *= static_cast<double>(k);
            m[k] = fact * egf[k];
        }
        return row_from_linear(std::move(m));
    }

    bool healthy(const std::vector<double>& egf) const {
        if (log_mode) return true;
        return row_fits_linear(egf);
    }
};

MomentRow theta_moments_profile_in(const LevelProfile& profile,
                                   const WeightDistribution& dist, unsigned q_max,
                                   bool log_domain, bool& overflowed) {
    const ThetaEngine eng(dist, q_max, log_domain);
    const std::size_t n = profile.coeffs.size() - 1;
    std::vector<double> egf = eng.const_egf(profile.coeffs[n]);
    if (!eng.healthy(egf)) {
        overflowed = true;
        return {};
    }
    for (std::size_t m = n; m-- > 0;) {
        const std::vector<double> child_power =
            eng.conv_power(eng.scale_by_x(egf), profile.branching);
        egf = eng.conv(eng.const_egf(profile.coeffs[m]), child_power);
        if (!eng.healthy(egf)) {
            overflowed = true;
            return {};
        }
    }
    return eng.finish(egf);
}

MomentRow theta_moments_sparse_in(const SparseTree& shape,
                                  const std::vector<double>& alpha,
                                  const WeightDistribution& dist, unsigned q_max,
                                  bool log_domain, bool& overflowed) {
    const ThetaEngine eng(dist, q_max, log_domain);
    std::vector<std::vector<double>> egf(shape.vertex_count());
    for (std::size_t i = shape.vertex_count(); i-- > 0;) {
        const VertexId v = static_cast<VertexId>(i);
        std::vector<double> acc = eng.const_egf(alpha[i]);
        for (VertexId c = shape.child_begin(v); c < shape.child_end(v); ++c) {
            acc = eng.conv(acc, eng.scale_by_x(egf[c]));
            egf[c].clear();
        }
        if (!eng.healthy(acc)) {
            overflowed = true;
            return {};
        }
        egf[i] = std::move(acc);
    }
    return eng.finish(egf[0]);
}

} // namespace

MomentRow theta_moments(const LevelProfile& profile, const WeightDistribution& dist,
                        unsigned q_max) {
    if (profile.coeffs.empty()) throw ConfigError("theta moments: empty profile");
    if (q_max < 1) throw ConfigError("theta moments: q_max must be >= 1");
    if (q_max > kMaxMomentOrder)
        throw ResourceError("theta moments: q_max above the supported limit of " +
                            std::to_string(kMaxMomentOrder));
    bool overflowed = false;
    MomentRow row = theta_moments_profile_in(profile, dist, q_max, false, overflowed);
    if (!overflowed) return row;
    overflowed = false;
    return theta_moments_profile_in(profile, dist, q_max, true, overflowed);
}

MomentRow theta_moments(const SparseTree& shape, const std::vector<double>& alpha,
                        const WeightDistribution& dist, unsigned q_max) {
    if (alpha.size() != shape.vertex_count())
        throw ConfigError("theta moments: coefficient count does not match vertex count");
    if (q_max < 1) throw ConfigError("theta moments: q_max must be >= 1");
    if (q_max > kMaxMomentOrder)
        throw ResourceError("theta moments: q_max above the supported limit of " +
                            std::to_string(kMaxMomentOrder));
    bool overflowed = false;
    MomentRow row = theta_moments_sparse_in(shape, alpha, dist, q_max, false, overflowed);
    if (!overflowed) return row;
    overflowed = false;
    return theta_moments_sparse_in(shape, alpha, dist, q_max, true, overflowed);
}

std::vector<std::pair<unsigned, double>> growth_series(const MomentTable& table,
                                                       unsigned k) {
    if (k < 1 || k > table.q_max)
        throw ConfigError("growth series: moment order outside 1..q_max");
    std::vector<std::pair<unsigned, double>> out;
    out.reserve(table.rows.size());
    for (unsigned n = 0; n < table.rows.size(); ++n)
        out.emplace_back(n, table.rows[n].log_value[k]);
    return out;
}

std::string to_csv(const MomentTable& table) {
    std::string out = "n,k,value,log_value,domain\n";
    for (unsigned n = 0; n < table.rows.size(); ++n) {
        const MomentRow& row = table.rows[n];
        for (unsigned k = 0; k <= table.q_max; ++k) {
            out += std::to_string(n);
            out += ',';
            out += std::to_string(k);
            out += ',';
            out += format_double(row.value[k]);
            out += ',';
            out += format_double(row.log_value[k]);
            out += ',';
            out += row.log_domain ? "log" : "linear";
            out += '\n';
        }
    }
    return out;
}

} // namespace cascade
