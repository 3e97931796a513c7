#pragma once

#include <cstdint>
#include <thread>
#include <type_traits>
#include <vector>

#include "cascadelab/distribution.hpp"
#include "cascadelab/numeric.hpp"
#include "cascadelab/tree.hpp"

namespace cascade {

// Brute-force ground truth on tiny instances: enumerate every assignment of
// factor atoms to non-root vertices, with the root fixed at X = 1.  The
// scalar type T is double for float mode or an exact rational type for
// identity checks demanding equality.

inline constexpr std::uint64_t kOutcomeCap = 2'000'000;

// Atom/probability pairs in the oracle's scalar type.
template <class T>
struct BasicLaw {
    std::vector<T> atoms;
    std::vector<T> probs;
};

inline BasicLaw<double> to_basic_law(const WeightDistribution& dist) {
    return BasicLaw<double>{dist.atoms(), dist.probs()};
}

template <class T>
class EnumeratedSpace {
public:
    EnumeratedSpace(SparseTree shape, BasicLaw<T> law)
        : shape_(std::move(shape)), law_(std::move(law)) {
        if (law_.atoms.empty() || law_.atoms.size() != law_.probs.size())
            throw ConfigError("enumeration: malformed atom/probability lists");
        T sum(0);
        for (const T& p : law_.probs) sum += p;
        if constexpr (std::is_floating_point_v<T>) {
            if (std::abs(sum - 1.0) > 1e-12)
                throw ConfigError("enumeration: probabilities do not sum to 1");
        } else {
            if (sum != T(1))
                throw ConfigError("enumeration: probabilities do not sum to 1 exactly");
        }
        const std::uint64_t a = law_.atoms.size();
        const std::uint64_t digits = shape_.vertex_count() - 1;
        count_ = checked_pow_u64(a, digits);
        if (count_ > kOutcomeCap)
            throw ResourceError("enumeration: outcome count exceeds the cap of " +
                                std::to_string(kOutcomeCap));
        // Big-endian mixed radix: the first non-root vertex in BFS order is
        // the most significant digit, so conditioning on all factors above a
        // given depth groups outcomes into contiguous blocks.
        place_.assign(shape_.vertex_count(), 1);
        std::uint64_t place = 1;
        for (std::size_t v = shape_.vertex_count(); v-- > 1;) {
            place_[v] = place;
            place *= a;
        }
    }

    const SparseTree& shape() const { return shape_; }
    const BasicLaw<T>& law() const { return law_; }
    std::uint64_t outcome_count() const { return count_; }

    unsigned digit(std::uint64_t outcome, VertexId v) const {
        return static_cast<unsigned>((outcome / place_[v]) % law_.atoms.size());
    }

    T outcome_probability(std::uint64_t outcome) const {
        T p(1);
        for (std::size_t v = 1; v < shape_.vertex_count(); ++v)
            p *= law_.probs[digit(outcome, static_cast<VertexId>(v))];
        return p;
    }

    // prod[v] = product of X over the path from the root to v (root = 1).
    void path_products(std::uint64_t outcome, std::vector<T>& prod) const {
        prod.assign(shape_.vertex_count(), T(1));
        for (std::size_t v = 1; v < shape_.vertex_count(); ++v)
            prod[v] = prod[shape_.parent(static_cast<VertexId>(v))] *
                      law_.atoms[digit(outcome, static_cast<VertexId>(v))];
    }

    T theta_value(const std::vector<T>& alpha, std::uint64_t outcome) const {
        if (alpha.size() != shape_.vertex_count())
            throw ConfigError("enumeration: coefficient count does not match vertex count");
        std::vector<T> prod;
        path_products(outcome, prod);
        T theta(0);
        for (std::size_t v = 0; v < alpha.size(); ++v) theta += alpha[v] * prod[v];
        return theta;
    }

    // Number of outcomes sharing the factor assignment on depths <= m: the
    // low digits belong to deeper vertices, so each conditioning atom is a
    // contiguous block of this size.
    std::uint64_t block_size(unsigned m) const {
        std::uint64_t vertices_deeper = 0;
        for (std::size_t v = 0; v < shape_.vertex_count(); ++v)
            if (shape_.depth(static_cast<VertexId>(v)) > m) ++vertices_deeper;
        return checked_pow_u64(static_cast<std::uint64_t>(law_.atoms.size()),
                               vertices_deeper);
    }

private:
    SparseTree shape_;
    BasicLaw<T> law_;
    std::vector<std::uint64_t> place_;
    std::uint64_t count_ = 1;
};

// Per-outcome conditional expectation of `values` given the factors at
// depths <= m, by exact averaging over each conditioning block.
template <class T>
std::vector<T> conditional_expectation(const EnumeratedSpace<T>& space,
                                       const std::vector<T>& values, unsigned m) {
    const std::uint64_t n = space.outcome_count();
    if (values.size() != n)
        throw ConfigError("enumeration: value count does not match outcome count");
    const std::uint64_t block = space.block_size(m);
    std::vector<T> prob(n);
    for (std::uint64_t o = 0; o < n; ++o) prob[o] = space.outcome_probability(o);
    std::vector<T> out(n);
    for (std::uint64_t start = 0; start < n; start += block) {
        T num(0);
        T den(0);
        for (std::uint64_t o = start; o < start + block; ++o) {
            num += prob[o] * values[o];
            den += prob[o];
        }
        const T avg = num / den;
        for (std::uint64_t o = start; o < start + block; ++o) out[o] = avg;
    }
    return out;
}

// Integer-exponent moment; exact when T is rational.
template <class T>
T exact_integer_moment(const EnumeratedSpace<T>& space, const std::vector<T>& alpha,
                       unsigned k) {
    T total(0);
    for (std::uint64_t o = 0; o < space.outcome_count(); ++o)
        total += space.outcome_probability(o) * ipow(space.theta_value(alpha, o), k);
    return total;
}

// Real-exponent moment in double precision.  Work is split into fixed-size
// chunks summed independently and combined in chunk order, so the result is
// bit-identical for any worker count.
double exact_moment_by_enumeration(const EnumeratedSpace<double>& space,
                                   const std::vector<double>& alpha, double q,
                                   unsigned threads = 1);

// Exact filtration decomposition of M = Theta(X, alpha).  Index m runs over
// tree levels; conditional[m][o] is M_m at outcome o, increments[m-1][o] is
// D_m = M_m - M_{m-1}, and closed_form mirrors increments via
//   D_m = sum over depth-m vertices of kappa(v) (X(v) - E[X]) prod(parent)
// computed directly from the realized factors.
template <class T>
struct MartingaleDecomposition {
    std::vector<T> prob;                      // P(o)
    std::vector<T> theta;                     // Theta(o) = M_maxdepth(o)
    std::vector<std::vector<T>> conditional;  // m = 0..max_depth
    std::vector<std::vector<T>> increments;   // m = 1..max_depth
    std::vector<std::vector<T>> closed_form;  // m = 1..max_depth
    std::vector<T> cond_square;               // s(M)^2 per outcome
};

template <class T>
MartingaleDecomposition<T> martingale_decomposition(const EnumeratedSpace<T>& space,
                                                    const std::vector<T>& alpha) {
    const SparseTree& shape = space.shape();
    const std::uint64_t n = space.outcome_count();
    const unsigned depth = shape.max_depth();

    MartingaleDecomposition<T> out;
    out.prob.resize(n);
    out.theta.resize(n);
    std::vector<std::vector<T>> products(n);
    for (std::uint64_t o = 0; o < n; ++o) {
        out.prob[o] = space.outcome_probability(o);
        space.path_products(o, products[o]);
        T theta(0);
        for (std::size_t v = 0; v < alpha.size(); ++v)
            theta += alpha[v] * products[o][v];
        out.theta[o] = theta;
    }

    out.conditional.resize(depth + 1);
    for (unsigned m = 0; m <= depth; ++m)
        out.conditional[m] = conditional_expectation(space, out.theta, m);

    T mean_x(0);
    for (std::size_t i = 0; i < space.law().atoms.size(); ++i)
        mean_x += space.law().atoms[i] * space.law().probs[i];
    const std::vector<T> kappa = kappa_sparse(shape, alpha, mean_x);

    out.increments.resize(depth);
    out.closed_form.resize(depth);
    for (unsigned m = 1; m <= depth; ++m) {
        std::vector<T>& inc = out.increments[m - 1];
        std::vector<T>& closed = out.closed_form[m - 1];
        inc.resize(n);
        closed.resize(n);
        for (std::uint64_t o = 0; o < n; ++o) {
            inc[o] = out.conditional[m][o] - out.conditional[m - 1][o];
            T d(0);
            for (std::size_t v = 1; v < shape.vertex_count(); ++v) {
                const VertexId w = static_cast<VertexId>(v);
                if (shape.depth(w) != m) continue;
                const T x = space.law().atoms[space.digit(o, w)];
                d += kappa[w] * (x - mean_x) * products[o][shape.parent(w)];
            }
            closed[o] = d;
        }
    }

    // s(M)^2 = M_0^2 + sum over m of E[D_m^2 | factors at depths <= m-1].
    out.cond_square.resize(n);
    for (std::uint64_t o = 0; o < n; ++o)
        out.cond_square[o] = out.conditional[0][o] * out.conditional[0][o];
    for (unsigned m = 1; m <= depth; ++m) {
        std::vector<T> sq(n);
        for (std::uint64_t o = 0; o < n; ++o)
            sq[o] = out.increments[m - 1][o] * out.increments[m - 1][o];
        const std::vector<T> cond = conditional_expectation(space, sq, m - 1);
        for (std::uint64_t o = 0; o < n; ++o) out.cond_square[o] += cond[o];
    }
    return out;
}

// Just the conditional square function s(M)^2 per outcome.
template <class T>
std::vector<T> conditional_square_function(const EnumeratedSpace<T>& space,
                                           const std::vector<T>& alpha) {
    return martingale_decomposition(space, alpha).cond_square;
}

} // namespace cascade
