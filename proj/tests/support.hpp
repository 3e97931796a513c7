#pragma once

// Shared helpers for the test binaries: exact rational scalars, deterministic
// random instance generation, and tolerance checks.

#include <cmath>
#include <random>
#include <set>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "cascadelab/distribution.hpp"
#include "cascadelab/oracle.hpp"
#include "cascadelab/tree.hpp"

namespace testsupport {

using Rational = boost::multiprecision::cpp_rational;

inline double to_double(const Rational& r) { return r.convert_to<double>(); }

inline bool close_rel(double a, double b, double tol) {
    const double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) <= tol * scale;
}

// Random law with exact rational probabilities (positive, summing to 1) and
// small non-negative rational atoms.  May include a zero atom.
inline cascade::BasicLaw<Rational> random_rational_law(std::mt19937& gen,
                                                       int max_atoms = 3,
                                                       bool allow_zero_atom = true) {
    std::uniform_int_distribution<int> n_atoms(2, max_atoms);
    std::uniform_int_distribution<int> numer(0, 8);
    std::uniform_int_distribution<int> denom(1, 4);
    std::uniform_int_distribution<int> weight(1, 9);
    const int k = n_atoms(gen);
    cascade::BasicLaw<Rational> law;
    while (static_cast<int>(law.atoms.size()) < k) {
        Rational a(numer(gen), denom(gen));
        if (!allow_zero_atom && a == 0) continue;
        bool dup = false;
        for (const Rational& seen : law.atoms) dup = dup || seen == a;
        if (dup) continue;
        law.atoms.push_back(a);
    }
    Rational total(0);
    std::vector<int> w(k);
    for (int i = 0; i < k; ++i) {
        w[i] = weight(gen);
        total += w[i];
    }
    for (int i = 0; i < k; ++i) law.probs.emplace_back(Rational(w[i]) / total);
    return law;
}

inline cascade::BasicLaw<double> to_double_law(const cascade::BasicLaw<Rational>& law) {
    cascade::BasicLaw<double> out;
    for (const Rational& a : law.atoms) out.atoms.push_back(to_double(a));
    for (const Rational& p : law.probs) out.probs.push_back(to_double(p));
    return out;
}

// Random tree shape: either the complete b-ary tree of small depth, or an
// irregular subtree grown by random child insertion.  At most `max_vertices`
// vertices, depth at most `max_depth`.
inline cascade::SparseTree random_shape(std::mt19937& gen, unsigned branching,
                                        unsigned max_depth = 3,
                                        std::size_t max_vertices = 15) {
    std::uniform_int_distribution<int> coin(0, 1);
    if (coin(gen) == 0) {
        unsigned depth = max_depth;
        while (depth > 0) {
            std::size_t count = 1, level = 1;
            for (unsigned m = 1; m <= depth; ++m) {
                level *= branching;
                count += level;
            }
            if (count <= max_vertices) break;
            --depth;
        }
        return cascade::SparseTree::regular(branching, depth);
    }
    // Grow an irregular shape path by path.
    std::vector<cascade::PathEntry> entries;
    entries.push_back({{}, 0.0});
    std::uniform_int_distribution<unsigned> slot(0, branching - 1);
    std::uniform_int_distribution<std::size_t> extra(2, max_vertices - 1);
    std::set<std::vector<unsigned>> seen;
    seen.insert({});
    const std::size_t want = extra(gen);
    int tries = 0;
    while (seen.size() < want + 1 && tries < 200) {
        ++tries;
        // Extend a random existing path by one random slot (depth capped).
        std::uniform_int_distribution<std::size_t> pick(0, entries.size() - 1);
        std::vector<unsigned> path = entries[pick(gen)].path;
        if (path.size() >= max_depth) continue;
        path.push_back(slot(gen));
        if (!seen.insert(path).second) continue;
        entries.push_back({path, 0.0});
    }
    return cascade::tree_from_entries(branching, entries).shape;
}

// Random non-negative rational coefficients in [0, 2] for every vertex.
inline std::vector<Rational> random_rational_alpha(std::mt19937& gen,
                                                   std::size_t count) {
    std::uniform_int_distribution<int> numer(0, 8);
    std::uniform_int_distribution<int> denom(4, 4);
    std::vector<Rational> alpha(count);
    for (std::size_t i = 0; i < count; ++i)
        alpha[i] = Rational(numer(gen), denom(gen));
    return alpha;
}

inline std::vector<double> to_double_vec(const std::vector<Rational>& v) {
    std::vector<double> out(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) out[i] = to_double(v[i]);
    return out;
}

} // namespace testsupport
