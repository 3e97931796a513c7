#pragma once

#include <optional>
#include <vector>

#include "cascadelab/criticality.hpp"
#include "cascadelab/distribution.hpp"
#include "cascadelab/tree.hpp"

namespace cascade {

// One weight-reduction step.  Given Theta built from factors X and
// coefficients alpha, the square function of its increment martingale is
// exactly Theta built from factors X^2 and the coefficients
//   beta(root) = kappa(root)^2 + Var(X) * sum over root children of kappa^2
//   beta(v)    = Var(X) * sum over children of v of kappa^2      (v != root)
// so childless non-root vertices drop out and the support depth shrinks by
// one.  A deterministic factor (Var = 0) collapses everything to the root.

template <class T>
std::vector<T> reduce_profile(unsigned branching, const std::vector<T>& coeffs,
                              const T& mean_x, const T& var_x) {
    const std::vector<T> k = kappa_profile(branching, coeffs, mean_x);
    const std::size_t n = coeffs.size() - 1;
    if (n == 0 || var_x == T(0)) return {k[0] * k[0]};
    std::vector<T> beta(n);
    const T vb = var_x * T(branching);
    beta[0] = k[0] * k[0] + vb * k[1] * k[1];
    for (std::size_t m = 1; m < n; ++m) beta[m] = vb * k[m + 1] * k[m + 1];
    return beta;
}

template <class T>
struct SparseReduction {
    SparseTree shape;
    std::vector<T> beta;
    std::vector<VertexId> source;  // vertex in the original tree, per new vertex
};

template <class T>
SparseReduction<T> reduce_sparse(const SparseTree& shape, const std::vector<T>& alpha,
                                 const T& mean_x, const T& var_x) {
    const std::vector<T> k = kappa_sparse(shape, alpha, mean_x);
    if (var_x == T(0)) {
        SparseTree root = SparseTree::from_bfs(shape.branching(), {kNoVertex}, {0});
        return {std::move(root), {k[0] * k[0]}, {0}};
    }
    // Keep the root and every vertex with children; childless non-root
    // vertices have beta = 0.  Filtering a BFS order leaves a BFS order.
    std::vector<VertexId> keep;
    std::vector<VertexId> new_id(shape.vertex_count(), kNoVertex);
    for (std::size_t i = 0; i < shape.vertex_count(); ++i) {
        const VertexId v = static_cast<VertexId>(i);
        if (v != 0 && shape.child_count(v) == 0) continue;
        new_id[v] = static_cast<VertexId>(keep.size());
        keep.push_back(v);
    }
    std::vector<VertexId> parent(keep.size());
    std::vector<unsigned> slot(keep.size());
    std::vector<T> beta;
    beta.reserve(keep.size());
    for (std::size_t i = 0; i < keep.size(); ++i) {
        const VertexId v = keep[i];
        parent[i] = v == 0 ? kNoVertex : new_id[shape.parent(v)];
        slot[i] = shape.child_slot(v);
        T sum(0);
        for (VertexId c = shape.child_begin(v); c < shape.child_end(v); ++c)
            sum += k[c] * k[c];
        T value = var_x * sum;
        if (v == 0) value += k[0] * k[0];
        beta.push_back(std::move(value));
    }
    return {SparseTree::from_bfs(shape.branching(), std::move(parent), std::move(slot)),
            std::move(beta), std::move(keep)};
}

// Coefficients of the depth-n cascade average: b^{-n} on every depth-n
// vertex, zero elsewhere.
LevelProfile cascade_profile(unsigned branching, unsigned depth);

// One reduction step with its bookkeeping: the new coefficients, the factor
// moments that produced them, and the law of X^2 that drives the next stage.
// The factor law may have any mean here (construct it via
// WeightDistribution::relaxed when E[X] != 1).
struct ProfileReduction {
    LevelProfile beta;
    double mean_x;
    double var_x;
    WeightDistribution squared_dist;
};

struct SparseWeightsReduction {
    SparseTree shape;            // support: root plus former internal vertices
    std::vector<double> beta;
    std::vector<VertexId> source;  // vertex in the original tree, per new vertex
    double mean_x;
    double var_x;
    WeightDistribution squared_dist;
};

ProfileReduction reduce(const LevelProfile& weights, const WeightDistribution& dist);
SparseWeightsReduction reduce(const SparseTree& shape, const std::vector<double>& alpha,
                              const WeightDistribution& dist);

struct PipelineStage {
    unsigned index;            // number of reductions applied so far
    double exponent;           // q / 2^index
    LevelProfile profile;
    WeightDistribution dist;   // factor law at this stage: W^(2^index)
    // Stage coefficients divided by the reference profile b^{-2^index * k};
    // empty at stage 0 where most reference entries would be zero.
    std::vector<double> ratio_to_ideal;
};

struct PipelineResult {
    CriticalityReport preflight;
    std::vector<PipelineStage> stages;
};

// Repeatedly halves the exponent of E[Theta^q] for the depth-n cascade
// average: stage l holds (exponent q/2^l, factor law W^(2^l), a depth-(n-l)
// profile).  Reduction continues while the stage exponent is >= 2, so the
// final exponent lands in [1, 2).  The first reduction needs no hypothesis;
// before each later one (stage l >= 1) the pair (W, 2^l) must be strictly
// subcritical — E[W^(2^l)] < b^(2^l - 1) with margin, re-verified on an
// interior exponent grid — otherwise the iteration aborts with a
// PreconditionError naming the stage (totally critical laws always trip
// this at stage 1, since phi vanishes identically).
PipelineResult reduction_pipeline(const StructureFunction& sf, double q, unsigned depth);

// Two-sided moment bounds for Theta(X, alpha) at exponent q:
//   sum_v (E[X^q])^{d(v)} alpha(v)^q   <=  E[Theta^q]            (q >= 1)
//   E[Theta^q]  <=  C_q * sum_v (E[X^q])^{d(v)} kappa(v)^q       (1 <= q <= 2)
// The upper core omits the universal constant C_q and is only reported for
// q <= 2; both sums are accumulated in the log domain.
struct BoundsReport {
    double q;
    double lower;
    double log_lower;
    std::optional<double> upper_core;
    std::optional<double> log_upper_core;
};

BoundsReport evaluate_bounds_profile(const LevelProfile& profile,
                                     const WeightDistribution& x, double q);
BoundsReport evaluate_bounds_sparse(const SparseTree& shape,
                                    const std::vector<double>& alpha,
                                    const WeightDistribution& x, double q);

} // namespace cascade
