#pragma once

#include <cstdint>
#include <limits>
#include <string>
#include <vector>

#include "cascadelab/errors.hpp"

namespace cascade {

using VertexId = std::uint32_t;
inline constexpr VertexId kNoVertex = std::numeric_limits<VertexId>::max();

// Finite subtree of the infinite b-ary tree, stored in breadth-first order
// (depth first, then lexicographic by path).  The storage is canonical: two
// trees with the same vertex set produce identical arrays.  Children of a
// vertex occupy a contiguous index range and are sorted by child slot.
class SparseTree {
public:
    // Builds from parallel BFS-ordered arrays; parent[0] must be kNoVertex.
    static SparseTree from_bfs(unsigned branching,
                               std::vector<VertexId> parent,
                               std::vector<unsigned> child_slot);

    // Complete b-ary tree with all vertices down to the given depth.
    static SparseTree regular(unsigned branching, unsigned depth);

    unsigned branching() const { return b_; }
    std::size_t vertex_count() const { return parent_.size(); }
    unsigned depth(VertexId v) const { return depth_[v]; }
    VertexId parent(VertexId v) const { return parent_[v]; }
    unsigned child_slot(VertexId v) const { return child_slot_[v]; }
    VertexId child_begin(VertexId v) const { return child_begin_[v]; }
    VertexId child_end(VertexId v) const { return child_end_[v]; }
    std::size_t child_count(VertexId v) const { return child_end_[v] - child_begin_[v]; }
    unsigned max_depth() const { return max_depth_; }

    // Number of vertices at each depth 0..max_depth().
    std::vector<std::size_t> level_sizes() const;

    // Slash-separated child slots from the root; empty string for the root.
    std::string path_of(VertexId v) const;

private:
    SparseTree() = default;

    unsigned b_ = 2;
    unsigned max_depth_ = 0;
    std::vector<VertexId> parent_;
    std::vector<unsigned> child_slot_;
    std::vector<unsigned> depth_;
    std::vector<VertexId> child_begin_;
    std::vector<VertexId> child_end_;
};

// Tree shape plus a coefficient for every vertex, aligned with BFS order.
struct WeightedTree {
    SparseTree shape;
    std::vector<double> weights;
};

struct PathEntry {
    std::vector<unsigned> path;  // child slots from the root; empty = root
    double weight;
};

// Builds a weighted tree from explicit (path, weight) pairs.  Ancestors that
// are not listed are created with weight 0.  Duplicate paths are an error.
WeightedTree tree_from_entries(unsigned branching,
                               const std::vector<PathEntry>& entries);

// Text format: one `path<TAB>weight` line per vertex, path as slash-separated
// child slots, empty path for the root.  Parse errors report the line number.
WeightedTree parse_tree_text(unsigned branching, const std::string& text);

// Serializes every vertex in preorder (lexicographic path order).
std::string serialize_tree_text(const WeightedTree& tree);

// Coefficients that depend only on depth: coeffs[m] applies to every vertex
// at depth m of the complete b-ary tree of depth coeffs.size() - 1.
struct LevelProfile {
    unsigned branching;
    std::vector<double> coeffs;
};

// Materializes a level profile as an explicit complete tree of the given
// depth (>= the profile depth; deeper levels carry weight 0).  Refuses
// trees exceeding kExpandVertexCap vertices.
WeightedTree expand_profile(const LevelProfile& profile, unsigned depth);
// Convenience: expand exactly to the profile depth.
WeightedTree expand_profile(const LevelProfile& profile);

inline constexpr std::uint64_t kExpandVertexCap = std::uint64_t(1) << 24;

// kappa(v) = alpha(v) + E[X] * sum of kappa over the children of v.
// Resolvent of the coefficient function: kappa(v) equals the sum over
// descendants y of (E[X])^{d(v,y)} alpha(y), and kappa(root) = E[Theta].
template <class T>
std::vector<T> kappa_sparse(const SparseTree& shape, const std::vector<T>& alpha,
                            const T& mean_x) {
    if (alpha.size() != shape.vertex_count())
        throw ConfigError("kappa: coefficient count does not match vertex count");
    std::vector<T> k(alpha);
    // Children always follow their parent in BFS order, so one reverse sweep
    // sees every subtree bottom-up.
    for (std::size_t i = shape.vertex_count(); i-- > 0;) {
        const VertexId v = static_cast<VertexId>(i);
        if (shape.child_count(v) == 0) continue;
        T sum(0);
        for (VertexId c = shape.child_begin(v); c < shape.child_end(v); ++c)
            sum += k[c];
        k[v] += mean_x * sum;
    }
    return k;
}

// Depth-profile specialization: kappa_m = a_m + (b * E[X]) * kappa_{m+1}.
template <class T>
std::vector<T> kappa_profile(unsigned branching, const std::vector<T>& coeffs,
                             const T& mean_x) {
    if (coeffs.empty()) throw ConfigError("kappa: empty profile");
    const std::size_t n = coeffs.size() - 1;
    std::vector<T> k(coeffs.size());
    k[n] = coeffs[n];
    const T step = T(branching) * mean_x;
    for (std::size_t m = n; m-- > 0;) k[m] = coeffs[m] + step * k[m + 1];
    return k;
}

} // namespace cascade
