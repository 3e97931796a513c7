#include "cascadelab/tree.hpp"

#include <algorithm>
#include <charconv>
#include <map>
#include <sstream>

#include "cascadelab/numeric.hpp"

namespace cascade {

SparseTree SparseTree::from_bfs(unsigned branching, std::vector<VertexId> parent,
                                std::vector<unsigned> child_slot) {
    if (branching < 2) throw ConfigError("tree: branching must be >= 2");
    if (parent.empty() || parent[0] != kNoVertex)
        throw ConfigError("tree: first vertex must be the root");
    if (parent.size() != child_slot.size())
        throw ConfigError("tree: parent and slot arrays differ in length");

    SparseTree t;
    t.b_ = branching;
    t.parent_ = std::move(parent);
    t.child_slot_ = std::move(child_slot);
    const std::size_t n = t.parent_.size();
    t.depth_.assign(n, 0);
    t.child_begin_.assign(n, 0);
    t.child_end_.assign(n, 0);

    for (std::size_t i = 1; i < n; ++i) {
        const VertexId p = t.parent_[i];
        if (p >= i)
            throw ConfigError("tree: vertices must follow their parent in BFS order");
        if (t.child_slot_[i] >= branching)
            throw ConfigError("tree: child slot exceeds branching factor");
        t.depth_[i] = t.depth_[p] + 1;
        t.max_depth_ = std::max(t.max_depth_, t.depth_[i]);
        if (t.child_end_[p] == 0) {
            t.child_begin_[p] = static_cast<VertexId>(i);
        } else {
            if (t.child_end_[p] != i)
                throw ConfigError("tree: children of a vertex must be contiguous");
            if (t.child_slot_[i] <= t.child_slot_[i - 1])
                throw ConfigError("tree: child slots must be strictly increasing");
        }
        t.child_end_[p] = static_cast<VertexId>(i + 1);
    }
    return t;
}

SparseTree SparseTree::regular(unsigned branching, unsigned depth) {
    if (branching < 2) throw ConfigError("tree: branching must be >= 2");
    std::uint64_t level = 1;
    std::uint64_t total = 1;
    for (unsigned m = 1; m <= depth; ++m) {
        level *= branching;
        total += level;
        if (total > kExpandVertexCap)
            throw ResourceError("tree: complete tree of depth " + std::to_string(depth) +
                                " exceeds the vertex cap of 2^24");
    }
    std::vector<VertexId> parent(total);
    std::vector<unsigned> slot(total);
    parent[0] = kNoVertex;
    slot[0] = 0;
    // In a complete tree the BFS index of child j of vertex v at in-level
    // position r is: level_offset(next) + r * b + j.
    std::size_t prev_offset = 0;
    std::size_t prev_size = 1;
    std::size_t offset = 1;
    for (unsigned m = 1; m <= depth; ++m) {
        const std::size_t size = prev_size * branching;
        for (std::size_t j = 0; j < size; ++j) {
            parent[offset + j] = static_cast<VertexId>(prev_offset + j / branching);
            slot[offset + j] = static_cast<unsigned>(j % branching);
        }
        prev_offset = offset;
        prev_size = size;
        offset += size;
    }
    return from_bfs(branching, std::move(parent), std::move(slot));
}

std::vector<std::size_t> SparseTree::level_sizes() const {
    std::vector<std::size_t> sizes(max_depth_ + 1, 0);
    for (unsigned d : depth_) ++sizes[d];
    return sizes;
}

std::string SparseTree::path_of(VertexId v) const {
    std::vector<unsigned> slots;
    for (VertexId u = v; parent_[u] != kNoVertex; u = parent_[u])
        slots.push_back(child_slot_[u]);
    std::string out;
    for (std::size_t i = slots.size(); i-- > 0;) {
        out += std::to_string(slots[i]);
        if (i > 0) out += '/';
    }
    return out;
}

namespace {

// BFS order: shallower paths first, then lexicographic within a depth.
struct BfsPathLess {
    bool operator()(const std::vector<unsigned>& a,
                    const std::vector<unsigned>& b) const {
        if (a.size() != b.size()) return a.size() < b.size();
        return a < b;
    }
};

} // namespace

WeightedTree tree_from_entries(unsigned branching,
                               const std::vector<PathEntry>& entries) {
    if (branching < 2) throw ConfigError("tree: branching must be >= 2");
    std::map<std::vector<unsigned>, double, BfsPathLess> vertices;
    for (const auto& e : entries) {
        for (unsigned s : e.path)
            if (s >= branching)
                throw ConfigError("tree: child slot " + std::to_string(s) +
                                  " exceeds branching factor " + std::to_string(branching));
        if (!vertices.emplace(e.path, e.weight).second)
            throw ConfigError("tree: duplicate path \"" + [&] {
                std::string p;
                for (std::size_t i = 0; i < e.path.size(); ++i)
                    p += (i ? "/" : "") + std::to_string(e.path[i]);
                return p;
            }() + "\"");
    }
    // Ensure every ancestor exists; missing ones carry coefficient 0.
    std::vector<std::vector<unsigned>> pending;
    for (const auto& [path, w] : vertices)
        for (std::size_t len = 0; len < path.size(); ++len)
            pending.emplace_back(path.begin(), path.begin() + len);
    for (auto& p : pending) vertices.emplace(std::move(p), 0.0);

    std::map<std::vector<unsigned>, VertexId, BfsPathLess> index;
    std::vector<VertexId> parent;
    std::vector<unsigned> slot;
    std::vector<double> weights;
    for (const auto& [path, w] : vertices) {
        const VertexId id = static_cast<VertexId>(parent.size());
        index.emplace(path, id);
        if (path.empty()) {
            parent.push_back(kNoVertex);
            slot.push_back(0);
        } else {
            std::vector<unsigned> pp(path.begin(), path.end() - 1);
            parent.push_back(index.at(pp));
            slot.push_back(path.back());
        }
        weights.push_back(w);
    }
    return WeightedTree{SparseTree::from_bfs(branching, std::move(parent), std::move(slot)),
                        std::move(weights)};
}

WeightedTree parse_tree_text(unsigned branching, const std::string& text) {
    std::vector<PathEntry> entries;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw ConfigError("tree text: line " + std::to_string(line_no) +
                              ": expected `path<TAB>weight`");
        PathEntry e;
        const std::string path = line.substr(0, tab);
        std::size_t pos = 0;
        while (pos < path.size()) {
            unsigned s{};
            auto res = std::from_chars(path.data() + pos, path.data() + path.size(), s);
            if (res.ec != std::errc())
                throw ConfigError("tree text: line " + std::to_string(line_no) +
                                  ": bad child slot in path \"" + path + "\"");
            pos = static_cast<std::size_t>(res.ptr - path.data());
            if (s >= branching)
                throw ConfigError("tree text: line " + std::to_string(line_no) +
                                  ": child slot " + std::to_string(s) +
                                  " exceeds branching factor " +
                                  std::to_string(branching));
            e.path.push_back(s);
            if (pos == path.size()) break;
            if (path[pos] != '/')
                throw ConfigError("tree text: line " + std::to_string(line_no) +
                                  ": expected '/' in path \"" + path + "\"");
            ++pos;
        }
        const std::string wtext = line.substr(tab + 1);
        double w{};
        auto res = std::from_chars(wtext.data(), wtext.data() + wtext.size(), w);
        if (res.ec != std::errc() || res.ptr != wtext.data() + wtext.size())
            throw ConfigError("tree text: line " + std::to_string(line_no) +
                              ": bad weight \"" + wtext + "\"");
        if (!(w >= 0.0))
            throw ConfigError("tree text: line " + std::to_string(line_no) +
                              ": weights must be non-negative");
        e.weight = w;
        entries.push_back(std::move(e));
    }
    if (entries.empty()) throw ConfigError("tree text: no vertices");
    return tree_from_entries(branching, entries);
}

std::string serialize_tree_text(const WeightedTree& tree) {
    const SparseTree& shape = tree.shape;
    std::vector<VertexId> order(shape.vertex_count());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<VertexId>(i);
    // Preorder = lexicographic path order; compare by walking ancestor slots.
    std::vector<std::vector<unsigned>> paths(order.size());
    for (VertexId v : order) {
        std::vector<unsigned> p;
        for (VertexId u = v; shape.parent(u) != kNoVertex; u = shape.parent(u))
            p.push_back(shape.child_slot(u));
        std::reverse(p.begin(), p.end());
        paths[v] = std::move(p);
    }
    std::sort(order.begin(), order.end(),
              [&](VertexId a, VertexId b) { return paths[a] < paths[b]; });
    std::string out;
    for (VertexId v : order) {
        out += shape.path_of(v);
        out += '\t';
        out += format_double(tree.weights[v]);
        out += '\n';
    }
    return out;
}

WeightedTree expand_profile(const LevelProfile& profile, unsigned depth) {
    if (profile.coeffs.empty()) throw ConfigError("profile: no coefficients");
    if (depth + 1 < profile.coeffs.size())
        throw ConfigError("profile: expansion depth is shallower than the profile");
    SparseTree shape = SparseTree::regular(profile.branching, depth);
    std::vector<double> weights(shape.vertex_count());
    for (std::size_t v = 0; v < weights.size(); ++v) {
        const unsigned d = shape.depth(static_cast<VertexId>(v));
        weights[v] = d < profile.coeffs.size() ? profile.coeffs[d] : 0.0;
    }
    return WeightedTree{std::move(shape), std::move(weights)};
}

WeightedTree expand_profile(const LevelProfile& profile) {
    if (profile.coeffs.empty()) throw ConfigError("profile: no coefficients");
    return expand_profile(profile, static_cast<unsigned>(profile.coeffs.size() - 1));
}

} // namespace cascade
