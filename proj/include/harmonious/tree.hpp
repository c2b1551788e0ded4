#ifndef HARMONIOUS_TREE_HPP
#define HARMONIOUS_TREE_HPP

// Free trees rooted at a center, stored in preorder.
//
// A tree on n nodes is identified with its level sequence: the preorder list
// of node depths, root first. Node i is the i-th term of the sequence and its
// parent is the nearest earlier node one level up.

#include <algorithm>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace harmonious {

using LevelSequence = std::vector<int>;
using Edge = std::pair<int, int>;

/// Raised for a level sequence that does not describe a rooted tree.
class ParseError : public std::runtime_error {
public:
    ParseError(std::size_t index, const std::string& what)
        : std::runtime_error(what + " at index " + std::to_string(index)), index_(index) {}

    std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
};

class Tree {
public:
    /// Builds the tree whose preorder depths are `seq`. Canonicality is not
    /// required; only seq[0] == 0 and seq[i] in [1, seq[i-1] + 1].
    static Tree from_level_sequence(std::span<const int> seq) {
        if (seq.empty()) {
            throw ParseError(0, "empty level sequence");
        }
        if (seq[0] != 0) {
            throw ParseError(0, "root depth must be 0");
        }
        const int n = static_cast<int>(seq.size());
        std::vector<int> parents(n, -1);
        // last_at_depth[d] = most recent node seen at depth d
        std::vector<int> last_at_depth(n + 1, -1);
        last_at_depth[0] = 0;
        for (int i = 1; i < n; ++i) {
            const int d = seq[i];
            if (d < 1 || d > seq[i - 1] + 1) {
                throw ParseError(static_cast<std::size_t>(i),
                                 d < 1 ? "non-root depth must be >= 1" : "depth jump greater than 1");
            }
            parents[i] = last_at_depth[d - 1];
            last_at_depth[d] = i;
        }
        return Tree(std::move(parents));
    }

    /// Builds a tree from an arbitrary edge list on nodes 0..n-1, rooted at
    /// `root`. Nodes are renumbered in depth-first preorder, children visited in
    /// increasing original index.
    static Tree from_edges(int n, std::span<const Edge> edge_list, int root = 0) {
        if (n < 1 || static_cast<int>(edge_list.size()) != n - 1) {
            throw std::invalid_argument("a tree on n nodes needs exactly n-1 edges");
        }
        std::vector<std::vector<int>> adj(n);
        for (auto [u, v] : edge_list) {
            if (u < 0 || v < 0 || u >= n || v >= n || u == v) {
                throw std::invalid_argument("edge endpoint out of range");
            }
            adj[u].push_back(v);
            adj[v].push_back(u);
        }
        for (auto& a : adj) std::sort(a.begin(), a.end());

        std::vector<int> parents;
        parents.reserve(n);
        std::vector<int> new_index(n, -1);
        // explicit stack of (node, new parent index)
        std::vector<std::pair<int, int>> stack{{root, -1}};
        while (!stack.empty()) {
            auto [v, p] = stack.back();
            stack.pop_back();
            if (new_index[v] != -1) {
                throw std::invalid_argument("edge list contains a cycle");
            }
            new_index[v] = static_cast<int>(parents.size());
            parents.push_back(p);
            for (auto it = adj[v].rbegin(); it != adj[v].rend(); ++it) {
                if (new_index[*it] == -1) stack.emplace_back(*it, new_index[v]);
            }
        }
        if (static_cast<int>(parents.size()) != n) {
            throw std::invalid_argument("edge list is not connected");
        }
        return Tree(std::move(parents));
    }

    int size() const noexcept { return static_cast<int>(parents_.size()); }
    int parent(int v) const { return parents_[v]; }
    int level(int v) const { return levels_[v]; }
    int degree(int v) const { return static_cast<int>(adjacency_[v].size()); }

    std::span<const int> parents() const noexcept { return parents_; }
    std::span<const int> levels() const noexcept { return levels_; }
    std::span<const int> neighbors(int v) const { return adjacency_[v]; }

    /// Edge i-1 joins node i to its parent, written (min, max).
    std::vector<Edge> edges() const {
        std::vector<Edge> out;
        out.reserve(parents_.size());
        for (int i = 1; i < size(); ++i) {
            out.emplace_back(std::min(parents_[i], i), std::max(parents_[i], i));
        }
        return out;
    }

    bool operator==(const Tree& other) const { return parents_ == other.parents_; }

private:
    explicit Tree(std::vector<int> parents) : parents_(std::move(parents)) {
        const int n = size();
        levels_.assign(n, 0);
        adjacency_.assign(n, {});
        for (int i = 1; i < n; ++i) {
            levels_[i] = levels_[parents_[i]] + 1;
            adjacency_[i].push_back(parents_[i]);
            adjacency_[parents_[i]].push_back(i);
        }
    }

    std::vector<int> parents_;
    std::vector<int> levels_;
    std::vector<std::vector<int>> adjacency_;
};

inline std::vector<Edge> edges(const Tree& tree) { return tree.edges(); }

/// The one or two nodes left after repeatedly stripping all leaves.
inline std::vector<int> centers(const Tree& tree) {
    const int n = tree.size();
    if (n <= 2) {
        std::vector<int> all(n);
        for (int i = 0; i < n; ++i) all[i] = i;
        return all;
    }
    std::vector<int> deg(n);
    std::vector<int> layer;
    for (int v = 0; v < n; ++v) {
        deg[v] = tree.degree(v);
        if (deg[v] == 1) layer.push_back(v);
    }
    int remaining = n;
    while (remaining > 2) {
        remaining -= static_cast<int>(layer.size());
        std::vector<int> next;
        for (int v : layer) {
            for (int w : tree.neighbors(v)) {
                if (--deg[w] == 1) next.push_back(w);
            }
        }
        layer = std::move(next);
    }
    std::sort(layer.begin(), layer.end());
    return layer;
}

namespace detail {

// Canonical (lexicographically greatest) level sequence of the subtree hanging
// from `v` away from `from`, with `v` at depth `depth`.
inline LevelSequence rooted_canonical(const Tree& tree, int v, int from, int depth) {
    std::vector<LevelSequence> children;
    for (int w : tree.neighbors(v)) {
        if (w != from) children.push_back(rooted_canonical(tree, w, v, depth + 1));
    }
    std::sort(children.begin(), children.end(), std::greater<>{});
    LevelSequence out{depth};
    for (const auto& c : children) out.insert(out.end(), c.begin(), c.end());
    return out;
}

}  // namespace detail

/// Level sequence rooted at `root` with every child list in non-increasing
/// lexicographic order.
inline LevelSequence rooted_canonical(const Tree& tree, int root) {
    return detail::rooted_canonical(tree, root, -1, 0);
}

/// Canonical free-tree form: the greatest rooted canonical sequence over the
/// tree's centers. Equal outputs exactly for isomorphic free trees.
inline LevelSequence canonicalize(const Tree& tree) {
    LevelSequence best;
    for (int c : centers(tree)) {
        auto seq = rooted_canonical(tree, c);
        if (best.empty() || seq > best) best = std::move(seq);
    }
    return best;
}

/// Degree-1 nodes. The lone node of a one-node tree counts as a leaf.
inline std::vector<int> leaves(const Tree& tree) {
    std::vector<int> out;
    for (int v = 0; v < tree.size(); ++v) {
        if (tree.degree(v) <= 1) out.push_back(v);
    }
    return out;
}

inline std::vector<int> internal_nodes(const Tree& tree) {
    std::vector<int> out;
    for (int v = 0; v < tree.size(); ++v) {
        if (tree.degree(v) > 1) out.push_back(v);
    }
    return out;
}

/// True iff deleting every leaf leaves a path (or nothing).
inline bool is_caterpillar(const Tree& tree) {
    for (int v = 0; v < tree.size(); ++v) {
        if (tree.degree(v) <= 1) continue;
        int spine_degree = 0;
        for (int w : tree.neighbors(v)) {
            if (tree.degree(w) > 1) ++spine_degree;
        }
        if (spine_degree > 2) return false;
    }
    // internal nodes induce a subtree; max degree 2 makes it a path
    return true;
}

/// Parses `0,1,2,1`. Whitespace around terms is ignored.
inline LevelSequence parse_level_sequence(std::string_view text) {
    LevelSequence seq;
    std::size_t pos = 0;
    while (true) {
        const auto comma = text.find(',', pos);
        auto term = text.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos);
        while (!term.empty() && (term.front() == ' ' || term.front() == '\t')) term.remove_prefix(1);
        while (!term.empty() && (term.back() == ' ' || term.back() == '\t' || term.back() == '\r'))
            term.remove_suffix(1);
        if (term.empty()) throw ParseError(seq.size(), "empty term");
        int value = 0;
        for (char ch : term) {
            if (ch < '0' || ch > '9') throw ParseError(seq.size(), "non-numeric term");
            value = value * 10 + (ch - '0');
            if (value > 1'000'000) throw ParseError(seq.size(), "depth out of range");
        }
        seq.push_back(value);
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    // structural validation
    (void)Tree::from_level_sequence(seq);
    return seq;
}

inline std::string format_level_sequence(std::span<const int> seq) {
    std::string out;
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i) out += ',';
        out += std::to_string(seq[i]);
    }
    return out;
}

}  // namespace harmonious

#endif  // HARMONIOUS_TREE_HPP
