#ifndef HARMONIOUS_TABU_HPP
#define HARMONIOUS_TABU_HPP

// Tabu search over onto labellings: swap the labels of two nodes when that
// lowers Eval, then forbid the same pair for a few iterations.
//
// Swapping labels keeps the label multiset, so the labelling stays onto.
// Eval is maintained through a multiplicity count per edge-sum value; a swap
// only touches edges incident to the two nodes.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <vector>

#include "labelling.hpp"
#include "random.hpp"
#include "solver.hpp"
#include "tree.hpp"

namespace harmonious {

class TabuState {
public:
    TabuState(const Tree& tree, Labelling f)
        : tree_(&tree),
          f_(std::move(f)),
          modulus_(label_modulus(tree.size())),
          count_(modulus_, 0),
          tabu_(static_cast<std::size_t>(tree.size()) * tree.size(), 0) {
        if (f_.size() != tree.size()) throw std::invalid_argument("labelling length does not match tree size");
        for (int i = 1; i < tree.size(); ++i) {
            if (count_[sum_of(i)]++ == 0) ++distinct_;
        }
    }

    const Labelling& labelling() const noexcept { return f_; }
    int eval() const noexcept { return (tree_->size() - 1) - distinct_; }
    int sum_multiplicity(int value) const { return count_[value]; }
    std::uint64_t iteration() const noexcept { return iter_; }

    /// Eval after swapping the labels of u and v, minus Eval now.
    int delta_eval(int u, int v) const {
        if (u == v || f_.labels[u] == f_.labels[v]) return 0;
        collect_edges(u, v);
        int distinct = distinct_;
        for (int e : scratch_edges_) {
            if (--count_[sum_of(e)] == 0) --distinct;
        }
        for (int e : scratch_edges_) {
            if (count_[swapped_sum(e, u, v)]++ == 0) ++distinct;
        }
        // restore
        for (int e : scratch_edges_) --count_[swapped_sum(e, u, v)];
        for (int e : scratch_edges_) ++count_[sum_of(e)];
        return distinct_ - distinct;
    }

    void apply_swap(int u, int v) {
        if (u == v) return;
        collect_edges(u, v);
        for (int e : scratch_edges_) {
            if (--count_[sum_of(e)] == 0) --distinct_;
        }
        std::swap(f_.labels[u], f_.labels[v]);
        for (int e : scratch_edges_) {
            if (count_[sum_of(e)]++ == 0) ++distinct_;
        }
    }

    bool is_tabu(int u, int v) const { return tabu_[key(u, v)] > iter_; }

    /// Forbids the unordered pair {u, v} for the next `tenure` iterations.
    void forbid(int u, int v, std::uint64_t tenure) { tabu_[key(u, v)] = iter_ + 1 + tenure; }

    void advance() noexcept { ++iter_; }

    /// Replaces the labelling and clears the tabu list; the iteration counter
    /// keeps running.
    void reset(Labelling f) {
        *this = TabuState(*tree_, std::move(f), iter_);
    }

private:
    TabuState(const Tree& tree, Labelling f, std::uint64_t iter) : TabuState(tree, std::move(f)) { iter_ = iter; }

    // edge e joins node e (> 0) to its parent
    int sum_of(int e) const { return (f_.labels[e] + f_.labels[tree_->parent(e)]) % modulus_; }

    int swapped_sum(int e, int u, int v) const {
        auto label = [&](int x) { return f_.labels[x == u ? v : x == v ? u : x]; };
        return (label(e) + label(tree_->parent(e))) % modulus_;
    }

    void collect_edges(int u, int v) const {
        scratch_edges_.clear();
        for (int x : {u, v}) {
            for (int w : tree_->neighbors(x)) {
                const int e = w == tree_->parent(x) ? x : w;
                if (std::find(scratch_edges_.begin(), scratch_edges_.end(), e) == scratch_edges_.end()) {
                    scratch_edges_.push_back(e);
                }
            }
        }
    }

    std::size_t key(int u, int v) const {
        if (u > v) std::swap(u, v);
        return static_cast<std::size_t>(u) * tree_->size() + v;
    }

    const Tree* tree_;
    Labelling f_;
    int modulus_;
    mutable std::vector<int> count_;
    int distinct_ = 0;
    std::vector<std::uint64_t> tabu_;  // expiry iteration per pair
    std::uint64_t iter_ = 0;
    mutable std::vector<int> scratch_edges_;
};

/// A random permutation of Z_{n-1} over n-1 random nodes, plus a uniformly
/// random value on the remaining node.
inline Labelling random_onto_labelling(int n, Rng& rng) {
    if (n <= 1) return {{0}, LabelModel::Onto};
    std::vector<int> nodes(n);
    for (int i = 0; i < n; ++i) nodes[i] = i;
    shuffle(std::span<int>(nodes), rng);
    Labelling f{std::vector<int>(n, 0), LabelModel::Onto};
    for (int i = 0; i + 1 < n; ++i) f.labels[nodes[i]] = i;
    f.labels[nodes[n - 1]] = uniform_int(rng, n - 1);
    return f;
}

/// Called with the state before each accepted swap, the pair, and its delta.
using SwapObserver = std::function<void(const TabuState&, int u, int v, int delta)>;

inline SolveOutcome solve_tabu(const Tree& tree, const SolverConfig& cfg, Rng& rng,
                               const SwapObserver& on_swap = {}) {
    const int n = tree.size();
    if (n <= 1) return detail::trivial_outcome(SolverTag::Tabu);
    detail::Stopwatch clock;
    SearchStats stats{.solver = SolverTag::Tabu, .runs = 1};
    TabuState state(tree, random_onto_labelling(n, rng));
    stats.best_eval = state.eval();
    const std::uint64_t max_iters = cfg.tabu_iterations(n);
    std::uint64_t idle = 0;

    while (state.eval() > 0 && state.iteration() < max_iters) {
        int best_delta = 0, best_u = -1, best_v = -1;
        std::uint64_t sampled = 0;
        // forbidden pairs are redrawn, within a bounded number of tries
        for (std::uint64_t tries = 0; sampled < cfg.sample_pairs && tries < 4 * cfg.sample_pairs; ++tries) {
            const int u = uniform_int(rng, n);
            const int v = uniform_int(rng, n - 1);
            const int w = v >= u ? v + 1 : v;
            if (state.is_tabu(u, w)) continue;
            ++sampled;
            const int d = state.delta_eval(u, w);
            if (d < best_delta) {
                best_delta = d;
                best_u = u;
                best_v = w;
            }
        }
        if (best_u >= 0) {
            if (on_swap) on_swap(state, best_u, best_v, best_delta);
            state.apply_swap(best_u, best_v);
            state.forbid(best_u, best_v, cfg.tenure);
            ++stats.swaps;
            idle = 0;
        } else {
            ++idle;
        }
        state.advance();
        stats.best_eval = std::min(stats.best_eval, state.eval());
        if (cfg.stall_limit > 0 && idle >= cfg.stall_limit && state.eval() > 0) {
            state.reset(random_onto_labelling(n, rng));
            ++stats.runs;
            idle = 0;
        }
    }

    stats.iterations = state.iteration();
    SolveOutcome out;
    if (state.eval() == 0) {
        detail::assert_harmonious(tree, state.labelling(), "tabu search");
        stats.success = true;
        out.success = true;
        out.labelling = state.labelling();
        out.solver = SolverTag::Tabu;
    }
    stats.seconds = clock.seconds();
    out.attempts.push_back(stats);
    return out;
}

}  // namespace harmonious

#endif  // HARMONIOUS_TABU_HPP
