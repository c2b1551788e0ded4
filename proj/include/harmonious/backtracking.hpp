#ifndef HARMONIOUS_BACKTRACKING_HPP
#define HARMONIOUS_BACKTRACKING_HPP

// Probabilistic backtracking: label nodes one at a time in preorder, each node
// taking a random label among those that keep the partial labelling valid, and
// step back when a node has none left.
//
// Labelling a node in preorder fixes exactly the edge to its already-labelled
// parent, so validity is two membership tests per value. Candidates for a
// depth are shuffled once, on arrival; backtracking into a depth resumes that
// order.

#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "labelling.hpp"
#include "random.hpp"
#include "solver.hpp"
#include "tree.hpp"

namespace harmonious {

class BacktrackState {
public:
    /// Labels drawn from Z_{n-1}. Non-root labels are pairwise distinct; the
    /// root label is exempt and ends up duplicated exactly once.
    static BacktrackState root_duplicate(const Tree& tree) {
        const int n = tree.size();
        std::vector<int> order(n), parent(n);
        for (int v = 0; v < n; ++v) {
            order[v] = v;
            parent[v] = v == 0 ? -1 : tree.parent(v);
        }
        return BacktrackState(n, std::move(order), std::move(parent), label_modulus(n), true);
    }

    /// Labels drawn from {0, ..., n-1}, all distinct, over the non-leaf nodes
    /// only. Sums are still mod n-1 and only internal-internal edges count.
    ///
    /// With `sum_check`, the last internal node must also satisfy the
    /// congruence every harmonious bijection obeys. Summing all edge sums,
    ///   sum_v deg(v) f(v) = m(m-1)/2  (mod m),  m = n-1,
    /// and the leaves contribute n(n-1)/2 - sum_internal f(v), so
    ///   sum_internal (deg(v) - 1) f(v) = m(m-1)/2 - n(n-1)/2  (mod m).
    static BacktrackState internal_bijective(const Tree& tree, bool sum_check = true) {
        const int n = tree.size();
        std::vector<int> order, parent;
        for (int v = 0; v < n; ++v) {
            if (tree.degree(v) <= 1) continue;
            order.push_back(v);
            const int p = v == 0 ? -1 : tree.parent(v);
            parent.push_back(p >= 0 && tree.degree(p) > 1 ? p : -1);
        }
        BacktrackState state(n, std::move(order), std::move(parent), n, false);
        if (sum_check && n >= 3) {
            const long long m = n - 1;
            state.weight_.reserve(state.order_.size());
            for (int v : state.order_) state.weight_.push_back(tree.degree(v) - 1);
            state.residue_ = mod(m * (m - 1) / 2 - static_cast<long long>(n) * (n - 1) / 2, static_cast<int>(m));
        }
        return state;
    }

    /// Number of nodes labelled so far; the next node is order()[depth()].
    int depth() const noexcept { return depth_; }
    int target() const noexcept { return static_cast<int>(order_.size()); }
    bool complete() const noexcept { return depth_ == target(); }
    std::span<const int> order() const noexcept { return order_; }

    /// Label per tree node, -1 where unassigned.
    std::span<const int> assigned() const noexcept { return labels_; }

    std::uint64_t backtrack_count() const noexcept { return backtracks_; }
    int used_edge_count() const noexcept { return used_edges_; }

    bool node_label_used(int value) const { return used_value_[value] != 0; }
    bool edge_label_used(int sum) const { return used_sum_[sum] != 0; }

    /// Values that keep node labels injective (root exempt in the root-duplicate
    /// model) and edge sums distinct. `node` must be the next node in order.
    std::vector<int> valid_labels(int node) const {
        if (complete() || order_[depth_] != node) {
            throw std::invalid_argument("valid_labels: node is not the next node to label");
        }
        const int p = parent_[depth_];
        const bool exempt = exempt_first_ && depth_ == 0;
        const bool last_weighted = !weight_.empty() && depth_ + 1 == target();
        std::vector<int> out;
        for (int v = 0; v < range_; ++v) {
            if (!exempt && used_value_[v]) continue;
            if (p >= 0 && used_sum_[(v + labels_[p]) % modulus_]) continue;
            if (last_weighted && mod(weighted_ + static_cast<long long>(weight_[depth_]) * v, modulus_) != residue_) {
                continue;
            }
            out.push_back(v);
        }
        return out;
    }

    /// Labels the next node. The value must be valid.
    void assign(int value) {
        const int node = order_[depth_];
        const int p = parent_[depth_];
        if (!(exempt_first_ && depth_ == 0)) used_value_[value] = 1;
        if (p >= 0) {
            used_sum_[(value + labels_[p]) % modulus_] = 1;
            ++used_edges_;
        }
        labels_[node] = value;
        if (!weight_.empty()) weighted_ += static_cast<long long>(weight_[depth_]) * value;
        ++depth_;
    }

    /// Removes the most recent assignment.
    void unassign() {
        --depth_;
        const int node = order_[depth_];
        const int p = parent_[depth_];
        const int value = labels_[node];
        if (!weight_.empty()) weighted_ -= static_cast<long long>(weight_[depth_]) * value;
        if (!(exempt_first_ && depth_ == 0)) used_value_[value] = 0;
        if (p >= 0) {
            used_sum_[(value + labels_[p]) % modulus_] = 0;
            --used_edges_;
        }
        labels_[node] = -1;
    }

    enum class RunResult { Complete, LimitReached, Exhausted };

    /// Randomized depth-first search from the current state. Stops when every
    /// node is labelled, when a further backtrack would exceed `limit`, or when
    /// the whole space below the starting depth is exhausted.
    ///
    /// With probability `perturbation` after each forward step, two untried
    /// candidates of a random open depth trade places.
    RunResult run(Rng& rng, std::uint64_t limit, double perturbation = 0.0) {
        const int base = depth_;
        std::vector<Frame> frames;
        frames.reserve(order_.size());
        if (complete()) return RunResult::Complete;
        frames.push_back(open_frame(rng));
        while (true) {
            Frame& top = frames.back();
            if (top.next < top.candidates.size()) {
                assign(top.candidates[top.next++]);
                if (complete()) return RunResult::Complete;
                frames.push_back(open_frame(rng));
                if (bernoulli(rng, perturbation)) perturb(frames, rng);
                continue;
            }
            frames.pop_back();
            if (depth_ == base) return RunResult::Exhausted;
            if (backtracks_ >= limit) return RunResult::LimitReached;
            ++backtracks_;
            unassign();
        }
    }

private:
    struct Frame {
        std::vector<int> candidates;
        std::size_t next = 0;
    };

    BacktrackState(int n, std::vector<int> order, std::vector<int> parent, int range, bool exempt_first)
        : order_(std::move(order)),
          parent_(std::move(parent)),
          labels_(n, -1),
          used_value_(range, 0),
          used_sum_(label_modulus(n), 0),
          range_(range),
          modulus_(label_modulus(n)),
          exempt_first_(exempt_first) {}

    Frame open_frame(Rng& rng) const {
        Frame f{valid_labels(order_[depth_]), 0};
        shuffle(std::span<int>(f.candidates), rng);
        return f;
    }

    static void perturb(std::vector<Frame>& frames, Rng& rng) {
        Frame& f = frames[uniform_below(rng, frames.size())];
        const std::size_t left = f.candidates.size() - f.next;
        if (left < 2) return;
        const auto a = f.next + uniform_below(rng, left);
        const auto b = f.next + uniform_below(rng, left);
        std::swap(f.candidates[a], f.candidates[b]);
    }

    std::vector<int> order_;
    std::vector<int> parent_;  // tree parent per depth, -1 if none in scope
    std::vector<int> labels_;
    std::vector<char> used_value_;
    std::vector<char> used_sum_;
    int range_;
    int modulus_;
    bool exempt_first_;
    std::vector<int> weight_;  // per depth; empty when the sum check is off
    long long weighted_ = 0;
    int residue_ = 0;
    int depth_ = 0;
    int used_edges_ = 0;
    std::uint64_t backtracks_ = 0;
};

/// Up to cfg.restarts randomized runs, each allowed cfg.backtrack_limit
/// backtracks. A success always carries its duplicated value on the root.
inline SolveOutcome solve_backtracking(const Tree& tree, const SolverConfig& cfg, Rng& rng) {
    if (tree.size() <= 1) return detail::trivial_outcome(SolverTag::Backtrack);
    detail::Stopwatch clock;
    SolveOutcome out;
    SearchStats stats{.solver = SolverTag::Backtrack};
    for (std::uint64_t r = 0; r < cfg.restarts; ++r) {
        auto state = BacktrackState::root_duplicate(tree);
        ++stats.runs;
        const auto result = state.run(rng, cfg.backtrack_limit, cfg.perturbation);
        stats.backtracks += state.backtrack_count();
        if (result == BacktrackState::RunResult::Complete) {
            Labelling f{{state.assigned().begin(), state.assigned().end()}, LabelModel::Onto};
            detail::assert_harmonious(tree, f, "backtracking");
            stats.success = true;
            out.success = true;
            out.labelling = std::move(f);
            out.solver = SolverTag::Backtrack;
            break;
        }
    }
    stats.seconds = clock.seconds();
    out.attempts.push_back(stats);
    return out;
}

}  // namespace harmonious

#endif  // HARMONIOUS_BACKTRACKING_HPP
