#ifndef HARMONIOUS_TWOSTAGE_HPP
#define HARMONIOUS_TWOSTAGE_HPP

// Two-stage constraint solving.
//
// Stage 1 labels the internal nodes with distinct values from {0, ..., n-1}
// and pairwise distinct internal edge sums, by randomized backtracking.
// Stage 2 is then a CSP over the leaves alone: each leaf v takes an unused
// value w such that w + f(P(v)) avoids every sum already present, with all
// leaf values distinct and all leaf edge sums distinct. Forward checking keeps
// the leaf domains pruned. A failed stage 2 sends the search back to a fresh
// stage-1 sample.

#include <algorithm>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "backtracking.hpp"
#include "labelling.hpp"
#include "random.hpp"
#include "solver.hpp"
#include "tree.hpp"

namespace harmonious {

inline constexpr std::uint64_t kUnlimitedBudget = std::numeric_limits<std::uint64_t>::max();

/// Stage 1. Returns the internal-node labels (-1 on leaves), or nothing when
/// the backtrack budget runs out. `backtracks` accumulates the events used.
inline std::optional<std::vector<int>> stage1_internal(const Tree& tree, std::uint64_t budget, Rng& rng,
                                                       std::uint64_t* backtracks = nullptr, bool sum_check = true) {
    auto state = BacktrackState::internal_bijective(tree, sum_check);
    const auto result = state.run(rng, budget);
    if (backtracks) *backtracks += state.backtrack_count();
    if (result != BacktrackState::RunResult::Complete) return std::nullopt;
    return std::vector<int>(state.assigned().begin(), state.assigned().end());
}

/// The residual leaf-assignment problem for one stage-1 labelling.
class LeafCsp {
public:
    /// `partial` holds a label on every internal node and -1 on every leaf.
    LeafCsp(const Tree& tree, std::span<const int> partial)
        : n_(tree.size()), modulus_(label_modulus(tree.size())), used_value_(n_, 0), used_sum_(modulus_, 0) {
        for (int v = 0; v < n_; ++v) {
            if (partial[v] >= 0) {
                used_value_[partial[v]] = 1;
            } else {
                leaves_.push_back(v);
                const int p = tree.neighbors(v)[0];
                leaf_parent_.push_back(p);
                parent_label_.push_back(partial[p]);
            }
        }
        for (int i = 1; i < n_; ++i) {
            const int p = tree.parent(i);
            if (partial[i] >= 0 && partial[p] >= 0) used_sum_[(partial[i] + partial[p]) % modulus_] = 1;
        }
        const int k = leaf_count();
        domain_.assign(static_cast<std::size_t>(k) * n_, 0);
        domain_size_.assign(k, 0);
        value_.assign(k, -1);
        for (int j = 0; j < k; ++j) {
            for (int w = 0; w < n_; ++w) {
                if (used_value_[w] || used_sum_[(w + parent_label_[j]) % modulus_]) continue;
                domain_[index(j, w)] = 1;
                ++domain_size_[j];
            }
        }
    }

    int leaf_count() const noexcept { return static_cast<int>(leaves_.size()); }
    int leaf(int j) const { return leaves_[j]; }
    int leaf_parent(int j) const { return leaf_parent_[j]; }
    int parent_label(int j) const { return parent_label_[j]; }
    bool value_used(int w) const { return used_value_[w] != 0; }
    bool sum_used(int s) const { return used_sum_[s] != 0; }

    bool in_domain(int j, int w) const { return domain_[index(j, w)] != 0; }
    int domain_size(int j) const { return domain_size_[j]; }
    std::vector<int> domain(int j) const {
        std::vector<int> out;
        for (int w = 0; w < n_; ++w) {
            if (in_domain(j, w)) out.push_back(w);
        }
        return out;
    }

    /// -1 while unassigned.
    int value(int j) const { return value_[j]; }

    /// True if some unassigned leaf has nothing left to take.
    bool has_empty_domain() const {
        for (int j = 0; j < leaf_count(); ++j) {
            if (value_[j] < 0 && domain_size_[j] == 0) return true;
        }
        return false;
    }

    /// Fixes leaf j to w (which must be in its domain) and forward-checks:
    /// every other open leaf loses w, and any value whose edge sum now
    /// collides with the new sum.
    void assign(int j, int w) {
        value_[j] = w;
        used_value_[w] = 1;
        const int s = (w + parent_label_[j]) % modulus_;
        used_sum_[s] = 1;
        for (int i = 0; i < leaf_count(); ++i) {
            if (value_[i] >= 0) continue;
            remove(i, w);
            // x + parent_label = s (mod n-1) for x = r or r + (n-1)
            const int r = mod(s - parent_label_[i], modulus_);
            remove(i, r);
            if (r + modulus_ < n_) remove(i, r + modulus_);
        }
    }

    /// Open leaf with the fewest remaining values; -1 if all are assigned.
    int most_constrained() const {
        int best = -1;
        for (int j = 0; j < leaf_count(); ++j) {
            if (value_[j] >= 0) continue;
            if (best < 0 || domain_size_[j] < domain_size_[best]) best = j;
        }
        return best;
    }

private:
    std::size_t index(int j, int w) const { return static_cast<std::size_t>(j) * n_ + w; }

    void remove(int j, int w) {
        auto& d = domain_[index(j, w)];
        if (d) {
            d = 0;
            --domain_size_[j];
        }
    }

    int n_;
    int modulus_;
    std::vector<int> leaves_;
    std::vector<int> leaf_parent_;
    std::vector<int> parent_label_;
    std::vector<char> used_value_;
    std::vector<char> used_sum_;
    std::vector<char> domain_;
    std::vector<int> domain_size_;
    std::vector<int> value_;
};

inline LeafCsp build_leaf_csp(const Tree& tree, std::span<const int> partial) { return LeafCsp(tree, partial); }

namespace detail {

struct LeafSearch {
    Rng& rng;
    std::uint64_t budget;
    std::uint64_t backtracks = 0;
    bool out_of_budget = false;

    std::optional<LeafCsp> solve(const LeafCsp& csp) {
        const int j = csp.most_constrained();
        if (j < 0) return csp;
        auto values = csp.domain(j);
        shuffle(std::span<int>(values), rng);
        for (int w : values) {
            LeafCsp next = csp;
            next.assign(j, w);
            if (!next.has_empty_domain()) {
                if (auto done = solve(next)) return done;
                if (out_of_budget) return std::nullopt;
            }
            if (backtracks >= budget) {
                out_of_budget = true;
                return std::nullopt;
            }
            ++backtracks;
        }
        return std::nullopt;
    }
};

}  // namespace detail

/// Stage 2: depth-first search with forward checking, smallest domain first,
/// random value order. Returns one value per leaf (in csp.leaf() order), or
/// nothing if the space is exhausted or `budget` backtracks are spent.
inline std::optional<std::vector<int>> solve_leaf_csp(const LeafCsp& csp, Rng& rng,
                                                      std::uint64_t budget = kUnlimitedBudget,
                                                      std::uint64_t* backtracks = nullptr) {
    std::optional<std::vector<int>> out;
    if (!csp.has_empty_domain()) {
        detail::LeafSearch search{rng, budget};
        if (auto solved = search.solve(csp)) {
            out.emplace();
            for (int j = 0; j < solved->leaf_count(); ++j) out->push_back(solved->value(j));
        }
        if (backtracks) *backtracks += search.backtracks;
    }
    return out;
}

inline SolveOutcome solve_twostage(const Tree& tree, const SolverConfig& cfg, Rng& rng) {
    const int n = tree.size();
    if (n <= 1) return detail::trivial_outcome(SolverTag::TwoStage, LabelModel::Bijective);
    detail::Stopwatch clock;
    SolveOutcome out;
    SearchStats stats{.solver = SolverTag::TwoStage};
    for (std::uint64_t run = 0; run < cfg.twostage_runs && !out.success; ++run) {
        ++stats.runs;
        if (n == 2) {
            // both nodes are leaves; any bijection works
            const int a = uniform_int(rng, 2);
            out.labelling = Labelling{{a, 1 - a}, LabelModel::Bijective};
            out.success = true;
            break;
        }
        auto partial = stage1_internal(tree, cfg.stage1_budget, rng, &stats.backtracks, cfg.stage1_sum_check);
        if (!partial) continue;
        const LeafCsp csp(tree, *partial);
        auto leaf_values = solve_leaf_csp(csp, rng, cfg.stage2_budget, &stats.backtracks);
        if (!leaf_values) continue;
        Labelling f{std::move(*partial), LabelModel::Bijective};
        for (int j = 0; j < csp.leaf_count(); ++j) f.labels[csp.leaf(j)] = (*leaf_values)[j];
        out.labelling = std::move(f);
        out.success = true;
    }
    if (out.success) {
        detail::assert_harmonious(tree, *out.labelling, "two-stage solver");
        out.solver = SolverTag::TwoStage;
        stats.success = true;
    }
    stats.seconds = clock.seconds();
    out.attempts.push_back(stats);
    return out;
}

}  // namespace harmonious

#endif  // HARMONIOUS_TWOSTAGE_HPP
