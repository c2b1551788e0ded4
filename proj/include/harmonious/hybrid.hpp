#ifndef HARMONIOUS_HYBRID_HPP
#define HARMONIOUS_HYBRID_HPP

// The hybrid filter: a tree goes to each solver of the pipeline in turn and
// moves on only if the current one fails.

#include <cstdint>

#include "backtracking.hpp"
#include "random.hpp"
#include "solver.hpp"
#include "tabu.hpp"
#include "tree.hpp"
#include "twostage.hpp"

namespace harmonious {

/// Runs one solver by tag. The exhaustive oracle is accepted for n <= 10.
inline SolveOutcome solve_with(SolverTag tag, const Tree& tree, const SolverConfig& cfg, Rng& rng) {
    switch (tag) {
        case SolverTag::TwoStage: return solve_twostage(tree, cfg, rng);
        case SolverTag::Backtrack: return solve_backtracking(tree, cfg, rng);
        case SolverTag::Tabu: return solve_tabu(tree, cfg, rng);
        case SolverTag::Exhaustive: {
            detail::Stopwatch clock;
            auto result = exhaustive_search(tree);
            SolveOutcome out;
            out.success = result.exists;
            out.labelling = result.witness;
            if (out.success) out.solver = SolverTag::Exhaustive;
            out.attempts.push_back({.solver = SolverTag::Exhaustive,
                                    .success = result.exists,
                                    .seconds = clock.seconds()});
            return out;
        }
    }
    return {};
}

/// One generator per tree, seeded with `seed`, shared by the stages in
/// pipeline order.
inline SolveOutcome solve_hybrid(const Tree& tree, const SolverConfig& cfg, std::uint64_t seed) {
    if (tree.size() <= 1) {
        return detail::trivial_outcome(cfg.pipeline.empty() ? SolverTag::TwoStage : cfg.pipeline.front());
    }
    Rng rng(seed);
    SolveOutcome out;
    for (auto tag : cfg.pipeline) {
        auto stage = solve_with(tag, tree, cfg, rng);
        out.attempts.insert(out.attempts.end(), stage.attempts.begin(), stage.attempts.end());
        if (stage.success) {
            out.success = true;
            out.labelling = std::move(stage.labelling);
            out.solver = tag;
            break;
        }
    }
    return out;
}

/// Seed for the tree at `tree_index` of the n-node stream. For fixed
/// (global_seed, n) this is a bijection of tree_index.
inline std::uint64_t derive_seed(std::uint64_t global_seed, int n, std::uint64_t tree_index) {
    const std::uint64_t key = splitmix64(global_seed ^ splitmix64(static_cast<std::uint64_t>(n)));
    return splitmix64(key ^ tree_index);
}

}  // namespace harmonious

#endif  // HARMONIOUS_HYBRID_HPP
