#ifndef HARMONIOUS_SOLVER_HPP
#define HARMONIOUS_SOLVER_HPP

#include <chrono>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "labelling.hpp"

namespace harmonious {

enum class SolverTag { TwoStage, Backtrack, Tabu, Exhaustive };

inline std::string_view to_string(SolverTag tag) {
    switch (tag) {
        case SolverTag::TwoStage: return "twostage";
        case SolverTag::Backtrack: return "backtrack";
        case SolverTag::Tabu: return "tabu";
        case SolverTag::Exhaustive: return "exhaustive";
    }
    return "unknown";
}

inline std::optional<SolverTag> parse_solver_tag(std::string_view text) {
    if (text == "twostage") return SolverTag::TwoStage;
    if (text == "backtrack") return SolverTag::Backtrack;
    if (text == "tabu") return SolverTag::Tabu;
    if (text == "exhaustive") return SolverTag::Exhaustive;
    return std::nullopt;
}

/// Every tunable of the three searches. Defaults are declared values, not
/// derived ones.
struct SolverConfig {
    // backtracking
    std::uint64_t backtrack_limit = 50000;  ///< backtrack events per run
    std::uint64_t restarts = 20;            ///< randomized runs, each from a fresh root label
    double perturbation = 0.01;             ///< per forward step

    // tabu
    std::uint64_t sample_pairs = 30;
    std::uint64_t tenure = 8;
    std::optional<std::uint64_t> max_iters;  ///< unset: 20000 * n
    std::uint64_t stall_limit = 100;         ///< reseed after this many idle iterations; 0 = never

    // two-stage
    std::uint64_t twostage_runs = 200;
    std::uint64_t stage1_budget = 2000;
    std::uint64_t stage2_budget = 5000;
    bool stage1_sum_check = true;  ///< stage 1 enforces the degree-weighted sum congruence

    std::vector<SolverTag> pipeline{SolverTag::TwoStage, SolverTag::Backtrack, SolverTag::Tabu};
    std::uint64_t global_seed = 0x4841524D4F4E4943ULL;

    std::uint64_t tabu_iterations(int n) const {
        return max_iters ? *max_iters : 20000ULL * static_cast<std::uint64_t>(n);
    }

    /// Throws std::invalid_argument if the pipeline repeats a solver, names the
    /// exhaustive oracle, or the perturbation rate is outside [0, 1].
    void validate() const {
        if (!(perturbation >= 0.0 && perturbation <= 1.0)) {
            throw std::invalid_argument("perturbation must be in [0, 1]");
        }
        bool seen[3] = {false, false, false};
        for (auto tag : pipeline) {
            if (tag == SolverTag::Exhaustive) throw std::invalid_argument("pipeline cannot include exhaustive");
            auto& s = seen[static_cast<int>(tag)];
            if (s) throw std::invalid_argument("pipeline repeats a solver");
            s = true;
        }
    }
};

struct SearchStats {
    SolverTag solver = SolverTag::TwoStage;
    bool success = false;
    std::uint64_t runs = 0;        ///< restarts / two-stage runs / tabu reseeds used
    std::uint64_t backtracks = 0;  ///< backtrack events, all stages
    std::uint64_t iterations = 0;  ///< tabu iterations
    std::uint64_t swaps = 0;       ///< accepted tabu swaps
    int best_eval = -1;            ///< lowest Eval reached (tabu)
    double seconds = 0.0;
};

struct SolveOutcome {
    bool success = false;
    /// The producing solver's labelling, before normalization.
    std::optional<Labelling> labelling;
    std::optional<SolverTag> solver;
    std::vector<SearchStats> attempts;
};

namespace detail {

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

// Every solver checks its answer before handing it out.
inline void assert_harmonious(const Tree& tree, const Labelling& f, std::string_view who) {
    if (!is_harmonious(tree, f)) {
        throw std::logic_error(std::string(who) + " produced a labelling that fails verification");
    }
}

inline SolveOutcome trivial_outcome(SolverTag tag, LabelModel model = LabelModel::Onto) {
    SolveOutcome out;
    out.success = true;
    out.labelling = Labelling{{0}, model};
    out.solver = tag;
    out.attempts.push_back({.solver = tag, .success = true, .best_eval = 0});
    return out;
}

}  // namespace detail
}  // namespace harmonious

#endif  // HARMONIOUS_SOLVER_HPP
