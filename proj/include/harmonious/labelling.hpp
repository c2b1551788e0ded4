#ifndef HARMONIOUS_LABELLING_HPP
#define HARMONIOUS_LABELLING_HPP

// Labellings of a tree on n nodes, their induced edge sums, the Eval objective
// and an independent verifier.
//
// All label arithmetic is modulo n-1. A labelling is harmonious when it is onto
// Z_{n-1} and the n-1 edge sums f(u)+f(v) are pairwise distinct. Since there
// are n nodes and n-1 values, exactly one value is used twice.

#include <algorithm>
#include <cstdint>
#include <functional>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "tree.hpp"

namespace harmonious {

enum class LabelModel {
    /// Values in Z_{n-1}, onto; one value appears on two nodes.
    Onto,
    /// Values are a permutation of {0, ..., n-1}; sums still taken mod n-1.
    Bijective,
};

struct Labelling {
    std::vector<int> labels;
    LabelModel model = LabelModel::Onto;

    int size() const noexcept { return static_cast<int>(labels.size()); }
    bool operator==(const Labelling&) const = default;
};

/// Edge sums mod n-1, one per edge in Tree::edges() order.
using EdgeLabelling = std::vector<int>;

inline int label_modulus(int n) noexcept { return n > 1 ? n - 1 : 1; }

inline int mod(long long value, int m) noexcept {
    const long long r = value % m;
    return static_cast<int>(r < 0 ? r + m : r);
}

inline EdgeLabelling induced_edge_labels(const Tree& tree, const Labelling& f) {
    const int n = tree.size();
    if (f.size() != n) throw std::invalid_argument("labelling length does not match tree size");
    const int m = label_modulus(n);
    EdgeLabelling sums;
    sums.reserve(n > 0 ? n - 1 : 0);
    for (int i = 1; i < n; ++i) sums.push_back(mod(f.labels[i] + f.labels[tree.parent(i)], m));
    return sums;
}

/// (n-1) minus the number of distinct edge sums. Zero exactly when the edge
/// sums form a bijection onto Z_{n-1}.
inline int eval(const Tree& tree, const Labelling& f) {
    const int n = tree.size();
    if (n <= 1) return 0;
    const auto sums = induced_edge_labels(tree, f);
    std::vector<bool> seen(label_modulus(n), false);
    int distinct = 0;
    for (int s : sums) {
        if (!seen[s]) {
            seen[s] = true;
            ++distinct;
        }
    }
    return (n - 1) - distinct;
}

enum class VerifyReason {
    Ok,
    LengthMismatch,
    MalformedLevels,
    LabelOutOfRange,
    NotOnto,
    DuplicateNodeLabel,
    DuplicateEdgeLabel,
    NotNormalized,
};

inline std::string_view describe(VerifyReason reason) {
    switch (reason) {
        case VerifyReason::Ok: return "ok";
        case VerifyReason::LengthMismatch: return "label count does not match node count";
        case VerifyReason::MalformedLevels: return "malformed level sequence";
        case VerifyReason::LabelOutOfRange: return "label out of range";
        case VerifyReason::NotOnto: return "label multiset not onto";
        case VerifyReason::DuplicateNodeLabel: return "duplicate node label";
        case VerifyReason::DuplicateEdgeLabel: return "duplicate edge label";
        case VerifyReason::NotNormalized: return "duplicated label is not 0";
    }
    return "unknown";
}

struct Verdict {
    VerifyReason reason = VerifyReason::Ok;
    explicit operator bool() const noexcept { return reason == VerifyReason::Ok; }
};

/// Checks a labelling against a raw level sequence, from scratch.
///
/// Shares no code with the search side: edges are rebuilt from the depths with
/// a path stack, and duplicates are found by counting occurrences per value.
inline Verdict verify_labelling(std::span<const int> levels, std::span<const int> labels,
                                LabelModel model = LabelModel::Onto) {
    const std::size_t n = levels.size();
    if (n == 0) return {VerifyReason::MalformedLevels};
    if (labels.size() != n) return {VerifyReason::LengthMismatch};

    // path[d] = node currently open at depth d
    std::vector<std::size_t> path;
    std::vector<std::size_t> parent(n, 0);
    for (std::size_t i = 0; i < n; ++i) {
        const int d = levels[i];
        if (i == 0 ? d != 0 : (d < 1 || static_cast<std::size_t>(d) > path.size())) {
            return {VerifyReason::MalformedLevels};
        }
        path.resize(static_cast<std::size_t>(d));
        if (i > 0) parent[i] = path.back();
        path.push_back(i);
    }
    if (n == 1) return {};

    const long long m = static_cast<long long>(n) - 1;
    const long long range = model == LabelModel::Bijective ? m + 1 : m;
    std::vector<int> node_count(static_cast<std::size_t>(range), 0);
    for (int label : labels) {
        if (label < 0 || label >= range) return {VerifyReason::LabelOutOfRange};
        ++node_count[static_cast<std::size_t>(label)];
    }
    for (int c : node_count) {
        if (model == LabelModel::Bijective && c > 1) return {VerifyReason::DuplicateNodeLabel};
        if (c == 0) return {VerifyReason::NotOnto};
    }

    std::vector<int> edge_count(static_cast<std::size_t>(m), 0);
    for (std::size_t i = 1; i < n; ++i) {
        const long long s = (static_cast<long long>(labels[i]) + labels[parent[i]]) % m;
        if (++edge_count[static_cast<std::size_t>(s)] > 1) return {VerifyReason::DuplicateEdgeLabel};
    }
    return {};
}

inline Verdict check_harmonious(const Tree& tree, const Labelling& f) {
    return verify_labelling(tree.levels(), f.labels, f.model);
}

/// n = 1 is harmonious by convention.
inline bool is_harmonious(const Tree& tree, const Labelling& f) {
    return static_cast<bool>(check_harmonious(tree, f));
}

/// Adds c to every label, mod n-1. Only meaningful for the onto model.
inline Labelling shift(const Labelling& f, long long c) {
    const int m = label_modulus(f.size());
    Labelling out{f.labels, LabelModel::Onto};
    for (int& l : out.labels) l = mod(l + c, m);
    return out;
}

/// The value carried by two nodes of an onto labelling (n >= 2).
inline int duplicated_value(const Labelling& f) {
    std::vector<int> seen(label_modulus(f.size()), 0);
    for (int l : f.labels) {
        if (++seen[l] == 2) return l;
    }
    throw std::invalid_argument("labelling has no duplicated value");
}

/// Onto labelling whose duplicated value is 0. A bijective labelling is first
/// reduced mod n-1, which merges labels 0 and n-1. Idempotent.
inline Labelling normalize(const Tree& tree, const Labelling& f) {
    if (!is_harmonious(tree, f)) throw std::invalid_argument("normalize: labelling is not harmonious");
    const int n = tree.size();
    if (n == 1) return {{0}, LabelModel::Onto};
    Labelling reduced{f.labels, LabelModel::Onto};
    const int m = label_modulus(n);
    for (int& l : reduced.labels) l %= m;
    return shift(reduced, -duplicated_value(reduced));
}

struct ExhaustiveResult {
    bool exists = false;
    std::uint64_t count = 0;
    std::optional<Labelling> witness;
};

inline constexpr int kExhaustiveMaxNodes = 10;

/// Calls `visit` with every harmonious bijective labelling of `tree`, in
/// lexicographic order of the label vector. n <= 10.
inline void for_each_harmonious_bijection(const Tree& tree,
                                          const std::function<void(std::span<const int>)>& visit) {
    const int n = tree.size();
    if (n < 1 || n > kExhaustiveMaxNodes) {
        throw std::invalid_argument("exhaustive search supports 1 <= n <= 10");
    }
    std::vector<int> perm(n);
    std::iota(perm.begin(), perm.end(), 0);
    if (n <= 2) {
        do visit(perm);
        while (std::next_permutation(perm.begin(), perm.end()));
        return;
    }
    const int m = n - 1;
    std::vector<char> used(m);
    do {
        std::fill(used.begin(), used.end(), 0);
        bool ok = true;
        for (int i = 1; i < n && ok; ++i) {
            const int s = (perm[i] + perm[tree.parent(i)]) % m;
            if (used[s]) ok = false;
            used[s] = 1;
        }
        if (ok) visit(perm);
    } while (std::next_permutation(perm.begin(), perm.end()));
}

/// Brute force over all n! bijective labellings.
inline ExhaustiveResult exhaustive_search(const Tree& tree) {
    ExhaustiveResult result;
    for_each_harmonious_bijection(tree, [&](std::span<const int> labels) {
        if (!result.witness) {
            result.witness = Labelling{{labels.begin(), labels.end()}, LabelModel::Bijective};
        }
        ++result.count;
    });
    result.exists = result.count > 0;
    return result;
}

}  // namespace harmonious

#endif  // HARMONIOUS_LABELLING_HPP
