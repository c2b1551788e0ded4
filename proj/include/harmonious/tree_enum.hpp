#ifndef HARMONIOUS_TREE_ENUM_HPP
#define HARMONIOUS_TREE_ENUM_HPP

// Duplicate-free enumeration of free trees as canonical level sequences.
//
// The walk follows the Wright-Richmond-Odlyzko-McKay scheme: rooted canonical
// sequences are visited in decreasing lexicographic order by the
// Beyer-Hedetniemi successor, and runs of sequences whose root is not a valid
// center are jumped over instead of being generated and rejected.
//
// That scheme roots a bicentral tree at the center whose half is larger (by
// size, then lexicographically). Emitted sequences are re-rooted at the other
// center when that gives the lexicographically greater sequence, so every
// emitted sequence equals canonicalize() of its tree.

#include <algorithm>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

#include "tree.hpp"

namespace harmonious {

/// Recorded in checkpoints; emission order is only guaranteed per version.
inline constexpr const char* kGeneratorVersion = "wrom-lexmax-1";

namespace detail {

struct PrincipalSplit {
    int boundary;     // index of the root's second child, or n
    int left_height;  // height of the first child's subtree, from that child
    int rest_height;  // height of the tree with that subtree removed
};

inline PrincipalSplit split_principal(const LevelSequence& seq) {
    const int n = static_cast<int>(seq.size());
    int m = n;
    for (int i = 2; i < n; ++i) {
        if (seq[i] == 1) {
            m = i;
            break;
        }
    }
    int left = 0;
    for (int i = 1; i < m; ++i) left = std::max(left, seq[i] - 1);
    int rest = 0;
    for (int i = m; i < n; ++i) rest = std::max(rest, seq[i]);
    return {m, left, rest};
}

// Beyer-Hedetniemi successor, modifying from position p on. Returns false when
// `seq` is the star (the last rooted tree).
inline bool next_rooted(LevelSequence& seq, int p) {
    if (p <= 0) return false;
    int q = p - 1;
    while (seq[q] != seq[p] - 1) --q;
    const int shift = p - q;
    for (int i = p; i < static_cast<int>(seq.size()); ++i) seq[i] = seq[i - shift];
    return true;
}

inline bool next_rooted(LevelSequence& seq) {
    int p = static_cast<int>(seq.size()) - 1;
    while (p > 0 && seq[p] == 1) --p;
    return next_rooted(seq, p);
}

// Validity of a rooted canonical sequence as the generator's representative.
inline bool is_generator_form(const LevelSequence& seq) {
    if (seq.size() <= 2) return true;
    const auto s = split_principal(seq);
    if (s.rest_height < s.left_height) return false;
    if (s.rest_height > s.left_height) return true;
    const int n = static_cast<int>(seq.size());
    const int left_size = s.boundary - 1;
    const int rest_size = n - s.boundary + 1;
    if (left_size != rest_size) return left_size < rest_size;
    // left = seq[1..m) - 1, rest = 0 ++ seq[m..n)
    for (int i = 0; i < left_size; ++i) {
        const int l = seq[1 + i] - 1;
        const int r = i == 0 ? 0 : seq[s.boundary + i - 1];
        if (l != r) return l < r;
    }
    return true;
}

// Jump from an invalid sequence past every successor sharing its principal
// subtree prefix.
inline bool jump_invalid(LevelSequence& seq) {
    const auto s = split_principal(seq);
    const int p = s.boundary - 1;
    const bool deep = seq[p] > 2;
    if (!next_rooted(seq, p)) return false;
    if (deep) {
        const int h = split_principal(seq).left_height;
        const int n = static_cast<int>(seq.size());
        for (int k = 0; k <= h; ++k) seq[n - 1 - h + k] = k + 1;
    }
    return true;
}

// For a bicentral sequence [0, B+1, A_tail] the other center gives
// [0, A+1, B_tail]; both halves are already canonical.
inline LevelSequence lexmax_rooting(const LevelSequence& seq) {
    if (seq.size() <= 2) return seq;
    const auto s = split_principal(seq);
    if (s.rest_height != s.left_height) return seq;
    LevelSequence alt;
    alt.reserve(seq.size());
    alt.push_back(0);
    alt.push_back(1);
    for (int i = s.boundary; i < static_cast<int>(seq.size()); ++i) alt.push_back(seq[i] + 1);
    for (int i = 2; i < s.boundary; ++i) alt.push_back(seq[i] - 1);
    return std::max(seq, alt);
}

}  // namespace detail

/// Single-consumer stream of the canonical level sequences of all free trees
/// on n nodes, in a fixed deterministic order.
class FreeTreeStream {
public:
    explicit FreeTreeStream(int n) : n_(n) {
        if (n < 1) throw std::invalid_argument("free_trees: n must be >= 1");
        if (n == 1) {
            cursor_ = LevelSequence{0};
            return;
        }
        LevelSequence seq;
        for (int i = 0; i <= n / 2; ++i) seq.push_back(i);
        for (int i = 1; i < (n + 1) / 2; ++i) seq.push_back(i);
        cursor_ = std::move(seq);
    }

    int nodes() const noexcept { return n_; }

    /// Number of sequences already emitted.
    std::uint64_t index() const noexcept { return index_; }

    std::optional<LevelSequence> next() {
        if (!cursor_) return std::nullopt;
        if (started_ && !detail::next_rooted(*cursor_)) {
            cursor_.reset();
            return std::nullopt;
        }
        started_ = true;
        while (!detail::is_generator_form(*cursor_)) {
            if (!detail::jump_invalid(*cursor_)) {
                cursor_.reset();
                return std::nullopt;
            }
        }
        ++index_;
        auto out = detail::lexmax_rooting(*cursor_);
        if (n_ == 1) cursor_.reset();
        return out;
    }

    /// Advances past k sequences; running off the end leaves the stream
    /// exhausted.
    FreeTreeStream& skip(std::uint64_t k) {
        for (std::uint64_t i = 0; i < k; ++i) {
            if (!next()) break;
        }
        return *this;
    }

private:
    int n_;
    std::optional<LevelSequence> cursor_;
    bool started_ = false;
    std::uint64_t index_ = 0;
};

inline FreeTreeStream free_trees(int n) { return FreeTreeStream(n); }

inline FreeTreeStream skip(FreeTreeStream stream, std::uint64_t k) {
    stream.skip(k);
    return stream;
}

inline std::uint64_t count_free_trees_enumerated(int n) {
    auto stream = free_trees(n);
    std::uint64_t count = 0;
    while (stream.next()) ++count;
    return count;
}

/// Free-tree count from Otter's formula over the rooted-tree numbers
/// r(1..n). Exact for n <= 45.
inline std::uint64_t oracle_count_otter(int n) {
    if (n < 1 || n > 45) throw std::invalid_argument("oracle_count_otter: n must be in [1, 45]");
    using wide = unsigned __int128;
    std::vector<wide> r(n + 1, 0);
    r[1] = 1;
    // s[k] = sum over d | k of d * r(d)
    std::vector<wide> s(n + 1, 0);
    for (int m = 1; m < n; ++m) {
        for (int d = 1; d <= m; ++d) {
            if (m % d == 0) s[m] += static_cast<wide>(d) * r[d];
        }
        wide acc = 0;
        for (int k = 1; k <= m; ++k) acc += s[k] * r[m - k + 1];
        r[m + 1] = acc / static_cast<wide>(m);
    }
    wide pairs = 0;
    for (int i = 1; i < n; ++i) pairs += r[i] * r[n - i];
    if (n % 2 == 0) pairs -= r[n / 2];
    return static_cast<std::uint64_t>(r[n] - pairs / 2);
}

}  // namespace harmonious

#endif  // HARMONIOUS_TREE_ENUM_HPP
