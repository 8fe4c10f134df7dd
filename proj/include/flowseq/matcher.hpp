#pragma once

#include "flowseq/dictionary.hpp"

#include <functional>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace flowseq {

/// matches(i, j) over 1-based positions i of P (horizontal axis) and j of Q
/// (vertical axis). Must be deterministic and side-effect free.
using MatchRelation = std::function<bool(int i, int j)>;

/// Relation for symbolic sequences: P[i-1] == Q[j-1].
template <class T>
MatchRelation equality_relation(std::span<const T> p, std::span<const T> q) {
    return [p, q](int i, int j) { return p[static_cast<std::size_t>(i - 1)] == q[static_cast<std::size_t>(j - 1)]; };
}

/// mahalanobis(clusters[i-1], features[j-1]) <= tau, evaluated eagerly so the
/// relation does not refer back to its inputs.
MatchRelation cluster_relation(std::span<const Cluster> clusters, std::span<const FeatureVector> features,
                               double tau);

/// Edit graph over P (length m, horizontal) and Q (length n, vertical).
///
/// Node V(i, j), 0 <= i <= m, 0 <= j <= n. Edges:
///   horizontal V(i-1, j) -> V(i, j), cost 1, or m + n when column i is important;
///   vertical   V(i, j-1) -> V(i, j), cost 1;
///   diagonal   V(i-1, j-1) -> V(i, j), cost 0, present only when matches(i, j).
class MatchGraph {
public:
    /// Throws InvalidInput when m or n is < 1 or an important index lies outside [1, m].
    MatchGraph(int m, int n, const MatchRelation& relation, const std::set<int>& important = {});

    int m() const { return m_; }
    int n() const { return n_; }
    const std::set<int>& important() const { return important_; }

    bool has_diagonal(int i, int j) const { return diagonal_[cell(i, j)] != 0; }
    int horizontal_cost(int i) const { return important_column_[static_cast<std::size_t>(i)] ? m_ + n_ : 1; }
    static constexpr int vertical_cost() { return 1; }
    static constexpr int diagonal_cost() { return 0; }

    int diagonal_count() const;
    /// Diagonal edges as (i, j) pairs in row-major order of i then j.
    std::vector<std::pair<int, int>> diagonals() const;

private:
    std::size_t cell(int i, int j) const { return static_cast<std::size_t>(i - 1) * n_ + (j - 1); }

    int m_;
    int n_;
    std::vector<unsigned char> diagonal_;
    std::vector<unsigned char> important_column_;
    std::set<int> important_;
};

struct MatchResult {
    int lcs_length = 0;
    /// (i, j) endpoints of the diagonal steps on the chosen path, 1-based.
    std::vector<std::pair<int, int>> matched_pairs;
    int total_cost = 0;
    double similarity = 0.0;
    /// True when every important column is crossed by a diagonal step.
    bool importance_satisfied = true;

    friend bool operator==(const MatchResult&, const MatchResult&) = default;
};

/// Minimum-cost path from V(0, 0) to V(m, n) by Dijkstra. Among equal-cost
/// paths the one whose move sequence is lexicographically smallest under
/// diagonal < horizontal < vertical is returned.
MatchResult min_cost_path(const MatchGraph& graph);

/// lcs_length / max(p_len, q_len)
double similarity(int p_len, int q_len, int lcs_length);

struct RankedMatch {
    std::string name;
    MatchResult result;
};

struct RecognizeOptions {
    /// When false every important set is treated as empty.
    bool focus = true;
};

/// Matches `query` against every dictionary entry and returns entries by
/// similarity descending, ties by name ascending.
std::vector<RankedMatch> recognize(const GestureDictionary& dict, std::span<const FeatureVector> query,
                                   const RecognizeOptions& options = {});

} // namespace flowseq
