#include "flowseq/matcher.hpp"

#include "flowseq/error.hpp"

#include <algorithm>
#include <cstdint>
#include <limits>
#include <memory>
#include <queue>

namespace flowseq {

MatchRelation cluster_relation(std::span<const Cluster> clusters, std::span<const FeatureVector> features,
                               double tau) {
    const auto m = clusters.size();
    const auto n = features.size();
    auto table = std::make_shared<std::vector<unsigned char>>(m * n, 0);
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            (*table)[i * n + j] = mahalanobis(clusters[i], features[j]) <= tau ? 1 : 0;
        }
    }
    return [table, n](int i, int j) {
        return (*table)[static_cast<std::size_t>(i - 1) * n + static_cast<std::size_t>(j - 1)] != 0;
    };
}

MatchGraph::MatchGraph(int m, int n, const MatchRelation& relation, const std::set<int>& important)
    : m_(m), n_(n), important_(important) {
    if (m < 1 || n < 1) {
        throw InvalidInput("MatchGraph: sequence lengths must be >= 1 (got m=" + std::to_string(m) +
                           ", n=" + std::to_string(n) + ")");
    }
    important_column_.assign(static_cast<std::size_t>(m) + 1, 0);
    for (int k : important) {
        if (k < 1 || k > m) {
            throw InvalidInput("MatchGraph: important index " + std::to_string(k) + " outside [1, " +
                               std::to_string(m) + "]");
        }
        important_column_[static_cast<std::size_t>(k)] = 1;
    }
    diagonal_.assign(static_cast<std::size_t>(m) * n, 0);
    for (int i = 1; i <= m; ++i) {
        for (int j = 1; j <= n; ++j) {
            diagonal_[cell(i, j)] = relation(i, j) ? 1 : 0;
        }
    }
}

int MatchGraph::diagonal_count() const {
    return static_cast<int>(std::count(diagonal_.begin(), diagonal_.end(), static_cast<unsigned char>(1)));
}

std::vector<std::pair<int, int>> MatchGraph::diagonals() const {
    std::vector<std::pair<int, int>> out;
    for (int i = 1; i <= m_; ++i) {
        for (int j = 1; j <= n_; ++j) {
            if (has_diagonal(i, j)) out.emplace_back(i, j);
        }
    }
    return out;
}

MatchResult min_cost_path(const MatchGraph& g) {
    const int m = g.m();
    const int n = g.n();
    const auto node = [n](int i, int j) { return static_cast<std::size_t>(i) * (n + 1) + j; };
    constexpr auto kInf = std::numeric_limits<std::int64_t>::max();

    // Dijkstra over reversed edges, rooted at V(m, n): remaining[v] is the
    // cheapest cost from v to the sink. The forward walk below then picks the
    // lexicographically first optimal move at each node.
    std::vector<std::int64_t> remaining(node(m, n) + 1, kInf);
    std::vector<unsigned char> settled(remaining.size(), 0);
    using Item = std::pair<std::int64_t, std::size_t>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> queue;
    remaining[node(m, n)] = 0;
    queue.emplace(0, node(m, n));

    const auto relax = [&](int i, int j, std::int64_t cost) {
        const auto v = node(i, j);
        if (cost < remaining[v]) {
            remaining[v] = cost;
            queue.emplace(cost, v);
        }
    };

    while (!queue.empty()) {
        const auto [d, v] = queue.top();
        queue.pop();
        if (settled[v]) continue;
        settled[v] = 1;
        const int i = static_cast<int>(v / (n + 1));
        const int j = static_cast<int>(v % (n + 1));
        if (i > 0) relax(i - 1, j, d + g.horizontal_cost(i));
        if (j > 0) relax(i, j - 1, d + MatchGraph::vertical_cost());
        if (i > 0 && j > 0 && g.has_diagonal(i, j)) relax(i - 1, j - 1, d + MatchGraph::diagonal_cost());
    }

    MatchResult result;
    result.total_cost = static_cast<int>(remaining[node(0, 0)]);
    int i = 0;
    int j = 0;
    while (i < m || j < n) {
        const auto here = remaining[node(i, j)];
        if (i < m && j < n && g.has_diagonal(i + 1, j + 1) && remaining[node(i + 1, j + 1)] == here) {
            ++i;
            ++j;
            result.matched_pairs.emplace_back(i, j);
        } else if (i < m && remaining[node(i + 1, j)] + g.horizontal_cost(i + 1) == here) {
            ++i;
        } else {
            ++j;
        }
    }

    result.lcs_length = static_cast<int>(result.matched_pairs.size());
    result.similarity = similarity(m, n, result.lcs_length);
    for (int k : g.important()) {
        const bool crossed = std::any_of(result.matched_pairs.begin(), result.matched_pairs.end(),
                                         [k](const auto& p) { return p.first == k; });
        if (!crossed) {
            result.importance_satisfied = false;
            break;
        }
    }
    return result;
}

double similarity(int p_len, int q_len, int lcs_length) {
    if (p_len < 1 || q_len < 1) throw InvalidInput("similarity: lengths must be >= 1");
    if (lcs_length < 0 || lcs_length > std::min(p_len, q_len)) {
        throw InvalidInput("similarity: lcs_length outside [0, min(p_len, q_len)]");
    }
    return static_cast<double>(lcs_length) / static_cast<double>(std::max(p_len, q_len));
}

std::vector<RankedMatch> recognize(const GestureDictionary& dict, std::span<const FeatureVector> query,
                                   const RecognizeOptions& options) {
    if (dict.entries.empty()) throw InvalidInput("recognize: empty dictionary");
    if (query.empty()) throw InvalidInput("recognize: empty query sequence");
    for (const auto& u : query) {
        if (u.size() != dict.eigenspace.k()) {
            throw InvalidInput("recognize: query feature dimension " + std::to_string(u.size()) +
                               " differs from dictionary k=" + std::to_string(dict.eigenspace.k()));
        }
    }

    std::vector<RankedMatch> ranked;
    ranked.reserve(dict.entries.size());
    const std::set<int> none;
    for (const auto& entry : dict.entries) {
        const MatchGraph graph(static_cast<int>(entry.clusters.size()), static_cast<int>(query.size()),
                               cluster_relation(entry.clusters, query, dict.tau),
                               options.focus ? entry.important : none);
        ranked.push_back(RankedMatch{entry.name, min_cost_path(graph)});
    }
    std::sort(ranked.begin(), ranked.end(), [](const RankedMatch& a, const RankedMatch& b) {
        if (a.result.similarity != b.result.similarity) return a.result.similarity > b.result.similarity;
        return a.name < b.name;
    });
    return ranked;
}

} // namespace flowseq
