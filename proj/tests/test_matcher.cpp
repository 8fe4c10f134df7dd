#include "flowseq/error.hpp"
#include "flowseq/matcher.hpp"
#include "support/oracles.hpp"

#include <gtest/gtest.h>

#include <random>
#include <string>

using namespace flowseq;

namespace {

const std::string kX = "ABCAEFG";
const std::string kY = "AHCIFJ";

MatchRelation chars(const std::string& p, const std::string& q) {
    return equality_relation<char>(std::span<const char>(p), std::span<const char>(q));
}

std::string matched_elements(const std::string& p, const MatchResult& r) {
    std::string out;
    for (const auto& [i, j] : r.matched_pairs) out.push_back(p[static_cast<std::size_t>(i - 1)]);
    return out;
}

Cluster unit_cluster(Eigen::VectorXd mean) {
    return Cluster(std::move(mean), Eigen::MatrixXd::Identity(2, 2));
}

GestureDictionary toy_dictionary() {
    GestureDictionary d;
    d.eigenspace = EigenspaceModel(Eigen::VectorXd::Zero(2), Eigen::MatrixXd::Identity(2, 2), Eigen::Vector2d(2.0, 1.0));
    d.tau = 3.0;
    d.entries.push_back(GestureEntry{"alpha", {unit_cluster(Eigen::Vector2d(0, 0)), unit_cluster(Eigen::Vector2d(10, 0))}, {}});
    d.entries.push_back(GestureEntry{"beta", {unit_cluster(Eigen::Vector2d(0, 10)), unit_cluster(Eigen::Vector2d(10, 10))}, {}});
    return d;
}

} // namespace

TEST(MatchGraph, WorkedExampleDiagonalsSitAtMatchingElements) {
    const MatchGraph g(7, 6, chars(kX, kY));
    const std::vector<std::pair<int, int>> expected{{1, 1}, {3, 3}, {4, 1}, {6, 5}};
    EXPECT_EQ(g.diagonals(), expected);
    for (int i = 1; i <= 7; ++i) EXPECT_EQ(g.horizontal_cost(i), 1);
}

TEST(MatchGraph, ImportantColumnInflatesEveryHorizontalEdgeEnteringIt) {
    const MatchGraph g(7, 6, chars(kX, kY), {4});
    // one horizontal edge V(3,j) -> V(4,j) per row j = 0..6, all at m + n
    EXPECT_EQ(g.horizontal_cost(4), 13);
    for (int i : {1, 2, 3, 5, 6, 7}) EXPECT_EQ(g.horizontal_cost(i), 1);
    EXPECT_EQ(MatchGraph::vertical_cost(), 1);
    EXPECT_EQ(MatchGraph::diagonal_cost(), 0);
}

TEST(MatchGraph, SingleCellWithoutMatch) {
    const MatchGraph g(1, 1, [](int, int) { return false; });
    EXPECT_EQ(g.diagonal_count(), 0);
    const auto r = min_cost_path(g);
    EXPECT_EQ(r.total_cost, 2);
    EXPECT_EQ(r.lcs_length, 0);
    EXPECT_DOUBLE_EQ(r.similarity, 0.0);
}

TEST(MatchGraph, RejectsBadShapes) {
    const auto never = [](int, int) { return false; };
    EXPECT_THROW(MatchGraph(0, 3, never), InvalidInput);
    EXPECT_THROW(MatchGraph(3, 0, never), InvalidInput);
    EXPECT_THROW(MatchGraph(3, 3, never, {4}), InvalidInput);
    EXPECT_THROW(MatchGraph(3, 3, never, {0}), InvalidInput);
}

TEST(MinCostPath, WorkedExampleWithoutFocus) {
    const auto r = min_cost_path(MatchGraph(7, 6, chars(kX, kY)));
    EXPECT_EQ(r.lcs_length, 3);
    EXPECT_EQ(matched_elements(kX, r), "ACF");
    EXPECT_EQ(r.similarity, 3.0 / 7.0);
    EXPECT_EQ(r.total_cost, 7 + 6 - 2 * 3);
    EXPECT_TRUE(r.importance_satisfied);
}

TEST(MinCostPath, WorkedExampleFocusedOnFourthElement) {
    const auto r = min_cost_path(MatchGraph(7, 6, chars(kX, kY), {4}));
    EXPECT_EQ(r.lcs_length, 2);
    EXPECT_EQ(matched_elements(kX, r), "AF");
    const std::vector<std::pair<int, int>> pairs{{4, 1}, {6, 5}};
    EXPECT_EQ(r.matched_pairs, pairs);
    EXPECT_EQ(r.similarity, 2.0 / 7.0);
    // 3 horizontals to V(3,0), free diagonal, then 3 + 5 - 2 moves to V(7,6)
    EXPECT_EQ(r.total_cost, 9);
    EXPECT_TRUE(r.importance_satisfied);
}

TEST(MinCostPath, IdenticalSequencesAreAllDiagonal) {
    const std::string s = "ABCABD";
    const auto r = min_cost_path(MatchGraph(6, 6, chars(s, s)));
    EXPECT_EQ(r.lcs_length, 6);
    EXPECT_EQ(r.total_cost, 0);
    EXPECT_DOUBLE_EQ(r.similarity, 1.0);
}

TEST(MinCostPath, TieBreakPrefersHorizontalOverVertical) {
    // "AB" vs "BA": both single matches are optimal; the lexicographic rule
    // moves right first and so matches the B.
    const auto r = min_cost_path(MatchGraph(2, 2, chars("AB", "BA")));
    const std::vector<std::pair<int, int>> pairs{{2, 1}};
    EXPECT_EQ(r.matched_pairs, pairs);
    EXPECT_EQ(r.total_cost, 2);
}

TEST(MinCostPath, UnmatchableImportantColumnPaysOnceAndIsReported) {
    const std::string p = "AZB";
    const std::string q = "AB";
    const auto r = min_cost_path(MatchGraph(3, 2, chars(p, q), {2}));
    EXPECT_FALSE(r.importance_satisfied);
    EXPECT_EQ(r.lcs_length, 2);
    EXPECT_EQ(r.total_cost, 3 + 2);
}

TEST(Similarity, Examples) {
    EXPECT_EQ(similarity(7, 6, 3), 3.0 / 7.0);
    EXPECT_EQ(similarity(5, 5, 5), 1.0);
    EXPECT_EQ(similarity(5, 5, 0), 0.0);
    EXPECT_THROW(similarity(0, 5, 0), InvalidInput);
    EXPECT_THROW(similarity(3, 5, 4), InvalidInput);
}

TEST(MatcherProperties, RandomSequences) {
    std::mt19937 rng(12345);
    for (int trial = 0; trial < 1500; ++trial) {
        const int alphabet = 2 + static_cast<int>(rng() % 4);
        const int m = 1 + static_cast<int>(rng() % 25);
        const int n = 1 + static_cast<int>(rng() % 25);
        std::string p(static_cast<std::size_t>(m), 'a');
        std::string q(static_cast<std::size_t>(n), 'a');
        for (auto& c : p) c = static_cast<char>('a' + rng() % alphabet);
        for (auto& c : q) c = static_cast<char>('a' + rng() % alphabet);
        const auto rel = chars(p, q);
        SCOPED_TRACE(p + " / " + q);

        const auto plain = min_cost_path(MatchGraph(m, n, rel));
        const int oracle = flowseq::testing::dp_lcs_length(m, n, rel);
        ASSERT_EQ(plain.lcs_length, oracle);
        ASSERT_EQ(plain.total_cost, m + n - 2 * oracle);
        ASSERT_GE(plain.similarity, 0.0);
        ASSERT_LE(plain.similarity, 1.0);
        for (std::size_t k = 1; k < plain.matched_pairs.size(); ++k) {
            ASSERT_LT(plain.matched_pairs[k - 1].first, plain.matched_pairs[k].first);
            ASSERT_LT(plain.matched_pairs[k - 1].second, plain.matched_pairs[k].second);
        }
        for (const auto& [i, j] : plain.matched_pairs) ASSERT_TRUE(rel(i, j));

        const auto swapped = min_cost_path(MatchGraph(n, m, chars(q, p)));
        ASSERT_EQ(swapped.lcs_length, plain.lcs_length);

        // Adding important columns never lengthens the LCS unless the new
        // path gives up a column the previous path crossed diagonally (two
        // important columns competing for the same matches).
        std::set<int> important;
        MatchResult previous = plain;
        const auto diagonal_columns = [](const MatchResult& r, const std::set<int>& cols) {
            int count = 0;
            for (const auto& [i, j] : r.matched_pairs) count += cols.count(i) ? 1 : 0;
            return count;
        };
        for (int add = 0; add < 3; ++add) {
            const std::set<int> before = important;
            important.insert(1 + static_cast<int>(rng() % m));
            const auto focused = min_cost_path(MatchGraph(m, n, rel, important));
            ASSERT_LE(focused.lcs_length, plain.lcs_length);
            if (focused.lcs_length > previous.lcs_length) {
                ASSERT_LT(diagonal_columns(focused, before), diagonal_columns(previous, before));
            }
            previous = focused;

            bool every_column_matchable = true;
            for (int k : important) {
                bool any = false;
                for (int j = 1; j <= n; ++j) any = any || rel(k, j);
                every_column_matchable = every_column_matchable && any;
            }
            if (every_column_matchable && important.size() == 1) {
                ASSERT_TRUE(focused.importance_satisfied);
            }
            if (!focused.importance_satisfied) {
                ASSERT_GE(focused.total_cost, m + n);
            }
        }
    }
}

TEST(Recognize, OwnClusterMeansRankFirstWithFullSimilarity) {
    const auto d = toy_dictionary();
    const std::vector<FeatureVector> q{Eigen::Vector2d(0, 10), Eigen::Vector2d(10, 10)};
    const auto ranked = recognize(d, q);
    ASSERT_EQ(ranked.size(), 2u);
    EXPECT_EQ(ranked[0].name, "beta");
    EXPECT_DOUBLE_EQ(ranked[0].result.similarity, 1.0);
    EXPECT_DOUBLE_EQ(ranked[1].result.similarity, 0.0);
}

TEST(Recognize, FarQueryMatchesNothingAndTiesSortByName) {
    const auto d = toy_dictionary();
    const std::vector<FeatureVector> q{Eigen::Vector2d(-50, -50)};
    const auto ranked = recognize(d, q);
    EXPECT_EQ(ranked[0].name, "alpha");
    EXPECT_EQ(ranked[1].name, "beta");
    for (const auto& r : ranked) EXPECT_EQ(r.result.similarity, 0.0);
}

TEST(Recognize, ImportantFlagCanOnlyLowerSimilarity) {
    auto d = toy_dictionary();
    d.entries[1] = GestureEntry{"beta", d.entries[0].clusters, {}};
    d.entries[1].clusters.push_back(unit_cluster(Eigen::Vector2d(0, 0)));
    d.entries[1].important = {3};
    d.entries[0].clusters.push_back(unit_cluster(Eigen::Vector2d(0, 0)));
    // the third cluster (a repeat of the first) matches only the opening element
    const std::vector<FeatureVector> q{Eigen::Vector2d(0, 0), Eigen::Vector2d(10, 0), Eigen::Vector2d(30, 30)};
    const auto focused = recognize(d, q);
    const auto unfocused = recognize(d, q, RecognizeOptions{false});
    const auto sim = [](const std::vector<RankedMatch>& r, const std::string& n) {
        for (const auto& x : r)
            if (x.name == n) return x.result.similarity;
        return -1.0;
    };
    EXPECT_LE(sim(focused, "beta"), sim(focused, "alpha"));
    EXPECT_DOUBLE_EQ(sim(unfocused, "beta"), sim(unfocused, "alpha"));
    EXPECT_LT(sim(focused, "beta"), sim(unfocused, "beta"));
}

TEST(Recognize, RejectsEmptyInputs) {
    auto d = toy_dictionary();
    EXPECT_THROW(recognize(d, std::vector<FeatureVector>{}), InvalidInput);
    EXPECT_THROW(recognize(d, std::vector<FeatureVector>{Eigen::Vector3d(0, 0, 0)}), InvalidInput);
    d.entries.clear();
    EXPECT_THROW(recognize(d, std::vector<FeatureVector>{Eigen::Vector2d(0, 0)}), InvalidInput);
}
