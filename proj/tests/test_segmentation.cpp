#include "flowseq/error.hpp"
#include "flowseq/segmentation.hpp"

#include <gtest/gtest.h>

#include <queue>
#include <random>

using namespace flowseq;

namespace {

FlowSequence single_blob(int frames, Vec2 velocity, double radius = 3.0) {
    SyntheticGestureSpec spec;
    spec.width = 40;
    spec.height = 30;
    spec.frame_count = frames;
    spec.blobs.push_back(BlobTrack{{10, 15}, {velocity}, radius, 0, frames - 1});
    return synthesize(spec);
}

FlowSequence random_blobs(std::mt19937& rng) {
    std::uniform_real_distribution<double> pos(6.0, 34.0);
    std::uniform_real_distribution<double> vel(-2.0, 2.0);
    SyntheticGestureSpec spec;
    spec.width = 40;
    spec.height = 30;
    spec.frame_count = 6 + static_cast<int>(rng() % 5);
    spec.noise = 0.3;
    spec.seed = rng();
    const int blobs = 1 + static_cast<int>(rng() % 3);
    for (int b = 0; b < blobs; ++b) {
        const int first = static_cast<int>(rng() % 3);
        const int last = first + 2 + static_cast<int>(rng() % static_cast<unsigned>(spec.frame_count - first - 2));
        spec.blobs.push_back(BlobTrack{{pos(rng), std::min(pos(rng), 24.0)}, {{vel(rng), vel(rng)}}, 3.0, first, last});
    }
    return synthesize(spec);
}

} // namespace

TEST(Compatible, Rules) {
    EXPECT_TRUE(compatible({1, 0}, {1, 0.9}, 45.0));
    EXPECT_FALSE(compatible({1, 0}, {0, 1}, 45.0));
    EXPECT_TRUE(compatible({0, 0}, {0, 0}, 45.0));
    EXPECT_FALSE(compatible({0, 0}, {1, 0}, 45.0));
    EXPECT_FALSE(compatible({1, 0}, {0, 0}, 180.0));
}

TEST(SpatialLabel, SplitsOpposingDirections) {
    FlowField f(4, 1);
    f.set(0, 0, {1, 0});
    f.set(1, 0, {1, 0});
    f.set(2, 0, {-1, 0});
    f.set(3, 0, {-1, 0});
    int next = 1;
    const auto l = spatial_label(f, std::nullopt, SegmentationParams{}, next);
    EXPECT_EQ(l.labels, (std::vector<int>{1, 1, 2, 2}));
    EXPECT_EQ(next, 3);
}

TEST(SpatialLabel, DiagonalNeighboursConnectAndGapsSeparate) {
    FlowField f(5, 3);
    f.set(0, 0, {1, 0});
    f.set(1, 1, {1, 0.2});
    f.set(4, 2, {1, 0});
    int next = 5;
    const auto l = spatial_label(f, std::nullopt, SegmentationParams{}, next);
    EXPECT_EQ(l.label(0, 0), 5);
    EXPECT_EQ(l.label(1, 1), 5);
    EXPECT_EQ(l.label(4, 2), 6);
    EXPECT_EQ(l.label(2, 2), 0);
    EXPECT_EQ(next, 7);
}

TEST(SpatialLabel, SeedsGrowBeforeFreshLabels) {
    FlowField f(3, 1);
    f.set(0, 0, {1, 0});
    f.set(1, 0, {1, 0});
    f.set(2, 0, {1, 0});
    const std::vector<int> seeds{0, 0, 9};
    int next = 10;
    const auto l = spatial_label(f, std::span<const int>(seeds), SegmentationParams{}, next);
    EXPECT_EQ(l.labels, (std::vector<int>{9, 9, 9}));
    EXPECT_EQ(next, 10);
}

TEST(SpatialLabel, RejectsMisSizedSeeds) {
    FlowField f(3, 1);
    const std::vector<int> seeds{0, 0};
    int next = 1;
    EXPECT_THROW(spatial_label(f, std::span<const int>(seeds), SegmentationParams{}, next), InvalidInput);
}

TEST(PropagateLabels, FollowsTheVector) {
    FlowField a(6, 3);
    a.set(1, 1, {2, 0});
    int next = 1;
    const auto labeled = spatial_label(a, std::nullopt, SegmentationParams{}, next);
    FlowField b(6, 3);
    b.set(3, 1, {2, 0.1});
    const auto seeds = propagate_labels(labeled, b, 1.0, SegmentationParams{});
    EXPECT_EQ(seeds[b.index(3, 1)], 1);

    // incompatible or absent targets are not seeded
    FlowField c(6, 3);
    c.set(3, 1, {0, 2});
    EXPECT_EQ(propagate_labels(labeled, c, 1.0, SegmentationParams{})[c.index(3, 1)], 0);
    EXPECT_EQ(propagate_labels(labeled, FlowField(6, 3), 1.0, SegmentationParams{})[c.index(3, 1)], 0);
}

TEST(PropagateLabels, CollisionGoesToLowestLabel) {
    FlowField a(5, 1);
    a.set(0, 0, {2, 0});
    a.set(4, 0, {-2, 0});
    int next = 1;
    const auto labeled = spatial_label(a, std::nullopt, SegmentationParams{90.0, 3, Superposition::EarliestWins}, next);
    ASSERT_EQ(labeled.label(0, 0), 1);
    ASSERT_EQ(labeled.label(4, 0), 2);
    FlowField b(5, 1);
    b.set(2, 0, {0, 0});
    // both land on (2, 0); with a zero target neither is compatible
    EXPECT_EQ(propagate_labels(labeled, b, 1.0, {180.0, 3, Superposition::EarliestWins})[2], 0);
    b.set(2, 0, {1, 1});
    EXPECT_EQ(propagate_labels(labeled, b, 1.0, {180.0, 3, Superposition::EarliestWins})[2], 1);
}

TEST(Segment, OneMovingBlobGivesOneAction) {
    const auto pas = segment(single_blob(5, {2, 0}), SegmentationParams{});
    ASSERT_EQ(pas.size(), 1u);
    EXPECT_EQ(pas.actions[0].frame_span, (std::pair<int, int>{0, 4}));
    EXPECT_GT(pas.actions[0].image.present_count(), 0u);
}

TEST(Segment, ShortLivedBlobIsPruned) {
    EXPECT_TRUE(segment(single_blob(1, {2, 0}), SegmentationParams{}).empty());
    SegmentationParams keep;
    keep.min_frames = 1;
    EXPECT_EQ(segment(single_blob(1, {2, 0}), keep).size(), 1u);
}

TEST(Segment, SequentialBlobsInOrder) {
    SyntheticGestureSpec spec;
    spec.width = 40;
    spec.height = 30;
    spec.frame_count = 11;
    spec.blobs.push_back(BlobTrack{{8, 15}, {{2, 0}}, 3.0, 0, 4});
    spec.blobs.push_back(BlobTrack{{20, 6}, {{0, 2}}, 3.0, 6, 10});
    const auto pas = segment(synthesize(spec), SegmentationParams{});
    ASSERT_EQ(pas.size(), 2u);
    EXPECT_EQ(pas.actions[0].frame_span.first, 0);
    EXPECT_EQ(pas.actions[1].frame_span.first, 6);
    const auto mean_direction = [](const FlowField& f) {
        Vec2 s;
        for (std::size_t i = 0; i < f.size(); ++i) {
            if (f.present(i)) {
                s.x += f.at(i).x;
                s.y += f.at(i).y;
            }
        }
        return s;
    };
    EXPECT_LT(angle_between(mean_direction(pas.actions[0].image), {1, 0}), 1.0);
    EXPECT_LT(angle_between(mean_direction(pas.actions[1].image), {0, 1}), 1.0);
}

TEST(Segment, EmptySequenceIsRejected) {
    FlowSequence empty;
    EXPECT_THROW(segment(empty, SegmentationParams{}), InvalidInput);
}

TEST(SegmentationProperties, LabelsPartitionPresentCellsIntoCompatibleChains) {
    std::mt19937 rng(77);
    const SegmentationParams params;
    for (int trial = 0; trial < 40; ++trial) {
        const auto seq = random_blobs(rng);
        // first frame has no seeds, so each label is one compatible component
        int next = 1;
        const auto& flow = seq.frames.front();
        const auto l = spatial_label(flow, std::nullopt, params, next);
        for (std::size_t i = 0; i < flow.size(); ++i) ASSERT_EQ(flow.present(i), l.labels[i] != 0);
        for (int label = 1; label < next; ++label) {
            std::vector<char> seen(flow.size(), 0);
            std::size_t start = flow.size();
            std::size_t members = 0;
            for (std::size_t i = 0; i < flow.size(); ++i) {
                if (l.labels[i] == label) {
                    ++members;
                    if (start == flow.size()) start = i;
                }
            }
            ASSERT_GT(members, 0u);
            std::queue<std::size_t> q;
            q.push(start);
            seen[start] = 1;
            std::size_t reached = 0;
            while (!q.empty()) {
                const auto c = q.front();
                q.pop();
                ++reached;
                const int cx = static_cast<int>(c) % flow.width();
                const int cy = static_cast<int>(c) / flow.width();
                for (int dy = -1; dy <= 1; ++dy) {
                    for (int dx = -1; dx <= 1; ++dx) {
                        const int nx = cx + dx;
                        const int ny = cy + dy;
                        if (!flow.in_bounds(nx, ny)) continue;
                        const auto n = flow.index(nx, ny);
                        if (seen[n] || l.labels[n] != label) continue;
                        if (!compatible(flow.at(c), flow.at(n), params.angle_threshold)) continue;
                        seen[n] = 1;
                        q.push(n);
                    }
                }
            }
            ASSERT_EQ(reached, members);
        }

        for (const auto& lf : label_sequence(seq, params)) {
            for (std::size_t i = 0; i < lf.flow.size(); ++i) ASSERT_EQ(lf.flow.present(i), lf.labels[i] != 0);
        }
    }
}

TEST(SegmentationProperties, TrailingEmptyFramesChangeNothing) {
    std::mt19937 rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        auto seq = random_blobs(rng);
        const auto before = segment(seq, SegmentationParams{});
        for (int extra = 0; extra < 3; ++extra) seq.frames.emplace_back(seq.frames[0].width(), seq.frames[0].height());
        EXPECT_EQ(segment(seq, SegmentationParams{}), before);
    }
}

TEST(SegmentationProperties, ImageSupportIsUnionOfLabelCells) {
    std::mt19937 rng(13);
    for (auto mode : {Superposition::EarliestWins, Superposition::LatestWins, Superposition::Average}) {
        SegmentationParams params;
        params.superposition = mode;
        for (int trial = 0; trial < 15; ++trial) {
            const auto seq = random_blobs(rng);
            const auto labeled = label_sequence(seq, params);
            const auto pas = segment(seq, params);
            for (const auto& a : pas.actions) {
                int frames_seen = 0;
                std::vector<char> support(a.image.size(), 0);
                for (const auto& lf : labeled) {
                    bool here = false;
                    for (std::size_t i = 0; i < lf.labels.size(); ++i) {
                        if (lf.labels[i] == a.label) {
                            support[i] = 1;
                            here = true;
                        }
                    }
                    frames_seen += here;
                }
                EXPECT_GE(frames_seen, params.min_frames);
                for (std::size_t i = 0; i < support.size(); ++i) ASSERT_EQ(a.image.present(i), support[i] != 0);
            }
            for (std::size_t k = 1; k < pas.actions.size(); ++k) EXPECT_LT(pas.actions[k - 1].label, pas.actions[k].label);
        }
    }
}

TEST(SegmentationProperties, EarliestWinsKeepsFirstVector) {
    // short dt keeps the propagated target on the same cell
    FlowSequence seq;
    seq.dt = 0.1;
    for (int f = 0; f < 3; ++f) {
        FlowField frame(3, 1);
        frame.set(1, 0, {1.0 + f, 0});
        seq.frames.push_back(frame);
    }
    SegmentationParams p;
    p.superposition = Superposition::EarliestWins;
    EXPECT_EQ(segment(seq, p).actions.at(0).image.at(1, 0), (Vec2{1, 0}));
    p.superposition = Superposition::LatestWins;
    EXPECT_EQ(segment(seq, p).actions.at(0).image.at(1, 0), (Vec2{3, 0}));
    p.superposition = Superposition::Average;
    EXPECT_EQ(segment(seq, p).actions.at(0).image.at(1, 0), (Vec2{2, 0}));
}
