#pragma once

#include "flowseq/flow.hpp"

#include <optional>
#include <span>
#include <utility>
#include <vector>

namespace flowseq {

/// How a label's per-frame images are combined into one partial action image.
enum class Superposition {
    EarliestWins, ///< a later frame only fills cells no earlier frame occupied
    LatestWins,   ///< later frames overwrite
    Average,      ///< mean of every frame's vector at the cell
};

struct SegmentationParams {
    /// Maximum angle (degrees) between vectors that may share a label.
    double angle_threshold = 45.0;
    /// Labels seen in fewer frames than this are discarded as noise.
    int min_frames = 3;
    Superposition superposition = Superposition::EarliestWins;

    void validate() const;
};

/// Two present vectors are label-compatible when the angle between them is at
/// most the threshold. Zero vectors are only compatible with zero vectors.
bool compatible(const Vec2& u, const Vec2& v, double angle_threshold);

struct LabeledFlowField {
    FlowField flow;
    /// 0 = unlabeled, >= 1 label id; same layout as the flow grid.
    std::vector<int> labels;

    int label(int x, int y) const { return labels[flow.index(x, y)]; }
};

/// One image per surviving label: the label's vectors from all frames painted
/// onto a single canvas.
struct PartialActionImage {
    int label = 0;
    FlowField image;
    std::pair<int, int> frame_span{0, 0};

    friend bool operator==(const PartialActionImage&, const PartialActionImage&) = default;
};

struct PartialActionSequence {
    std::vector<PartialActionImage> actions;
    double dt = 1.0;

    bool empty() const { return actions.empty(); }
    std::size_t size() const { return actions.size(); }

    friend bool operator==(const PartialActionSequence&, const PartialActionSequence&) = default;
};

/// Labels one frame. Seeded labels grow first (seed cells in raster order),
/// then unlabeled present vectors found by raster scan receive fresh ids
/// starting at `next_label`, which is advanced past the last id used. Growth
/// follows 8-neighbours and only crosses pairs that are label-compatible.
LabeledFlowField spatial_label(const FlowField& flow, std::optional<std::span<const int>> seeds,
                               const SegmentationParams& params, int& next_label);

/// Carries labels into the next frame: the vector v at (m, n) seeds the cell at
/// (round(m + vx*dt), round(n + vy*dt)) in `next` when that cell is present and
/// compatible with v. On collisions the lowest label id wins.
std::vector<int> propagate_labels(const LabeledFlowField& labeled, const FlowField& next, double dt,
                                  const SegmentationParams& params);

/// Runs spatial labeling and propagation over all frames. Label ids are
/// contiguous from 1 across the sequence in order of first assignment.
std::vector<LabeledFlowField> label_sequence(const FlowSequence& seq, const SegmentationParams& params);

/// Full partial-action extraction: labeling, per-label extraction, pruning of
/// short-lived labels and superposition, ordered by label id.
PartialActionSequence segment(const FlowSequence& seq, const SegmentationParams& params);

} // namespace flowseq
