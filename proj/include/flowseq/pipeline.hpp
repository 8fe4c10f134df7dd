#pragma once

#include "flowseq/dictionary.hpp"
#include "flowseq/flow.hpp"
#include "flowseq/matcher.hpp"
#include "flowseq/segmentation.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

namespace flowseq {

struct PipelineConfig {
    FlowParams flow;
    SegmentationParams segmentation;
    int k = 4;
    double tau = 3.0;
    /// Cluster ridge; unset selects the trace-scaled default of fit_cluster.
    std::optional<double> ridge;
    std::uint64_t seed = 0;
};

struct TrainingGesture {
    std::string name;
    std::vector<FlowSequence> repetitions;
    /// 1-based partial action positions flagged as important.
    std::set<int> important;
};

/// Segments every repetition, fits one eigenspace over all partial action
/// images of all gestures, and fits one cluster per partial action position.
/// The i-th partial action of each repetition joins cluster i, so every
/// repetition of a gesture must yield the same number of partial actions.
///
/// Throws AlignmentError naming the gesture when counts disagree, and
/// BuildError for eigenspace or cluster failures and bad important indices.
GestureDictionary build_dictionary(std::span<const TrainingGesture> gestures, const PipelineConfig& config);

/// Segments a flow sequence and projects its partial actions into the eigenspace.
std::vector<FeatureVector> extract_features(const EigenspaceModel& model, const FlowSequence& seq,
                                            const SegmentationParams& params);

struct LabeledSequence {
    std::string name;
    FlowSequence flows;
};

struct GestureScore {
    int total = 0;
    int correct_focused = 0;
    int correct_unfocused = 0;

    double focused_rate() const { return total ? static_cast<double>(correct_focused) / total : 0.0; }
    double unfocused_rate() const { return total ? static_cast<double>(correct_unfocused) / total : 0.0; }
};

struct EvaluationReport {
    /// Per true gesture name.
    std::map<std::string, GestureScore> per_gesture;

    int total() const;
    int correct_focused() const;
    int correct_unfocused() const;
    /// Mean of the per-gesture rates (0 when empty).
    double average_focused() const;
    double average_unfocused() const;
};

/// Top-1 recognition of every labeled sequence with and without focusing on
/// important partial actions. A query that yields no partial actions counts as
/// a miss in both modes.
EvaluationReport evaluate(const GestureDictionary& dict, std::span<const LabeledSequence> tests);

/// Flow sequence from consecutive greyscale frames sampled every `dt` seconds.
FlowSequence flow_from_frames(std::span<const GrayFrame> frames, double dt, const FlowParams& params);

} // namespace flowseq
