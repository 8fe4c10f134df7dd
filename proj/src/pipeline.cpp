#include "flowseq/pipeline.hpp"

#include "flowseq/error.hpp"

#include <unordered_set>

namespace flowseq {

GestureDictionary build_dictionary(std::span<const TrainingGesture> gestures, const PipelineConfig& config) {
    if (gestures.empty()) throw InvalidInput("build_dictionary: no gestures");
    config.segmentation.validate();
    if (!(config.tau > 0.0)) throw InvalidInput("build_dictionary: tau must be positive");

    std::unordered_set<std::string> names;
    // segmented[g][r] = partial action images of repetition r of gesture g
    std::vector<std::vector<PartialActionSequence>> segmented;
    std::vector<AppearanceVector> all_vectors;
    for (const auto& g : gestures) {
        if (!names.insert(g.name).second) throw InvalidInput("build_dictionary: duplicate gesture '" + g.name + "'");
        if (g.repetitions.size() < 2) {
            throw InvalidInput("build_dictionary: gesture '" + g.name + "' needs at least 2 repetitions");
        }
        auto& reps = segmented.emplace_back();
        for (const auto& seq : g.repetitions) reps.push_back(segment(seq, config.segmentation));

        const std::size_t count = reps.front().size();
        for (std::size_t r = 0; r < reps.size(); ++r) {
            if (reps[r].size() != count) {
                throw AlignmentError("gesture '" + g.name + "': repetition " + std::to_string(r + 1) + " has " +
                                     std::to_string(reps[r].size()) + " partial actions, repetition 1 has " +
                                     std::to_string(count));
            }
        }
        if (count == 0) throw AlignmentError("gesture '" + g.name + "': repetitions contain no partial actions");
        for (int i : g.important) {
            if (i < 1 || i > static_cast<int>(count)) {
                throw BuildError("gesture '" + g.name + "': important index " + std::to_string(i) + " outside [1, " +
                                 std::to_string(count) + "]");
            }
        }
        for (const auto& rep : reps) {
            for (const auto& a : rep.actions) all_vectors.push_back(vectorize(a));
        }
    }

    GestureDictionary dict;
    dict.tau = config.tau;
    dict.segmentation = config.segmentation;
    try {
        dict.eigenspace = fit_eigenspace(all_vectors, config.k);
    } catch (const InvalidInput& e) {
        throw BuildError(std::string("eigenspace: ") + e.what());
    } catch (const DegenerateData& e) {
        throw BuildError(std::string("eigenspace: ") + e.what());
    }

    for (std::size_t g = 0; g < gestures.size(); ++g) {
        GestureEntry entry{gestures[g].name, {}, gestures[g].important};
        const auto& reps = segmented[g];
        for (std::size_t i = 0; i < reps.front().size(); ++i) {
            std::vector<FeatureVector> features;
            features.reserve(reps.size());
            for (const auto& rep : reps) features.push_back(dict.eigenspace.project(vectorize(rep.actions[i])));
            try {
                entry.clusters.push_back(fit_cluster(features, config.ridge));
            } catch (const DegenerateData& e) {
                throw BuildError("gesture '" + entry.name + "', partial action " + std::to_string(i + 1) + ": " +
                                 e.what());
            }
        }
        dict.entries.push_back(std::move(entry));
    }
    dict.validate();
    return dict;
}

std::vector<FeatureVector> extract_features(const EigenspaceModel& model, const FlowSequence& seq,
                                            const SegmentationParams& params) {
    const auto actions = segment(seq, params);
    std::vector<FeatureVector> out;
    out.reserve(actions.size());
    for (const auto& a : actions.actions) out.push_back(model.project(vectorize(a)));
    return out;
}

int EvaluationReport::total() const {
    int n = 0;
    for (const auto& [_, s] : per_gesture) n += s.total;
    return n;
}

int EvaluationReport::correct_focused() const {
    int n = 0;
    for (const auto& [_, s] : per_gesture) n += s.correct_focused;
    return n;
}

int EvaluationReport::correct_unfocused() const {
    int n = 0;
    for (const auto& [_, s] : per_gesture) n += s.correct_unfocused;
    return n;
}

double EvaluationReport::average_focused() const {
    if (per_gesture.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [_, s] : per_gesture) sum += s.focused_rate();
    return sum / static_cast<double>(per_gesture.size());
}

double EvaluationReport::average_unfocused() const {
    if (per_gesture.empty()) return 0.0;
    double sum = 0.0;
    for (const auto& [_, s] : per_gesture) sum += s.unfocused_rate();
    return sum / static_cast<double>(per_gesture.size());
}

EvaluationReport evaluate(const GestureDictionary& dict, std::span<const LabeledSequence> tests) {
    EvaluationReport report;
    for (const auto& t : tests) {
        auto& score = report.per_gesture[t.name];
        ++score.total;
        const auto features = extract_features(dict.eigenspace, t.flows, dict.segmentation);
        if (features.empty()) continue;
        const auto focused = recognize(dict, features, RecognizeOptions{true});
        const auto unfocused = recognize(dict, features, RecognizeOptions{false});
        if (focused.front().name == t.name) ++score.correct_focused;
        if (unfocused.front().name == t.name) ++score.correct_unfocused;
    }
    return report;
}

FlowSequence flow_from_frames(std::span<const GrayFrame> frames, double dt, const FlowParams& params) {
    if (frames.size() < 2) throw InvalidInput("flow_from_frames: need at least 2 frames");
    if (!(dt > 0.0)) throw InvalidInput("flow_from_frames: dt must be positive");
    FlowSequence seq;
    seq.dt = dt;
    for (std::size_t i = 0; i + 1 < frames.size(); ++i) {
        seq.frames.push_back(scale_flow(compute_flow(frames[i], frames[i + 1], params), 1.0 / dt));
    }
    return seq;
}

} // namespace flowseq
