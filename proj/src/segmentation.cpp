#include "flowseq/segmentation.hpp"

#include "flowseq/error.hpp"

#include <array>
#include <cmath>
#include <deque>

namespace flowseq {

void SegmentationParams::validate() const {
    if (!(angle_threshold > 0.0 && angle_threshold <= 180.0)) {
        throw InvalidInput("SegmentationParams: angle_threshold must be in (0, 180]");
    }
    if (min_frames < 1) {
        throw InvalidInput("SegmentationParams: min_frames must be >= 1");
    }
}

bool compatible(const Vec2& u, const Vec2& v, double angle_threshold) {
    const bool uz = u.x == 0.0 && u.y == 0.0;
    const bool vz = v.x == 0.0 && v.y == 0.0;
    if (uz || vz) {
        return uz && vz;
    }
    return angle_between(u, v) <= angle_threshold;
}

namespace {

constexpr std::array<std::array<int, 2>, 8> kNeighbours{{
    {-1, -1}, {0, -1}, {1, -1}, {-1, 0}, {1, 0}, {-1, 1}, {0, 1}, {1, 1},
}};

// Breadth-first growth of the label at (x, y) into unlabeled compatible neighbours.
void grow(const FlowField& flow, std::vector<int>& labels, int x, int y, double threshold) {
    std::deque<std::pair<int, int>> queue;
    queue.emplace_back(x, y);
    while (!queue.empty()) {
        const auto [px, py] = queue.front();
        queue.pop_front();
        const int label = labels[flow.index(px, py)];
        const Vec2& pv = flow.at(px, py);
        for (const auto& [ox, oy] : kNeighbours) {
            const int qx = px + ox;
            const int qy = py + oy;
            if (!flow.in_bounds(qx, qy)) continue;
            const auto qi = flow.index(qx, qy);
            if (!flow.present(qi) || labels[qi] != 0) continue;
            if (!compatible(pv, flow.at(qi), threshold)) continue;
            labels[qi] = label;
            queue.emplace_back(qx, qy);
        }
    }
}

} // namespace

LabeledFlowField spatial_label(const FlowField& flow, std::optional<std::span<const int>> seeds,
                               const SegmentationParams& params, int& next_label) {
    params.validate();
    if (next_label < 1) {
        throw InvalidInput("spatial_label: next_label must be >= 1");
    }
    LabeledFlowField out{flow, std::vector<int>(flow.size(), 0)};
    auto& labels = out.labels;

    if (seeds) {
        if (seeds->size() != flow.size()) {
            throw InvalidInput("spatial_label: seed grid does not match flow dimensions");
        }
        for (std::size_t i = 0; i < flow.size(); ++i) {
            const int s = (*seeds)[i];
            if (s < 0) throw InvalidInput("spatial_label: negative seed label");
            if (s > 0 && flow.present(i)) labels[i] = s;
        }
        for (int y = 0; y < flow.height(); ++y) {
            for (int x = 0; x < flow.width(); ++x) {
                if ((*seeds)[flow.index(x, y)] > 0 && labels[flow.index(x, y)] > 0) {
                    grow(flow, labels, x, y, params.angle_threshold);
                }
            }
        }
    }

    for (int y = 0; y < flow.height(); ++y) {
        for (int x = 0; x < flow.width(); ++x) {
            const auto i = flow.index(x, y);
            if (flow.present(i) && labels[i] == 0) {
                labels[i] = next_label++;
                grow(flow, labels, x, y, params.angle_threshold);
            }
        }
    }
    return out;
}

std::vector<int> propagate_labels(const LabeledFlowField& labeled, const FlowField& next, double dt,
                                  const SegmentationParams& params) {
    params.validate();
    const FlowField& flow = labeled.flow;
    if (flow.width() != next.width() || flow.height() != next.height()) {
        throw InvalidInput("propagate_labels: frame dimensions differ");
    }
    std::vector<int> seeds(next.size(), 0);
    for (int n = 0; n < flow.height(); ++n) {
        for (int m = 0; m < flow.width(); ++m) {
            const int label = labeled.label(m, n);
            if (label == 0) continue;
            const Vec2& v = flow.at(m, n);
            const double tx = std::round(m + v.x * dt);
            const double ty = std::round(n + v.y * dt);
            if (tx < 0.0 || ty < 0.0 || tx >= next.width() || ty >= next.height()) continue;
            const int x = static_cast<int>(tx);
            const int y = static_cast<int>(ty);
            if (!next.present(x, y) || !compatible(v, next.at(x, y), params.angle_threshold)) continue;
            int& slot = seeds[next.index(x, y)];
            if (slot == 0 || label < slot) slot = label;
        }
    }
    return seeds;
}

std::vector<LabeledFlowField> label_sequence(const FlowSequence& seq, const SegmentationParams& params) {
    seq.validate();
    params.validate();
    std::vector<LabeledFlowField> out;
    out.reserve(seq.frames.size());
    int next_label = 1;
    std::vector<int> seeds;
    for (std::size_t f = 0; f < seq.frames.size(); ++f) {
        std::optional<std::span<const int>> seed_view;
        if (f > 0) seed_view = std::span<const int>(seeds);
        out.push_back(spatial_label(seq.frames[f], seed_view, params, next_label));
        if (f + 1 < seq.frames.size()) {
            seeds = propagate_labels(out.back(), seq.frames[f + 1], seq.dt, params);
        }
    }
    return out;
}

PartialActionSequence segment(const FlowSequence& seq, const SegmentationParams& params) {
    if (seq.frames.empty()) {
        throw InvalidInput("segment: empty flow sequence");
    }
    const auto labeled = label_sequence(seq, params);

    int max_label = 0;
    for (const auto& lf : labeled) {
        for (int l : lf.labels) max_label = std::max(max_label, l);
    }

    struct Accumulator {
        int first = -1;
        int last = -1;
        int frames = 0;
        std::vector<Vec2> sum;
        std::vector<int> count;
        FlowField image;
    };
    const int w = seq.width();
    const int h = seq.height();
    std::vector<Accumulator> acc(static_cast<std::size_t>(max_label) + 1);

    for (std::size_t f = 0; f < labeled.size(); ++f) {
        const auto& lf = labeled[f];
        for (std::size_t i = 0; i < lf.labels.size(); ++i) {
            const int l = lf.labels[i];
            if (l == 0) continue;
            auto& a = acc[static_cast<std::size_t>(l)];
            if (a.image.size() == 0) {
                a.image = FlowField(w, h);
                if (params.superposition == Superposition::Average) {
                    a.sum.assign(a.image.size(), Vec2{});
                    a.count.assign(a.image.size(), 0);
                }
            }
            if (a.last != static_cast<int>(f)) {
                if (a.first < 0) a.first = static_cast<int>(f);
                a.last = static_cast<int>(f);
                ++a.frames;
            }
            const int x = static_cast<int>(i % static_cast<std::size_t>(w));
            const int y = static_cast<int>(i / static_cast<std::size_t>(w));
            const Vec2& v = lf.flow.at(i);
            switch (params.superposition) {
            case Superposition::EarliestWins:
                if (!a.image.present(i)) a.image.set(x, y, v);
                break;
            case Superposition::LatestWins:
                a.image.set(x, y, v);
                break;
            case Superposition::Average:
                a.sum[i].x += v.x;
                a.sum[i].y += v.y;
                ++a.count[i];
                a.image.set(x, y, Vec2{a.sum[i].x / a.count[i], a.sum[i].y / a.count[i]});
                break;
            }
        }
    }

    PartialActionSequence out;
    out.dt = seq.dt;
    for (int l = 1; l <= max_label; ++l) {
        auto& a = acc[static_cast<std::size_t>(l)];
        if (a.frames < params.min_frames) continue;
        out.actions.push_back(PartialActionImage{l, std::move(a.image), {a.first, a.last}});
    }
    return out;
}

} // namespace flowseq
