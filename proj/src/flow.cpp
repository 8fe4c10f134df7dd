#include "flowseq/flow.hpp"

#include "flowseq/error.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

namespace flowseq {

double norm(const Vec2& v) { return std::hypot(v.x, v.y); }

double angle_between(const Vec2& u, const Vec2& v) {
    const double nu = norm(u);
    const double nv = norm(v);
    if (nu == 0.0 || nv == 0.0) {
        throw InvalidInput("angle_between: zero-magnitude vector");
    }
    const double c = std::clamp((u.x * v.x + u.y * v.y) / (nu * nv), -1.0, 1.0);
    return std::acos(c) * 180.0 / std::numbers::pi;
}

FlowField::FlowField(int width, int height) : width_(width), height_(height) {
    if (width < 0 || height < 0) {
        throw InvalidInput("FlowField: negative dimensions");
    }
    const auto n = static_cast<std::size_t>(width) * static_cast<std::size_t>(height);
    vectors_.assign(n, Vec2{});
    presence_.assign(n, 0);
}

void FlowField::set(int x, int y, const Vec2& v) {
    const auto i = index(x, y);
    vectors_[i] = v;
    presence_[i] = 1;
}

void FlowField::clear(int x, int y) {
    const auto i = index(x, y);
    vectors_[i] = Vec2{};
    presence_[i] = 0;
}

std::size_t FlowField::present_count() const {
    return static_cast<std::size_t>(std::count(presence_.begin(), presence_.end(), std::uint8_t{1}));
}

void FlowSequence::validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) {
        throw InvalidInput("FlowSequence: dt must be positive");
    }
    for (const auto& f : frames) {
        if (f.width() != width() || f.height() != height()) {
            throw InvalidInput("FlowSequence: frames differ in size");
        }
    }
}

GrayFrame::GrayFrame(int width, int height, std::vector<double> intensity)
    : width_(width), height_(height), intensity_(std::move(intensity)) {
    if (width < 0 || height < 0 ||
        intensity_.size() != static_cast<std::size_t>(width) * static_cast<std::size_t>(height)) {
        throw InvalidInput("GrayFrame: intensity size does not match dimensions");
    }
    for (double v : intensity_) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw InvalidInput("GrayFrame: intensity outside [0,1]");
        }
    }
}

GrayFrame::GrayFrame(int width, int height)
    : GrayFrame(width, height,
                std::vector<double>(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0), 0.0)) {}

void GrayFrame::set(int x, int y, double value) {
    if (!(value >= 0.0 && value <= 1.0)) {
        throw InvalidInput("GrayFrame: intensity outside [0,1]");
    }
    intensity_[static_cast<std::size_t>(y) * width_ + x] = value;
}

void FlowParams::validate() const {
    if (block_radius < 1) throw InvalidInput("FlowParams: block_radius must be >= 1");
    if (search_radius < 1) throw InvalidInput("FlowParams: search_radius must be >= 1");
    if (!(min_texture >= 0.0)) throw InvalidInput("FlowParams: min_texture must be >= 0");
    if (!(magnitude_floor >= 0.0)) throw InvalidInput("FlowParams: magnitude_floor must be >= 0");
}

FlowField compute_flow(const GrayFrame& a, const GrayFrame& b, const FlowParams& params) {
    params.validate();
    if (a.width() != b.width() || a.height() != b.height()) {
        throw InvalidInput("compute_flow: frame dimensions differ");
    }
    const int r = params.block_radius;
    const int s = params.search_radius;
    const int margin = r + s;
    const int min_side = 2 * margin + 1;
    if (a.width() < min_side || a.height() < min_side) {
        throw InvalidInput("compute_flow: frame of " + std::to_string(a.width()) + "x" +
                           std::to_string(a.height()) + " is smaller than " + std::to_string(min_side) +
                           " pixels required by block/search radii");
    }

    FlowField out(a.width(), a.height());
    const double block_cells = static_cast<double>((2 * r + 1) * (2 * r + 1));

    for (int y = margin; y < a.height() - margin; ++y) {
        for (int x = margin; x < a.width() - margin; ++x) {
            double sum = 0.0;
            double sum_sq = 0.0;
            for (int by = -r; by <= r; ++by) {
                for (int bx = -r; bx <= r; ++bx) {
                    const double v = a.at(x + bx, y + by);
                    sum += v;
                    sum_sq += v * v;
                }
            }
            const double mean = sum / block_cells;
            const double variance = std::max(0.0, sum_sq / block_cells - mean * mean);
            if (variance < params.min_texture) {
                continue;
            }

            double best_ssd = std::numeric_limits<double>::infinity();
            int best_len = std::numeric_limits<int>::max();
            int best_dx = 0;
            int best_dy = 0;
            for (int dy = -s; dy <= s; ++dy) {
                for (int dx = -s; dx <= s; ++dx) {
                    double ssd = 0.0;
                    for (int by = -r; by <= r; ++by) {
                        for (int bx = -r; bx <= r; ++bx) {
                            const double diff = a.at(x + bx, y + by) - b.at(x + bx + dx, y + by + dy);
                            ssd += diff * diff;
                        }
                    }
                    const int len = dx * dx + dy * dy;
                    if (ssd < best_ssd || (ssd == best_ssd && len < best_len)) {
                        best_ssd = ssd;
                        best_len = len;
                        best_dx = dx;
                        best_dy = dy;
                    }
                }
            }
            const Vec2 v{static_cast<double>(best_dx), static_cast<double>(best_dy)};
            if (norm(v) < params.magnitude_floor) {
                continue;
            }
            out.set(x, y, v);
        }
    }
    return out;
}

FlowField scale_flow(const FlowField& flow, double factor) {
    FlowField out(flow.width(), flow.height());
    for (int y = 0; y < flow.height(); ++y) {
        for (int x = 0; x < flow.width(); ++x) {
            if (flow.present(x, y)) {
                const Vec2& v = flow.at(x, y);
                out.set(x, y, Vec2{v.x * factor, v.y * factor});
            }
        }
    }
    return out;
}

void SyntheticGestureSpec::validate() const {
    if (width < 1 || height < 1) throw InvalidInput("synthesize: canvas must be at least 1x1");
    if (frame_count < 1) throw InvalidInput("synthesize: frame_count must be >= 1");
    if (!(dt > 0.0)) throw InvalidInput("synthesize: dt must be positive");
    if (!(noise >= 0.0)) throw InvalidInput("synthesize: noise must be >= 0");
    for (std::size_t i = 0; i < blobs.size(); ++i) {
        const auto& b = blobs[i];
        const std::string tag = "synthesize: blob " + std::to_string(i) + ": ";
        if (!(b.radius >= 1.0)) throw InvalidInput(tag + "radius must be >= 1");
        if (b.first_frame < 0 || b.last_frame < b.first_frame || b.last_frame >= frame_count) {
            throw InvalidInput(tag + "active interval outside the sequence");
        }
        if (b.velocities.empty()) throw InvalidInput(tag + "empty velocity schedule");
    }
}

namespace {

const Vec2& scheduled_velocity(const BlobTrack& blob, int frame) {
    const auto step = static_cast<std::size_t>(frame - blob.first_frame);
    return blob.velocities[std::min(step, blob.velocities.size() - 1)];
}

} // namespace

FlowSequence synthesize(const SyntheticGestureSpec& spec) {
    spec.validate();
    FlowSequence seq;
    seq.dt = spec.dt;
    seq.frames.reserve(static_cast<std::size_t>(spec.frame_count));

    std::vector<Vec2> centres;
    centres.reserve(spec.blobs.size());
    for (const auto& b : spec.blobs) {
        centres.push_back(b.start);
    }

    UniformSource noise(spec.seed);
    for (int f = 0; f < spec.frame_count; ++f) {
        FlowField frame(spec.width, spec.height);
        for (std::size_t bi = 0; bi < spec.blobs.size(); ++bi) {
            const auto& blob = spec.blobs[bi];
            if (f < blob.first_frame || f > blob.last_frame) {
                continue;
            }
            const Vec2& c = centres[bi];
            const Vec2& vel = scheduled_velocity(blob, f);
            const double r2 = blob.radius * blob.radius;
            const int x0 = std::max(0, static_cast<int>(std::floor(c.x - blob.radius)));
            const int x1 = std::min(spec.width - 1, static_cast<int>(std::ceil(c.x + blob.radius)));
            const int y0 = std::max(0, static_cast<int>(std::floor(c.y - blob.radius)));
            const int y1 = std::min(spec.height - 1, static_cast<int>(std::ceil(c.y + blob.radius)));
            for (int y = y0; y <= y1; ++y) {
                for (int x = x0; x <= x1; ++x) {
                    const double ddx = x - c.x;
                    const double ddy = y - c.y;
                    if (ddx * ddx + ddy * ddy > r2) {
                        continue;
                    }
                    Vec2 v = vel;
                    if (spec.noise > 0.0) {
                        v.x += noise.symmetric(spec.noise);
                        v.y += noise.symmetric(spec.noise);
                    }
                    frame.set(x, y, v);
                }
            }
        }
        // advance after rendering so frame f shows the blob at its frame-f position
        for (std::size_t bi = 0; bi < spec.blobs.size(); ++bi) {
            const auto& blob = spec.blobs[bi];
            if (f >= blob.first_frame && f <= blob.last_frame) {
                const Vec2& vel = scheduled_velocity(blob, f);
                centres[bi].x += vel.x * spec.dt;
                centres[bi].y += vel.y * spec.dt;
            }
        }
        seq.frames.push_back(std::move(frame));
    }
    return seq;
}

} // namespace flowseq
