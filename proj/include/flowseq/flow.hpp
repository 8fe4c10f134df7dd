#pragma once

#include <cstdint>
#include <map>
#include <random>
#include <string>
#include <vector>

namespace flowseq {

struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Vec2&, const Vec2&) = default;
};

double norm(const Vec2& v);

/// Angle between two non-zero vectors in degrees, in [0, 180].
/// Throws InvalidInput when either vector has zero magnitude.
double angle_between(const Vec2& u, const Vec2& v);

/// Dense grid of motion vectors for one frame. Vectors are in pixels/second.
/// Cells without a flow vector have presence == false and carry (0, 0).
class FlowField {
public:
    FlowField() = default;
    FlowField(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }
    std::size_t size() const { return vectors_.size(); }

    bool in_bounds(int x, int y) const { return x >= 0 && y >= 0 && x < width_ && y < height_; }
    std::size_t index(int x, int y) const { return static_cast<std::size_t>(y) * width_ + x; }

    bool present(int x, int y) const { return presence_[index(x, y)] != 0; }
    const Vec2& at(int x, int y) const { return vectors_[index(x, y)]; }

    bool present(std::size_t i) const { return presence_[i] != 0; }
    const Vec2& at(std::size_t i) const { return vectors_[i]; }

    void set(int x, int y, const Vec2& v);
    void clear(int x, int y);

    std::size_t present_count() const;

    friend bool operator==(const FlowField&, const FlowField&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<Vec2> vectors_;
    std::vector<std::uint8_t> presence_;
};

/// Ordered flow frames sampled every `dt` seconds.
struct FlowSequence {
    std::vector<FlowField> frames;
    double dt = 1.0;
    std::map<std::string, std::string> metadata;

    int width() const { return frames.empty() ? 0 : frames.front().width(); }
    int height() const { return frames.empty() ? 0 : frames.front().height(); }

    /// Throws InvalidInput if frames disagree in size or dt <= 0.
    void validate() const;

    friend bool operator==(const FlowSequence&, const FlowSequence&) = default;
};

/// Grayscale frame with intensities in [0, 1].
class GrayFrame {
public:
    GrayFrame() = default;
    GrayFrame(int width, int height, std::vector<double> intensity);
    GrayFrame(int width, int height);

    int width() const { return width_; }
    int height() const { return height_; }
    double at(int x, int y) const { return intensity_[static_cast<std::size_t>(y) * width_ + x]; }
    void set(int x, int y, double value);
    const std::vector<double>& data() const { return intensity_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<double> intensity_;
};

struct FlowParams {
    int block_radius = 2;
    int search_radius = 3;
    /// Minimum intensity variance of the block for a vector to be reported.
    double min_texture = 1e-4;
    /// Vectors shorter than this (pixels/second) are marked absent.
    double magnitude_floor = 0.5;

    void validate() const;
};

/// Block-matching optical flow. For each interior pixel with enough texture the
/// integer displacement within `search_radius` that minimises the sum of squared
/// differences between the block in `a` and the displaced block in `b` is
/// reported, assuming dt = 1 (callers rescale by the real sampling period).
/// Among equal-SSD candidates the shortest displacement wins, then raster order.
FlowField compute_flow(const GrayFrame& a, const GrayFrame& b, const FlowParams& params);

/// Multiplies every vector by `factor` (used to turn per-frame displacements into pixels/second).
FlowField scale_flow(const FlowField& flow, double factor);

struct BlobTrack {
    Vec2 start;
    /// Velocity for each active frame (pixels/second). If shorter than the
    /// active interval the last entry repeats.
    std::vector<Vec2> velocities;
    double radius = 1.0;
    int first_frame = 0;
    int last_frame = 0;
};

struct SyntheticGestureSpec {
    int width = 320;
    int height = 240;
    int frame_count = 1;
    double dt = 1.0;
    /// Uniform per-component noise in [-noise, noise] added to every blob vector.
    double noise = 0.0;
    std::uint64_t seed = 0;
    std::vector<BlobTrack> blobs;

    void validate() const;
};

/// Renders blob tracks into a flow sequence. A blob at frame f covers the disc
/// of its radius around its current centre; the centre advances by
/// velocity * dt between consecutive active frames. Where blobs overlap the one
/// listed later wins.
FlowSequence synthesize(const SyntheticGestureSpec& spec);

/// Uniform doubles in [0, 1) drawn from std::mt19937_64 without going through
/// std::uniform_real_distribution, whose output is implementation-defined.
class UniformSource {
public:
    explicit UniformSource(std::uint64_t seed) : engine_(seed) {}
    double next() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double symmetric(double amplitude) { return amplitude * (2.0 * next() - 1.0); }

private:
    std::mt19937_64 engine_;
};

} // namespace flowseq
