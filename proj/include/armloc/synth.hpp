#pragma once

/// \file synth.hpp
/// \brief Seeded synthetic frames and heatmap noise for round-trip testing.
///
/// Sampling: each of the four arms gets an elbow uniformly in the central 80%
/// of the frame, a length uniform in [min_length, max_length] input px and a
/// direction uniform on the circle. Directions (and lengths) are redrawn until
/// the wrist lies at least `margin` px inside the frame.

#include "armloc/augment.hpp"
#include "armloc/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

namespace armloc {

struct SynthParams {
    ImageSize image_size { 736, 368 };
    double min_length = 40.0;
    double max_length = 160.0;
    double margin = 24.0;
};

namespace detail {
    /// SplitMix64 finalizer; decorrelates per-frame streams derived from one seed.
    constexpr std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t index)
    {
        std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (index + 1);
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        return z ^ (z >> 31);
    }

    inline double uniform(std::mt19937_64& rng, double lo, double hi) { return lo + unit_uniform(rng) * (hi - lo); }

    /// Standard normal via Box-Muller on the platform-independent uniform.
    inline double standard_normal(std::mt19937_64& rng)
    {
        double u1 = unit_uniform(rng);
        while (u1 <= 0.0) {
            u1 = unit_uniform(rng);
        }
        const double u2 = unit_uniform(rng);
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
    }
} // namespace detail

inline std::string synth_frame_id(std::size_t index)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "synth_%06zu", index);
    return buf;
}

/// Frame `index` of the stream for `seed`; independent of how many frames are drawn.
inline FrameAnnotation synth_frame(std::uint64_t seed, std::size_t index, const SynthParams& params = {})
{
    const double w = params.image_size.width;
    const double h = params.image_size.height;
    if (!(params.min_length > 0) || params.min_length > params.max_length) {
        throw std::invalid_argument("synth: invalid arm length range");
    }
    if (w - 1 - 2 * params.margin <= 0 || h - 1 - 2 * params.margin <= 0) {
        throw std::invalid_argument("synth: image too small for the margin");
    }
    std::mt19937_64 rng(detail::mix_seed(seed, index));
    FrameAnnotation f;
    f.frame_id = synth_frame_id(index);
    f.image_size = params.image_size;
    f.drive_mode = detail::unit_uniform(rng) < 0.5 ? DriveMode::Manual : DriveMode::Autonomous;
    auto inside = [&](Point p) {
        return p.x >= params.margin && p.y >= params.margin && p.x <= w - 1 - params.margin && p.y <= h - 1 - params.margin;
    };
    for (auto arm : kAllArms) {
        JointAnnotation a;
        a.arm = arm;
        a.elbow = { detail::uniform(rng, 0.1 * w, 0.9 * w), detail::uniform(rng, 0.1 * h, 0.9 * h) };
        for (int attempt = 0;; ++attempt) {
            if (attempt == 10000) {
                throw std::runtime_error("synth: could not place wrist inside the frame");
            }
            const double length = detail::uniform(rng, params.min_length, params.max_length);
            const double angle = detail::uniform(rng, -std::numbers::pi, std::numbers::pi);
            a.wrist = a.elbow + length * Point { std::cos(angle), std::sin(angle) };
            if (inside(a.wrist)) {
                break;
            }
        }
        f.arms.push_back(a);
    }
    return f;
}

inline std::vector<FrameAnnotation> synth_frames(std::size_t n, std::uint64_t seed, const SynthParams& params = {})
{
    std::vector<FrameAnnotation> out;
    out.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        out.push_back(synth_frame(seed, i, params));
    }
    return out;
}

/// Adds zero-mean Gaussian noise to every channel, then projects back onto
/// the valid stack domain: part and background maps clamped to [0, 1],
/// affinity components clamped to [-1, 1] and vectors longer than 1 rescaled
/// to unit length.
inline void add_noise(HeatmapStack& stack, double sigma, std::uint64_t seed)
{
    if (sigma < 0) {
        throw std::invalid_argument("noise sigma must be >= 0");
    }
    if (sigma == 0) {
        return;
    }
    std::mt19937_64 rng(seed);
    for (float& v : stack.data()) {
        v = static_cast<float>(v + sigma * detail::standard_normal(rng));
    }
    for (int c = 0; c < kNumParts; ++c) {
        for (float& v : stack.channel_data(c)) {
            v = std::clamp(v, 0.0f, 1.0f);
        }
    }
    for (float& v : stack.channel_data(kBackgroundChannel)) {
        v = std::clamp(v, 0.0f, 1.0f);
    }
    for (auto arm : kAllArms) {
        auto px = stack.channel_data(paf_x_channel(arm));
        auto py = stack.channel_data(paf_y_channel(arm));
        for (std::size_t i = 0; i < px.size(); ++i) {
            double x = std::clamp(static_cast<double>(px[i]), -1.0, 1.0);
            double y = std::clamp(static_cast<double>(py[i]), -1.0, 1.0);
            const double m = std::hypot(x, y);
            if (m > 1.0) {
                x /= m;
                y /= m;
            }
            px[i] = static_cast<float>(x);
            py[i] = static_cast<float>(y);
        }
    }
}

} // namespace armloc
