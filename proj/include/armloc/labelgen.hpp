#pragma once

/// \file labelgen.hpp
/// \brief Ground-truth heatmap rendering: part confidence maps, part affinity
/// fields and the background map. All coordinates here are heatmap pixels.

#include "armloc/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <span>
#include <stdexcept>
#include <utility>

namespace armloc {

struct PafMembershipParams {
    double sigma_paf = 1.0;
};

namespace detail {
    inline void require_canvas(ImageSize canvas)
    {
        if (canvas.width <= 0 || canvas.height <= 0) {
            throw std::invalid_argument("canvas must have positive area");
        }
    }
} // namespace detail

/// exp(-|x - part|^2 / sigma^2) over the whole canvas; all zeros when the part
/// is not visible.
inline Plane render_pcm(Point part, bool visible, ImageSize canvas, double sigma_pcm)
{
    detail::require_canvas(canvas);
    if (!(sigma_pcm > 0)) {
        throw std::invalid_argument("sigma_pcm must be > 0");
    }
    Plane out(canvas.width, canvas.height, 0.0f);
    if (!visible) {
        return out;
    }
    const double inv = 1.0 / (sigma_pcm * sigma_pcm);
    for (int y = 0; y < canvas.height; ++y) {
        const double dy = y - part.y;
        for (int x = 0; x < canvas.width; ++x) {
            const double dx = x - part.x;
            out(x, y) = static_cast<float>(std::exp(-(dx * dx + dy * dy) * inv));
        }
    }
    return out;
}

struct PafPlanes {
    Plane x;
    Plane y;
};

/// Unit elbow->wrist vector on every pixel whose projection onto the arm axis
/// lies in [0, |wrist - elbow|] and whose perpendicular distance is at most
/// sigma_paf; zero elsewhere.
inline PafPlanes render_paf(Point elbow, Point wrist, ImageSize canvas, PafMembershipParams params)
{
    detail::require_canvas(canvas);
    if (!(params.sigma_paf > 0)) {
        throw std::invalid_argument("sigma_paf must be > 0");
    }
    const Point axis = wrist - elbow;
    const double length = norm(axis);
    if (!(length > 0)) {
        throw std::invalid_argument("degenerate arm: wrist equals elbow");
    }
    const Point v { axis.x / length, axis.y / length };
    const Point v_perp { -v.y, v.x };

    PafPlanes out { Plane(canvas.width, canvas.height, 0.0f), Plane(canvas.width, canvas.height, 0.0f) };
    const auto vx = static_cast<float>(v.x);
    const auto vy = static_cast<float>(v.y);
    for (int y = 0; y < canvas.height; ++y) {
        for (int x = 0; x < canvas.width; ++x) {
            const Point rel = Point { static_cast<double>(x), static_cast<double>(y) } - elbow;
            const double along = dot(v, rel);
            if (along < 0.0 || along > length) {
                continue;
            }
            if (std::abs(dot(v_perp, rel)) > params.sigma_paf) {
                continue;
            }
            out.x(x, y) = vx;
            out.y(x, y) = vy;
        }
    }
    return out;
}

/// 1 - max over the part maps, clamped to [0, 1].
inline Plane render_background(std::span<const PlaneView> pcms)
{
    if (pcms.empty()) {
        throw std::invalid_argument("render_background needs at least one plane");
    }
    const int w = pcms.front().width;
    const int h = pcms.front().height;
    for (const auto& p : pcms) {
        if (p.width != w || p.height != h) {
            throw std::invalid_argument("render_background: mismatched plane sizes");
        }
    }
    Plane out(w, h);
    auto dst = out.pixels();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        float m = 0.0f;
        for (const auto& p : pcms) {
            m = std::max(m, p.pixels[i]);
        }
        dst[i] = std::clamp(1.0f - m, 0.0f, 1.0f);
    }
    return out;
}

inline Plane render_background(const HeatmapStack& stack)
{
    std::array<PlaneView, kNumParts> pcms;
    for (int c = 0; c < kNumParts; ++c) {
        pcms[c] = stack.channel(c);
    }
    return render_background(pcms);
}

/// Renders the full 17-channel stack for a frame. Joint coordinates are given
/// in input pixels and mapped to heatmap pixels with the configured stride.
inline HeatmapStack render_stack(const FrameAnnotation& frame, const PipelineConfig& config)
{
    validate(frame);
    const ImageSize canvas { heatmap_extent(frame.image_size.width, config.stride),
        heatmap_extent(frame.image_size.height, config.stride) };
    detail::require_canvas(canvas);

    HeatmapStack stack(canvas.width, canvas.height, config.stride);
    for (const auto& arm : frame.arms) {
        if (!arm.visible) {
            continue;
        }
        const Point elbow = input_to_heatmap_coords(arm.elbow, config.stride);
        const Point wrist = input_to_heatmap_coords(arm.wrist, config.stride);
        stack.set_channel(pcm_channel(arm.arm, Joint::Elbow), render_pcm(elbow, true, canvas, config.sigma_pcm));
        stack.set_channel(pcm_channel(arm.arm, Joint::Wrist), render_pcm(wrist, true, canvas, config.sigma_pcm));
        const auto paf = render_paf(elbow, wrist, canvas, { config.sigma_paf });
        stack.set_channel(paf_x_channel(arm.arm), paf.x);
        stack.set_channel(paf_y_channel(arm.arm), paf.y);
    }
    stack.set_channel(kBackgroundChannel, render_background(stack));
    return stack;
}

} // namespace armloc
