#pragma once

/// \file augment.hpp
/// \brief Training-time augmentation: cabin symmetry mirroring, cloud-overlay
/// lighting, similarity transforms with cropping, and grayscale replication.
/// Images are single-plane floats, nominally in [0, 1].

#include "armloc/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string_view>
#include <optional>

namespace armloc {

enum class CabinSide : std::uint8_t { Driver, Passenger };

inline std::optional<CabinSide> cabin_side_from_string(std::string_view s)
{
    if (s == "driver") {
        return CabinSide::Driver;
    }
    if (s == "passenger") {
        return CabinSide::Passenger;
    }
    return std::nullopt;
}

struct Augmented {
    Plane image;
    FrameAnnotation frame;
};

/// Reflects the chosen half of the cabin onto the other half about
/// x = (width - 1) / 2. Annotations of the chosen side are kept and a
/// reflected copy is added with its class passed through mirror(), so the
/// left half always carries driver labels and the right half passenger labels.
inline Augmented mirror_symmetry(PlaneView image, const FrameAnnotation& frame, CabinSide side)
{
    const int w = image.width;
    const int h = image.height;
    if (w <= 0 || h <= 0) {
        throw std::invalid_argument("mirror_symmetry: empty image");
    }
    const bool keep_driver = side == CabinSide::Driver;

    FrameAnnotation out_frame = frame;
    out_frame.arms.clear();
    for (const auto& a : frame.arms) {
        if (is_driver(a.arm) == keep_driver) {
            out_frame.arms.push_back(a);
        }
    }
    if (out_frame.arms.empty()) {
        throw std::invalid_argument("mirror_symmetry: no annotations on the chosen side");
    }
    const double axis = w - 1.0;
    const std::size_t kept = out_frame.arms.size();
    for (std::size_t i = 0; i < kept; ++i) {
        JointAnnotation m = out_frame.arms[i];
        m.arm = mirror(m.arm);
        m.wrist.x = axis - m.wrist.x;
        m.elbow.x = axis - m.elbow.x;
        out_frame.arms.push_back(m);
    }

    Plane out(w, h);
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            // 2x <= w - 1 is the left half including an odd center column
            const bool in_kept_half = keep_driver ? (2 * x <= w - 1) : (2 * x >= w - 1);
            out(x, y) = in_kept_half ? image(x, y) : image(w - 1 - x, y);
        }
    }
    return { std::move(out), std::move(out_frame) };
}

/// Multiply branch of the overlay blend, used where the base is <= 0.5.
inline double overlay_lower(double base, double overlay) { return 2.0 * base * overlay; }
/// Screen branch of the overlay blend, used where the base is > 0.5.
inline double overlay_upper(double base, double overlay) { return 1.0 - 2.0 * (1.0 - base) * (1.0 - overlay); }

/// Unclamped overlay blend of one pixel.
inline double overlay_blend_value(double base, double overlay)
{
    return base <= 0.5 ? overlay_lower(base, overlay) : overlay_upper(base, overlay);
}

/// Overlay blend, clamped to [0, 1].
inline Plane overlay_blend(PlaneView base, PlaneView overlay)
{
    if (base.width != overlay.width || base.height != overlay.height) {
        throw std::invalid_argument("overlay_blend: dimension mismatch");
    }
    Plane out(base.width, base.height);
    auto dst = out.pixels();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = static_cast<float>(std::clamp(overlay_blend_value(base.pixels[i], overlay.pixels[i]), 0.0, 1.0));
    }
    return out;
}

struct LightingRange {
    double lo = 0.3;
    double hi = 0.7;
};

enum class LightingCondition : std::uint8_t { Bright, Dark, Average };

inline std::optional<LightingCondition> lighting_condition_from_string(std::string_view s)
{
    if (s == "bright") {
        return LightingCondition::Bright;
    }
    if (s == "dark") {
        return LightingCondition::Dark;
    }
    if (s == "average") {
        return LightingCondition::Average;
    }
    return std::nullopt;
}

constexpr LightingRange lighting_range(LightingCondition c)
{
    switch (c) {
    case LightingCondition::Bright: return { 0.4, 1.4 };
    case LightingCondition::Dark: return { 0.05, 0.4 };
    case LightingCondition::Average: return { 0.3, 0.7 };
    }
    return { 0.3, 0.7 };
}

inline void validate(LightingRange r)
{
    if (!(r.lo < r.hi) || r.lo < 0.0 || r.hi > 1.4) {
        throw std::invalid_argument("lighting range must satisfy 0 <= lo < hi <= 1.4");
    }
}

namespace detail {
    /// Uniform double in [0, 1) from the top 53 bits; identical on every platform.
    inline double unit_uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
} // namespace detail

struct CloudParams {
    int octaves = 5;
    double blur_sigma = 10.0; ///< px
};

/// Fractal value noise: octaves of bilinearly interpolated random lattices,
/// lattice spacing and amplitude halving per octave, Gaussian-blurred, then
/// min-max mapped onto [lo, hi]. Values may exceed 1 when hi > 1.
inline Plane cloud_texture(ImageSize size, std::uint64_t seed, LightingRange range, CloudParams params = {})
{
    if (size.width <= 0 || size.height <= 0) {
        throw std::invalid_argument("cloud_texture: size must be positive");
    }
    validate(range);
    if (params.octaves < 1) {
        throw std::invalid_argument("cloud_texture: need at least one octave");
    }
    std::mt19937_64 rng(seed);
    Image<double> noise(size.width, size.height, 0.0);
    double spacing = std::max(1.0, std::max(size.width, size.height) / 4.0);
    double amplitude = 1.0;
    for (int octave = 0; octave < params.octaves; ++octave) {
        const int lw = static_cast<int>(std::ceil(size.width / spacing)) + 2;
        const int lh = static_cast<int>(std::ceil(size.height / spacing)) + 2;
        Image<double> lattice(lw, lh);
        for (auto& v : lattice.pixels()) {
            v = detail::unit_uniform(rng);
        }
        for (int y = 0; y < size.height; ++y) {
            const double gy = y / spacing;
            const int y0 = static_cast<int>(gy);
            const double ty = gy - y0;
            for (int x = 0; x < size.width; ++x) {
                const double gx = x / spacing;
                const int x0 = static_cast<int>(gx);
                const double tx = gx - x0;
                const double top = (1 - tx) * lattice(x0, y0) + tx * lattice(x0 + 1, y0);
                const double bottom = (1 - tx) * lattice(x0, y0 + 1) + tx * lattice(x0 + 1, y0 + 1);
                noise(x, y) += amplitude * ((1 - ty) * top + ty * bottom);
            }
        }
        spacing = std::max(1.0, spacing / 2.0);
        amplitude /= 2.0;
    }

    const auto blurred = gaussian_blur(noise.view(), params.blur_sigma);
    const auto [lo_it, hi_it] = std::minmax_element(blurred.pixels().begin(), blurred.pixels().end());
    const double vmin = *lo_it;
    const double span = *hi_it - vmin;

    Plane out(size.width, size.height);
    auto src = blurred.pixels();
    auto dst = out.pixels();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        const double t = span > 0 ? (src[i] - vmin) / span : 0.0;
        dst[i] = static_cast<float>(range.lo + t * (range.hi - range.lo));
    }
    return out;
}

inline Plane lighting_augment(PlaneView image, LightingCondition condition, std::uint64_t seed, CloudParams params = {})
{
    const auto cloud = cloud_texture({ image.width, image.height }, seed, lighting_range(condition), params);
    return overlay_blend(image, cloud);
}

struct GeometricAugmentParams {
    double max_rotation_deg = 20.0;
    int crop_w = 736;
    int crop_h = 368;
    double scale_min = 0.7;
    double scale_max = 1.2;
    bool random_offset = false; ///< jitter the crop window instead of centering it
};

inline void validate(const GeometricAugmentParams& p)
{
    if (p.crop_w <= 0 || p.crop_h <= 0) {
        throw std::invalid_argument("crop dimensions must be positive");
    }
    if (!(p.scale_min > 0) || p.scale_min > p.scale_max) {
        throw std::invalid_argument("scale range must satisfy 0 < scale_min <= scale_max");
    }
    if (!(p.max_rotation_deg >= 0)) {
        throw std::invalid_argument("max_rotation_deg must be >= 0");
    }
}

/// Rotation (degrees, counter-clockwise in the y-down frame's math sense) and
/// uniform scale about the source center, followed by a crop whose center is
/// shifted by `shift` from the scaled image center.
struct SimilarityTransform {
    double angle_deg = 0.0;
    double scale = 1.0;
    Point shift;
    Point source_center;
    Point target_center;

    [[nodiscard]] Point apply(Point p) const
    {
        const double a = angle_deg * std::numbers::pi / 180.0;
        const double c = std::cos(a);
        const double s = std::sin(a);
        const Point d = p - source_center;
        return target_center + shift + Point { scale * (c * d.x - s * d.y), scale * (s * d.x + c * d.y) };
    }

    [[nodiscard]] Point invert(Point q) const
    {
        const double a = angle_deg * std::numbers::pi / 180.0;
        const double c = std::cos(a);
        const double s = std::sin(a);
        const Point d = q - target_center - shift;
        return source_center + Point { (c * d.x + s * d.y) / scale, (-s * d.x + c * d.y) / scale };
    }
};

inline SimilarityTransform make_transform(ImageSize source, ImageSize crop, double angle_deg, double scale, Point shift = {})
{
    return { angle_deg, scale, shift, { (source.width - 1) / 2.0, (source.height - 1) / 2.0 },
        { (crop.width - 1) / 2.0, (crop.height - 1) / 2.0 } };
}

/// Resamples the image bilinearly through the transform (zero padding) and
/// maps every joint; arms with a joint outside the crop become not visible.
inline Augmented apply_similarity(PlaneView image, const FrameAnnotation& frame, const SimilarityTransform& t, ImageSize crop)
{
    if (crop.width <= 0 || crop.height <= 0) {
        throw std::invalid_argument("crop dimensions must be positive");
    }
    if (!(t.scale > 0)) {
        throw std::invalid_argument("scale must be positive");
    }
    Plane out(crop.width, crop.height);
    for (int y = 0; y < crop.height; ++y) {
        for (int x = 0; x < crop.width; ++x) {
            const Point src = t.invert({ static_cast<double>(x), static_cast<double>(y) });
            out(x, y) = static_cast<float>(sample_bilinear(image, src.x, src.y));
        }
    }
    FrameAnnotation f = frame;
    f.image_size = crop;
    auto inside = [&](Point p) { return p.x >= 0 && p.y >= 0 && p.x <= crop.width - 1 && p.y <= crop.height - 1; };
    for (auto& a : f.arms) {
        a.wrist = t.apply(a.wrist);
        a.elbow = t.apply(a.elbow);
        a.visible = a.visible && inside(a.wrist) && inside(a.elbow);
    }
    return { std::move(out), std::move(f) };
}

struct GeometricAugmented : Augmented {
    SimilarityTransform transform;
};

/// Samples rotation in [-max, max] and scale in [scale_min, scale_max]
/// uniformly and applies them.
inline GeometricAugmented geometric_augment(PlaneView image, const FrameAnnotation& frame, const GeometricAugmentParams& params, std::uint64_t seed)
{
    validate(params);
    std::mt19937_64 rng(seed);
    const double angle = (2.0 * detail::unit_uniform(rng) - 1.0) * params.max_rotation_deg;
    const double scale = params.scale_min + detail::unit_uniform(rng) * (params.scale_max - params.scale_min);
    Point shift;
    if (params.random_offset) {
        const double slack_x = std::abs(image.width * scale - params.crop_w) / 2.0;
        const double slack_y = std::abs(image.height * scale - params.crop_h) / 2.0;
        shift = { (2.0 * detail::unit_uniform(rng) - 1.0) * slack_x, (2.0 * detail::unit_uniform(rng) - 1.0) * slack_y };
    }
    const ImageSize crop { params.crop_w, params.crop_h };
    const auto t = make_transform({ image.width, image.height }, crop, angle, scale, shift);
    auto result = apply_similarity(image, frame, t, crop);
    return { { std::move(result.image), std::move(result.frame) }, t };
}

/// ITU-R 601 luma.
inline Plane to_grayscale(const ColorImage& rgb)
{
    if (rgb.g.width() != rgb.r.width() || rgb.b.width() != rgb.r.width() || rgb.g.height() != rgb.r.height() || rgb.b.height() != rgb.r.height()) {
        throw std::invalid_argument("to_grayscale: channel sizes differ");
    }
    Plane out(rgb.width(), rgb.height());
    auto dst = out.pixels();
    const auto r = rgb.r.pixels();
    const auto g = rgb.g.pixels();
    const auto b = rgb.b.pixels();
    for (std::size_t i = 0; i < dst.size(); ++i) {
        dst[i] = static_cast<float>(0.299 * r[i] + 0.587 * g[i] + 0.114 * b[i]);
    }
    return out;
}

/// Luma replicated into three identical channels.
inline ColorImage to_grayscale_3ch(const ColorImage& rgb)
{
    auto gray = to_grayscale(rgb);
    return { gray, gray, gray };
}

} // namespace armloc
