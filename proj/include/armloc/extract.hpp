#pragma once

/// \file extract.hpp
/// \brief Heatmap decoding: thresholding, connected-component labeling, region
/// properties, and candidate joints/arms from part confidence maps and part
/// affinity fields. All coordinates here are heatmap pixels.

#include "armloc/core.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <vector>

namespace armloc {

using BinaryImage = Image<std::uint8_t>;

struct LabeledImage {
    Image<int> labels; ///< 0 is background, regions are 1..count.
    int count = 0;
};

/// Labels maximal connected foreground regions. Labels are assigned in the
/// raster order of each region's first pixel.
inline LabeledImage connected_components(ImageView<std::uint8_t> binary, int connectivity = 8)
{
    if (connectivity != 4 && connectivity != 8) {
        throw std::invalid_argument("connectivity must be 4 or 8");
    }
    LabeledImage out { Image<int>(binary.width, binary.height, 0), 0 };
    static constexpr int kOffsets8[8][2] = { { -1, -1 }, { 0, -1 }, { 1, -1 }, { -1, 0 }, { 1, 0 }, { -1, 1 }, { 0, 1 }, { 1, 1 } };
    static constexpr int kOffsets4[4][2] = { { 0, -1 }, { -1, 0 }, { 1, 0 }, { 0, 1 } };
    std::span<const int[2]> offsets = connectivity == 8 ? std::span<const int[2]>(kOffsets8) : std::span<const int[2]>(kOffsets4);

    std::vector<Cell> stack;
    for (int y = 0; y < binary.height; ++y) {
        for (int x = 0; x < binary.width; ++x) {
            if (!binary(x, y) || out.labels(x, y) != 0) {
                continue;
            }
            const int label = ++out.count;
            out.labels(x, y) = label;
            stack.push_back({ x, y });
            while (!stack.empty()) {
                const Cell c = stack.back();
                stack.pop_back();
                for (const auto& o : offsets) {
                    const int nx = c.x + o[0];
                    const int ny = c.y + o[1];
                    if (binary.contains(nx, ny) && binary(nx, ny) && out.labels(nx, ny) == 0) {
                        out.labels(nx, ny) = label;
                        stack.push_back({ nx, ny });
                    }
                }
            }
        }
    }
    return out;
}

/// Pixel lists per region, index 0 holding label 1. Pixels are in raster order.
inline std::vector<std::vector<Cell>> region_pixels(const LabeledImage& labeled)
{
    std::vector<std::vector<Cell>> regions(labeled.count);
    for (int y = 0; y < labeled.labels.height(); ++y) {
        for (int x = 0; x < labeled.labels.width(); ++x) {
            const int l = labeled.labels(x, y);
            if (l > 0) {
                regions[l - 1].push_back({ x, y });
            }
        }
    }
    return regions;
}

/// Strict `value > threshold` mask.
inline BinaryImage threshold_above(PlaneView plane, double threshold)
{
    BinaryImage out(plane.width, plane.height, 0);
    auto dst = out.pixels();
    // compare at storage precision so a value written as tau is not above tau
    const auto t = static_cast<float>(threshold);
    for (std::size_t i = 0; i < plane.size(); ++i) {
        dst[i] = plane.pixels[i] > t ? 1 : 0;
    }
    return out;
}

struct PcmCandidate {
    Point location; ///< intensity-weighted centroid
    double score = 0.0; ///< max intensity in the region
    int region_size = 0;
};

inline PcmCandidate region_props_pcm(PlaneView image, std::span<const Cell> pixels)
{
    if (pixels.empty()) {
        throw std::invalid_argument("region_props_pcm: empty region");
    }
    double sum = 0.0, sx = 0.0, sy = 0.0, peak = -std::numeric_limits<double>::infinity();
    for (const Cell c : pixels) {
        const double v = image(c.x, c.y);
        sum += v;
        sx += v * c.x;
        sy += v * c.y;
        peak = std::max(peak, v);
    }
    PcmCandidate out;
    out.region_size = static_cast<int>(pixels.size());
    out.score = std::min(peak, 1.0);
    if (sum > 0.0) {
        out.location = { sx / sum, sy / sum };
    } else {
        // all weights zero: fall back to the geometric centroid
        double gx = 0.0, gy = 0.0;
        for (const Cell c : pixels) {
            gx += c.x;
            gy += c.y;
        }
        out.location = { gx / pixels.size(), gy / pixels.size() };
    }
    return out;
}

inline PcmCandidate region_props_pcm(PlaneView image, const LabeledImage& labeled, int label)
{
    std::vector<Cell> pixels;
    for (int y = 0; y < labeled.labels.height(); ++y) {
        for (int x = 0; x < labeled.labels.width(); ++x) {
            if (labeled.labels(x, y) == label) {
                pixels.push_back({ x, y });
            }
        }
    }
    return region_props_pcm(image, pixels);
}

struct EllipseProps {
    Point centroid;
    double major_axis_length = 0.0;
    double minor_axis_length = 0.0;
    double orientation_deg = 0.0; ///< major axis angle in (-90, 90]
    Point major_axis { 1.0, 0.0 }; ///< unit vector at orientation_deg
};

/// Moment ellipse of a pixel set: second central moments of the pixel
/// coordinates, each diagonal term widened by 1/12 for the pixel footprint.
/// Axis lengths are 4 sqrt(eigenvalue). Single-pixel regions report zero
/// length and orientation 0.
inline EllipseProps region_props_ellipse(std::span<const Cell> pixels)
{
    if (pixels.empty()) {
        throw std::invalid_argument("region_props_ellipse: empty region");
    }
    const double n = static_cast<double>(pixels.size());
    double mx = 0.0, my = 0.0;
    for (const Cell c : pixels) {
        mx += c.x;
        my += c.y;
    }
    mx /= n;
    my /= n;

    EllipseProps out;
    out.centroid = { mx, my };
    if (pixels.size() == 1) {
        return out;
    }

    double sxx = 0.0, syy = 0.0, sxy = 0.0;
    for (const Cell c : pixels) {
        const double dx = c.x - mx;
        const double dy = c.y - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    const double a = sxx / n + 1.0 / 12.0;
    const double c = syy / n + 1.0 / 12.0;
    const double b = sxy / n;

    const double half_diff = 0.5 * (a - c);
    const double root = std::sqrt(half_diff * half_diff + b * b);
    const double mean = 0.5 * (a + c);
    const double lmax = mean + root;
    const double lmin = std::max(0.0, mean - root);

    // atan2(0, 0) == 0 covers the isotropic tie.
    const double theta = 0.5 * std::atan2(2.0 * b, a - c);
    out.major_axis_length = 4.0 * std::sqrt(lmax);
    out.minor_axis_length = 4.0 * std::sqrt(lmin);
    out.orientation_deg = theta * 180.0 / std::numbers::pi;
    if (out.orientation_deg <= -90.0) {
        out.orientation_deg += 180.0;
    }
    out.major_axis = { std::cos(theta), std::sin(theta) };
    return out;
}

inline EllipseProps region_props_ellipse(const LabeledImage& labeled, int label)
{
    std::vector<Cell> pixels;
    for (int y = 0; y < labeled.labels.height(); ++y) {
        for (int x = 0; x < labeled.labels.width(); ++x) {
            if (labeled.labels(x, y) == label) {
                pixels.push_back({ x, y });
            }
        }
    }
    return region_props_ellipse(pixels);
}

inline double wrap_degrees(double deg)
{
    double w = std::fmod(deg, 360.0);
    if (w <= -180.0) {
        w += 360.0;
    } else if (w > 180.0) {
        w -= 360.0;
    }
    return w;
}

namespace detail {
    /// Median of a non-empty range; averages the two middle values for even sizes.
    inline double median(std::vector<double> values)
    {
        const std::size_t mid = values.size() / 2;
        std::nth_element(values.begin(), values.begin() + mid, values.end());
        const double upper = values[mid];
        if (values.size() % 2 == 1) {
            return upper;
        }
        const double lower = *std::max_element(values.begin(), values.begin() + mid);
        return 0.5 * (lower + upper);
    }
} // namespace detail

/// Median on the circle: unwrap every angle into the half-turn window around
/// the circular mean, take the ordinary median, wrap to (-180, 180].
inline double circular_median_deg(std::span<const double> angles_rad)
{
    if (angles_rad.empty()) {
        throw std::invalid_argument("circular_median_deg: no angles");
    }
    double s = 0.0, c = 0.0;
    for (double a : angles_rad) {
        s += std::sin(a);
        c += std::cos(a);
    }
    const double mean = std::atan2(s, c);
    std::vector<double> unwrapped;
    unwrapped.reserve(angles_rad.size());
    for (double a : angles_rad) {
        double d = std::remainder(a - mean, 2.0 * std::numbers::pi);
        unwrapped.push_back(mean + d);
    }
    return wrap_degrees(detail::median(std::move(unwrapped)) * 180.0 / std::numbers::pi);
}

struct PafCandidate {
    Point centroid; ///< ellipse centroid
    double major_axis_length = 0.0;
    Point major_axis_normal { 1.0, 0.0 }; ///< unit, pointing toward the wrist
    double angle_deg = 0.0; ///< circular median of the field direction
    double score = 0.0; ///< median field magnitude
    Point wrist_estimate;
    Point elbow_estimate;
    double estimate_score = 0.0; ///< lambda_s * score
    int region_size = 0;
};

namespace detail {
    template <typename T>
    void sort_by_score_desc(std::vector<T>& items)
    {
        std::stable_sort(items.begin(), items.end(), [](const T& a, const T& b) { return a.score > b.score; });
    }
} // namespace detail

/// Candidates from one part map: threshold (strictly above tau_pcm), label
/// with 8-connectivity, weighted centroid and peak per region. Sorted by
/// descending score.
inline std::vector<PcmCandidate> extract_pcm_candidates(PlaneView pcm, const PipelineConfig& config)
{
    const auto labeled = connected_components(threshold_above(pcm, config.tau_pcm).view(), 8);
    std::vector<PcmCandidate> out;
    out.reserve(labeled.count);
    for (const auto& pixels : region_pixels(labeled)) {
        out.push_back(region_props_pcm(pcm, pixels));
    }
    detail::sort_by_score_desc(out);
    return out;
}

/// Arm candidates from one affinity field pair.
inline std::vector<PafCandidate> extract_paf_candidates(PlaneView paf_x, PlaneView paf_y, const PipelineConfig& config)
{
    if (paf_x.width != paf_y.width || paf_x.height != paf_y.height) {
        throw std::invalid_argument("extract_paf_candidates: mismatched plane sizes");
    }
    Plane magnitude(paf_x.width, paf_x.height);
    auto mag = magnitude.pixels();
    for (std::size_t i = 0; i < mag.size(); ++i) {
        mag[i] = static_cast<float>(std::hypot(static_cast<double>(paf_x.pixels[i]), static_cast<double>(paf_y.pixels[i])));
    }
    const auto labeled = connected_components(threshold_above(magnitude.view(), config.tau_paf).view(), 8);

    std::vector<PafCandidate> out;
    out.reserve(labeled.count);
    std::vector<double> angles;
    std::vector<double> magnitudes;
    for (const auto& pixels : region_pixels(labeled)) {
        angles.clear();
        magnitudes.clear();
        Point mean_vec;
        for (const Cell c : pixels) {
            const double vx = paf_x(c.x, c.y);
            const double vy = paf_y(c.x, c.y);
            angles.push_back(std::atan2(vy, vx));
            magnitudes.push_back(magnitude(c.x, c.y));
            mean_vec = mean_vec + Point { vx, vy };
        }

        const auto ellipse = region_props_ellipse(pixels);
        PafCandidate cand;
        cand.region_size = static_cast<int>(pixels.size());
        cand.centroid = ellipse.centroid;
        cand.major_axis_length = ellipse.major_axis_length;
        cand.major_axis_normal = dot(ellipse.major_axis, mean_vec) >= 0.0 ? ellipse.major_axis : -1.0 * ellipse.major_axis;
        cand.angle_deg = circular_median_deg(angles);
        cand.score = std::min(detail::median(magnitudes), 1.0);
        const double half = config.lambda_a * cand.major_axis_length / 2.0;
        cand.wrist_estimate = cand.centroid + half * cand.major_axis_normal;
        cand.elbow_estimate = cand.centroid - half * cand.major_axis_normal;
        cand.estimate_score = config.lambda_s * cand.score;
        out.push_back(cand);
    }
    detail::sort_by_score_desc(out);
    return out;
}

} // namespace armloc
