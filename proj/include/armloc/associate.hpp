#pragma once

/// \file associate.hpp
/// \brief Fusing affinity-field arm candidates with part-map joint candidates,
/// per-class arm selection, hand extrapolation and hand occupancy maps.

#include "armloc/core.hpp"
#include "armloc/extract.hpp"

#include <array>
#include <cstdint>
#include <cmath>
#include <numbers>
#include <optional>
#include <string_view>
#include <span>
#include <stdexcept>
#include <vector>

namespace armloc {

enum class JointSource : std::uint8_t { Pcm, Paf };

constexpr std::string_view to_string(JointSource s) { return s == JointSource::Pcm ? "pcm" : "paf"; }

struct JointChoice {
    Point location;
    double score = 0.0; ///< distance-decayed score f(x) of the winner
    JointSource source = JointSource::Paf;
    int pcm_index = -1; ///< index into the candidate list when source == Pcm
};

/// f(x) = S_x exp(-|x - paf_estimate|^2 / sigma_s^2).
inline double joint_affinity(double score, Point x, Point paf_estimate, double sigma_s)
{
    return score * std::exp(-squared_distance(x, paf_estimate) / (sigma_s * sigma_s));
}

/// Argmax of f over the affinity-field estimate and every part-map candidate.
/// Exact ties go to a part-map candidate, then to the lowest index.
inline JointChoice select_joint(Point paf_estimate, double paf_score, std::span<const PcmCandidate> pcms, double sigma_s)
{
    JointChoice best;
    bool have_pcm = false;
    for (std::size_t i = 0; i < pcms.size(); ++i) {
        const double f = joint_affinity(pcms[i].score, pcms[i].location, paf_estimate, sigma_s);
        if (!have_pcm || f > best.score) {
            best = { pcms[i].location, f, JointSource::Pcm, static_cast<int>(i) };
            have_pcm = true;
        }
    }
    if (!have_pcm || paf_score > best.score) {
        best = { paf_estimate, paf_score, JointSource::Paf, -1 };
    }
    return best;
}

/// A decoded arm. detect_arms reports coordinates in input pixels; score_arm
/// works in heatmap pixels.
struct ArmDetection {
    ArmClass arm = ArmClass::DriverLeft;
    bool present = false;
    Point wrist;
    JointSource wrist_source = JointSource::Paf;
    Point elbow;
    JointSource elbow_source = JointSource::Paf;
    double s_w = 0.0;
    double s_e = 0.0;
    double s_a = 0.0;
    double theta_deg = 0.0;
    double s_total = 0.0;
};

inline ArmDetection absent_arm(ArmClass arm)
{
    ArmDetection d;
    d.arm = arm;
    return d;
}

inline ArmDetection score_arm(ArmClass arm, const PafCandidate& paf, std::span<const PcmCandidate> wrists,
    std::span<const PcmCandidate> elbows, const PipelineConfig& config)
{
    const auto w = select_joint(paf.wrist_estimate, paf.estimate_score, wrists, config.sigma_s);
    const auto e = select_joint(paf.elbow_estimate, paf.estimate_score, elbows, config.sigma_s);
    ArmDetection d;
    d.arm = arm;
    d.present = true;
    d.wrist = w.location;
    d.wrist_source = w.source;
    d.elbow = e.location;
    d.elbow_source = e.source;
    d.s_w = w.score;
    d.s_e = e.score;
    d.s_a = paf.score;
    d.theta_deg = paf.angle_deg;
    d.s_total = (d.s_a + d.s_w + d.s_e) / 3.0;
    return d;
}

/// Highest-S_Total arm for one class, in heatmap pixels; nullopt when the
/// affinity field yields no region.
inline std::optional<ArmDetection> best_arm_for_class(const HeatmapStack& stack, ArmClass arm, const PipelineConfig& config)
{
    const auto pafs = extract_paf_candidates(stack.channel(paf_x_channel(arm)), stack.channel(paf_y_channel(arm)), config);
    if (pafs.empty()) {
        return std::nullopt;
    }
    const auto wrists = extract_pcm_candidates(stack.channel(pcm_channel(arm, Joint::Wrist)), config);
    const auto elbows = extract_pcm_candidates(stack.channel(pcm_channel(arm, Joint::Elbow)), config);
    std::optional<ArmDetection> best;
    for (const auto& paf : pafs) {
        auto d = score_arm(arm, paf, wrists, elbows, config);
        if (!best || d.s_total > best->s_total) {
            best = d;
        }
    }
    return best;
}

using FrameDetections = std::array<ArmDetection, kNumArms>;

/// Decodes all four arm classes from a stack. Joints come back in input
/// pixels; classes whose best S_Total does not exceed the presence threshold
/// are reported absent with zero scores.
inline FrameDetections detect_arms(const HeatmapStack& stack, const PipelineConfig& config)
{
    if (stack.data().size() != stack.plane_size() * kNumChannels || stack.plane_size() == 0) {
        throw std::invalid_argument("detect_arms: malformed heatmap stack");
    }
    FrameDetections out;
    for (auto arm : kAllArms) {
        auto best = best_arm_for_class(stack, arm, config);
        if (!best || !(best->s_total > config.presence_threshold)) {
            out[arm_index(arm)] = absent_arm(arm);
            continue;
        }
        best->wrist = heatmap_to_input_coords(best->wrist, stack.stride());
        best->elbow = heatmap_to_input_coords(best->elbow, stack.stride());
        out[arm_index(arm)] = *best;
    }
    return out;
}

/// x_h = x_w + lambda_h (x_w - x_e).
inline Point extrapolate_hand(Point wrist, Point elbow, double lambda_h)
{
    if (wrist == elbow) {
        throw std::invalid_argument("extrapolate_hand: wrist equals elbow");
    }
    return wrist + lambda_h * (wrist - elbow);
}

/// Accumulated hand locations at input resolution. Each sample adds a
/// unit-mass Gaussian splat.
class OccupancyMap {
public:
    OccupancyMap(ImageSize size, double splat_sigma, std::optional<DriveMode> mode_filter = std::nullopt)
        : grid_(size.width, size.height, 0.0), splat_sigma_(splat_sigma), mode_filter_(mode_filter)
    {
        if (size.width <= 0 || size.height <= 0) {
            throw std::invalid_argument("occupancy map needs a positive size");
        }
        if (!(splat_sigma > 0)) {
            throw std::invalid_argument("splat_sigma must be > 0");
        }
    }

    [[nodiscard]] const Image<double>& grid() const { return grid_; }
    [[nodiscard]] int count() const { return count_; }
    [[nodiscard]] double splat_sigma() const { return splat_sigma_; }
    [[nodiscard]] std::optional<DriveMode> mode_filter() const { return mode_filter_; }

    [[nodiscard]] bool accepts(std::optional<DriveMode> frame_mode) const
    {
        return !mode_filter_ || frame_mode == mode_filter_;
    }

    /// Adds one hand sample. Samples rejected by the mode filter or outside
    /// the grid leave the map untouched; returns whether the sample counted.
    bool accumulate(Point hand, std::optional<DriveMode> frame_mode = std::nullopt)
    {
        if (!accepts(frame_mode)) {
            return false;
        }
        if (!(hand.x >= -0.5 && hand.y >= -0.5 && hand.x < grid_.width() - 0.5 && hand.y < grid_.height() - 0.5)) {
            return false;
        }
        const int radius = static_cast<int>(std::ceil(4.0 * splat_sigma_));
        const int cx = static_cast<int>(std::lround(hand.x));
        const int cy = static_cast<int>(std::lround(hand.y));
        const double inv2s2 = 1.0 / (2.0 * splat_sigma_ * splat_sigma_);
        const double norm = 1.0 / (2.0 * std::numbers::pi * splat_sigma_ * splat_sigma_);
        for (int y = std::max(0, cy - radius); y <= std::min(grid_.height() - 1, cy + radius); ++y) {
            for (int x = std::max(0, cx - radius); x <= std::min(grid_.width() - 1, cx + radius); ++x) {
                const double d2 = (x - hand.x) * (x - hand.x) + (y - hand.y) * (y - hand.y);
                grid_(x, y) += norm * std::exp(-d2 * inv2s2);
            }
        }
        ++count_;
        return true;
    }

    /// Elementwise sum of two maps with identical geometry.
    void merge(const OccupancyMap& other)
    {
        if (other.grid_.width() != grid_.width() || other.grid_.height() != grid_.height() || other.splat_sigma_ != splat_sigma_) {
            throw std::invalid_argument("occupancy maps differ in geometry");
        }
        auto dst = grid_.pixels();
        auto src = other.grid_.pixels();
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] += src[i];
        }
        count_ += other.count_;
    }

private:
    Image<double> grid_;
    double splat_sigma_;
    std::optional<DriveMode> mode_filter_;
    int count_ = 0;
};

inline OccupancyMap accumulate_occupancy(OccupancyMap map, Point hand, std::optional<DriveMode> frame_mode)
{
    map.accumulate(hand, frame_mode);
    return map;
}

} // namespace armloc
