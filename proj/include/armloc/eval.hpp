#pragma once

/// \file eval.hpp
/// \brief PCK and arm-angle detection-rate curves.

#include "armloc/associate.hpp"
#include "armloc/core.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

namespace armloc {

/// Detections of one frame, keyed for evaluation.
struct FrameResult {
    std::string frame_id;
    ImageSize image_size;
    std::optional<DriveMode> drive_mode;
    FrameDetections arms;
};

struct EvalCurve {
    std::vector<double> thresholds;
    std::vector<double> detection_rate;
    int n_samples = 0;

    /// Rate at an exact threshold value; throws if the threshold is absent.
    [[nodiscard]] double rate_at(double threshold) const
    {
        for (std::size_t i = 0; i < thresholds.size(); ++i) {
            if (std::abs(thresholds[i] - threshold) < 1e-12) {
                return detection_rate[i];
            }
        }
        throw std::out_of_range("threshold not on curve");
    }
};

/// Mean wrist-elbow distance over all visible annotated arms, input pixels.
inline double average_arm_length(std::span<const FrameAnnotation> frames)
{
    double sum = 0.0;
    std::size_t n = 0;
    for (const auto& f : frames) {
        for (const auto& a : f.arms) {
            if (a.visible) {
                sum += a.length();
                ++n;
            }
        }
    }
    if (n == 0) {
        throw std::invalid_argument("average_arm_length: no visible arms");
    }
    return sum / static_cast<double>(n);
}

/// Full-quadrant arm angle atan2(y_w - y_e, x_w - x_e) in degrees, (-180, 180].
inline double ground_truth_angle(Point wrist, Point elbow)
{
    if (wrist == elbow) {
        throw std::invalid_argument("ground_truth_angle: wrist equals elbow");
    }
    return wrap_degrees(std::atan2(wrist.y - elbow.y, wrist.x - elbow.x) * 180.0 / std::numbers::pi);
}

/// Absolute difference on the circle, in [0, 180].
inline double angle_difference_deg(double a, double b)
{
    return std::abs(wrap_degrees(a - b));
}

namespace detail {

    inline void require_ascending(std::span<const double> thresholds)
    {
        if (thresholds.empty()) {
            throw std::invalid_argument("threshold list is empty");
        }
        if (!std::is_sorted(thresholds.begin(), thresholds.end())) {
            throw std::invalid_argument("thresholds must be ascending");
        }
    }

    /// Builds a curve from per-sample errors; missing samples carry +inf.
    inline EvalCurve curve_from_errors(std::span<const double> errors, std::span<const double> thresholds, double scale)
    {
        EvalCurve c;
        c.thresholds.assign(thresholds.begin(), thresholds.end());
        c.n_samples = static_cast<int>(errors.size());
        for (double t : thresholds) {
            if (errors.empty()) {
                c.detection_rate.push_back(0.0);
                continue;
            }
            const auto hits = std::count_if(errors.begin(), errors.end(), [&](double e) { return e <= t * scale; });
            c.detection_rate.push_back(static_cast<double>(hits) / static_cast<double>(errors.size()));
        }
        return c;
    }

    inline std::unordered_map<std::string, const FrameResult*> index_by_frame(std::span<const FrameResult> detections)
    {
        std::unordered_map<std::string, const FrameResult*> map;
        for (const auto& d : detections) {
            map.emplace(d.frame_id, &d);
        }
        return map;
    }

} // namespace detail

struct PckResult {
    std::array<EvalCurve, kNumParts> per_part; ///< indexed by pcm_channel()
    EvalCurve all_parts;
};

/// Fraction of ground-truth joints whose detection lies within
/// t * norm_length (inclusive). Absent detections fail at every threshold.
inline PckResult pck_curve(std::span<const FrameResult> detections, std::span<const FrameAnnotation> ground_truth,
    double norm_length, std::span<const double> thresholds)
{
    if (ground_truth.empty()) {
        throw std::invalid_argument("pck_curve: empty ground truth");
    }
    if (!(norm_length > 0)) {
        throw std::invalid_argument("pck_curve: norm_length must be > 0");
    }
    detail::require_ascending(thresholds);
    const auto by_frame = detail::index_by_frame(detections);
    constexpr double kMissing = std::numeric_limits<double>::infinity();

    std::array<std::vector<double>, kNumParts> errors;
    std::vector<double> all;
    for (const auto& gt : ground_truth) {
        const auto it = by_frame.find(gt.frame_id);
        for (const auto& arm : gt.arms) {
            if (!arm.visible) {
                continue;
            }
            const ArmDetection* det = nullptr;
            if (it != by_frame.end()) {
                det = &it->second->arms[arm_index(arm.arm)];
                if (!det->present) {
                    det = nullptr;
                }
            }
            for (auto joint : { Joint::Elbow, Joint::Wrist }) {
                double e = kMissing;
                if (det) {
                    e = distance(joint == Joint::Wrist ? det->wrist : det->elbow, arm.joint(joint));
                }
                errors[pcm_channel(arm.arm, joint)].push_back(e);
                all.push_back(e);
            }
        }
    }
    if (all.empty()) {
        throw std::invalid_argument("pck_curve: no visible ground-truth joints");
    }

    PckResult out;
    for (int p = 0; p < kNumParts; ++p) {
        out.per_part[p] = detail::curve_from_errors(errors[p], thresholds, norm_length);
    }
    out.all_parts = detail::curve_from_errors(all, thresholds, norm_length);
    return out;
}

struct AngleResult {
    std::array<EvalCurve, kNumArms> per_arm;
    EvalCurve all_arms;
};

/// Fraction of visible ground-truth arms whose decoded angle lies within each
/// threshold (degrees, inclusive, measured on the circle). Arms shorter than
/// min_arm_length input pixels are skipped.
inline AngleResult angle_curve(std::span<const FrameResult> detections, std::span<const FrameAnnotation> ground_truth,
    std::span<const double> thresholds_deg, double min_arm_length = 0.0)
{
    if (ground_truth.empty()) {
        throw std::invalid_argument("angle_curve: empty ground truth");
    }
    detail::require_ascending(thresholds_deg);
    const auto by_frame = detail::index_by_frame(detections);
    constexpr double kMissing = std::numeric_limits<double>::infinity();

    std::array<std::vector<double>, kNumArms> errors;
    std::vector<double> all;
    for (const auto& gt : ground_truth) {
        const auto it = by_frame.find(gt.frame_id);
        for (const auto& arm : gt.arms) {
            if (!arm.visible || arm.length() < min_arm_length) {
                continue;
            }
            double e = kMissing;
            if (it != by_frame.end()) {
                const auto& det = it->second->arms[arm_index(arm.arm)];
                if (det.present) {
                    e = angle_difference_deg(det.theta_deg, ground_truth_angle(arm.wrist, arm.elbow));
                }
            }
            errors[arm_index(arm.arm)].push_back(e);
            all.push_back(e);
        }
    }
    if (all.empty()) {
        throw std::invalid_argument("angle_curve: no visible ground-truth arms");
    }

    AngleResult out;
    for (int a = 0; a < kNumArms; ++a) {
        out.per_arm[a] = detail::curve_from_errors(errors[a], thresholds_deg, 1.0);
    }
    out.all_arms = detail::curve_from_errors(all, thresholds_deg, 1.0);
    return out;
}

} // namespace armloc
