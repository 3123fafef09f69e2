#pragma once

/// \file core.hpp
/// \brief Arm taxonomy, annotations, heatmap stacks and pipeline parameters.
///
/// Coordinates are pixels with x to the right and y down; integer values sit
/// on pixel centers. Angles follow atan2(dy, dx) in that frame, so a wrist
/// below its elbow yields a positive angle.

#include "armloc/image.hpp"

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace armloc {

struct Point {
    double x = 0.0;
    double y = 0.0;

    friend Point operator+(Point a, Point b) { return { a.x + b.x, a.y + b.y }; }
    friend Point operator-(Point a, Point b) { return { a.x - b.x, a.y - b.y }; }
    friend Point operator*(double s, Point p) { return { s * p.x, s * p.y }; }
    friend bool operator==(Point, Point) = default;
};

inline double dot(Point a, Point b) { return a.x * b.x + a.y * b.y; }
inline double norm(Point p) { return std::hypot(p.x, p.y); }
inline double squared_distance(Point a, Point b)
{
    const double dx = a.x - b.x;
    const double dy = a.y - b.y;
    return dx * dx + dy * dy;
}
inline double distance(Point a, Point b) { return std::sqrt(squared_distance(a, b)); }

enum class ArmClass : std::uint8_t {
    DriverLeft = 0,
    DriverRight = 1,
    PassengerLeft = 2,
    PassengerRight = 3,
};

inline constexpr int kNumArms = 4;
inline constexpr int kNumParts = 8;
inline constexpr int kNumChannels = 17;
inline constexpr int kBackgroundChannel = 16;
inline constexpr int kDefaultStride = 8;

inline constexpr std::array<ArmClass, kNumArms> kAllArms {
    ArmClass::DriverLeft, ArmClass::DriverRight, ArmClass::PassengerLeft, ArmClass::PassengerRight
};

enum class Joint : std::uint8_t { Elbow = 0, Wrist = 1 };

constexpr int arm_index(ArmClass arm) { return static_cast<int>(arm); }

/// Swaps driver/passenger and left/right: the class an arm gets after a
/// horizontal reflection of the cabin.
constexpr ArmClass mirror(ArmClass arm)
{
    switch (arm) {
    case ArmClass::DriverLeft: return ArmClass::PassengerRight;
    case ArmClass::DriverRight: return ArmClass::PassengerLeft;
    case ArmClass::PassengerLeft: return ArmClass::DriverRight;
    case ArmClass::PassengerRight: return ArmClass::DriverLeft;
    }
    return arm;
}

constexpr bool is_driver(ArmClass arm) { return arm == ArmClass::DriverLeft || arm == ArmClass::DriverRight; }

// Channel layout: [elbow, wrist] per arm, then [paf_x, paf_y] per arm, then background.
constexpr int pcm_channel(ArmClass arm, Joint joint) { return 2 * arm_index(arm) + static_cast<int>(joint); }
constexpr int paf_x_channel(ArmClass arm) { return kNumParts + 2 * arm_index(arm); }
constexpr int paf_y_channel(ArmClass arm) { return kNumParts + 2 * arm_index(arm) + 1; }

constexpr std::string_view to_string(ArmClass arm)
{
    switch (arm) {
    case ArmClass::DriverLeft: return "driver_left";
    case ArmClass::DriverRight: return "driver_right";
    case ArmClass::PassengerLeft: return "passenger_left";
    case ArmClass::PassengerRight: return "passenger_right";
    }
    return "unknown";
}

inline std::optional<ArmClass> arm_from_string(std::string_view name)
{
    for (auto arm : kAllArms) {
        if (to_string(arm) == name) {
            return arm;
        }
    }
    return std::nullopt;
}

constexpr std::string_view to_string(Joint joint) { return joint == Joint::Elbow ? "elbow" : "wrist"; }

enum class DriveMode : std::uint8_t { Manual, Autonomous };

constexpr std::string_view to_string(DriveMode mode) { return mode == DriveMode::Manual ? "manual" : "autonomous"; }

inline std::optional<DriveMode> drive_mode_from_string(std::string_view name)
{
    if (name == "manual") {
        return DriveMode::Manual;
    }
    if (name == "autonomous") {
        return DriveMode::Autonomous;
    }
    return std::nullopt;
}

struct JointAnnotation {
    ArmClass arm = ArmClass::DriverLeft;
    Point wrist;
    Point elbow;
    bool visible = true;

    [[nodiscard]] Point joint(Joint j) const { return j == Joint::Wrist ? wrist : elbow; }
    [[nodiscard]] double length() const { return distance(wrist, elbow); }
};

struct ImageSize {
    int width = 0;
    int height = 0;

    friend bool operator==(ImageSize, ImageSize) = default;
};

struct FrameAnnotation {
    std::string frame_id;
    ImageSize image_size;
    std::vector<JointAnnotation> arms;
    std::optional<DriveMode> drive_mode;

    [[nodiscard]] const JointAnnotation* find(ArmClass arm) const
    {
        for (const auto& a : arms) {
            if (a.arm == arm) {
                return &a;
            }
        }
        return nullptr;
    }
};

/// Throws std::invalid_argument on duplicate classes or degenerate visible arms.
inline void validate(const FrameAnnotation& frame)
{
    std::array<bool, kNumArms> seen {};
    for (const auto& a : frame.arms) {
        auto& s = seen[arm_index(a.arm)];
        if (s) {
            throw std::invalid_argument("frame '" + frame.frame_id + "': duplicate arm class " + std::string(to_string(a.arm)));
        }
        s = true;
        if (a.visible && a.wrist == a.elbow) {
            throw std::invalid_argument("frame '" + frame.frame_id + "': wrist equals elbow for " + std::string(to_string(a.arm)));
        }
        if (!std::isfinite(a.wrist.x) || !std::isfinite(a.wrist.y) || !std::isfinite(a.elbow.x) || !std::isfinite(a.elbow.y)) {
            throw std::invalid_argument("frame '" + frame.frame_id + "': non-finite joint coordinate");
        }
    }
}

/// 17 planes, channel-major: 8 part confidence maps, 8 affinity components, background.
class HeatmapStack {
public:
    HeatmapStack() = default;
    HeatmapStack(int width, int height, int stride = kDefaultStride)
        : width_(width), height_(height), stride_(stride)
    {
        if (width <= 0 || height <= 0) {
            throw std::invalid_argument("heatmap stack must have positive dimensions");
        }
        if (stride < 1) {
            throw std::invalid_argument("stride must be >= 1");
        }
        data_.assign(static_cast<std::size_t>(width) * height * kNumChannels, 0.0f);
    }

    HeatmapStack(int width, int height, std::vector<float> data, int stride = kDefaultStride)
        : width_(width), height_(height), stride_(stride), data_(std::move(data))
    {
        if (width <= 0 || height <= 0) {
            throw std::invalid_argument("heatmap stack must have positive dimensions");
        }
        if (stride < 1) {
            throw std::invalid_argument("stride must be >= 1");
        }
        if (data_.size() != static_cast<std::size_t>(width) * height * kNumChannels) {
            throw std::invalid_argument("heatmap stack data must hold exactly 17 planes");
        }
    }

    [[nodiscard]] int width() const { return width_; }
    [[nodiscard]] int height() const { return height_; }
    [[nodiscard]] int stride() const { return stride_; }
    [[nodiscard]] std::size_t plane_size() const { return static_cast<std::size_t>(width_) * height_; }

    [[nodiscard]] PlaneView channel(int c) const
    {
        return { std::span<const float>(data_).subspan(c * plane_size(), plane_size()), width_, height_ };
    }
    std::span<float> channel_data(int c) { return std::span<float>(data_).subspan(c * plane_size(), plane_size()); }

    void set_channel(int c, PlaneView plane)
    {
        if (plane.width != width_ || plane.height != height_) {
            throw std::invalid_argument("plane size does not match stack");
        }
        std::copy(plane.pixels.begin(), plane.pixels.end(), channel_data(c).begin());
    }

    [[nodiscard]] std::span<const float> data() const { return data_; }
    std::span<float> data() { return data_; }

    friend bool operator==(const HeatmapStack&, const HeatmapStack&) = default;

private:
    int width_ = 0;
    int height_ = 0;
    int stride_ = kDefaultStride;
    std::vector<float> data_;
};

/// Checks the value-range invariants of a stack; returns a description of the
/// first violation, or nothing.
inline std::optional<std::string> check_invariants(const HeatmapStack& stack, double eps = 1e-6)
{
    for (int c = 0; c < kNumChannels; ++c) {
        if (c >= kNumParts && c < 2 * kNumParts) {
            continue;
        }
        for (float v : stack.channel(c).pixels) {
            if (!(v >= 0.0f && v <= 1.0f)) {
                return "channel " + std::to_string(c) + " has value outside [0, 1]";
            }
        }
    }
    for (auto arm : kAllArms) {
        const auto px = stack.channel(paf_x_channel(arm)).pixels;
        const auto py = stack.channel(paf_y_channel(arm)).pixels;
        for (std::size_t i = 0; i < px.size(); ++i) {
            if (!(std::abs(px[i]) <= 1.0f && std::abs(py[i]) <= 1.0f)) {
                return "affinity component outside [-1, 1] for " + std::string(to_string(arm));
            }
            if (std::hypot(static_cast<double>(px[i]), static_cast<double>(py[i])) > 1.0 + eps) {
                return "affinity magnitude above 1 for " + std::string(to_string(arm));
            }
        }
    }
    return std::nullopt;
}

struct PipelineConfig {
    double sigma_pcm = 1.5; // heatmap px
    double sigma_paf = 1.0; // heatmap px
    double tau_pcm = 0.1;
    double tau_paf = 0.1;
    double lambda_a = 0.75;
    double lambda_s = 0.5;
    double sigma_s = 3.5; // heatmap px; below ~3 long diagonal arms lose their part-map joints to the field estimate
    double lambda_h = 0.25;
    double presence_threshold = 0.2;
    int stride = kDefaultStride;
};

inline void validate(const PipelineConfig& c)
{
    auto require = [](bool ok, const char* what) {
        if (!ok) {
            throw std::invalid_argument(std::string("invalid pipeline config: ") + what);
        }
    };
    require(c.sigma_pcm > 0 && c.sigma_paf > 0 && c.sigma_s > 0, "sigmas must be > 0");
    require(c.tau_pcm > 0 && c.tau_pcm < 1, "tau_pcm must lie in (0, 1)");
    require(c.tau_paf > 0 && c.tau_paf < 1, "tau_paf must lie in (0, 1)");
    require(c.lambda_a > 0 && c.lambda_a <= 2, "lambda_a must lie in (0, 2]");
    require(c.lambda_s > 0 && c.lambda_s <= 1, "lambda_s must lie in (0, 1]");
    require(c.lambda_h >= 0, "lambda_h must be >= 0");
    require(c.presence_threshold >= 0 && c.presence_threshold < 1, "presence_threshold must lie in [0, 1)");
    require(c.stride >= 1, "stride must be >= 1");
}

/// Cell p maps to the center of its stride x stride block in the input image.
inline Point heatmap_to_input_coords(Point p, int stride)
{
    if (stride < 1) {
        throw std::invalid_argument("stride must be >= 1");
    }
    const double offset = (stride - 1) / 2.0;
    return { p.x * stride + offset, p.y * stride + offset };
}

/// Continuous inverse of heatmap_to_input_coords.
inline Point input_to_heatmap_coords(Point p, int stride)
{
    if (stride < 1) {
        throw std::invalid_argument("stride must be >= 1");
    }
    const double offset = (stride - 1) / 2.0;
    return { (p.x - offset) / stride, (p.y - offset) / stride };
}

struct Cell {
    int x = 0;
    int y = 0;
    friend bool operator==(Cell, Cell) = default;
};

/// Integer inverse of heatmap_to_input_coords: floor((p - offset) / stride).
inline Cell input_to_heatmap_cell(Point p, int stride)
{
    if (stride < 1) {
        throw std::invalid_argument("stride must be >= 1");
    }
    const double offset = (stride - 1) / 2.0;
    return { static_cast<int>(std::floor((p.x - offset) / stride)), static_cast<int>(std::floor((p.y - offset) / stride)) };
}

inline int heatmap_extent(int input_extent, int stride) { return input_extent / stride; }

} // namespace armloc
