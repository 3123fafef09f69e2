#pragma once

/// \file io.hpp
/// \brief File formats: HMAP heatmap containers, annotation JSON, detection
/// JSONL, pipeline config JSON, curve CSV, and 8-bit PNG images.
///
/// HMAP layout (little-endian):
///   bytes 0..3   magic "HMAP"
///   byte  4      version (1)
///   bytes 5..16  width, height, channels as uint32
///   then         width * height * channels float32, channel-major,
///                row-major within a channel; nothing after.

#include "armloc/associate.hpp"
#include "armloc/augment.hpp"
#include "armloc/core.hpp"
#include "armloc/eval.hpp"

#include <json.hpp>
#include <png.h>

#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace armloc {

/// Exit status associated with each error family.
enum class ExitCode : int { Ok = 0, Usage = 1, Io = 2, Format = 3 };

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

enum class FormatErrc {
    BadMagic,
    BadVersion,
    Truncated,
    TrailingData,
    BadDimensions,
    BadChannelCount,
    BadJson,
    BadSchema,
    BadImage,
};

class FormatError : public std::runtime_error {
public:
    FormatError(FormatErrc code, const std::string& what)
        : std::runtime_error(what), code_(code)
    {
    }
    [[nodiscard]] FormatErrc code() const { return code_; }

private:
    FormatErrc code_;
};

// ---------------------------------------------------------------- raw files

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "' for reading");
    }
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    if (in.bad()) {
        throw IoError("error reading '" + path.string() + "'");
    }
    return bytes;
}

inline std::string read_file_text(const std::filesystem::path& path)
{
    const auto bytes = read_file_bytes(path);
    return { bytes.begin(), bytes.end() };
}

inline void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes)
{
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) {
        throw IoError("cannot open '" + path.string() + "' for writing");
    }
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) {
        throw IoError("error writing '" + path.string() + "'");
    }
}

inline void write_file_text(const std::filesystem::path& path, std::string_view text)
{
    write_file_bytes(path, { reinterpret_cast<const std::uint8_t*>(text.data()), text.size() });
}

// --------------------------------------------------------------------- HMAP

inline constexpr std::array<char, 4> kHmapMagic { 'H', 'M', 'A', 'P' };
inline constexpr std::uint8_t kHmapVersion = 1;
inline constexpr std::size_t kHmapHeaderSize = 17;

struct HmapFile {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::uint32_t channels = 0;
    std::vector<float> data;

    friend bool operator==(const HmapFile&, const HmapFile&) = default;
};

namespace detail {
    inline void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v)
    {
        for (int i = 0; i < 4; ++i) {
            out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
        }
    }
    inline std::uint32_t get_u32(std::span<const std::uint8_t> in, std::size_t at)
    {
        return static_cast<std::uint32_t>(in[at]) | static_cast<std::uint32_t>(in[at + 1]) << 8
            | static_cast<std::uint32_t>(in[at + 2]) << 16 | static_cast<std::uint32_t>(in[at + 3]) << 24;
    }
} // namespace detail

inline std::vector<std::uint8_t> encode_hmap(const HmapFile& file)
{
    const std::uint64_t expected = std::uint64_t { file.width } * file.height * file.channels;
    if (file.data.size() != expected) {
        throw std::invalid_argument("encode_hmap: data length does not match dimensions");
    }
    std::vector<std::uint8_t> out;
    out.reserve(kHmapHeaderSize + file.data.size() * 4);
    out.insert(out.end(), kHmapMagic.begin(), kHmapMagic.end());
    out.push_back(kHmapVersion);
    detail::put_u32(out, file.width);
    detail::put_u32(out, file.height);
    detail::put_u32(out, file.channels);
    for (float f : file.data) {
        detail::put_u32(out, std::bit_cast<std::uint32_t>(f));
    }
    return out;
}

inline HmapFile decode_hmap(std::span<const std::uint8_t> bytes)
{
    if (bytes.size() < kHmapMagic.size() || !std::equal(kHmapMagic.begin(), kHmapMagic.end(), bytes.begin())) {
        throw FormatError(FormatErrc::BadMagic, "not an HMAP file (bad magic)");
    }
    if (bytes.size() < kHmapHeaderSize) {
        throw FormatError(FormatErrc::Truncated, "HMAP header truncated");
    }
    if (bytes[4] != kHmapVersion) {
        throw FormatError(FormatErrc::BadVersion, "unsupported HMAP version " + std::to_string(bytes[4]));
    }
    HmapFile file;
    file.width = detail::get_u32(bytes, 5);
    file.height = detail::get_u32(bytes, 9);
    file.channels = detail::get_u32(bytes, 13);
    if (file.width == 0 || file.height == 0 || file.channels == 0) {
        throw FormatError(FormatErrc::BadDimensions, "HMAP dimensions must be non-zero");
    }
    const std::uint64_t payload = bytes.size() - kHmapHeaderSize;
    const std::uint64_t available = payload / 4;
    // overflow-safe form of width * height * channels > available
    if (file.width > available || file.height > available / file.width
        || file.channels > available / (std::uint64_t { file.width } * file.height)) {
        throw FormatError(FormatErrc::Truncated, "HMAP data truncated: " + std::to_string(payload) + " payload bytes for "
                + std::to_string(file.width) + "x" + std::to_string(file.height) + "x" + std::to_string(file.channels));
    }
    const std::uint64_t count = std::uint64_t { file.width } * file.height * file.channels;
    if (payload != count * 4) {
        throw FormatError(FormatErrc::TrailingData, "HMAP has " + std::to_string(payload - count * 4) + " trailing bytes");
    }
    file.data.resize(count);
    for (std::size_t i = 0; i < count; ++i) {
        file.data[i] = std::bit_cast<float>(detail::get_u32(bytes, kHmapHeaderSize + 4 * i));
    }
    return file;
}

inline HmapFile read_hmap(const std::filesystem::path& path) { return decode_hmap(read_file_bytes(path)); }

inline void write_hmap(const std::filesystem::path& path, const HmapFile& file) { write_file_bytes(path, encode_hmap(file)); }

inline HmapFile to_hmap(const HeatmapStack& stack)
{
    return { static_cast<std::uint32_t>(stack.width()), static_cast<std::uint32_t>(stack.height()), kNumChannels,
        { stack.data().begin(), stack.data().end() } };
}

inline HmapFile to_hmap(const Image<double>& plane)
{
    HmapFile f { static_cast<std::uint32_t>(plane.width()), static_cast<std::uint32_t>(plane.height()), 1, {} };
    f.data.reserve(plane.size());
    for (double v : plane.pixels()) {
        f.data.push_back(static_cast<float>(v));
    }
    return f;
}

inline HeatmapStack to_stack(HmapFile file, int stride = kDefaultStride)
{
    if (file.channels != kNumChannels) {
        throw FormatError(FormatErrc::BadChannelCount,
            "expected a 17-channel heatmap stack, found " + std::to_string(file.channels) + " channels");
    }
    return HeatmapStack(static_cast<int>(file.width), static_cast<int>(file.height), std::move(file.data), stride);
}

inline HeatmapStack read_stack(const std::filesystem::path& path, int stride = kDefaultStride)
{
    return to_stack(read_hmap(path), stride);
}

// ---------------------------------------------------------------------- PNG

/// 8-bit image as read from disk: one (gray) or three (RGB) interleaved channels.
struct Png8 {
    int width = 0;
    int height = 0;
    int channels = 1;
    std::vector<std::uint8_t> pixels;
};

inline Png8 read_png(const std::filesystem::path& path)
{
    const auto bytes = read_file_bytes(path);
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
        throw FormatError(FormatErrc::BadImage, "cannot decode PNG '" + path.string() + "': " + image.message);
    }
    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    Png8 out;
    out.width = static_cast<int>(image.width);
    out.height = static_cast<int>(image.height);
    out.channels = color ? 3 : 1;
    out.pixels.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.pixels.data(), 0, nullptr)) {
        png_image_free(&image);
        throw FormatError(FormatErrc::BadImage, "cannot decode PNG '" + path.string() + "': " + image.message);
    }
    return out;
}

inline void write_png(const std::filesystem::path& path, const Png8& img)
{
    if (img.channels != 1 && img.channels != 3) {
        throw std::invalid_argument("write_png: only gray or RGB images");
    }
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    png_alloc_size_t size = 0;
    if (!png_image_write_get_memory_size(image, size, 0, img.pixels.data(), 0, nullptr)) {
        throw FormatError(FormatErrc::BadImage, std::string("cannot encode PNG: ") + image.message);
    }
    std::vector<std::uint8_t> buffer(size);
    if (!png_image_write_to_memory(&image, buffer.data(), &size, 0, img.pixels.data(), 0, nullptr)) {
        throw FormatError(FormatErrc::BadImage, std::string("cannot encode PNG: ") + image.message);
    }
    buffer.resize(size);
    write_file_bytes(path, buffer);
}

/// Gray plane in [0, 1] (value / 255). Color files are reduced with 601 luma.
inline Plane png_to_gray(const Png8& png)
{
    if (png.channels == 1) {
        Plane out(png.width, png.height);
        auto dst = out.pixels();
        for (std::size_t i = 0; i < dst.size(); ++i) {
            dst[i] = static_cast<float>(png.pixels[i] / 255.0);
        }
        return out;
    }
    ColorImage rgb { Plane(png.width, png.height), Plane(png.width, png.height), Plane(png.width, png.height) };
    for (std::size_t i = 0; i < rgb.r.size(); ++i) {
        rgb.r.pixels()[i] = static_cast<float>(png.pixels[3 * i] / 255.0);
        rgb.g.pixels()[i] = static_cast<float>(png.pixels[3 * i + 1] / 255.0);
        rgb.b.pixels()[i] = static_cast<float>(png.pixels[3 * i + 2] / 255.0);
    }
    return to_grayscale(rgb);
}

inline std::uint8_t to_byte(double v) { return static_cast<std::uint8_t>(std::lround(std::clamp(v, 0.0, 1.0) * 255.0)); }

inline Png8 gray_to_png(PlaneView plane)
{
    Png8 out { plane.width, plane.height, 1, {} };
    out.pixels.reserve(plane.size());
    for (float v : plane.pixels) {
        out.pixels.push_back(to_byte(v));
    }
    return out;
}

/// "Hot" colormap: black -> red -> yellow -> white as t goes 0 -> 1.
inline std::array<std::uint8_t, 3> hot_colormap(double t)
{
    t = std::clamp(t, 0.0, 1.0);
    return { to_byte(3.0 * t), to_byte(3.0 * t - 1.0), to_byte(3.0 * t - 2.0) };
}

/// Occupancy grid rendered through the hot colormap, normalized by its maximum.
inline Png8 occupancy_to_png(const Image<double>& grid)
{
    const auto px = grid.pixels();
    const double peak = px.empty() ? 0.0 : *std::max_element(px.begin(), px.end());
    Png8 out { grid.width(), grid.height(), 3, {} };
    out.pixels.reserve(px.size() * 3);
    for (double v : px) {
        const auto rgb = hot_colormap(peak > 0 ? v / peak : 0.0);
        out.pixels.insert(out.pixels.end(), rgb.begin(), rgb.end());
    }
    return out;
}

// --------------------------------------------------------------------- JSON

using Json = nlohmann::json;

namespace detail {

    inline Json parse_json(std::string_view text, const std::string& what)
    {
        try {
            return Json::parse(text);
        } catch (const Json::parse_error& e) {
            throw FormatError(FormatErrc::BadJson, what + ": " + e.what());
        }
    }

    [[noreturn]] inline void schema_error(const std::string& msg) { throw FormatError(FormatErrc::BadSchema, msg); }

    inline Point parse_point(const Json& j, const std::string& ctx)
    {
        if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number()) {
            schema_error(ctx + ": expected [x, y]");
        }
        return { j[0].get<double>(), j[1].get<double>() };
    }

    inline Json point_json(Point p) { return Json::array({ p.x, p.y }); }

    inline const Json& require(const Json& obj, const char* key, const std::string& ctx)
    {
        const auto it = obj.find(key);
        if (it == obj.end()) {
            schema_error(ctx + ": missing '" + key + "'");
        }
        return *it;
    }

    inline int require_int(const Json& obj, const char* key, const std::string& ctx)
    {
        const auto& v = require(obj, key, ctx);
        if (!v.is_number_integer()) {
            schema_error(ctx + ": '" + key + "' must be an integer");
        }
        return v.get<int>();
    }

    inline std::optional<DriveMode> parse_drive_mode(const Json& obj, const std::string& ctx)
    {
        const auto it = obj.find("drive_mode");
        if (it == obj.end() || it->is_null()) {
            return std::nullopt;
        }
        if (!it->is_string()) {
            schema_error(ctx + ": drive_mode must be a string");
        }
        auto mode = drive_mode_from_string(it->get<std::string>());
        if (!mode) {
            schema_error(ctx + ": unknown drive_mode '" + it->get<std::string>() + "'");
        }
        return mode;
    }

    inline ArmClass parse_arm_class(const Json& obj, const std::string& ctx)
    {
        const auto& c = require(obj, "class", ctx);
        if (!c.is_string()) {
            schema_error(ctx + ": class must be a string");
        }
        auto arm = arm_from_string(c.get<std::string>());
        if (!arm) {
            schema_error(ctx + ": unknown arm class '" + c.get<std::string>() + "'");
        }
        return *arm;
    }

} // namespace detail

inline FrameAnnotation frame_from_json(const Json& j, const std::string& ctx = "frame")
{
    if (!j.is_object()) {
        detail::schema_error(ctx + ": expected an object");
    }
    FrameAnnotation f;
    const auto& id = detail::require(j, "frame_id", ctx);
    if (!id.is_string()) {
        detail::schema_error(ctx + ": frame_id must be a string");
    }
    f.frame_id = id.get<std::string>();
    f.image_size = { detail::require_int(j, "image_w", ctx), detail::require_int(j, "image_h", ctx) };
    if (f.image_size.width <= 0 || f.image_size.height <= 0) {
        detail::schema_error(ctx + ": image size must be positive");
    }
    f.drive_mode = detail::parse_drive_mode(j, ctx);
    const auto& arms = detail::require(j, "arms", ctx);
    if (!arms.is_array()) {
        detail::schema_error(ctx + ": arms must be an array");
    }
    for (const auto& a : arms) {
        const std::string actx = ctx + " arm";
        if (!a.is_object()) {
            detail::schema_error(actx + ": expected an object");
        }
        JointAnnotation ann;
        ann.arm = detail::parse_arm_class(a, actx);
        ann.wrist = detail::parse_point(detail::require(a, "wrist", actx), actx + " wrist");
        ann.elbow = detail::parse_point(detail::require(a, "elbow", actx), actx + " elbow");
        if (const auto it = a.find("visible"); it != a.end()) {
            if (!it->is_boolean()) {
                detail::schema_error(actx + ": visible must be a boolean");
            }
            ann.visible = it->get<bool>();
        }
        f.arms.push_back(ann);
    }
    try {
        validate(f);
    } catch (const std::invalid_argument& e) {
        detail::schema_error(e.what());
    }
    return f;
}

inline Json frame_to_json(const FrameAnnotation& f)
{
    Json arms = Json::array();
    for (const auto& a : f.arms) {
        arms.push_back({ { "class", to_string(a.arm) }, { "wrist", detail::point_json(a.wrist) },
            { "elbow", detail::point_json(a.elbow) }, { "visible", a.visible } });
    }
    Json j { { "frame_id", f.frame_id }, { "image_w", f.image_size.width }, { "image_h", f.image_size.height } };
    if (f.drive_mode) {
        j["drive_mode"] = to_string(*f.drive_mode);
    }
    j["arms"] = std::move(arms);
    return j;
}

inline std::vector<FrameAnnotation> parse_annotations(std::string_view text)
{
    const Json doc = detail::parse_json(text, "annotation file");
    if (!doc.is_object()) {
        detail::schema_error("annotation file: expected an object");
    }
    const auto& frames = detail::require(doc, "frames", "annotation file");
    if (!frames.is_array()) {
        detail::schema_error("annotation file: frames must be an array");
    }
    std::vector<FrameAnnotation> out;
    out.reserve(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        out.push_back(frame_from_json(frames[i], "frame " + std::to_string(i)));
    }
    return out;
}

inline std::string dump_annotations(std::span<const FrameAnnotation> frames)
{
    Json arr = Json::array();
    for (const auto& f : frames) {
        arr.push_back(frame_to_json(f));
    }
    return Json { { "frames", std::move(arr) } }.dump(2) + "\n";
}

inline std::vector<FrameAnnotation> read_annotations(const std::filesystem::path& path)
{
    return parse_annotations(read_file_text(path));
}

// ------------------------------------------------------------ detections

/// One JSONL record. `hand` is included for present arms when lambda_h is given.
inline Json detection_to_json(const FrameResult& r, std::optional<double> lambda_h = std::nullopt)
{
    Json arms = Json::array();
    for (const auto& d : r.arms) {
        Json a { { "class", to_string(d.arm) }, { "present", d.present } };
        if (d.present) {
            a["wrist"] = detail::point_json(d.wrist);
            a["wrist_source"] = to_string(d.wrist_source);
            a["elbow"] = detail::point_json(d.elbow);
            a["elbow_source"] = to_string(d.elbow_source);
            if (lambda_h && d.wrist != d.elbow) {
                a["hand"] = detail::point_json(extrapolate_hand(d.wrist, d.elbow, *lambda_h));
            }
        }
        a["s_w"] = d.s_w;
        a["s_e"] = d.s_e;
        a["s_a"] = d.s_a;
        a["theta_a"] = d.theta_deg;
        a["s_total"] = d.s_total;
        arms.push_back(std::move(a));
    }
    Json j { { "frame_id", r.frame_id }, { "image_w", r.image_size.width }, { "image_h", r.image_size.height } };
    if (r.drive_mode) {
        j["drive_mode"] = to_string(*r.drive_mode);
    }
    j["arms"] = std::move(arms);
    return j;
}

inline FrameResult detection_from_json(const Json& j, const std::string& ctx = "detection")
{
    if (!j.is_object()) {
        detail::schema_error(ctx + ": expected an object");
    }
    FrameResult r;
    const auto& id = detail::require(j, "frame_id", ctx);
    if (!id.is_string()) {
        detail::schema_error(ctx + ": frame_id must be a string");
    }
    r.frame_id = id.get<std::string>();
    r.image_size = { detail::require_int(j, "image_w", ctx), detail::require_int(j, "image_h", ctx) };
    r.drive_mode = detail::parse_drive_mode(j, ctx);
    for (auto arm : kAllArms) {
        r.arms[arm_index(arm)] = absent_arm(arm);
    }
    const auto& arms = detail::require(j, "arms", ctx);
    if (!arms.is_array()) {
        detail::schema_error(ctx + ": arms must be an array");
    }
    auto number = [&](const Json& a, const char* key) {
        const auto it = a.find(key);
        if (it == a.end()) {
            return 0.0;
        }
        if (!it->is_number()) {
            detail::schema_error(ctx + ": '" + key + "' must be a number");
        }
        return it->get<double>();
    };
    auto source = [&](const Json& a, const char* key) {
        const auto it = a.find(key);
        if (it == a.end()) {
            return JointSource::Pcm;
        }
        if (*it == "pcm") {
            return JointSource::Pcm;
        }
        if (*it == "paf") {
            return JointSource::Paf;
        }
        detail::schema_error(ctx + ": '" + key + "' must be \"pcm\" or \"paf\"");
    };
    for (const auto& a : arms) {
        if (!a.is_object()) {
            detail::schema_error(ctx + ": arm entry must be an object");
        }
        ArmDetection d;
        d.arm = detail::parse_arm_class(a, ctx);
        const auto& present = detail::require(a, "present", ctx);
        if (!present.is_boolean()) {
            detail::schema_error(ctx + ": present must be a boolean");
        }
        d.present = present.get<bool>();
        if (d.present) {
            d.wrist = detail::parse_point(detail::require(a, "wrist", ctx), ctx + " wrist");
            d.elbow = detail::parse_point(detail::require(a, "elbow", ctx), ctx + " elbow");
            d.wrist_source = source(a, "wrist_source");
            d.elbow_source = source(a, "elbow_source");
        }
        d.s_w = number(a, "s_w");
        d.s_e = number(a, "s_e");
        d.s_a = number(a, "s_a");
        d.theta_deg = number(a, "theta_a");
        d.s_total = number(a, "s_total");
        r.arms[arm_index(d.arm)] = d;
    }
    return r;
}

inline std::vector<FrameResult> parse_detections_jsonl(std::string_view text)
{
    std::vector<FrameResult> out;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const std::size_t end = std::min(text.find('\n', pos), text.size());
        const std::string_view line = text.substr(pos, end - pos);
        pos = end + 1;
        ++line_no;
        if (line.find_first_not_of(" \t\r") == std::string_view::npos) {
            continue;
        }
        const std::string ctx = "detections line " + std::to_string(line_no);
        out.push_back(detection_from_json(detail::parse_json(line, ctx), ctx));
    }
    return out;
}

inline std::vector<FrameResult> read_detections(const std::filesystem::path& path)
{
    return parse_detections_jsonl(read_file_text(path));
}

// ------------------------------------------------------------------ config

/// Applies the keys present in a JSON object onto `config`. Unknown keys are
/// a schema error.
inline void apply_config_json(PipelineConfig& config, const Json& j)
{
    if (!j.is_object()) {
        detail::schema_error("config: expected an object");
    }
    for (const auto& [key, value] : j.items()) {
        auto num = [&]() {
            if (!value.is_number()) {
                detail::schema_error("config: '" + key + "' must be a number");
            }
            return value.get<double>();
        };
        if (key == "sigma_pcm") {
            config.sigma_pcm = num();
        } else if (key == "sigma_paf") {
            config.sigma_paf = num();
        } else if (key == "tau_pcm") {
            config.tau_pcm = num();
        } else if (key == "tau_paf") {
            config.tau_paf = num();
        } else if (key == "lambda_a") {
            config.lambda_a = num();
        } else if (key == "lambda_s") {
            config.lambda_s = num();
        } else if (key == "sigma_s") {
            config.sigma_s = num();
        } else if (key == "lambda_h") {
            config.lambda_h = num();
        } else if (key == "presence_threshold") {
            config.presence_threshold = num();
        } else if (key == "stride") {
            if (!value.is_number_integer()) {
                detail::schema_error("config: 'stride' must be an integer");
            }
            config.stride = value.get<int>();
        } else {
            detail::schema_error("config: unknown key '" + key + "'");
        }
    }
}

inline Json config_to_json(const PipelineConfig& c)
{
    return { { "sigma_pcm", c.sigma_pcm }, { "sigma_paf", c.sigma_paf }, { "tau_pcm", c.tau_pcm }, { "tau_paf", c.tau_paf },
        { "lambda_a", c.lambda_a }, { "lambda_s", c.lambda_s }, { "sigma_s", c.sigma_s }, { "lambda_h", c.lambda_h },
        { "presence_threshold", c.presence_threshold }, { "stride", c.stride } };
}

// --------------------------------------------------------------------- CSV

/// `threshold,<name>...` header, one row per threshold. All curves must share
/// the same thresholds.
inline std::string curves_to_csv(std::span<const std::string> names, std::span<const EvalCurve* const> curves)
{
    if (names.size() != curves.size() || curves.empty()) {
        throw std::invalid_argument("curves_to_csv: need one name per curve");
    }
    std::ostringstream os;
    os << std::setprecision(10);
    os << "threshold";
    for (const auto& n : names) {
        os << ',' << n;
    }
    os << '\n';
    const auto& ts = curves.front()->thresholds;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        os << ts[i];
        for (const auto* c : curves) {
            if (c->thresholds.size() != ts.size()) {
                throw std::invalid_argument("curves_to_csv: threshold lists differ");
            }
            os << ',' << c->detection_rate[i];
        }
        os << '\n';
    }
    return os.str();
}

} // namespace armloc
