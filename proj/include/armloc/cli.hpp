#pragma once

/// \file cli.hpp
/// \brief Command-line front end: labelgen, augment, decode, eval, occupancy
/// and synth subcommands.
///
/// Exit codes: 0 success, 1 usage, 2 I/O, 3 format.

#include "armloc/armloc.hpp"

#include <CLI11.hpp>

#include <atomic>
#include <exception>
#include <filesystem>
#include <functional>
#include <iostream>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

namespace armloc::cli {

namespace fs = std::filesystem;

/// Runs fn(i) for i in [0, n) on up to `jobs` threads. The first exception
/// is rethrown after all workers finish.
inline void parallel_for(std::size_t n, int jobs, const std::function<void(std::size_t)>& fn)
{
    const std::size_t workers = std::min<std::size_t>(std::max(1, jobs), n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) {
            fn(i);
        }
        return;
    }
    std::atomic<std::size_t> next { 0 };
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < n; i = next++) {
                try {
                    fn(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) {
                        error = std::current_exception();
                    }
                    next = n;
                }
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    if (error) {
        std::rethrow_exception(error);
    }
}

class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

namespace detail {

    struct ConfigOverrides {
        std::string config_file;
        std::optional<double> sigma_pcm, sigma_paf, tau_pcm, tau_paf, lambda_a, lambda_s, sigma_s, lambda_h, presence;
        std::optional<int> stride;

        void attach(CLI::App& app)
        {
            app.add_option("--config", config_file, "JSON file with pipeline parameter overrides");
            app.add_option("--sigma-pcm", sigma_pcm, "part map Gaussian width (heatmap px)");
            app.add_option("--sigma-paf", sigma_paf, "affinity field half-width (heatmap px)");
            app.add_option("--tau-pcm", tau_pcm, "part map threshold");
            app.add_option("--tau-paf", tau_paf, "affinity magnitude threshold");
            app.add_option("--lambda-a", lambda_a, "ellipse axis scale for joint estimates");
            app.add_option("--lambda-s", lambda_s, "score factor for field-based joint estimates");
            app.add_option("--sigma-s", sigma_s, "joint selection distance decay (heatmap px)");
            app.add_option("--lambda-h", lambda_h, "hand extrapolation factor");
            app.add_option("--presence-threshold", presence, "minimum S_Total for a present arm");
            app.add_option("--stride", stride, "input pixels per heatmap cell");
        }

        /// defaults < config file < flags
        [[nodiscard]] PipelineConfig resolve() const
        {
            PipelineConfig c;
            if (!config_file.empty()) {
                apply_config_json(c, armloc::detail::parse_json(read_file_text(config_file), "config file"));
            }
            auto set = [](auto& dst, const auto& src) {
                if (src) {
                    dst = *src;
                }
            };
            set(c.sigma_pcm, sigma_pcm);
            set(c.sigma_paf, sigma_paf);
            set(c.tau_pcm, tau_pcm);
            set(c.tau_paf, tau_paf);
            set(c.lambda_a, lambda_a);
            set(c.lambda_s, lambda_s);
            set(c.sigma_s, sigma_s);
            set(c.lambda_h, lambda_h);
            set(c.presence_threshold, presence);
            set(c.stride, stride);
            validate(c);
            return c;
        }
    };

    inline void require_safe_id(const std::string& id)
    {
        if (id.empty() || id.find('/') != std::string::npos || id.find('\\') != std::string::npos || id == "." || id == "..") {
            throw FormatError(FormatErrc::BadSchema, "frame_id '" + id + "' cannot be used as a file name");
        }
    }

    inline std::vector<fs::path> collect_hmaps(const std::vector<std::string>& inputs)
    {
        std::vector<fs::path> files;
        for (const auto& in : inputs) {
            const fs::path p(in);
            if (fs::is_directory(p)) {
                std::vector<fs::path> found;
                for (const auto& e : fs::directory_iterator(p)) {
                    if (e.is_regular_file() && e.path().extension() == ".hmap") {
                        found.push_back(e.path());
                    }
                }
                std::sort(found.begin(), found.end());
                files.insert(files.end(), found.begin(), found.end());
            } else if (fs::exists(p)) {
                files.push_back(p);
            } else {
                throw IoError("input '" + in + "' does not exist");
            }
        }
        if (files.empty()) {
            throw UsageError("no .hmap inputs found");
        }
        return files;
    }

    inline void ensure_directory(const fs::path& dir)
    {
        std::error_code ec;
        fs::create_directories(dir, ec);
        if (ec || !fs::is_directory(dir)) {
            throw IoError("cannot create directory '" + dir.string() + "'");
        }
    }

    inline void ensure_parent(const fs::path& file)
    {
        if (file.has_parent_path()) {
            ensure_directory(file.parent_path());
        }
    }

    inline std::vector<double> linspace_thresholds(double step, int count)
    {
        std::vector<double> t;
        for (int i = 0; i <= count; ++i) {
            t.push_back(i * step);
        }
        return t;
    }

} // namespace detail

// ---------------------------------------------------------------- labelgen

struct LabelgenArgs {
    std::string annotations;
    std::string out_dir;
    int jobs = 1;
    detail::ConfigOverrides cfg;
};

inline int run_labelgen(const LabelgenArgs& a, std::ostream& out)
{
    const auto config = a.cfg.resolve();
    const auto frames = read_annotations(a.annotations);
    for (const auto& f : frames) {
        detail::require_safe_id(f.frame_id);
        if (heatmap_extent(f.image_size.width, config.stride) < 1 || heatmap_extent(f.image_size.height, config.stride) < 1) {
            throw FormatError(FormatErrc::BadSchema, "frame '" + f.frame_id + "' is smaller than one heatmap cell");
        }
    }
    detail::ensure_directory(a.out_dir);
    parallel_for(frames.size(), a.jobs, [&](std::size_t i) {
        write_hmap(fs::path(a.out_dir) / (frames[i].frame_id + ".hmap"), to_hmap(render_stack(frames[i], config)));
    });
    out << "wrote " << frames.size() << " heatmap stacks to " << a.out_dir << "\n";
    return 0;
}

// ----------------------------------------------------------------- augment

struct AugmentArgs {
    std::string image;
    std::string annotations;
    std::string frame_id;
    std::string mode;
    std::string condition = "average";
    std::string side = "driver";
    std::uint64_t seed = 0;
    std::string out_image;
    std::string out_annotations;
    double blur_sigma = 10.0;
    GeometricAugmentParams geometric;
};

inline int run_augment(const AugmentArgs& a, std::ostream& out)
{
    const auto png = read_png(a.image);
    const Plane gray = png_to_gray(png);
    FrameAnnotation frame;
    frame.frame_id = fs::path(a.image).stem().string();
    frame.image_size = { gray.width(), gray.height() };
    if (!a.annotations.empty()) {
        const auto frames = read_annotations(a.annotations);
        const FrameAnnotation* chosen = nullptr;
        for (const auto& f : frames) {
            if (a.frame_id.empty() || f.frame_id == a.frame_id) {
                chosen = &f;
                break;
            }
        }
        if (!chosen) {
            throw UsageError(a.frame_id.empty() ? "annotation file has no frames" : "frame '" + a.frame_id + "' not found");
        }
        frame = *chosen;
        if (frame.image_size != ImageSize { gray.width(), gray.height() }) {
            throw FormatError(FormatErrc::BadSchema, "annotation image size does not match the PNG");
        }
    }

    Augmented result;
    if (a.mode == "mirror") {
        const auto side = cabin_side_from_string(a.side);
        if (!side) {
            throw UsageError("--side must be driver or passenger");
        }
        result = mirror_symmetry(gray, frame, *side);
    } else if (a.mode == "lighting") {
        const auto condition = lighting_condition_from_string(a.condition);
        if (!condition) {
            throw UsageError("--condition must be bright, dark or average");
        }
        result = { lighting_augment(gray, *condition, a.seed, { 5, a.blur_sigma }), frame };
    } else if (a.mode == "geometric") {
        auto g = geometric_augment(gray, frame, a.geometric, a.seed);
        result = { std::move(g.image), std::move(g.frame) };
    } else {
        throw UsageError("--mode must be mirror, lighting or geometric");
    }

    detail::ensure_parent(a.out_image);
    write_png(a.out_image, gray_to_png(result.image));
    if (!a.out_annotations.empty()) {
        detail::ensure_parent(a.out_annotations);
        const std::vector<FrameAnnotation> frames { result.frame };
        write_file_text(a.out_annotations, dump_annotations(frames));
    }
    out << "wrote " << a.out_image << "\n";
    return 0;
}

// ------------------------------------------------------------------ decode

struct DecodeArgs {
    std::vector<std::string> inputs;
    std::string out;
    std::string annotations;
    int jobs = 1;
    detail::ConfigOverrides cfg;
};

inline int run_decode(const DecodeArgs& a, std::ostream& out)
{
    const auto config = a.cfg.resolve();
    const auto files = detail::collect_hmaps(a.inputs);
    std::unordered_map<std::string, FrameAnnotation> meta;
    if (!a.annotations.empty()) {
        for (auto& f : read_annotations(a.annotations)) {
            meta.emplace(f.frame_id, std::move(f));
        }
    }

    std::vector<FrameResult> results(files.size());
    parallel_for(files.size(), a.jobs, [&](std::size_t i) {
        const auto stack = read_stack(files[i], config.stride);
        FrameResult r;
        r.frame_id = files[i].stem().string();
        r.image_size = { stack.width() * config.stride, stack.height() * config.stride };
        if (const auto it = meta.find(r.frame_id); it != meta.end()) {
            r.image_size = it->second.image_size;
            r.drive_mode = it->second.drive_mode;
        }
        r.arms = detect_arms(stack, config);
        results[i] = std::move(r);
    });

    std::string text;
    for (const auto& r : results) {
        text += detection_to_json(r, config.lambda_h).dump() + "\n";
    }
    detail::ensure_parent(a.out);
    write_file_text(a.out, text);
    out << "decoded " << results.size() << " frames to " << a.out << "\n";
    return 0;
}

// -------------------------------------------------------------------- eval

struct EvalArgs {
    std::string detections;
    std::string annotations;
    std::string out_dir;
    double pck_step = 0.01;
    int pck_count = 50;
    double angle_step = 0.5;
    int angle_count = 60;
    double min_arm_length = 0.0;
};

inline int run_eval(const EvalArgs& a, std::ostream& out)
{
    if (!(a.pck_step > 0) || !(a.angle_step > 0) || a.pck_count < 1 || a.angle_count < 1) {
        throw UsageError("threshold steps and counts must be positive");
    }
    const auto detections = read_detections(a.detections);
    const auto truth = read_annotations(a.annotations);
    const double norm = average_arm_length(truth);
    const auto pck_t = detail::linspace_thresholds(a.pck_step, a.pck_count);
    const auto ang_t = detail::linspace_thresholds(a.angle_step, a.angle_count);
    const auto pck = pck_curve(detections, truth, norm, pck_t);
    const auto ang = angle_curve(detections, truth, ang_t, a.min_arm_length);

    const std::vector<double> t10 { 0.10 };
    const std::vector<double> t5 { 5.0 };
    const auto pck10 = pck_curve(detections, truth, norm, t10);
    const auto ang5 = angle_curve(detections, truth, t5, a.min_arm_length);

    std::vector<std::string> part_names;
    std::vector<const EvalCurve*> part_curves;
    Json pck_summary = Json::object();
    for (auto arm : kAllArms) {
        for (auto joint : { Joint::Elbow, Joint::Wrist }) {
            const int p = pcm_channel(arm, joint);
            std::string name = std::string(to_string(arm)) + "_" + std::string(to_string(joint));
            part_curves.push_back(&pck.per_part[p]);
            pck_summary[name] = pck10.per_part[p].detection_rate[0];
            part_names.push_back(std::move(name));
        }
    }
    part_names.emplace_back("all");
    part_curves.push_back(&pck.all_parts);
    pck_summary["all"] = pck10.all_parts.detection_rate[0];

    std::vector<std::string> arm_names;
    std::vector<const EvalCurve*> arm_curves;
    Json angle_summary = Json::object();
    for (auto arm : kAllArms) {
        arm_names.emplace_back(to_string(arm));
        arm_curves.push_back(&ang.per_arm[arm_index(arm)]);
        angle_summary[std::string(to_string(arm))] = ang5.per_arm[arm_index(arm)].detection_rate[0];
    }
    arm_names.emplace_back("all");
    arm_curves.push_back(&ang.all_arms);
    angle_summary["all"] = ang5.all_arms.detection_rate[0];

    const Json summary { { "n_frames", truth.size() }, { "norm_length", norm }, { "pck_at_0.10", pck_summary },
        { "angle_within_5deg", angle_summary } };

    detail::ensure_directory(a.out_dir);
    write_file_text(fs::path(a.out_dir) / "pck.csv", curves_to_csv(part_names, part_curves));
    write_file_text(fs::path(a.out_dir) / "angle.csv", curves_to_csv(arm_names, arm_curves));
    write_file_text(fs::path(a.out_dir) / "summary.json", summary.dump(2) + "\n");
    out << "PCK@0.10 (all parts): " << pck10.all_parts.detection_rate[0] << "\n"
        << "angle within 5 deg (all arms): " << ang5.all_arms.detection_rate[0] << "\n";
    return 0;
}

// --------------------------------------------------------------- occupancy

struct OccupancyArgs {
    std::string detections;
    std::string out;
    std::string drive_mode;
    double splat_sigma = 6.0;
    double lambda_h = 0.25;
    std::vector<std::string> arms;
    int width = 0;
    int height = 0;
};

inline int run_occupancy(const OccupancyArgs& a, std::ostream& out)
{
    std::optional<DriveMode> filter;
    if (!a.drive_mode.empty()) {
        filter = drive_mode_from_string(a.drive_mode);
        if (!filter) {
            throw UsageError("--drive-mode must be manual or autonomous");
        }
    }
    std::array<bool, kNumArms> wanted {};
    if (a.arms.empty()) {
        wanted.fill(true);
    }
    for (const auto& name : a.arms) {
        const auto arm = arm_from_string(name);
        if (!arm) {
            throw UsageError("unknown arm class '" + name + "'");
        }
        wanted[arm_index(*arm)] = true;
    }
    if (!(a.lambda_h >= 0)) {
        throw UsageError("--lambda-h must be >= 0");
    }
    const auto records = read_detections(a.detections);
    ImageSize size { a.width, a.height };
    if (size.width <= 0 || size.height <= 0) {
        if (records.empty()) {
            throw UsageError("no detections and no --width/--height given");
        }
        size = records.front().image_size;
    }
    OccupancyMap map(size, a.splat_sigma, filter);
    for (const auto& r : records) {
        for (const auto& d : r.arms) {
            if (d.present && wanted[arm_index(d.arm)] && d.wrist != d.elbow) {
                map.accumulate(extrapolate_hand(d.wrist, d.elbow, a.lambda_h), r.drive_mode);
            }
        }
    }
    const fs::path prefix(a.out);
    detail::ensure_parent(prefix);
    write_png(fs::path(prefix.string() + ".png"), occupancy_to_png(map.grid()));
    write_hmap(fs::path(prefix.string() + ".hmap"), to_hmap(map.grid()));
    out << "accumulated " << map.count() << " hand samples\n";
    return 0;
}

// ------------------------------------------------------------------- synth

struct SynthArgs {
    std::size_t n = 100;
    std::uint64_t seed = 0;
    std::string out_dir = "synth_out";
    double noise_sigma = 0.0;
    int width = 736;
    int height = 368;
    int jobs = 1;
    detail::ConfigOverrides cfg;
};

inline std::uint64_t noise_seed(std::uint64_t seed, std::size_t index)
{
    return armloc::detail::mix_seed(seed ^ 0x6E6F697365ULL, index);
}

inline int run_synth(const SynthArgs& a, std::ostream& out)
{
    const auto config = a.cfg.resolve();
    if (a.noise_sigma < 0) {
        throw UsageError("--noise-sigma must be >= 0");
    }
    SynthParams params;
    params.image_size = { a.width, a.height };
    params.margin = 3.0 * config.stride;
    const auto frames = synth_frames(a.n, a.seed, params);
    const fs::path stacks_dir = fs::path(a.out_dir) / "stacks";
    detail::ensure_directory(stacks_dir);
    write_file_text(fs::path(a.out_dir) / "annotations.json", dump_annotations(frames));
    parallel_for(frames.size(), a.jobs, [&](std::size_t i) {
        auto stack = render_stack(frames[i], config);
        add_noise(stack, a.noise_sigma, noise_seed(a.seed, i));
        write_hmap(stacks_dir / (frames[i].frame_id + ".hmap"), to_hmap(stack));
    });
    out << "wrote " << frames.size() << " synthetic frames to " << a.out_dir << "\n";
    return 0;
}

// --------------------------------------------------------------- dispatch

/// Parses `args` (args[0] is the program name) and runs the subcommand.
inline int cli_dispatch(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    CLI::App app { "Driver/passenger arm localization from heatmaps" };
    app.require_subcommand(1);

    LabelgenArgs lg;
    auto* labelgen = app.add_subcommand("labelgen", "render ground-truth heatmap stacks from annotations");
    labelgen->add_option("--annotations", lg.annotations, "annotation JSON")->required();
    labelgen->add_option("--out", lg.out_dir, "output directory")->required();
    labelgen->add_option("--jobs", lg.jobs, "worker threads")->check(CLI::PositiveNumber);
    lg.cfg.attach(*labelgen);

    AugmentArgs au;
    auto* augment = app.add_subcommand("augment", "apply one augmentation to an image and its annotations");
    augment->add_option("--image", au.image, "8-bit PNG input")->required();
    augment->add_option("--annotations", au.annotations, "annotation JSON");
    augment->add_option("--frame-id", au.frame_id, "frame to use from the annotation file (default: first)");
    augment->add_option("--mode", au.mode, "mirror | lighting | geometric")->required()->check(CLI::IsMember({ "mirror", "lighting", "geometric" }));
    augment->add_option("--condition", au.condition, "bright | dark | average")->check(CLI::IsMember({ "bright", "dark", "average" }));
    augment->add_option("--side", au.side, "driver | passenger")->check(CLI::IsMember({ "driver", "passenger" }));
    augment->add_option("--seed", au.seed, "random seed");
    augment->add_option("--blur-sigma", au.blur_sigma, "cloud texture blur (px)");
    augment->add_option("--max-rotation", au.geometric.max_rotation_deg, "max rotation (deg)");
    augment->add_option("--crop-w", au.geometric.crop_w, "crop width (px)");
    augment->add_option("--crop-h", au.geometric.crop_h, "crop height (px)");
    augment->add_option("--scale-min", au.geometric.scale_min, "minimum scale");
    augment->add_option("--scale-max", au.geometric.scale_max, "maximum scale");
    augment->add_flag("--random-offset", au.geometric.random_offset, "jitter the crop window");
    augment->add_option("--out-image", au.out_image, "output PNG")->required();
    augment->add_option("--out-annotations", au.out_annotations, "output annotation JSON");

    DecodeArgs de;
    auto* decode = app.add_subcommand("decode", "decode heatmap stacks into arm detections (JSONL)");
    decode->add_option("inputs", de.inputs, ".hmap files or directories")->required();
    decode->add_option("--out", de.out, "output JSONL")->required();
    decode->add_option("--annotations", de.annotations, "annotation JSON providing image sizes and drive modes");
    decode->add_option("--jobs", de.jobs, "worker threads")->check(CLI::PositiveNumber);
    de.cfg.attach(*decode);

    EvalArgs ev;
    auto* eval = app.add_subcommand("eval", "PCK and angle curves for detections against annotations");
    eval->add_option("--detections", ev.detections, "detections JSONL")->required();
    eval->add_option("--annotations", ev.annotations, "ground-truth annotation JSON")->required();
    eval->add_option("--out", ev.out_dir, "output directory")->required();
    eval->add_option("--pck-step", ev.pck_step, "PCK threshold step (fraction of arm length)");
    eval->add_option("--pck-count", ev.pck_count, "number of PCK steps");
    eval->add_option("--angle-step", ev.angle_step, "angle threshold step (deg)");
    eval->add_option("--angle-count", ev.angle_count, "number of angle steps");
    eval->add_option("--min-arm-length", ev.min_arm_length, "skip shorter arms in the angle curve (input px)");

    OccupancyArgs oc;
    auto* occupancy = app.add_subcommand("occupancy", "accumulate extrapolated hand locations");
    occupancy->add_option("--detections", oc.detections, "detections JSONL")->required();
    occupancy->add_option("--out", oc.out, "output prefix (.png and .hmap are appended)")->required();
    occupancy->add_option("--drive-mode", oc.drive_mode, "manual | autonomous")->check(CLI::IsMember({ "manual", "autonomous" }));
    occupancy->add_option("--splat-sigma", oc.splat_sigma, "Gaussian splat std (input px)")->check(CLI::PositiveNumber);
    occupancy->add_option("--lambda-h", oc.lambda_h, "hand extrapolation factor");
    occupancy->add_option("--arm", oc.arms, "restrict to arm classes (repeatable)");
    occupancy->add_option("--width", oc.width, "grid width (default: from detections)");
    occupancy->add_option("--height", oc.height, "grid height (default: from detections)");

    SynthArgs sy;
    auto* synth = app.add_subcommand("synth", "generate synthetic annotations and rendered stacks");
    synth->add_option("--n", sy.n, "number of frames")->required();
    synth->add_option("--seed", sy.seed, "random seed");
    synth->add_option("--out", sy.out_dir, "output directory");
    synth->add_option("--noise-sigma", sy.noise_sigma, "additive Gaussian noise std on all channels");
    synth->add_option("--width", sy.width, "input image width")->check(CLI::PositiveNumber);
    synth->add_option("--height", sy.height, "input image height")->check(CLI::PositiveNumber);
    synth->add_option("--jobs", sy.jobs, "worker threads")->check(CLI::PositiveNumber);
    sy.cfg.attach(*synth);

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    if (!reversed.empty()) {
        reversed.pop_back(); // program name
    }
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return static_cast<int>(ExitCode::Usage);
    }

    try {
        if (*labelgen) {
            return run_labelgen(lg, out);
        }
        if (*augment) {
            return run_augment(au, out);
        }
        if (*decode) {
            return run_decode(de, out);
        }
        if (*eval) {
            return run_eval(ev, out);
        }
        if (*occupancy) {
            return run_occupancy(oc, out);
        }
        if (*synth) {
            return run_synth(sy, out);
        }
    } catch (const UsageError& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::Usage);
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::Usage);
    } catch (const FormatError& e) {
        err << "format error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::Format);
    } catch (const IoError& e) {
        err << "I/O error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::Io);
    } catch (const fs::filesystem_error& e) {
        err << "I/O error: " << e.what() << "\n";
        return static_cast<int>(ExitCode::Io);
    }
    err << app.help();
    return static_cast<int>(ExitCode::Usage);
}

inline int cli_dispatch(int argc, char** argv)
{
    return cli_dispatch(std::vector<std::string>(argv, argv + argc));
}

} // namespace armloc::cli
