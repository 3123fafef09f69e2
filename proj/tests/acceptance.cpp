// Acceptance suite: one PASS/FAIL line per criterion. Exit status is non-zero
// when any hard criterion fails.

#include "armloc/armloc.hpp"

#include <Eigen/Dense>

#include <chrono>
#include <cstdio>
#include <cstring>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

using namespace armloc;
using Clock = std::chrono::steady_clock;

namespace {

// pinned tolerances
constexpr std::size_t kRoundTripFrames = 1000;
constexpr std::uint64_t kRoundTripSeed = 20240601;
constexpr double kRoundTripPckThreshold = 0.05;
constexpr double kRoundTripBudgetS = 60.0;
constexpr double kAngleTolDeg = 3.0;
constexpr double kMinHeatmapArmLength = 5.0;
constexpr double kNoiseSigma = 0.05;
constexpr std::size_t kNoiseFrames = 1000;
constexpr std::uint64_t kNoiseSeeds[] = { 101, 202, 303 };
constexpr double kNoiseTarget = 0.95;
constexpr double kNoiseSeedSlack = 0.02;
constexpr int kBlendGrid = 1024;
constexpr double kBlendTol = 1e-6;
constexpr int kCloudSeeds = 50;
constexpr double kCloudTol = 1e-6;
constexpr int kBlobs = 200;
constexpr double kBlobAngleTolDeg = 0.5;
constexpr double kBlobLengthRelTol = 1e-6;
constexpr double kDecodeBudgetMs = 5.0;
constexpr double kDecodeHardMs = 10.0;
constexpr int kHmapStacks = 100;
constexpr double kScoreTol = 1e-9;
constexpr int kSelectCases = 1000;

bool g_failed = false;

void report(int n, bool pass, const std::string& what, const std::string& detail)
{
    std::printf("criterion %2d %s  %s: %s\n", n, pass ? "PASS" : "FAIL", what.c_str(), detail.c_str());
    std::fflush(stdout);
    g_failed |= !pass;
}

template <typename... T>
std::string fmt(const char* f, T... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::vector<FrameResult> decode_all(const std::vector<FrameAnnotation>& frames, const PipelineConfig& cfg,
    double noise_sigma = 0.0, std::uint64_t noise_seed = 0)
{
    std::vector<FrameResult> out;
    out.reserve(frames.size());
    for (std::size_t i = 0; i < frames.size(); ++i) {
        auto stack = render_stack(frames[i], cfg);
        if (noise_sigma > 0) {
            add_noise(stack, noise_sigma, detail::mix_seed(noise_seed, i));
        }
        out.push_back({ frames[i].frame_id, frames[i].image_size, frames[i].drive_mode, detect_arms(stack, cfg) });
    }
    return out;
}

void round_trip(const PipelineConfig& cfg)
{
    const auto t0 = Clock::now();
    const auto frames = synth_frames(kRoundTripFrames, kRoundTripSeed);
    const auto dets = decode_all(frames, cfg);
    const double elapsed = seconds_since(t0);

    const std::vector<double> t { kRoundTripPckThreshold };
    const auto pck = pck_curve(dets, frames, average_arm_length(frames), t);
    double worst = 1.0;
    for (const auto& part : pck.per_part) {
        if (part.n_samples > 0) {
            worst = std::min(worst, part.detection_rate[0]);
        }
    }
    report(1, worst == 1.0 && elapsed < kRoundTripBudgetS, "round-trip localization",
        fmt("%zu frames, worst-part PCK@%.2f = %.4f%% (need 100%%), %.2f s (budget %.0f s)", frames.size(), kRoundTripPckThreshold,
            100 * worst, elapsed, kRoundTripBudgetS));

    const std::vector<double> at { kAngleTolDeg };
    const auto ang = angle_curve(dets, frames, at, kMinHeatmapArmLength * cfg.stride);
    const double rate = ang.all_arms.detection_rate[0];
    report(2, rate == 1.0, "round-trip angle",
        fmt("%d arms >= %.0f heatmap px, %.4f%% within %.0f deg (need 100%%)", ang.all_arms.n_samples, kMinHeatmapArmLength,
            100 * rate, kAngleTolDeg));
}

void noise_robustness(const PipelineConfig& cfg)
{
    const std::vector<double> pt { 0.10 };
    const std::vector<double> at { 5.0 };
    double sum_pck = 0;
    double sum_ang = 0;
    double min_pck = 1;
    double min_ang = 1;
    std::ostringstream per_seed;
    for (auto seed : kNoiseSeeds) {
        const auto frames = synth_frames(kNoiseFrames, seed);
        const auto dets = decode_all(frames, cfg, kNoiseSigma, seed ^ 0x6E6F697365ULL);
        const double p = pck_curve(dets, frames, average_arm_length(frames), pt).all_parts.detection_rate[0];
        const double a = angle_curve(dets, frames, at).all_arms.detection_rate[0];
        sum_pck += p;
        sum_ang += a;
        min_pck = std::min(min_pck, p);
        min_ang = std::min(min_ang, a);
        per_seed << fmt(" [seed %llu: %.2f%%/%.2f%%]", static_cast<unsigned long long>(seed), 100 * p, 100 * a);
    }
    const double n = std::size(kNoiseSeeds);
    const bool pass = sum_pck / n >= kNoiseTarget && sum_ang / n >= kNoiseTarget && min_pck >= kNoiseTarget - kNoiseSeedSlack
        && min_ang >= kNoiseTarget - kNoiseSeedSlack;
    report(3, pass, "noise robustness",
        fmt("sigma %.2f, mean PCK@0.10 %.2f%%, mean within 5 deg %.2f%% (need >= 95%%, each seed >= 93%%);", kNoiseSigma,
            100 * sum_pck / n, 100 * sum_ang / n)
            + per_seed.str());
}

void blend_identities()
{
    double dev_cont = 0;
    double dev_ident = 0;
    for (int a = 0; a < kBlendGrid; ++a) {
        const double in = a / double(kBlendGrid - 1);
        for (int b = 0; b < kBlendGrid; ++b) {
            // overlay values cover the brightest range
            const double ov = 1.4 * b / double(kBlendGrid - 1);
            dev_cont = std::max(dev_cont, std::abs(overlay_lower(0.5, ov) - overlay_upper(0.5, ov)));
            dev_cont = std::max(dev_cont, std::abs(overlay_blend_value(0.5, ov) - ov));
            dev_ident = std::max(dev_ident, std::abs(overlay_blend_value(in, 0.5) - in));
        }
    }
    // the same identities through the float image path
    Plane img(kBlendGrid, kBlendGrid);
    Plane half(kBlendGrid, kBlendGrid, 0.5f);
    for (int y = 0; y < kBlendGrid; ++y) {
        for (int x = 0; x < kBlendGrid; ++x) {
            img(x, y) = static_cast<float>((y * kBlendGrid + x) / double(kBlendGrid * kBlendGrid - 1));
        }
    }
    const auto out = overlay_blend(img, half);
    for (std::size_t i = 0; i < img.size(); ++i) {
        dev_ident = std::max(dev_ident, double(std::abs(out.pixels()[i] - img.pixels()[i])));
    }
    report(4, dev_cont < kBlendTol && dev_ident < kBlendTol, "overlay blend identities",
        fmt("%dx%d grid, continuity dev %.3g, identity dev %.3g (limit %.0e)", kBlendGrid, kBlendGrid, dev_cont, dev_ident, kBlendTol));
}

void lighting_ranges()
{
    double worst = 0;
    for (auto cond : { LightingCondition::Bright, LightingCondition::Dark, LightingCondition::Average }) {
        const auto r = lighting_range(cond);
        for (int seed = 0; seed < kCloudSeeds; ++seed) {
            const auto c = cloud_texture({ 368, 184 }, static_cast<std::uint64_t>(seed), r);
            const auto [lo, hi] = std::minmax_element(c.pixels().begin(), c.pixels().end());
            worst = std::max({ worst, std::abs(*lo - r.lo), std::abs(*hi - r.hi) });
        }
    }
    const auto b = lighting_range(LightingCondition::Bright);
    const auto d = lighting_range(LightingCondition::Dark);
    const auto a = lighting_range(LightingCondition::Average);
    const bool ranges = b.lo == 0.4 && b.hi == 1.4 && d.lo == 0.05 && d.hi == 0.4 && a.lo == 0.3 && a.hi == 0.7;
    report(5, ranges && worst < kCloudTol, "lighting range conformance",
        fmt("3 ranges x %d seeds, worst endpoint error %.3g (limit %.0e)", kCloudSeeds, worst, kCloudTol));
}

void mirror_checks()
{
    std::mt19937_64 rng(6);
    std::uniform_real_distribution<float> u(0, 1);
    int images = 0;
    int coords = 0;
    bool sym = true;
    bool sum = true;
    for (int w : { 736, 737, 1280 }) {
        Plane img(w, 24);
        for (auto& v : img.pixels()) {
            v = u(rng);
        }
        for (auto side : { CabinSide::Driver, CabinSide::Passenger }) {
            FrameAnnotation f;
            f.image_size = { w, 24 };
            std::uniform_real_distribution<double> left(0, w / 2.0 - 1);
            std::uniform_real_distribution<double> right(w / 2.0, w - 1);
            auto& pick = side == CabinSide::Driver ? left : right;
            const auto a0 = side == CabinSide::Driver ? ArmClass::DriverLeft : ArmClass::PassengerLeft;
            const auto a1 = side == CabinSide::Driver ? ArmClass::DriverRight : ArmClass::PassengerRight;
            f.arms = { { a0, { pick(rng), 3 }, { pick(rng), 9 } }, { a1, { pick(rng), 5 }, { pick(rng), 20 } } };
            const auto r = mirror_symmetry(img, f, side);
            ++images;
            for (int y = 0; y < 24; ++y) {
                for (int x = 0; x < w; ++x) {
                    sym &= r.image(x, y) == r.image(w - 1 - x, y);
                }
            }
            for (const auto& orig : f.arms) {
                const auto* m = r.frame.find(mirror(orig.arm));
                sum &= m && orig.wrist.x + m->wrist.x == w - 1.0 && orig.elbow.x + m->elbow.x == w - 1.0;
                coords += 2;
            }
        }
    }
    const std::pair<ArmClass, ArmClass> table[] = { { ArmClass::DriverLeft, ArmClass::PassengerRight },
        { ArmClass::DriverRight, ArmClass::PassengerLeft }, { ArmClass::PassengerLeft, ArmClass::DriverRight },
        { ArmClass::PassengerRight, ArmClass::DriverLeft } };
    bool remap = true;
    for (auto [from, to] : table) {
        remap &= mirror(from) == to && mirror(mirror(from)) == from;
    }
    report(6, sym && sum && remap, "mirror symmetry",
        fmt("%d images bit-exact symmetric: %s; %d reflected joints x+x'=W-1: %s; involution table: %s", images, sym ? "yes" : "no",
            coords, sum ? "yes" : "no", remap ? "yes" : "no"));
}

std::vector<Cell> random_blob(std::mt19937_64& rng, int target)
{
    std::set<std::pair<int, int>> cells { { 0, 0 } };
    std::vector<Cell> list { { 0, 0 } };
    std::uniform_int_distribution<int> step(-1, 1);
    std::uniform_real_distribution<double> u(0, 1);
    const double bias_x = u(rng) * 2 - 1;
    const double bias_y = u(rng) * 2 - 1;
    while (static_cast<int>(list.size()) < target) {
        const Cell from = list[std::uniform_int_distribution<std::size_t>(0, list.size() - 1)(rng)];
        int dx = step(rng);
        int dy = step(rng);
        if (u(rng) < std::abs(bias_x)) {
            dx = bias_x > 0 ? 1 : -1;
        }
        if (u(rng) < std::abs(bias_y)) {
            dy = bias_y > 0 ? 1 : -1;
        }
        const Cell c { from.x + dx, from.y + dy };
        if (cells.insert({ c.x, c.y }).second) {
            list.push_back(c);
        }
    }
    return list;
}

void moments_oracle()
{
    std::mt19937_64 rng(2024);
    double worst_angle = 0;
    double worst_len = 0;
    int compared = 0;
    for (int i = 0; i < kBlobs; ++i) {
        const auto cells = random_blob(rng, 5 + static_cast<int>(rng() % 120));
        Eigen::MatrixXd pts(cells.size(), 2);
        for (std::size_t k = 0; k < cells.size(); ++k) {
            pts(k, 0) = cells[k].x;
            pts(k, 1) = cells[k].y;
        }
        const Eigen::MatrixXd centered = pts.rowwise() - pts.colwise().mean();
        Eigen::Matrix2d cov = centered.transpose() * centered / static_cast<double>(cells.size());
        cov += Eigen::Matrix2d::Identity() / 12.0;
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> solver(cov);
        const Eigen::Vector2d v = solver.eigenvectors().col(1);
        const double major = 4.0 * std::sqrt(solver.eigenvalues()(1));
        const double minor = 4.0 * std::sqrt(solver.eigenvalues()(0));

        const auto e = region_props_ellipse(cells);
        worst_len = std::max({ worst_len, std::abs(e.major_axis_length - major) / major, std::abs(e.minor_axis_length - minor) / minor });
        // orientation is undefined for a circular covariance
        if (solver.eigenvalues()(1) - solver.eigenvalues()(0) > 1e-9 * solver.eigenvalues()(1)) {
            const double ref = std::atan2(v.y(), v.x()) * 180.0 / std::numbers::pi;
            double d = std::fmod(std::abs(e.orientation_deg - ref), 180.0);
            worst_angle = std::max(worst_angle, std::min(d, 180.0 - d));
            ++compared;
        }
    }
    report(7, worst_angle <= kBlobAngleTolDeg && worst_len <= kBlobLengthRelTol, "moments oracle",
        fmt("%d blobs (%d with defined orientation), worst angle %.3g deg (limit %.1f), worst relative length %.3g (limit %.0e)", kBlobs,
            compared, worst_angle, kBlobAngleTolDeg, worst_len, kBlobLengthRelTol));
}

void decode_throughput(const PipelineConfig& cfg)
{
    constexpr int kStacks = 50;
    constexpr int kReps = 10;
    std::vector<HeatmapStack> stacks;
    for (int i = 0; i < kStacks; ++i) {
        auto s = render_stack(synth_frame(77, i), cfg);
        add_noise(s, kNoiseSigma, detail::mix_seed(78, i));
        stacks.push_back(std::move(s));
    }
    std::vector<double> ms;
    int present = 0;
    for (int r = 0; r < kReps; ++r) {
        for (const auto& s : stacks) {
            const auto t0 = Clock::now();
            const auto d = detect_arms(s, cfg);
            ms.push_back(1e3 * seconds_since(t0));
            for (const auto& a : d) {
                present += a.present;
            }
        }
    }
    std::sort(ms.begin(), ms.end());
    const double median = ms[ms.size() / 2];
    const double p95 = ms[ms.size() * 95 / 100];
    const bool within = median < kDecodeBudgetMs;
    report(8, median < kDecodeHardMs, "decode throughput",
        fmt("92x46x17 stack, median %.3f ms, p95 %.3f ms, max %.3f ms (budget %.0f ms%s; hard limit %.0f ms); %d arms decoded",
            median, p95, ms.back(), kDecodeBudgetMs, within ? ", met" : ", missed", kDecodeHardMs, present));
}

void format_round_trip()
{
    std::mt19937_64 rng(9);
    int identical = 0;
    for (int i = 0; i < kHmapStacks; ++i) {
        HmapFile f { 92, 46, kNumChannels, std::vector<float>(92 * 46 * kNumChannels) };
        for (auto& v : f.data) {
            float x;
            do {
                const auto bits = static_cast<std::uint32_t>(rng());
                std::memcpy(&x, &bits, 4);
            } while (std::isnan(x));
            v = x;
        }
        const auto bytes = encode_hmap(f);
        const auto again = encode_hmap(decode_hmap(bytes));
        identical += again == bytes;
    }

    auto code_of = [](std::vector<std::uint8_t> bytes) -> std::optional<FormatErrc> {
        try {
            decode_hmap(bytes);
        } catch (const FormatError& e) {
            return e.code();
        }
        return std::nullopt;
    };
    const auto good = encode_hmap({ 10, 10, 1, std::vector<float>(100) });
    auto bad_magic = good;
    bad_magic[0] = 'X';
    auto truncated = good;
    truncated.pop_back();
    auto version = good;
    version[4] = 9;
    auto trailing = good;
    trailing.push_back(0);
    auto zero = good;
    zero[5] = 0;
    auto short_header = good;
    short_header.resize(10);
    bool taxonomy = code_of(bad_magic) == FormatErrc::BadMagic && code_of(truncated) == FormatErrc::Truncated
        && code_of(version) == FormatErrc::BadVersion && code_of(trailing) == FormatErrc::TrailingData
        && code_of(zero) == FormatErrc::BadDimensions && code_of(short_header) == FormatErrc::Truncated && !code_of(good);
    try {
        to_stack(decode_hmap(good));
        taxonomy = false;
    } catch (const FormatError& e) {
        taxonomy &= e.code() == FormatErrc::BadChannelCount;
    }
    report(9, identical == kHmapStacks && taxonomy, "format round trip",
        fmt("%d/%d random stacks byte-identical; error taxonomy %s", identical, kHmapStacks, taxonomy ? "complete" : "INCOMPLETE"));
}

void score_algebra()
{
    PafCandidate paf;
    paf.score = 1.0;
    paf.estimate_score = 0.5;
    paf.wrist_estimate = { 10, 5 };
    paf.elbow_estimate = { 2, 5 };
    paf.centroid = { 6, 5 };
    paf.major_axis_length = 8 / 0.75;
    const std::vector<PcmCandidate> wrists { { paf.wrist_estimate, 1.0, 1 } };
    const auto arm = score_arm(ArmClass::DriverLeft, paf, wrists, {}, {});
    const double total_err = std::abs(arm.s_total - 2.5 / 3.0);
    const bool scores = arm.s_w == 1.0 && arm.s_e == 0.5 && arm.s_a == 1.0;

    std::mt19937_64 rng(1010);
    std::uniform_real_distribution<double> u(0, 1);
    int agree = 0;
    for (int t = 0; t < kSelectCases; ++t) {
        const Point est { 20 * u(rng), 20 * u(rng) };
        const double paf_score = 0.5 * u(rng);
        const double sigma_s = 0.5 + 4 * u(rng);
        std::vector<PcmCandidate> c(rng() % 7);
        for (auto& k : c) {
            k = { { est.x + 8 * (u(rng) - 0.5), est.y + 8 * (u(rng) - 0.5) }, 0.1 + 0.9 * u(rng), 1 };
        }
        // occasionally force an exact tie with the field estimate
        if (!c.empty() && t % 10 == 0) {
            c[0].location = est;
            c[0].score = paf_score;
        }
        double best = -1;
        int best_i = -1;
        for (std::size_t i = 0; i < c.size(); ++i) {
            const double f = c[i].score * std::exp(-squared_distance(c[i].location, est) / (sigma_s * sigma_s));
            if (f > best) {
                best = f;
                best_i = static_cast<int>(i);
            }
        }
        if (paf_score > best) {
            best = paf_score;
            best_i = -1;
        }
        const auto r = select_joint(est, paf_score, c, sigma_s);
        agree += r.pcm_index == best_i && r.score == best;
    }
    report(10, total_err <= kScoreTol && scores && agree == kSelectCases, "score algebra",
        fmt("S_Total(1, 1, 0.5) = %.12f (error %.2g, limit %.0e); select_joint agrees with exhaustive argmax on %d/%d cases",
            arm.s_total, total_err, kScoreTol, agree, kSelectCases));
}

} // namespace

int main()
{
    const PipelineConfig cfg;
    round_trip(cfg);
    noise_robustness(cfg);
    blend_identities();
    lighting_ranges();
    mirror_checks();
    moments_oracle();
    decode_throughput(cfg);
    format_round_trip();
    score_algebra();
    std::printf("%s\n", g_failed ? "ACCEPTANCE FAILED" : "ACCEPTANCE PASSED");
    return g_failed ? 1 : 0;
}
