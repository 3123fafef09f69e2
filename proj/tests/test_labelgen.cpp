#include "armloc/labelgen.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace armloc;

namespace {

FrameAnnotation frame_with(std::vector<JointAnnotation> arms)
{
    FrameAnnotation f;
    f.frame_id = "f";
    f.image_size = { 736, 368 };
    f.arms = std::move(arms);
    return f;
}

int nonzero(PlaneView p)
{
    int n = 0;
    for (float v : p.pixels) {
        n += v != 0.0f;
    }
    return n;
}

} // namespace

TEST(RenderPcm, PeakIsOneAtPart)
{
    const auto p = render_pcm({ 7, 4 }, true, { 20, 10 }, 1.5);
    EXPECT_EQ(p(7, 4), 1.0f);
}

TEST(RenderPcm, OneSigmaAway)
{
    const auto p = render_pcm({ 5, 5 }, true, { 20, 10 }, 2.0);
    EXPECT_NEAR(p(7, 5), std::exp(-1.0), 1e-7);
    EXPECT_NEAR(p(7, 5), 0.36787944, 1e-7);
}

TEST(RenderPcm, JustBelowThresholdAtOnePointFiveTwoSigma)
{
    const double sigma = 1.5;
    const double d = 1.52 * sigma;
    const auto p = render_pcm({ 0, 0 }, true, { 4, 4 }, sigma);
    // pixel (2,0) is closer than 1.52 sigma; evaluate the formula at an off-grid part
    const auto q = render_pcm({ -d + 2, 0 }, true, { 4, 4 }, sigma);
    EXPECT_NEAR(q(2, 0), 0.0995, 5e-4);
    EXPECT_LT(q(2, 0), 0.1f);
    EXPECT_GT(p(2, 0), 0.1f);
}

TEST(RenderPcm, InvisibleIsZero)
{
    const auto p = render_pcm({ 3, 3 }, false, { 8, 8 }, 1.5);
    EXPECT_EQ(nonzero(p), 0);
}

TEST(RenderPcm, ZeroCanvasThrows)
{
    EXPECT_THROW(render_pcm({ 0, 0 }, true, { 0, 5 }, 1.5), std::invalid_argument);
    EXPECT_THROW(render_paf({ 0, 0 }, { 1, 0 }, { 5, 0 }, {}), std::invalid_argument);
}

TEST(RenderPcm, HalfCellQuantizationBound)
{
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(2, 18);
    const double sigma = 1.5;
    for (int i = 0; i < 500; ++i) {
        const Point part { u(rng), u(rng) };
        const auto p = render_pcm(part, true, { 20, 20 }, sigma);
        float peak = 0;
        for (float v : p.pixels()) {
            peak = std::max(peak, v);
        }
        EXPECT_LE(peak, 1.0f);
        const int cx = static_cast<int>(std::lround(part.x));
        const int cy = static_cast<int>(std::lround(part.y));
        EXPECT_GE(p(cx, cy), std::exp(-0.5 / (sigma * sigma)) - 1e-7);
    }
}

TEST(RenderPaf, UnitVectorAlongX)
{
    const auto paf = render_paf({ 0, 0 }, { 10, 0 }, { 12, 4 }, { 1.0 });
    EXPECT_EQ(paf.x(5, 0), 1.0f);
    EXPECT_EQ(paf.y(5, 0), 0.0f);
    // (5, sigma + 1) lies outside the band
    EXPECT_EQ(paf.x(5, 2), 0.0f);
    EXPECT_EQ(paf.y(5, 2), 0.0f);
    // perpendicular boundary is inclusive
    EXPECT_EQ(paf.x(5, 1), 1.0f);
}

TEST(RenderPaf, ThreeFourFive)
{
    const auto paf = render_paf({ 0, 0 }, { 3, 4 }, { 6, 6 }, { 1.0 });
    EXPECT_FLOAT_EQ(paf.x(2, 2), 0.6f);
    EXPECT_FLOAT_EQ(paf.y(2, 2), 0.8f);
}

TEST(RenderPaf, ProjectionStartsAtElbow)
{
    // arm pointing in +x from elbow (5,2): pixels behind the elbow are empty,
    // pixels up to the wrist are filled
    const auto paf = render_paf({ 5, 2 }, { 9, 2 }, { 12, 5 }, { 1.0 });
    EXPECT_EQ(paf.x(4, 2), 0.0f);
    EXPECT_EQ(paf.x(5, 2), 1.0f);
    EXPECT_EQ(paf.x(9, 2), 1.0f);
    EXPECT_EQ(paf.x(10, 2), 0.0f);
}

TEST(RenderPaf, DegenerateArmThrows)
{
    EXPECT_THROW(render_paf({ 2, 2 }, { 2, 2 }, { 5, 5 }, {}), std::invalid_argument);
}

TEST(RenderPaf, NonzeroPixelsHaveUnitMagnitude)
{
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> u(1, 40);
    for (int i = 0; i < 100; ++i) {
        const Point e { u(rng), u(rng) };
        const Point w { u(rng), u(rng) };
        if (distance(e, w) < 1e-3) {
            continue;
        }
        const auto paf = render_paf(e, w, { 42, 42 }, { 1.0 });
        for (std::size_t k = 0; k < paf.x.size(); ++k) {
            const double vx = paf.x.pixels()[k];
            const double vy = paf.y.pixels()[k];
            if (vx != 0 || vy != 0) {
                ASSERT_NEAR(std::hypot(vx, vy), 1.0, 1e-6);
            }
        }
    }
}

TEST(RenderPaf, PixelCountAxisAligned)
{
    // lattice-aligned arms cover 2*sigma + 1 rows
    for (int len = 5; len <= 30; ++len) {
        const auto paf = render_paf({ 3, 10 }, { 3.0 + len, 10 }, { 40, 20 }, { 1.0 });
        const double expected = len * 3.0;
        EXPECT_NEAR(nonzero(paf.x), expected, 0.3 * expected) << len;
        const auto vert = render_paf({ 10, 3 }, { 10, 3.0 + len }, { 20, 40 }, { 1.0 });
        EXPECT_NEAR(nonzero(vert.y), expected, 0.3 * expected) << len;
    }
}

TEST(RenderPaf, PixelCountMatchesBandArea)
{
    // arbitrary orientation: about one lattice point per unit of band area
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(0, 1);
    int tested = 0;
    while (tested < 300) {
        const Point e { 10 + 70 * u(rng), 10 + 26 * u(rng) };
        const double a = 2 * std::numbers::pi * u(rng);
        const double len = 10 + 10 * u(rng);
        const Point w = e + len * Point { std::cos(a), std::sin(a) };
        if (w.x < 2 || w.y < 2 || w.x > 89 || w.y > 43) {
            continue;
        }
        const auto paf = render_paf(e, w, { 92, 46 }, { 1.0 });
        int n = 0;
        for (std::size_t k = 0; k < paf.x.size(); ++k) {
            n += paf.x.pixels()[k] != 0 || paf.y.pixels()[k] != 0;
        }
        const double area = 2.0 * len;
        EXPECT_NEAR(n, area, 0.3 * area);
        ++tested;
    }
}

TEST(RenderBackground, EmptyScene)
{
    std::vector<Plane> planes(8, Plane(5, 4, 0.0f));
    std::vector<PlaneView> views(planes.begin(), planes.end());
    const auto bg = render_background(views);
    for (float v : bg.pixels()) {
        EXPECT_EQ(v, 1.0f);
    }
}

TEST(RenderBackground, OneMinusMax)
{
    std::vector<Plane> planes(8, Plane(2, 1, 0.0f));
    planes[0](0, 0) = 0.3f;
    planes[1](0, 0) = 0.7f;
    planes[2](0, 0) = 0.1f;
    planes[5](1, 0) = 1.0f;
    std::vector<PlaneView> views(planes.begin(), planes.end());
    const auto bg = render_background(views);
    EXPECT_FLOAT_EQ(bg(0, 0), 0.3f);
    EXPECT_EQ(bg(1, 0), 0.0f);
}

TEST(RenderBackground, MismatchedSizesThrow)
{
    std::vector<Plane> planes(8, Plane(2, 2));
    planes[4] = Plane(3, 2);
    std::vector<PlaneView> views(planes.begin(), planes.end());
    EXPECT_THROW(render_background(views), std::invalid_argument);
}

TEST(RenderStack, EmptyFrame)
{
    const auto s = render_stack(frame_with({}), {});
    EXPECT_EQ(s.width(), 92);
    EXPECT_EQ(s.height(), 46);
    for (int c = 0; c < kBackgroundChannel; ++c) {
        EXPECT_EQ(nonzero(s.channel(c)), 0) << c;
    }
    for (float v : s.channel(kBackgroundChannel).pixels) {
        EXPECT_EQ(v, 1.0f);
    }
}

TEST(RenderStack, SingleArmTouchesOnlyItsChannels)
{
    const auto s = render_stack(frame_with({ { ArmClass::DriverLeft, { 300, 200 }, { 200, 150 } } }), {});
    for (int c = 0; c < kBackgroundChannel; ++c) {
        const bool own = c == pcm_channel(ArmClass::DriverLeft, Joint::Elbow) || c == pcm_channel(ArmClass::DriverLeft, Joint::Wrist)
            || c == paf_x_channel(ArmClass::DriverLeft) || c == paf_y_channel(ArmClass::DriverLeft);
        EXPECT_EQ(nonzero(s.channel(c)) > 0, own) << c;
    }
    EXPECT_FALSE(check_invariants(s));
}

TEST(RenderStack, OverlappingArmsStayInOwnChannels)
{
    const JointAnnotation a { ArmClass::DriverLeft, { 300, 200 }, { 200, 150 } };
    const JointAnnotation b { ArmClass::PassengerRight, { 310, 190 }, { 210, 160 } };
    const auto both = render_stack(frame_with({ a, b }), {});
    const auto only_a = render_stack(frame_with({ a }), {});
    const auto only_b = render_stack(frame_with({ b }), {});
    for (auto arm : { ArmClass::DriverLeft, ArmClass::PassengerRight }) {
        const auto& single = arm == ArmClass::DriverLeft ? only_a : only_b;
        for (int c : { pcm_channel(arm, Joint::Elbow), pcm_channel(arm, Joint::Wrist), paf_x_channel(arm), paf_y_channel(arm) }) {
            EXPECT_TRUE(std::ranges::equal(both.channel(c).pixels, single.channel(c).pixels)) << c;
        }
    }
}

TEST(RenderStack, InvisibleArmRendersNothing)
{
    JointAnnotation a { ArmClass::DriverRight, { 300, 200 }, { 200, 150 } };
    a.visible = false;
    const auto s = render_stack(frame_with({ a }), {});
    EXPECT_EQ(s, render_stack(frame_with({}), {}));
}

TEST(RenderStack, BackgroundRederivationIsExact)
{
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> ux(30, 700), uy(30, 340);
    for (int i = 0; i < 20; ++i) {
        std::vector<JointAnnotation> arms;
        for (auto arm : kAllArms) {
            arms.push_back({ arm, { ux(rng), uy(rng) }, { ux(rng), uy(rng) } });
        }
        const auto s = render_stack(frame_with(arms), {});
        const auto bg = render_background(s);
        EXPECT_TRUE(std::ranges::equal(bg.pixels(), s.channel(kBackgroundChannel).pixels));
        EXPECT_FALSE(check_invariants(s));
    }
}

TEST(RenderStack, JointsMapThroughCellCenters)
{
    // input (83.5, 43.5) sits on heatmap cell (10, 5) at stride 8
    const auto s = render_stack(frame_with({ { ArmClass::PassengerLeft, { 83.5, 43.5 }, { 163.5, 43.5 } } }), {});
    EXPECT_EQ(s.channel(pcm_channel(ArmClass::PassengerLeft, Joint::Wrist))(10, 5), 1.0f);
    EXPECT_EQ(s.channel(pcm_channel(ArmClass::PassengerLeft, Joint::Elbow))(20, 5), 1.0f);
    EXPECT_EQ(s.channel(paf_x_channel(ArmClass::PassengerLeft))(15, 5), -1.0f);
}
