#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "textile/bspline.hpp"
#include "textile/error.hpp"

using namespace textile;

TEST(BSplineEval, LinearMidpoint) {
    const BSplineCurve c(1, {Vec3(0, 0, 0), Vec3(2, 0, 0)}, {0, 0, 1, 1});
    EXPECT_EQ(bspline_eval(c, 0.5), Vec3(1, 0, 0));
}

TEST(BSplineEval, EndpointsAreExactControls) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> u(-50, 50);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Vec3> ctrl;
        for (int i = 0; i < 4 + trial % 5; ++i) ctrl.emplace_back(u(rng), u(rng), u(rng));
        const auto c = BSplineCurve::clamped_uniform(1 + trial % 3, ctrl);
        EXPECT_EQ(c.eval(0.0), ctrl.front());
        EXPECT_EQ(c.eval(1.0), ctrl.back());
    }
}

TEST(BSplineEval, ConstantControlsGiveConstantCurve) {
    const Vec3 c0(1.5, -2, 7);
    const auto c = BSplineCurve::clamped_uniform(3, std::vector<Vec3>(6, c0));
    for (int i = 0; i <= 20; ++i) EXPECT_NEAR((c.eval(i / 20.0) - c0).norm(), 0.0, 1e-12);
}

TEST(BSplineEval, ParameterOutsideDomainThrows) {
    const auto c = BSplineCurve::clamped_uniform(3, {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 1, 0), Vec3(3, 0, 0)});
    EXPECT_THROW(c.eval(-1e-9), DomainError);
    EXPECT_THROW(c.eval(1.0 + 1e-9), DomainError);
}

TEST(BSplineEval, StaysInControlBoundingBox) {
    // the convex hull property implies the weaker box containment
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(-10, 10);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<Vec3> ctrl;
        Box box;
        for (int i = 0; i < 7; ++i) {
            ctrl.emplace_back(u(rng), u(rng), u(rng));
            box.expand(ctrl.back());
        }
        const auto c = BSplineCurve::clamped_uniform(3, ctrl);
        for (int i = 0; i <= 200; ++i) EXPECT_TRUE(box.contains(c.eval(i / 200.0), 1e-12));
    }
}

TEST(BSplineEval, MatchesBernsteinForSingleSpanCubic) {
    // independent oracle: a 4-control clamped cubic is a Bezier curve
    const std::vector<Vec3> p{Vec3(0, 0, 0), Vec3(1, 3, 0), Vec3(4, 3, 1), Vec3(5, 0, 2)};
    const auto c = BSplineCurve::clamped_uniform(3, p);
    for (int i = 0; i <= 10; ++i) {
        const double t = i / 10.0;
        const double s = 1 - t;
        const Vec3 bez = s * s * s * p[0] + 3 * s * s * t * p[1] + 3 * s * t * t * p[2] + t * t * t * p[3];
        EXPECT_NEAR((c.eval(t) - bez).norm(), 0.0, 1e-12);
        const Vec3 d1 = 3 * (s * s * (p[1] - p[0]) + 2 * s * t * (p[2] - p[1]) + t * t * (p[3] - p[2]));
        EXPECT_NEAR((c.derivatives(t, 1)[1] - d1).norm(), 0.0, 1e-10);
    }
}

TEST(BSplineCurve, RejectsInvalidKnots) {
    EXPECT_THROW(BSplineCurve(3, {Vec3::Zero(), Vec3::Ones()}, {0, 0, 0, 0, 1, 1}), DomainError);
    EXPECT_THROW(BSplineCurve(1, {Vec3::Zero(), Vec3::Ones()}, {0, 0.5, 1, 1}), DomainError);
    EXPECT_THROW(BSplineCurve(1, {Vec3::Zero(), Vec3::Ones(), Vec3::Zero()}, {0, 0, 0.7, 0.2, 1}), DomainError);
}

TEST(BSplineFit, CollinearSamplesGiveExactLine) {
    Polyline s;
    for (int i = 0; i < 10; ++i) s.emplace_back(i * 1.3, 0, 0);
    const auto c = bspline_fit(s, 3, 4);
    for (int i = 0; i <= 100; ++i) {
        const Vec3 p = c.eval(i / 100.0);
        EXPECT_LT(std::hypot(p.y(), p.z()), 1e-9);
    }
    EXPECT_EQ(c.eval(0.0), s.front());
    EXPECT_EQ(c.eval(1.0), s.back());
}

TEST(BSplineFit, RoundTripsSamplesOfKnownSpline) {
    const auto truth = BSplineCurve::clamped_uniform(
        3, {Vec3(0, 0, 0), Vec3(3, 4, 1), Vec3(7, -2, 2), Vec3(10, 1, 0)});
    Polyline s;
    for (int i = 0; i < 40; ++i) s.push_back(truth.eval(i / 39.0));
    const auto fit = bspline_fit(s, 3, 4);
    for (const auto& p : s) {
        const ArcLengthTable table(fit);
        EXPECT_LT((fit.eval(table.closest_param(p)) - p).norm(), 1e-6);
    }
}

TEST(BSplineFit, TooFewSamplesThrows) {
    const Polyline s{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 1, 0)};
    EXPECT_THROW(bspline_fit(s, 3, 4), InsufficientDataError);
}

TEST(BSplineFit, CoincidentSamplesAreSingular) {
    const Polyline s(8, Vec3(1, 1, 1));
    EXPECT_THROW(bspline_fit(s, 3, 4), Error);
}

TEST(ArcLengthTable, StraightLineLengthsAndInverse) {
    const auto c = BSplineCurve::clamped_uniform(
        3, {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(2, 0, 0), Vec3(3, 0, 0), Vec3(10, 0, 0)});
    const ArcLengthTable t(c);
    EXPECT_NEAR(t.total(), 10.0, 1e-9);
    for (double s : {0.0, 1.0, 4.5, 9.99}) EXPECT_NEAR(t.length_at(t.param_at(s)), s, 1e-5);
    EXPECT_NEAR(c.eval(t.closest_param(Vec3(6, 2, 0))).x(), 6.0, 1e-6);
}

TEST(ResampleCurve, EqualSpacingOnArc) {
    const auto c = BSplineCurve::clamped_uniform(
        3, {Vec3(0, 0, 0), Vec3(0, 5, 0), Vec3(5, 5, 0), Vec3(5, 0, 0)});
    const Polyline r = resample_arclength(c, 21);
    ASSERT_EQ(r.size(), 21u);
    EXPECT_EQ(r.front(), c.eval(0.0));
    double lo = 1e9, hi = 0;
    for (std::size_t i = 1; i < r.size(); ++i) {
        lo = std::min(lo, (r[i] - r[i - 1]).norm());
        hi = std::max(hi, (r[i] - r[i - 1]).norm());
    }
    EXPECT_LT(hi - lo, 1e-3 * hi);
}
