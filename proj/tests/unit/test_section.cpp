#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include <Eigen/Geometry>

#include "fixtures.hpp"
#include "textile/error.hpp"
#include "textile/section.hpp"

using namespace textile;
using fixtures::kPi;

namespace {

// Independent oracle: 10 points equally spaced by arc length on the ellipse
// (a cos t, b sin t), starting at t = 0, by fine trapezoid integration of the
// speed. Returns the shoelace area.
double inscribed_decagon_area(double a, double b) {
    const int n = 2'000'000;
    const double dt = 2 * kPi / n;
    auto speed = [&](double t) { return std::hypot(a * std::sin(t), b * std::cos(t)); };
    std::vector<double> s(n + 1, 0.0);
    for (int i = 1; i <= n; ++i) s[i] = s[i - 1] + 0.5 * dt * (speed((i - 1) * dt) + speed(i * dt));
    std::vector<Vec2> pts;
    int j = 0;
    for (int k = 0; k < 10; ++k) {
        const double target = s[n] * k / 10;
        while (s[j + 1] < target) ++j;
        const double t = (j + (target - s[j]) / (s[j + 1] - s[j])) * dt;
        pts.emplace_back(a * std::cos(t), b * std::sin(t));
    }
    double area = 0;
    for (int k = 0; k < 10; ++k) area += pts[k].x() * pts[(k + 1) % 10].y() - pts[(k + 1) % 10].x() * pts[k].y();
    return 0.5 * area;
}

}  // namespace

TEST(SectionArea, UnitSquareAsTenPoints) {
    CrossSection s;
    const Vec2 pts[10] = {{1, 0.5}, {1, 1}, {0.5, 1}, {0, 1}, {0, 0.5},
                          {0, 0},   {0.25, 0}, {0.5, 0}, {0.75, 0}, {1, 0}};
    for (int i = 0; i < 10; ++i) s.contour[i] = Vec3(pts[i].x(), pts[i].y(), 0);
    s.center = contour_centroid(s.contour);
    EXPECT_NEAR(section_area(s), 1.0, 1e-12);
}

TEST(SectionArea, RegularDecagon) {
    EXPECT_NEAR(section_area(fixtures::decagon(1.0)), 5 * std::sin(kPi / 5), 1e-12);
    EXPECT_NEAR(section_area(fixtures::decagon(1.0)), 2.93893, 1e-5);
}

TEST(SectionArea, EllipseDecagonMatchesDenseOracle) {
    const double oracle = inscribed_decagon_area(2, 1);
    EXPECT_NEAR(oracle, 5.82627, 1e-4);
    const CrossSection s = ellipse_section(Vec3::Zero(), Vec3::UnitZ(), 2, 1, Vec3::UnitX());
    EXPECT_NEAR(section_area(s), oracle, 1e-5);
    // the inscribed 10-gon sits 7.3 % under the ellipse, so only 10 % holds
    EXPECT_LT(std::abs(section_area(s) - 2 * kPi) / (2 * kPi), 0.10);
}

TEST(SectionArea, ConvergesWithPreSamplingResolution) {
    const double oracle = inscribed_decagon_area(2, 1);
    double prev = 1e9;
    for (int dense : {64, 512, 8192}) {
        const CrossSection s = ellipse_section(Vec3::Zero(), Vec3::UnitZ(), 2, 1, Vec3::UnitX(), 0, dense);
        const double err = std::abs(section_area(s) - oracle);
        EXPECT_LT(err, prev) << dense;
        prev = err;
    }
    EXPECT_LT(prev, 1e-6);
}

TEST(SectionArea, InvariantUnderRigidMotion) {
    const CrossSection s = ellipse_section(Vec3(1, 2, 3), Vec3::UnitZ(), 3, 1.2, Vec3(1, 1, 0));
    const double a0 = section_area(s);
    const Eigen::Matrix3d r =
        (Eigen::AngleAxisd(0.7, Vec3(1, 2, 3).normalized()) * Eigen::AngleAxisd(-1.1, Vec3::UnitX()))
            .toRotationMatrix();
    CrossSection m;
    for (int i = 0; i < 10; ++i) m.contour[i] = r * s.contour[i] + Vec3(-40, 7, 12.5);
    m.center = contour_centroid(m.contour);
    EXPECT_NEAR(section_area(m), a0, 1e-9 * a0);
}

TEST(SectionArea, SelfIntersectingThrows) {
    CrossSection s = fixtures::decagon(1.0);
    std::swap(s.contour[2], s.contour[6]);
    EXPECT_THROW(section_area(s), InvalidContourError);
}

TEST(EllipseSection, CircleCase) {
    const Vec3 c(5, -3, 2);
    const CrossSection s = ellipse_section(c, Vec3(1, 1, 0), 2.5, 2.5, Vec3::UnitZ());
    for (const auto& p : s.contour) EXPECT_NEAR((p - c).norm(), 2.5, 1e-12);
    EXPECT_LT((contour_centroid(s.contour) - c).norm(), 1e-9);
    EXPECT_EQ(s.center, c);
}

TEST(EllipseSection, UniformArcSpacing) {
    const double a = 2, b = 1;
    const CrossSection s = ellipse_section(Vec3::Zero(), Vec3::UnitZ(), a, b, Vec3::UnitX());
    // arc length between consecutive keypoints by dense integration
    auto param = [&](const Vec3& p) { return std::atan2(p.y() / b, p.x() / a); };
    auto arc = [&](double t0, double t1) {
        if (t1 < t0) t1 += 2 * kPi;
        const int n = 20000;
        double len = 0;
        for (int i = 0; i < n; ++i) {
            const double t = t0 + (t1 - t0) * (i + 0.5) / n;
            len += std::hypot(a * std::sin(t), b * std::cos(t)) * (t1 - t0) / n;
        }
        return len;
    };
    double perimeter = 0;
    std::vector<double> d;
    for (int i = 0; i < 10; ++i) {
        d.push_back(arc(param(s.contour[i]), param(s.contour[(i + 1) % 10])));
        perimeter += d.back();
    }
    for (double di : d) EXPECT_NEAR(di, perimeter / 10, 1e-3);
}

TEST(EllipseSection, NonPositiveAxisThrows) {
    EXPECT_THROW(ellipse_section(Vec3::Zero(), Vec3::UnitZ(), 0, 1, Vec3::UnitX()), DomainError);
    EXPECT_THROW(ellipse_section(Vec3::Zero(), Vec3::UnitZ(), 1, -1, Vec3::UnitX()), DomainError);
    EXPECT_THROW(ellipse_section(Vec3::Zero(), Vec3::Zero(), 1, 1, Vec3::UnitX()), DomainError);
}

TEST(EllipseSection, CanonicalOrderAndNormal) {
    const CrossSection s = ellipse_section(Vec3::Zero(), Vec3::UnitX(), 3, 1, Vec3::UnitY());
    // normal +x: e1 = +y, so the start point is the +y vertex
    EXPECT_NEAR((s.contour[0] - Vec3(0, 3, 0)).norm(), 0.0, 1e-9);
    EXPECT_NEAR(section_normal(s).dot(Vec3::UnitX()), 1.0, 1e-12);
    EXPECT_NO_THROW(validate_section(s));
}

TEST(ValidateSection, DetectsPlanarityAndCentroid) {
    CrossSection s = fixtures::decagon(3.0);
    s.contour[3].z() += 2.0;
    s.center = contour_centroid(s.contour);
    EXPECT_THROW(validate_section(s), InvalidContourError);
    CrossSection t = fixtures::decagon(3.0);
    t.center.x() += 0.3;
    EXPECT_THROW(validate_section(t), InvalidContourError);
    t.center.x() -= 0.1;
    EXPECT_NO_THROW(validate_section(t));
}

TEST(ProjectSection, FlattensOntoPlane) {
    CrossSection s = fixtures::decagon(2.0);
    for (int i = 0; i < 10; ++i) s.contour[i].z() = s.contour[i].x() * 0.5;
    s.center = contour_centroid(s.contour);
    const CrossSection p = project_section(s, Vec3::UnitZ());
    for (const auto& q : p.contour) EXPECT_NEAR(q.z(), s.center.z(), 1e-12);
    EXPECT_NEAR(section_area(p), 5 * std::sin(kPi / 5) * 4, 1e-9);
}
