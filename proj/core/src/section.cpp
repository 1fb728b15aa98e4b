#include "textile/section.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "textile/error.hpp"

namespace textile {

Vec3 contour_centroid(const Contour& contour) {
    Vec3 c = Vec3::Zero();
    for (const auto& p : contour) c += p;
    return c / static_cast<double>(kContourPoints);
}

Vec3 section_normal(const CrossSection& section) {
    return fit_plane(section.contour).normal;
}

namespace {

std::vector<Vec2> planar_ring(const CrossSection& section, const Plane& plane) {
    const PlaneFrame frame = reference_frame(plane.normal);
    std::vector<Vec2> ring;
    ring.reserve(kContourPoints);
    for (const auto& p : section.contour) ring.push_back(frame.project(p, plane.origin));
    return ring;
}

}  // namespace

void validate_section(const CrossSection& section, const SectionTolerances& tol) {
    for (const auto& p : section.contour) {
        if (!p.allFinite()) throw InvalidContourError("section: non-finite keypoint");
    }
    if (!section.center.allFinite() || !std::isfinite(section.station)) {
        throw InvalidContourError("section: non-finite center or station");
    }
    const Plane plane = fit_plane(section.contour);
    if (plane.max_residual > tol.plane) {
        std::ostringstream os;
        os << "section at station " << section.station << ": keypoints deviate "
           << plane.max_residual << " from their plane (tolerance " << tol.plane << ")";
        throw InvalidContourError(os.str());
    }
    const double off = (section.center - contour_centroid(section.contour)).norm();
    if (off > tol.centroid) {
        std::ostringstream os;
        os << "section at station " << section.station << ": center is " << off
           << " from the contour centroid (tolerance " << tol.centroid << ")";
        throw InvalidContourError(os.str());
    }
    if (!is_simple_polygon(planar_ring(section, plane))) {
        std::ostringstream os;
        os << "section at station " << section.station << ": contour self-intersects";
        throw InvalidContourError(os.str());
    }
}

double section_area(const CrossSection& section) {
    const Plane plane = fit_plane(section.contour);
    const auto ring = planar_ring(section, plane);
    if (!is_simple_polygon(ring)) {
        throw InvalidContourError("section_area: contour self-intersects");
    }
    const double area = std::abs(signed_area(ring));
    if (!(area > 0.0)) throw InvalidContourError("section_area: zero-area contour");
    return area;
}

CrossSection ellipse_section(const Vec3& center, const Vec3& normal, double a, double b,
                             const Vec3& orientation, double station, int dense_samples) {
    if (!(a > 0.0) || !(b > 0.0)) throw DomainError("ellipse_section: semi-axes must be > 0");
    if (!(normal.norm() > 0.0)) throw DomainError("ellipse_section: zero normal");
    const PlaneFrame frame = reference_frame(normal);
    const Vec3& n = frame.n;

    Vec3 u = orientation - orientation.dot(n) * n;
    if (!(u.norm() > 1e-12)) u = frame.e1;
    u.normalize();
    const Vec3 w = n.cross(u);  // (u, w) is counter-clockwise about n

    // canonical start: the ellipse point extreme along e1
    const double t0 = std::atan2(b * frame.e1.dot(w), a * frame.e1.dot(u));

    // cumulative arc length over a dense parameter grid, then invert
    dense_samples = std::max(dense_samples, 64);
    std::vector<double> s(dense_samples + 1, 0.0);
    auto point = [&](double t) { return Vec2(a * std::cos(t), b * std::sin(t)); };
    const double dt = 2.0 * std::numbers::pi / dense_samples;
    Vec2 prev = point(t0);
    for (int i = 1; i <= dense_samples; ++i) {
        const Vec2 cur = point(t0 + i * dt);
        s[i] = s[i - 1] + (cur - prev).norm();
        prev = cur;
    }
    const double perimeter = s.back();

    CrossSection out;
    out.center = center;
    out.station = station;
    std::size_t j = 0;
    for (int k = 0; k < kContourPoints; ++k) {
        const double target = perimeter * k / kContourPoints;
        while (j + 1 < s.size() && s[j + 1] < target) ++j;
        const double seg = s[j + 1] - s[j];
        const double frac = seg > 0.0 ? (target - s[j]) / seg : 0.0;
        const double t = t0 + (j + frac) * dt;
        out.contour[k] = center + a * std::cos(t) * u + b * std::sin(t) * w;
    }
    return out;
}

CrossSection project_section(const CrossSection& section, const Vec3& normal) {
    const Vec3 n = normal.normalized();
    CrossSection out = section;
    for (auto& p : out.contour) p -= (p - section.center).dot(n) * n;
    return out;
}

}  // namespace textile
