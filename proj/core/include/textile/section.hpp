#ifndef TEXTILE_SECTION_HPP
#define TEXTILE_SECTION_HPP

#include <array>

#include "textile/geometry.hpp"

namespace textile {

inline constexpr int kContourPoints = 10;
using Contour = std::array<Vec3, kContourPoints>;

// One yarn cross section: 10 ordered contour keypoints plus the center
// keypoint (their centroid) at arc-length `station` along the owning yarn.
struct CrossSection {
    Contour contour{};
    Vec3 center = Vec3::Zero();
    double station = 0.0;

    bool operator==(const CrossSection&) const = default;
};

struct SectionTolerances {
    double plane = 0.5;     // max distance of a keypoint to the best-fit plane
    double centroid = 0.25; // max |center - centroid(contour)|
};

Vec3 contour_centroid(const Contour& contour);

// Best-fit plane normal, oriented so the contour runs counter-clockwise.
Vec3 section_normal(const CrossSection& section);

// Throws InvalidContourError describing the first violated invariant.
void validate_section(const CrossSection& section, const SectionTolerances& tol = {});

// Shoelace area of the 10-gon in its best-fit plane. Self-intersecting or
// zero-area contours throw InvalidContourError.
double section_area(const CrossSection& section);

// Ellipse with semi-axis a along `orientation` (projected into the plane) and
// b across it, sampled at 10 points equally spaced by arc length, starting at
// the canonical extreme and running counter-clockwise about `normal`.
CrossSection ellipse_section(const Vec3& center, const Vec3& normal, double a, double b,
                             const Vec3& orientation, double station = 0.0,
                             int dense_samples = 4096);

// Copy of `section` projected orthogonally onto the plane through its center
// with the given normal.
CrossSection project_section(const CrossSection& section, const Vec3& normal);

}  // namespace textile

#endif  // TEXTILE_SECTION_HPP
