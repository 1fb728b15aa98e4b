#ifndef TEXTILE_GEOMETRY_HPP
#define TEXTILE_GEOMETRY_HPP

#include <array>
#include <limits>
#include <span>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace textile {

// Coordinates are in model units. One model unit is one reference voxel
// (TextileModel::unit_um micrometres, 20 by default). X runs along the warp,
// Y along the weft and Z through the thickness.
using Vec3 = Eigen::Vector3d;
using Vec2 = Eigen::Vector2d;
using Polyline = std::vector<Vec3>;

struct Box {
    Vec3 min = Vec3::Constant(std::numeric_limits<double>::infinity());
    Vec3 max = Vec3::Constant(-std::numeric_limits<double>::infinity());

    static Box from_corners(const Vec3& lo, const Vec3& hi) { return {lo, hi}; }

    bool empty() const { return (max.array() < min.array()).any(); }
    Vec3 extent() const { return max - min; }
    void expand(const Vec3& p) {
        min = min.cwiseMin(p);
        max = max.cwiseMax(p);
    }
    void expand(const Box& other) {
        min = min.cwiseMin(other.min);
        max = max.cwiseMax(other.max);
    }
    bool contains(const Vec3& p, double tol = 0.0) const {
        return (p.array() >= min.array() - tol).all() &&
               (p.array() <= max.array() + tol).all();
    }

    bool operator==(const Box&) const = default;
};

bool is_finite(const Vec3& p);

// Orthonormal in-plane frame used for every ordering decision. e1 is the
// global axis least aligned with the normal (lowest index on ties), projected
// into the plane; e2 = n x e1, so increasing angle in (e1, e2) is
// counter-clockwise about n.
struct PlaneFrame {
    Vec3 e1;
    Vec3 e2;
    Vec3 n;

    Vec2 project(const Vec3& p, const Vec3& origin) const {
        const Vec3 d = p - origin;
        return {d.dot(e1), d.dot(e2)};
    }
};

PlaneFrame reference_frame(const Vec3& normal);

struct Plane {
    Vec3 origin;
    Vec3 normal;
    double max_residual = 0.0;  // largest |distance| of an input point
};

// Least-squares plane. The normal sign follows the Newell normal of the
// points taken as a closed polygon, so CCW input yields a normal that sees
// it CCW.
Plane fit_plane(std::span<const Vec3> points);

// Newell normal of a closed polygon (unnormalised; length = 2 * area).
Vec3 newell_normal(std::span<const Vec3> ring);

double polyline_length(std::span<const Vec3> pts, bool closed = false);

// Removes consecutive duplicates (and the seam duplicate when closed).
Polyline dedupe(std::span<const Vec3> pts, bool closed = false, double eps = 0.0);

// n points with equal chord spacing walked along the input. Open inputs keep
// both endpoints; closed inputs start at the first point and do not repeat
// the seam. Throws DegenerateGeometryError for zero-length input, DomainError
// for n < 2.
Polyline resample_arclength(std::span<const Vec3> pts, int n, bool closed = false);

// Closed contour resampled to n points starting from the extreme point along
// the frame's e1 axis and running counter-clockwise about `normal`.
Polyline canonical_closed_resample(std::span<const Vec3> closed_pts, const Vec3& normal,
                                   int n);

// Cyclic shift (and reversal if clockwise) of an existing ring so that it
// follows the canonical convention. No resampling.
Polyline recanonicalize(std::span<const Vec3> ring, const Vec3& normal);

// 2D helpers on in-plane coordinates.
double signed_area(std::span<const Vec2> ring);
bool is_simple_polygon(std::span<const Vec2> ring);
bool point_in_polygon(const Vec2& p, std::span<const Vec2> ring);

// Periodic uniform Catmull-Rom densification of a closed ring; returns
// ring.size() * factor points, the originals at indices multiple of factor.
Polyline densify_closed(std::span<const Vec3> ring, int factor);

}  // namespace textile

#endif  // TEXTILE_GEOMETRY_HPP
