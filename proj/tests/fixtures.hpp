#ifndef TEXTILE_TEST_FIXTURES_HPP
#define TEXTILE_TEST_FIXTURES_HPP

#include <cmath>
#include <filesystem>
#include <numbers>
#include <random>
#include <string>

#include "textile/bspline.hpp"
#include "textile/reconstruct.hpp"
#include "textile/section.hpp"
#include "textile/synthgen.hpp"
#include "textile/volume.hpp"

namespace fixtures {

using textile::Vec2;
using textile::Vec3;

inline constexpr double kPi = std::numbers::pi;

// Regular decagon of circumradius r in the z = z0 plane, CCW about +z.
inline textile::CrossSection decagon(double r, double z0 = 0.0, double phase = 0.0) {
    textile::CrossSection s;
    for (int i = 0; i < textile::kContourPoints; ++i) {
        const double t = phase + 2.0 * kPi * i / textile::kContourPoints;
        s.contour[i] = Vec3(r * std::cos(t), r * std::sin(t), z0);
    }
    s.center = textile::contour_centroid(s.contour);
    return s;
}

// Straight circular yarn along +x from x0 to x1 at (y, z), S sections.
inline textile::ReconstructedYarn straight_yarn(int id, double radius, double x0, double x1, int s_count,
                                                double y = 0.0, double z = 0.0) {
    textile::ReconstructedYarn yarn;
    yarn.id = id;
    yarn.family = textile::Family::Warp;
    yarn.path = textile::BSplineCurve::clamped_uniform(
        3, {Vec3(x0, y, z), Vec3(x0 + (x1 - x0) / 3, y, z), Vec3(x0 + 2 * (x1 - x0) / 3, y, z),
            Vec3(x1, y, z)});
    for (int s = 0; s < s_count; ++s) {
        const double x = x0 + (x1 - x0) * s / (s_count - 1);
        yarn.sections.push_back(textile::ellipse_section(Vec3(x, y, z), Vec3::UnitX(), radius, radius,
                                                         Vec3::UnitY(), x - x0));
        yarn.completed.push_back(false);
    }
    return yarn;
}

// Filled ellipse label image: pixel centers (u + 1/2, v + 1/2) inside.
inline textile::LabelSlice ellipse_slice(int w, int h, double cu, double cv, double a, double b,
                                         std::uint16_t label, textile::LabelSlice base = {}) {
    if (base.pixels.empty()) {
        base.width = w;
        base.height = h;
        base.pixels.assign(static_cast<std::size_t>(w) * h, 0);
    }
    for (int v = 0; v < h; ++v) {
        for (int u = 0; u < w; ++u) {
            const double du = (u + 0.5 - cu) / a;
            const double dv = (v + 0.5 - cv) / b;
            if (du * du + dv * dv <= 1.0) base.at(u, v) = label;
        }
    }
    return base;
}

inline std::filesystem::path temp_dir(const std::string& name) {
    const auto dir = std::filesystem::temp_directory_path() / ("textile_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

// Desk-scale interlock used by the round-trip tests.
inline textile::WeaveSpec desk_weave() { return textile::WeaveSpec{}; }

}  // namespace fixtures

#endif  // TEXTILE_TEST_FIXTURES_HPP
