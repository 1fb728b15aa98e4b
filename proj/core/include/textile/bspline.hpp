#ifndef TEXTILE_BSPLINE_HPP
#define TEXTILE_BSPLINE_HPP

#include <functional>
#include <vector>

#include "textile/geometry.hpp"

namespace textile {

// Clamped, non-rational B-spline on the parameter domain [0, 1].
class BSplineCurve {
public:
    BSplineCurve() = default;

    // Throws DomainError unless: degree >= 1, knots.size() ==
    // controls.size() + degree + 1, knots non-decreasing, first/last knot
    // repeated degree + 1 times, domain [0, 1].
    BSplineCurve(int degree, std::vector<Vec3> controls, std::vector<double> knots);

    static BSplineCurve clamped_uniform(int degree, std::vector<Vec3> controls);

    int degree() const { return degree_; }
    const std::vector<Vec3>& control_points() const { return controls_; }
    const std::vector<double>& knots() const { return knots_; }

    // De Boor evaluation. t outside [0, 1] throws DomainError.
    Vec3 eval(double t) const;

    // Derivatives 0..order at t (order <= degree gives non-trivial values).
    std::vector<Vec3> derivatives(double t, int order) const;

    Vec3 tangent(double t) const;  // unit first derivative

    // n points at uniform parameter spacing (endpoints included).
    Polyline sample(int n) const;

    // Same knots, controls mapped through f. Exact for affine f.
    BSplineCurve map_controls(const std::function<Vec3(const Vec3&)>& f) const;

    bool operator==(const BSplineCurve&) const = default;

private:
    int span(double t) const;

    int degree_ = 0;
    std::vector<Vec3> controls_;
    std::vector<double> knots_;
};

Vec3 bspline_eval(const BSplineCurve& curve, double t);

struct FitOptions {
    int parameter_corrections = 400;  // point-projection refinement passes (linear convergence)
    double correction_tolerance = 1e-13;
};

// Least-squares fit with chord-length parameters; end samples are reproduced
// exactly. Throws InsufficientDataError / SingularFitError.
BSplineCurve bspline_fit(std::span<const Vec3> samples, int degree, int n_controls,
                         const FitOptions& options = {});

Polyline resample_arclength(const BSplineCurve& curve, int n);

// Cumulative arc-length table over a dense uniform-parameter sampling.
class ArcLengthTable {
public:
    explicit ArcLengthTable(const BSplineCurve& curve, int samples = 2048);

    double total() const { return lengths_.back(); }
    double length_at(double t) const;
    double param_at(double s) const;

    // Parameter of the closest point on the curve to p (dense search plus
    // Newton refinement).
    double closest_param(const Vec3& p) const;

    const Polyline& points() const { return points_; }

private:
    BSplineCurve curve_;
    std::vector<double> params_;
    std::vector<double> lengths_;
    Polyline points_;
};

}  // namespace textile

#endif  // TEXTILE_BSPLINE_HPP
