#include "textile/bspline.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

#include "textile/error.hpp"

namespace textile {

BSplineCurve::BSplineCurve(int degree, std::vector<Vec3> controls, std::vector<double> knots)
    : degree_(degree), controls_(std::move(controls)), knots_(std::move(knots)) {
    if (degree_ < 1) throw DomainError("BSplineCurve: degree must be >= 1");
    if (controls_.size() < static_cast<std::size_t>(degree_) + 1) {
        throw DomainError("BSplineCurve: need at least degree + 1 control points");
    }
    if (knots_.size() != controls_.size() + degree_ + 1) {
        throw DomainError("BSplineCurve: knot count must equal controls + degree + 1");
    }
    if (!std::is_sorted(knots_.begin(), knots_.end())) {
        throw DomainError("BSplineCurve: knots must be non-decreasing");
    }
    for (int i = 0; i <= degree_; ++i) {
        if (knots_[i] != 0.0 || knots_[knots_.size() - 1 - i] != 1.0) {
            throw DomainError("BSplineCurve: knots must be clamped on [0, 1]");
        }
    }
    for (const auto& c : controls_) {
        if (!c.allFinite()) throw DomainError("BSplineCurve: non-finite control point");
    }
}

BSplineCurve BSplineCurve::clamped_uniform(int degree, std::vector<Vec3> controls) {
    const int n = static_cast<int>(controls.size());
    if (degree < 1 || n < degree + 1) {
        throw DomainError("clamped_uniform: need degree >= 1 and at least degree + 1 controls");
    }
    std::vector<double> knots(n + degree + 1, 0.0);
    const int interior = n - degree - 1;
    for (int j = 1; j <= interior; ++j) knots[degree + j] = static_cast<double>(j) / (interior + 1);
    std::fill(knots.end() - (degree + 1), knots.end(), 1.0);
    return BSplineCurve(degree, std::move(controls), std::move(knots));
}

int BSplineCurve::span(double t) const {
    const int n = static_cast<int>(controls_.size()) - 1;
    if (t >= knots_[n + 1]) return n;
    // largest k with knots[k] <= t < knots[k+1], k in [degree, n]
    auto it = std::upper_bound(knots_.begin() + degree_, knots_.begin() + n + 1, t);
    return static_cast<int>(it - knots_.begin()) - 1;
}

Vec3 BSplineCurve::eval(double t) const {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw DomainError("bspline_eval: parameter outside [0, 1]");
    }
    if (t == 0.0) return controls_.front();
    if (t == 1.0) return controls_.back();

    const int k = span(t);
    const int p = degree_;
    std::vector<Vec3> d(p + 1);
    for (int j = 0; j <= p; ++j) d[j] = controls_[j + k - p];
    for (int r = 1; r <= p; ++r) {
        for (int j = p; j >= r; --j) {
            const double lo = knots_[j + k - p];
            const double hi = knots_[j + 1 + k - r];
            const double alpha = hi > lo ? (t - lo) / (hi - lo) : 0.0;
            d[j] = (1.0 - alpha) * d[j - 1] + alpha * d[j];
        }
    }
    return d[p];
}

std::vector<Vec3> BSplineCurve::derivatives(double t, int order) const {
    if (!(t >= 0.0 && t <= 1.0)) {
        throw DomainError("BSplineCurve::derivatives: parameter outside [0, 1]");
    }
    const int p = degree_;
    const int k = span(t);
    const int nd = std::min(order, p);

    // basis function derivatives, after Piegl & Tiller's DersBasisFuns
    std::vector<std::vector<double>> ndu(p + 1, std::vector<double>(p + 1));
    std::vector<double> left(p + 1), right(p + 1);
    ndu[0][0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = t - knots_[k + 1 - j];
        right[j] = knots_[k + j] - t;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            ndu[j][r] = right[r + 1] + left[j - r];
            const double temp = ndu[j][r] != 0.0 ? ndu[r][j - 1] / ndu[j][r] : 0.0;
            ndu[r][j] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        ndu[j][j] = saved;
    }
    std::vector<std::vector<double>> ders(nd + 1, std::vector<double>(p + 1, 0.0));
    for (int j = 0; j <= p; ++j) ders[0][j] = ndu[j][p];
    std::vector<std::vector<double>> a(2, std::vector<double>(p + 1));
    for (int r = 0; r <= p; ++r) {
        int s1 = 0, s2 = 1;
        a[0][0] = 1.0;
        for (int kk = 1; kk <= nd; ++kk) {
            double d = 0.0;
            const int rk = r - kk;
            const int pk = p - kk;
            if (r >= kk) {
                a[s2][0] = ndu[pk + 1][rk] != 0.0 ? a[s1][0] / ndu[pk + 1][rk] : 0.0;
                d = a[s2][0] * ndu[rk][pk];
            }
            const int j1 = rk >= -1 ? 1 : -rk;
            const int j2 = (r - 1 <= pk) ? kk - 1 : p - r;
            for (int j = j1; j <= j2; ++j) {
                a[s2][j] = ndu[pk + 1][rk + j] != 0.0
                               ? (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j]
                               : 0.0;
                d += a[s2][j] * ndu[rk + j][pk];
            }
            if (r <= pk) {
                a[s2][kk] = ndu[pk + 1][r] != 0.0 ? -a[s1][kk - 1] / ndu[pk + 1][r] : 0.0;
                d += a[s2][kk] * ndu[r][pk];
            }
            ders[kk][r] = d;
            std::swap(s1, s2);
        }
    }
    double factor = p;
    for (int kk = 1; kk <= nd; ++kk) {
        for (int j = 0; j <= p; ++j) ders[kk][j] *= factor;
        factor *= (p - kk);
    }

    std::vector<Vec3> out(order + 1, Vec3::Zero());
    for (int kk = 0; kk <= nd; ++kk) {
        for (int j = 0; j <= p; ++j) out[kk] += ders[kk][j] * controls_[k - p + j];
    }
    return out;
}

Vec3 BSplineCurve::tangent(double t) const {
    const Vec3 d = derivatives(t, 1)[1];
    const double len = d.norm();
    if (!(len > 0.0)) throw DegenerateGeometryError("BSplineCurve::tangent: zero derivative");
    return d / len;
}

Polyline BSplineCurve::sample(int n) const {
    if (n < 2) throw DomainError("BSplineCurve::sample: n must be >= 2");
    Polyline out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) out.push_back(eval(static_cast<double>(i) / (n - 1)));
    return out;
}

BSplineCurve BSplineCurve::map_controls(const std::function<Vec3(const Vec3&)>& f) const {
    std::vector<Vec3> mapped;
    mapped.reserve(controls_.size());
    for (const auto& c : controls_) mapped.push_back(f(c));
    return BSplineCurve(degree_, std::move(mapped), knots_);
}

Vec3 bspline_eval(const BSplineCurve& curve, double t) { return curve.eval(t); }

namespace {

std::vector<double> chord_parameters(std::span<const Vec3> samples) {
    const std::size_t m = samples.size();
    std::vector<double> u(m, 0.0);
    for (std::size_t i = 1; i < m; ++i) u[i] = u[i - 1] + (samples[i] - samples[i - 1]).norm();
    const double total = u.back();
    if (!(total > 0.0)) throw SingularFitError("bspline_fit: samples have zero total length");
    for (auto& v : u) v /= total;
    u.back() = 1.0;
    return u;
}

std::vector<double> averaged_knots(const std::vector<double>& u, int degree, int n_controls) {
    const int m = static_cast<int>(u.size());
    const int p = degree;
    std::vector<double> knots(n_controls + p + 1, 0.0);
    std::fill(knots.end() - (p + 1), knots.end(), 1.0);
    const int interior = n_controls - p - 1;
    if (interior <= 0) return knots;
    if (n_controls == m) {
        for (int j = 1; j <= interior; ++j) {
            double s = 0.0;
            for (int i = j; i < j + p; ++i) s += u[i];
            knots[p + j] = s / p;
        }
    } else {
        const double d = static_cast<double>(m) / (n_controls - p);
        for (int j = 1; j <= interior; ++j) {
            const int i = static_cast<int>(std::floor(j * d));
            const double alpha = j * d - i;
            knots[p + j] = (1.0 - alpha) * u[std::max(i - 1, 0)] + alpha * u[std::min(i, m - 1)];
        }
    }
    return knots;
}

// Basis values N_{i,p}(t) for all i (dense row).
Eigen::RowVectorXd basis_row(const std::vector<double>& knots, int p, int n_controls, double t) {
    // reuse the curve machinery on scalar "controls" is overkill; direct Cox-de Boor
    Eigen::RowVectorXd row = Eigen::RowVectorXd::Zero(n_controls);
    const int n = n_controls - 1;
    int k;
    if (t >= knots[n + 1]) {
        k = n;
    } else {
        auto it = std::upper_bound(knots.begin() + p, knots.begin() + n + 1, t);
        k = static_cast<int>(it - knots.begin()) - 1;
    }
    std::vector<double> N(p + 1, 0.0), left(p + 1), right(p + 1);
    N[0] = 1.0;
    for (int j = 1; j <= p; ++j) {
        left[j] = t - knots[k + 1 - j];
        right[j] = knots[k + j] - t;
        double saved = 0.0;
        for (int r = 0; r < j; ++r) {
            const double denom = right[r + 1] + left[j - r];
            const double temp = denom != 0.0 ? N[r] / denom : 0.0;
            N[r] = saved + right[r + 1] * temp;
            saved = left[j - r] * temp;
        }
        N[j] = saved;
    }
    for (int j = 0; j <= p; ++j) row[k - p + j] = N[j];
    return row;
}

BSplineCurve solve_fit(std::span<const Vec3> samples, const std::vector<double>& u,
                       const std::vector<double>& knots, int p, int n_controls) {
    const int m = static_cast<int>(samples.size());
    std::vector<Vec3> controls(n_controls);
    controls.front() = samples.front();
    controls.back() = samples.back();
    const int free = n_controls - 2;
    if (free > 0) {
        Eigen::MatrixXd A(m - 2, free);
        Eigen::MatrixXd rhs(m - 2, 3);
        for (int i = 1; i < m - 1; ++i) {
            const Eigen::RowVectorXd row = basis_row(knots, p, n_controls, u[i]);
            A.row(i - 1) = row.segment(1, free);
            const Vec3 r = samples[i] - row[0] * samples.front() - row[n_controls - 1] * samples.back();
            rhs.row(i - 1) = r.transpose();
        }
        Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(A);
        qr.setThreshold(1e-12);
        if (qr.rank() < free) {
            throw SingularFitError("bspline_fit: rank-deficient least-squares system");
        }
        const Eigen::MatrixXd x = qr.solve(rhs);
        for (int j = 0; j < free; ++j) controls[j + 1] = x.row(j).transpose();
    }
    return BSplineCurve(p, std::move(controls), knots);
}

}  // namespace

BSplineCurve bspline_fit(std::span<const Vec3> samples, int degree, int n_controls,
                         const FitOptions& options) {
    if (degree < 1) throw DomainError("bspline_fit: degree must be >= 1");
    if (n_controls < degree + 1 || static_cast<int>(samples.size()) < n_controls) {
        throw InsufficientDataError("bspline_fit: need samples >= n_controls >= degree + 1 (got " +
                                    std::to_string(samples.size()) + " samples, " +
                                    std::to_string(n_controls) + " controls, degree " +
                                    std::to_string(degree) + ")");
    }
    for (const auto& s : samples) {
        if (!s.allFinite()) throw DomainError("bspline_fit: non-finite sample");
    }
    std::vector<double> u = chord_parameters(samples);
    const std::vector<double> knots = averaged_knots(u, degree, n_controls);
    BSplineCurve curve = solve_fit(samples, u, knots, degree, n_controls);

    const int m = static_cast<int>(samples.size());
    if (n_controls == m) return curve;  // interpolation, nothing to refine

    for (int pass = 0; pass < options.parameter_corrections; ++pass) {
        double max_shift = 0.0;
        for (int i = 1; i < m - 1; ++i) {
            double t = u[i];
            for (int it = 0; it < 4; ++it) {
                const auto d = curve.derivatives(t, 2);
                const Vec3 r = d[0] - samples[i];
                const double num = r.dot(d[1]);
                const double den = d[1].squaredNorm() + r.dot(d[2]);
                if (!(den > 0.0)) break;
                const double next = std::clamp(t - num / den, 0.0, 1.0);
                if (std::abs(next - t) < 1e-15) { t = next; break; }
                t = next;
            }
            max_shift = std::max(max_shift, std::abs(t - u[i]));
            u[i] = t;
        }
        // keep parameters ordered so the basis rows stay well posed
        for (int i = 1; i < m; ++i) u[i] = std::max(u[i], u[i - 1]);
        curve = solve_fit(samples, u, knots, degree, n_controls);
        if (max_shift < options.correction_tolerance) break;
    }
    return curve;
}

Polyline resample_arclength(const BSplineCurve& curve, int n) {
    const int dense = std::max(1024, 32 * n);
    return resample_arclength(curve.sample(dense), n, false);
}

ArcLengthTable::ArcLengthTable(const BSplineCurve& curve, int samples) : curve_(curve) {
    samples = std::max(samples, 16);
    params_.resize(samples);
    lengths_.resize(samples);
    points_.resize(samples);
    for (int i = 0; i < samples; ++i) {
        params_[i] = static_cast<double>(i) / (samples - 1);
        points_[i] = curve_.eval(params_[i]);
        lengths_[i] = i == 0 ? 0.0 : lengths_[i - 1] + (points_[i] - points_[i - 1]).norm();
    }
}

double ArcLengthTable::length_at(double t) const {
    t = std::clamp(t, 0.0, 1.0);
    const auto it = std::upper_bound(params_.begin(), params_.end(), t);
    if (it == params_.end()) return lengths_.back();
    const std::size_t i = static_cast<std::size_t>(it - params_.begin()) - 1;
    // exact partial chord inside the bracketing sample interval
    return lengths_[i] + (curve_.eval(t) - points_[i]).norm();
}

double ArcLengthTable::param_at(double s) const {
    if (s <= 0.0) return 0.0;
    if (s >= lengths_.back()) return 1.0;
    const auto it = std::upper_bound(lengths_.begin(), lengths_.end(), s);
    const std::size_t i = static_cast<std::size_t>(it - lengths_.begin()) - 1;
    const double seg = lengths_[i + 1] - lengths_[i];
    const double a = seg > 0.0 ? (s - lengths_[i]) / seg : 0.0;
    return params_[i] + a * (params_[i + 1] - params_[i]);
}

double ArcLengthTable::closest_param(const Vec3& p) const {
    std::size_t best = 0;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < points_.size(); ++i) {
        const double d = (points_[i] - p).squaredNorm();
        if (d < best_d) { best_d = d; best = i; }
    }
    const double lo = params_[best == 0 ? 0 : best - 1];
    const double hi = params_[std::min(best + 1, params_.size() - 1)];
    double t = params_[best];
    for (int it = 0; it < 8; ++it) {
        const auto d = curve_.derivatives(t, 2);
        const Vec3 r = d[0] - p;
        const double num = r.dot(d[1]);
        const double den = d[1].squaredNorm() + r.dot(d[2]);
        if (!(den > 0.0)) break;
        const double next = std::clamp(t - num / den, lo, hi);
        if (std::abs(next - t) < 1e-15) break;
        t = next;
    }
    return t;
}

}  // namespace textile
