#include "textile/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <Eigen/Eigenvalues>

#include "textile/error.hpp"

namespace textile {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::Domain: return "domain";
        case ErrorKind::InsufficientData: return "insufficient-data";
        case ErrorKind::SingularFit: return "singular-fit";
        case ErrorKind::DegenerateGeometry: return "degenerate-geometry";
        case ErrorKind::InvalidContour: return "invalid-contour";
        case ErrorKind::InfeasibleWeave: return "infeasible-weave";
        case ErrorKind::EmptyModel: return "empty-model";
        case ErrorKind::BudgetExceeded: return "budget-exceeded";
        case ErrorKind::SelfIntersection: return "self-intersection";
        case ErrorKind::Parse: return "parse";
        case ErrorKind::Io: return "io";
        case ErrorKind::Config: return "config";
    }
    return "unknown";
}

bool is_finite(const Vec3& p) { return p.allFinite(); }

PlaneFrame reference_frame(const Vec3& normal) {
    const double len = normal.norm();
    if (!(len > 0.0) || !std::isfinite(len)) {
        throw DomainError("reference_frame: zero or non-finite normal");
    }
    const Vec3 n = normal / len;
    int best = 0;
    double best_dot = std::abs(n[0]);
    for (int i = 1; i < 3; ++i) {
        // strict comparison keeps the lowest index on ties
        if (std::abs(n[i]) < best_dot - 1e-12) {
            best = i;
            best_dot = std::abs(n[i]);
        }
    }
    Vec3 axis = Vec3::Zero();
    axis[best] = 1.0;
    const Vec3 e1 = (axis - axis.dot(n) * n).normalized();
    const Vec3 e2 = n.cross(e1);
    return {e1, e2, n};
}

Vec3 newell_normal(std::span<const Vec3> ring) {
    Vec3 n = Vec3::Zero();
    const std::size_t m = ring.size();
    for (std::size_t i = 0; i < m; ++i) {
        n += ring[i].cross(ring[(i + 1) % m]);
    }
    return n;
}

Plane fit_plane(std::span<const Vec3> points) {
    if (points.size() < 3) {
        throw DegenerateGeometryError("fit_plane: fewer than 3 points");
    }
    Vec3 c = Vec3::Zero();
    for (const auto& p : points) c += p;
    c /= static_cast<double>(points.size());

    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    for (const auto& p : points) {
        const Vec3 d = p - c;
        cov += d * d.transpose();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(cov);
    Vec3 n = solver.eigenvectors().col(0);

    Vec3 newell = Vec3::Zero();
    const std::size_t m = points.size();
    for (std::size_t i = 0; i < m; ++i) {
        newell += (points[i] - c).cross(points[(i + 1) % m] - c);
    }
    if (newell.dot(n) < 0.0) n = -n;

    double residual = 0.0;
    for (const auto& p : points) residual = std::max(residual, std::abs((p - c).dot(n)));
    return {c, n, residual};
}

double polyline_length(std::span<const Vec3> pts, bool closed) {
    double total = 0.0;
    for (std::size_t i = 1; i < pts.size(); ++i) total += (pts[i] - pts[i - 1]).norm();
    if (closed && pts.size() > 1) total += (pts.front() - pts.back()).norm();
    return total;
}

Polyline dedupe(std::span<const Vec3> pts, bool closed, double eps) {
    Polyline out;
    out.reserve(pts.size());
    for (const auto& p : pts) {
        if (out.empty() || (p - out.back()).norm() > eps) out.push_back(p);
    }
    if (closed) {
        while (out.size() > 1 && (out.front() - out.back()).norm() <= eps) out.pop_back();
    }
    return out;
}

namespace {

// Walks a polyline (given as vertices, closed loops pass the seam vertex
// twice) taking steps of fixed chord length.
class ChordWalker {
public:
    explicit ChordWalker(const Polyline& path) : path_(path) {
        arc_.resize(path_.size(), 0.0);
        for (std::size_t i = 1; i < path_.size(); ++i) {
            arc_[i] = arc_[i - 1] + (path_[i] - path_[i - 1]).norm();
        }
    }

    double total() const { return arc_.back(); }

    // Next point ahead of (seg, t) at Euclidean distance d from `from`.
    // Returns false if the walk runs off the end.
    bool step(const Vec3& from, std::size_t& seg, double& t, double d, Vec3& out) const {
        const double d2 = d * d;
        for (std::size_t s = seg; s + 1 < path_.size(); ++s) {
            const Vec3& a = path_[s];
            const Vec3 ab = path_[s + 1] - a;
            const double len2 = ab.squaredNorm();
            if (len2 == 0.0) continue;
            const double t0 = (s == seg) ? t : 0.0;
            const Vec3 end = path_[s + 1];
            if ((end - from).squaredNorm() < d2) continue;
            // |a + u ab - from|^2 = d^2, take the exit root >= t0
            const Vec3 af = a - from;
            const double A = len2;
            const double B = 2.0 * af.dot(ab);
            const double C = af.squaredNorm() - d2;
            const double disc = std::max(0.0, B * B - 4.0 * A * C);
            double u = (-B + std::sqrt(disc)) / (2.0 * A);
            u = std::clamp(u, t0, 1.0);
            seg = s;
            t = u;
            out = a + u * ab;
            return true;
        }
        return false;
    }

    double arc_position(std::size_t seg, double t) const {
        if (seg + 1 >= path_.size()) return total();
        return arc_[seg] + t * (arc_[seg + 1] - arc_[seg]);
    }

private:
    const Polyline& path_;
    std::vector<double> arc_;
};

}  // namespace

Polyline resample_arclength(std::span<const Vec3> pts, int n, bool closed) {
    if (n < 2) throw DomainError("resample_arclength: n must be >= 2");
    Polyline clean = dedupe(pts, closed);
    if (clean.size() < 2 || polyline_length(clean, closed) <= 0.0) {
        throw DegenerateGeometryError("resample_arclength: zero-length input");
    }
    if (closed) clean.push_back(clean.front());
    const ChordWalker walker(clean);
    const double total = walker.total();

    const int steps = closed ? n : n - 1;
    auto walk = [&](double d, Polyline* out) -> double {
        // Returns the signed mismatch: for open paths, arc position reached
        // minus total; for closed, d minus the closing chord. Running off the
        // end counts as overshoot.
        std::size_t seg = 0;
        double t = 0.0;
        Vec3 cur = clean.front();
        if (out) out->push_back(cur);
        const int count = closed ? n - 1 : n - 1;
        for (int k = 0; k < count; ++k) {
            Vec3 next;
            if (!walker.step(cur, seg, t, d, next)) return 1.0 + total;
            cur = next;
            if (out) out->push_back(cur);
        }
        if (closed) {
            if (walker.arc_position(seg, t) >= total) return 1.0 + total;
            return d - (clean.front() - cur).norm();
        }
        return walker.arc_position(seg, t) - total;
    };

    double lo = 0.0;
    double hi = total / steps;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * total; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (walk(mid, nullptr) < 0.0) lo = mid; else hi = mid;
    }
    Polyline out;
    out.reserve(n);
    // lo never overshoots, so every step of this walk succeeds
    walk(lo, &out);
    if (static_cast<int>(out.size()) != n) {
        throw DegenerateGeometryError("resample_arclength: chord walk failed to converge");
    }
    if (!closed) out.back() = clean.back();
    return out;
}

namespace {

// Index of the canonical start along a dense closed ring: the midpoint of
// the run of vertices attaining the maximum e1 coordinate. Returns the ring
// rotated so the start point (inserted if needed) is first, ordered CCW.
Polyline rotate_to_canonical(Polyline ring, const PlaneFrame& frame, bool insert_midpoint) {
    const std::size_t m = ring.size();
    Vec3 c = Vec3::Zero();
    for (const auto& p : ring) c += p;
    c /= static_cast<double>(m);

    // orientation: Newell normal against the requested normal
    if (newell_normal(ring).dot(frame.n) < 0.0) std::reverse(ring.begin(), ring.end());

    double best = -std::numeric_limits<double>::infinity();
    for (const auto& p : ring) best = std::max(best, (p - c).dot(frame.e1));
    const double scale = std::max(1.0, std::abs(best));
    const double eps = 1e-9 * scale;

    std::vector<char> at_max(m);
    for (std::size_t i = 0; i < m; ++i) at_max[i] = (ring[i] - c).dot(frame.e1) >= best - eps;

    // first vertex of a maximal run (cyclically)
    std::size_t run_start = 0;
    for (std::size_t i = 0; i < m; ++i) {
        if (at_max[i] && !at_max[(i + m - 1) % m]) { run_start = i; break; }
        if (i == m - 1) run_start = 0;  // whole ring at max, degenerate
    }
    std::size_t run_len = 1;
    while (run_len < m && at_max[(run_start + run_len) % m]) ++run_len;

    Polyline rotated;
    rotated.reserve(m + 1);
    if (run_len == 1 || !insert_midpoint) {
        std::size_t start = run_start;
        if (!insert_midpoint && run_len > 1) {
            // pick the vertex nearest to the run's arc midpoint
            double half = 0.0;
            for (std::size_t k = 0; k + 1 < run_len; ++k) {
                half += (ring[(run_start + k + 1) % m] - ring[(run_start + k) % m]).norm();
            }
            half *= 0.5;
            double acc = 0.0;
            std::size_t k = 0;
            while (k + 1 < run_len) {
                const double seg = (ring[(run_start + k + 1) % m] - ring[(run_start + k) % m]).norm();
                if (acc + 0.5 * seg > half) break;
                acc += seg;
                ++k;
            }
            start = (run_start + k) % m;
        }
        for (std::size_t k = 0; k < m; ++k) rotated.push_back(ring[(start + k) % m]);
        return rotated;
    }

    // insert the arc-length midpoint of the run as a new first vertex
    double run_arc = 0.0;
    for (std::size_t k = 0; k + 1 < run_len; ++k) {
        run_arc += (ring[(run_start + k + 1) % m] - ring[(run_start + k) % m]).norm();
    }
    const double half = 0.5 * run_arc;
    double acc = 0.0;
    std::size_t k = 0;
    Vec3 mid = ring[run_start];
    for (; k + 1 < run_len; ++k) {
        const Vec3& a = ring[(run_start + k) % m];
        const Vec3& b = ring[(run_start + k + 1) % m];
        const double seg = (b - a).norm();
        if (acc + seg >= half) {
            const double u = seg > 0.0 ? (half - acc) / seg : 0.0;
            mid = a + u * (b - a);
            break;
        }
        acc += seg;
    }
    rotated.push_back(mid);
    for (std::size_t j = 1; j <= m; ++j) {
        const Vec3& p = ring[(run_start + k + j) % m];
        if ((p - rotated.back()).norm() > 0.0 && (p - mid).norm() > 0.0) rotated.push_back(p);
    }
    return rotated;
}

}  // namespace

Polyline canonical_closed_resample(std::span<const Vec3> closed_pts, const Vec3& normal, int n) {
    Polyline ring = dedupe(closed_pts, true);
    if (ring.size() < 3 || polyline_length(ring, true) <= 0.0) {
        throw DegenerateGeometryError("canonical_closed_resample: degenerate contour");
    }
    const PlaneFrame frame = reference_frame(normal);
    Polyline rotated = rotate_to_canonical(std::move(ring), frame, true);
    return resample_arclength(rotated, n, true);
}

Polyline recanonicalize(std::span<const Vec3> ring, const Vec3& normal) {
    if (ring.size() < 3) throw DegenerateGeometryError("recanonicalize: fewer than 3 points");
    return rotate_to_canonical(Polyline(ring.begin(), ring.end()), reference_frame(normal), false);
}

double signed_area(std::span<const Vec2> ring) {
    double a = 0.0;
    const std::size_t m = ring.size();
    for (std::size_t i = 0; i < m; ++i) {
        const Vec2& p = ring[i];
        const Vec2& q = ring[(i + 1) % m];
        a += p.x() * q.y() - q.x() * p.y();
    }
    return 0.5 * a;
}

namespace {

double orient(const Vec2& a, const Vec2& b, const Vec2& c) {
    return (b.x() - a.x()) * (c.y() - a.y()) - (b.y() - a.y()) * (c.x() - a.x());
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
    return std::min(a.x(), b.x()) <= p.x() && p.x() <= std::max(a.x(), b.x()) &&
           std::min(a.y(), b.y()) <= p.y() && p.y() <= std::max(a.y(), b.y());
}

bool segments_intersect(const Vec2& p1, const Vec2& p2, const Vec2& q1, const Vec2& q2) {
    const double d1 = orient(q1, q2, p1);
    const double d2 = orient(q1, q2, p2);
    const double d3 = orient(p1, p2, q1);
    const double d4 = orient(p1, p2, q2);
    if (((d1 > 0 && d2 < 0) || (d1 < 0 && d2 > 0)) &&
        ((d3 > 0 && d4 < 0) || (d3 < 0 && d4 > 0))) {
        return true;
    }
    if (d1 == 0 && on_segment(q1, q2, p1)) return true;
    if (d2 == 0 && on_segment(q1, q2, p2)) return true;
    if (d3 == 0 && on_segment(p1, p2, q1)) return true;
    if (d4 == 0 && on_segment(p1, p2, q2)) return true;
    return false;
}

}  // namespace

bool is_simple_polygon(std::span<const Vec2> ring) {
    const std::size_t m = ring.size();
    if (m < 3) return false;
    for (std::size_t i = 0; i < m; ++i) {
        if ((ring[i] - ring[(i + 1) % m]).norm() == 0.0) return false;
    }
    for (std::size_t i = 0; i < m; ++i) {
        const Vec2& a = ring[i];
        const Vec2& b = ring[(i + 1) % m];
        for (std::size_t j = i + 1; j < m; ++j) {
            // adjacent edges share a vertex
            if (j == i + 1 || (i == 0 && j == m - 1)) continue;
            if (segments_intersect(a, b, ring[j], ring[(j + 1) % m])) return false;
        }
    }
    return true;
}

bool point_in_polygon(const Vec2& p, std::span<const Vec2> ring) {
    bool inside = false;
    const std::size_t m = ring.size();
    for (std::size_t i = 0, j = m - 1; i < m; j = i++) {
        const Vec2& a = ring[i];
        const Vec2& b = ring[j];
        if ((a.y() > p.y()) != (b.y() > p.y())) {
            const double x = (b.x() - a.x()) * (p.y() - a.y()) / (b.y() - a.y()) + a.x();
            if (p.x() < x) inside = !inside;
        }
    }
    return inside;
}

Polyline densify_closed(std::span<const Vec3> ring, int factor) {
    const std::size_t m = ring.size();
    if (factor <= 1 || m < 3) return Polyline(ring.begin(), ring.end());
    Polyline out;
    out.reserve(m * factor);
    for (std::size_t i = 0; i < m; ++i) {
        const Vec3& p0 = ring[(i + m - 1) % m];
        const Vec3& p1 = ring[i];
        const Vec3& p2 = ring[(i + 1) % m];
        const Vec3& p3 = ring[(i + 2) % m];
        for (int k = 0; k < factor; ++k) {
            const double t = static_cast<double>(k) / factor;
            const double t2 = t * t;
            const double t3 = t2 * t;
            out.push_back(0.5 * ((2.0 * p1) + (-p0 + p2) * t +
                                 (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t2 +
                                 (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t3));
        }
    }
    return out;
}

}  // namespace textile
