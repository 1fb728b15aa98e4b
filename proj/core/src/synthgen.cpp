#include "textile/synthgen.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <unordered_map>

#include "textile/error.hpp"

namespace textile {

const char* to_string(Family family) noexcept {
    return family == Family::Warp ? "warp" : "weft";
}

Family family_from_string(const std::string& name) {
    if (name == "warp") return Family::Warp;
    if (name == "weft") return Family::Weft;
    throw DomainError("unknown yarn family '" + name + "'");
}

int sequence_total(const std::vector<int>& sequence, int columns) {
    int total = 0;
    for (int c = 0; c < columns; ++c) total += sequence[c % sequence.size()];
    return total;
}

void WeaveSpec::validate() const {
    if (n_warp_columns < 1 || n_weft_columns < 1) {
        throw DomainError("weave: column counts must be >= 1");
    }
    if (warp_sequence.empty() || weft_sequence.empty()) {
        throw DomainError("weave: yarn sequences must be non-empty");
    }
    for (int c : warp_sequence) if (c < 1) throw DomainError("weave: warp sequence counts must be >= 1");
    for (int c : weft_sequence) if (c < 1) throw DomainError("weave: weft sequence counts must be >= 1");
    if (!(yarn_spacing.array() > 0.0).all()) throw DomainError("weave: spacings must be > 0");
    if (!(ellipse_a > 0.0) || !(ellipse_b > 0.0)) throw DomainError("weave: ellipse axes must be > 0");
    if (!(crimp_amplitude >= 0.0)) throw DomainError("weave: crimp amplitude must be >= 0");
}

int WeaveSpec::warp_count() const { return sequence_total(warp_sequence, n_warp_columns); }
int WeaveSpec::weft_count() const { return sequence_total(weft_sequence, n_weft_columns); }

WeaveSpec acquired_sample_weave() {
    WeaveSpec spec;
    spec.n_warp_columns = 11;
    spec.n_weft_columns = 8;
    spec.warp_sequence = {4, 3};
    spec.weft_sequence = {5, 4};
    return spec;
}

WeaveSpec simulated_cell_weave() {
    WeaveSpec spec = acquired_sample_weave();
    spec.n_warp_columns = 8;
    return spec;
}

void FiberSpec::validate() const {
    if (!(fiber_radius > 0.0)) throw DomainError("fibers: radius must be > 0");
    if (fibers_per_yarn < 1) throw DomainError("fibers: count must be >= 1");
}

FiberSpec FiberSpec::for_target_vf(double section_area, double target, double fiber_radius) {
    if (!(section_area > 0.0) || !(target > 0.0) || !(fiber_radius > 0.0)) {
        throw DomainError("for_target_vf: arguments must be > 0");
    }
    const double fiber_area = std::numbers::pi * fiber_radius * fiber_radius;
    FiberSpec spec;
    spec.fiber_radius = fiber_radius;
    spec.fibers_per_yarn = std::max(1, static_cast<int>(std::lround(target * section_area / fiber_area)));
    return spec;
}

Polyline path_polyline(const BSplineCurve& path, int samples) { return path.sample(samples); }

namespace {

Vec3 family_axis(Family family) {
    return family == Family::Warp ? Vec3::UnitX() : Vec3::UnitY();
}

// In-plane thickness and width directions for a section with normal n.
void section_axes(const Vec3& n, Vec3& thick, Vec3& width) {
    Vec3 v = Vec3::UnitZ() - Vec3::UnitZ().dot(n) * n;
    if (v.norm() < 1e-9) v = Vec3::UnitX() - Vec3::UnitX().dot(n) * n;
    thick = v.normalized();
    width = thick.cross(n);
}

CrossSection make_section(const BSplineCurve& path, const ArcLengthTable& table, Family family,
                          double station, bool is_end, double a, double b) {
    const double t = table.param_at(station);
    const Vec3 center = path.eval(t);
    Vec3 n = is_end ? family_axis(family) : path.tangent(t);
    if (n.dot(family_axis(family)) < 0.0) n = -n;
    Vec3 thick, width;
    section_axes(n, thick, width);
    return ellipse_section(center, n, a, b, width, station);
}

std::vector<CrossSection> make_sections(const BSplineCurve& path, Family family, int count,
                                        double a, double b) {
    const ArcLengthTable table(path);
    std::vector<CrossSection> sections;
    sections.reserve(count);
    for (int k = 0; k < count; ++k) {
        const double s = table.total() * k / (count - 1);
        sections.push_back(make_section(path, table, family, s, k == 0 || k == count - 1, a, b));
    }
    return sections;
}

struct AxisSample {
    Vec3 p;
    int yarn;
};

// Smallest distance between sampled axes of different yarns, via a hash grid.
void check_axis_clearance(const std::vector<YarnModel>& yarns, double clearance) {
    std::vector<AxisSample> samples;
    for (std::size_t y = 0; y < yarns.size(); ++y) {
        const ArcLengthTable table(yarns[y].path);
        const int n = std::max(8, static_cast<int>(std::ceil(table.total() / (0.25 * clearance))));
        for (int k = 0; k <= n; ++k) {
            samples.push_back({yarns[y].path.eval(table.param_at(table.total() * k / n)),
                               static_cast<int>(y)});
        }
    }
    const double cell = clearance;
    auto key = [cell](const Vec3& p, int dx, int dy, int dz) {
        const auto ix = static_cast<std::int64_t>(std::floor(p.x() / cell)) + dx;
        const auto iy = static_cast<std::int64_t>(std::floor(p.y() / cell)) + dy;
        const auto iz = static_cast<std::int64_t>(std::floor(p.z() / cell)) + dz;
        return (ix * 73856093) ^ (iy * 19349663) ^ (iz * 83492791);
    };
    std::unordered_multimap<std::int64_t, std::size_t> grid;
    grid.reserve(samples.size());
    for (std::size_t i = 0; i < samples.size(); ++i) grid.emplace(key(samples[i].p, 0, 0, 0), i);

    for (std::size_t i = 0; i < samples.size(); ++i) {
        for (int dx = -1; dx <= 1; ++dx)
            for (int dy = -1; dy <= 1; ++dy)
                for (int dz = -1; dz <= 1; ++dz) {
                    auto range = grid.equal_range(key(samples[i].p, dx, dy, dz));
                    for (auto it = range.first; it != range.second; ++it) {
                        const auto& other = samples[it->second];
                        if (other.yarn == samples[i].yarn) continue;
                        const double d = (other.p - samples[i].p).norm();
                        if (d < clearance) {
                            std::ostringstream os;
                            os << "yarns " << yarns[samples[i].yarn].id << " and "
                               << yarns[other.yarn].id << " have axes " << d
                               << " apart (< ellipse_b = " << clearance << ")";
                            throw InfeasibleWeaveError(os.str());
                        }
                    }
                }
    }
}

Box section_bounds(const std::vector<YarnModel>& yarns) {
    Box box;
    for (const auto& y : yarns)
        for (const auto& s : y.sections)
            for (const auto& p : s.contour) box.expand(p);
    return box;
}

// The crimp profile only needs to be smooth; a few correction passes do.
const FitOptions kProfileFit{20, 1e-13};

}  // namespace

TextileModel generate_interlock(const WeaveSpec& spec, const FiberSpec& fibers,
                                int n_sections_warp, int n_sections_weft) {
    spec.validate();
    fibers.validate();
    if (n_sections_warp < 2 || n_sections_weft < 2) {
        throw DomainError("generate_interlock: need at least 2 sections per yarn");
    }
    const double sx = spec.yarn_spacing.x();
    const double sy = spec.yarn_spacing.y();
    const double pz = spec.yarn_spacing.z();
    const double length_x = spec.n_weft_columns * sx;
    const double length_y = spec.n_warp_columns * sy;
    const double amp = spec.crimp_amplitude;

    struct WarpLayout { int column; double base; double sign; };
    struct WeftLayout { int column; double level; };
    std::vector<WarpLayout> warp;
    std::vector<WeftLayout> weft;
    for (int j = 0; j < spec.n_warp_columns; ++j) {
        const int c = spec.warp_sequence[j % spec.warp_sequence.size()];
        const double sign = (j % 2 == 0) ? 1.0 : -1.0;
        for (int k = 0; k < c; ++k) {
            const int q = k - (c - 1) / 2;
            warp.push_back({j, (q + 0.25 * sign) * pz, sign});
        }
    }
    for (int i = 0; i < spec.n_weft_columns; ++i) {
        const int d = spec.weft_sequence[i % spec.weft_sequence.size()];
        for (int k = 0; k < d; ++k) {
            const double offset = (i % 2 == 0) ? k - (d - 1) / 2 : k - d / 2 + 0.5;
            weft.push_back({i, offset * pz});
        }
    }

    auto warp_z = [&](const WarpLayout& w, double x) {
        return w.base + w.sign * amp * std::cos(std::numbers::pi * (x - 0.5 * sx) / sx);
    };

    // z placement: shift so the lowest yarn surface sits one margin above 0
    double zlo = std::numeric_limits<double>::infinity();
    double zhi = -zlo;
    for (const auto& w : weft) { zlo = std::min(zlo, w.level); zhi = std::max(zhi, w.level); }
    for (const auto& w : warp) {
        zlo = std::min(zlo, w.base - amp);
        zhi = std::max(zhi, w.base + amp);
    }
    const double margin = spec.ellipse_b;
    const double shift = -zlo + spec.ellipse_b + margin;
    const double thickness = (zhi - zlo) + 2.0 * (spec.ellipse_b + margin);

    const int dense = std::max(200, 64 * spec.n_weft_columns);
    const int warp_controls = 8 * spec.n_weft_columns + 4;

    TextileModel model;
    model.weave = spec;
    model.fibers = fibers;
    model.thickness = thickness;
    int next_id = 1;
    for (const auto& w : warp) {
        Polyline samples;
        samples.reserve(dense);
        const double y = (w.column + 0.5) * sy;
        for (int s = 0; s < dense; ++s) {
            const double x = length_x * s / (dense - 1);
            samples.emplace_back(x, y, warp_z(w, x) + shift);
        }
        YarnModel yarn;
        yarn.id = next_id++;
        yarn.family = Family::Warp;
        yarn.path = amp > 0.0 ? bspline_fit(samples, 3, warp_controls, kProfileFit)
                              : BSplineCurve::clamped_uniform(
                                    3, {samples.front(), samples.front() + (samples.back() - samples.front()) / 3.0,
                                        samples.front() + 2.0 * (samples.back() - samples.front()) / 3.0,
                                        samples.back()});
        yarn.sections = make_sections(yarn.path, Family::Warp, n_sections_warp, spec.ellipse_a,
                                      spec.ellipse_b);
        model.yarns.push_back(std::move(yarn));
    }
    for (const auto& w : weft) {
        const double x = (w.column + 0.5) * sx;
        const Vec3 p0(x, 0.0, w.level + shift);
        const Vec3 p1(x, length_y, w.level + shift);
        YarnModel yarn;
        yarn.id = next_id++;
        yarn.family = Family::Weft;
        yarn.path = BSplineCurve::clamped_uniform(
            3, {p0, p0 + (p1 - p0) / 3.0, p0 + 2.0 * (p1 - p0) / 3.0, p1});
        yarn.sections = make_sections(yarn.path, Family::Weft, n_sections_weft, spec.ellipse_a,
                                      spec.ellipse_b);
        model.yarns.push_back(std::move(yarn));
    }

    check_axis_clearance(model.yarns, spec.ellipse_b);

    model.bbox = Box::from_corners(Vec3(0.0, 0.0, 0.0), Vec3(length_x, length_y, thickness));
    model.bbox.expand(section_bounds(model.yarns));
    return model;
}

namespace {

// Rebuilds a section around a new center and normal, scaling its in-plane
// thickness component by `squash` and its width component by 1 / squash.
CrossSection reframe_section(const CrossSection& old, const Vec3& old_normal, const Vec3& center,
                             const Vec3& normal, double squash, double station) {
    Vec3 t0, w0, t1, w1;
    section_axes(old_normal, t0, w0);
    section_axes(normal, t1, w1);
    CrossSection out;
    out.center = center;
    out.station = station;
    for (int i = 0; i < kContourPoints; ++i) {
        const Vec3 d = old.contour[i] - old.center;
        out.contour[i] = center + (d.dot(t0) * squash) * t1 + (d.dot(w0) / squash) * w1 +
                         d.dot(old_normal) * normal;
    }
    return out;
}

Vec3 oriented_normal(const CrossSection& s, const Vec3& along) {
    Vec3 n = section_normal(s);
    if (n.dot(along) < 0.0) n = -n;
    return n;
}

}  // namespace

std::vector<TextileModel> compaction_sequence(const TextileModel& model, double h_final,
                                              int n_steps) {
    const double h_init = model.thickness;
    if (!(h_final > 0.0) || h_final > h_init) {
        throw DomainError("compaction_sequence: need 0 < H_final <= H_init");
    }
    if (n_steps < 1) throw DomainError("compaction_sequence: n_steps must be >= 1");

    const double increment = (h_init - h_final) / n_steps;
    const double zmid = 0.5 * (model.bbox.min.z() + model.bbox.max.z());

    std::vector<TextileModel> steps;
    steps.reserve(n_steps);
    for (int k = 1; k <= n_steps; ++k) {
        const double h = (k == n_steps) ? h_final : h_init - k * increment;
        if (h == h_init) {
            steps.push_back(model);
            continue;
        }
        const double f = h / h_init;
        auto squeeze = [zmid, f](const Vec3& p) { return Vec3(p.x(), p.y(), zmid + f * (p.z() - zmid)); };

        TextileModel out = model;
        out.thickness = h;
        for (auto& yarn : out.yarns) {
            const YarnModel& src = *std::find_if(model.yarns.begin(), model.yarns.end(),
                                                 [&](const YarnModel& y) { return y.id == yarn.id; });
            const ArcLengthTable old_table(src.path);
            yarn.path = src.path.map_controls(squeeze);
            const ArcLengthTable new_table(yarn.path);
            const Vec3 axis = family_axis(src.family);
            const std::size_t count = src.sections.size();
            for (std::size_t s = 0; s < count; ++s) {
                const CrossSection& old = src.sections[s];
                const double t = old_table.closest_param(old.center);
                const bool is_end = (s == 0 || s + 1 == count);
                Vec3 tangent = yarn.path.tangent(t);
                if (tangent.dot(axis) < 0.0) tangent = -tangent;
                const Vec3 old_normal = oriented_normal(old, axis);
                const Vec3 new_normal = is_end ? old_normal : tangent;
                yarn.sections[s] = reframe_section(old, old_normal, squeeze(old.center), new_normal,
                                                   f, new_table.length_at(t));
            }
        }
        Box box = Box::from_corners(Vec3(model.bbox.min.x(), model.bbox.min.y(), zmid - 0.5 * h),
                                    Vec3(model.bbox.max.x(), model.bbox.max.y(), zmid + 0.5 * h));
        box.expand(section_bounds(out.yarns));
        out.bbox = box;
        steps.push_back(std::move(out));
    }
    return steps;
}

TextileModel perturb_model(const TextileModel& model, double jitter_sigma, std::uint64_t seed) {
    if (!(jitter_sigma >= 0.0)) throw DomainError("perturb_model: sigma must be >= 0");
    if (jitter_sigma == 0.0) return model;

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> noise(0.0, jitter_sigma);
    auto draw = [&] { return Vec3(noise(rng), noise(rng), noise(rng)); };

    const SectionTolerances tol;
    TextileModel out = model;
    for (auto& yarn : out.yarns) {
        Polyline centers;
        for (auto& section : yarn.sections) {
            const Vec3 shift = draw();
            Contour jittered;
            for (int i = 0; i < kContourPoints; ++i) jittered[i] = section.contour[i] + draw();
            const Vec3 drift = contour_centroid(jittered) - section.center;
            for (auto& p : jittered) p += shift - drift;  // centroid lands on the shifted center

            const Plane plane = fit_plane(jittered);
            if (plane.max_residual > tol.plane) {
                for (auto& p : jittered) p -= (p - plane.origin).dot(plane.normal) * plane.normal;
            }
            section.contour = jittered;
            section.center = contour_centroid(jittered);
            centers.push_back(section.center);
        }
        const int count = static_cast<int>(centers.size());
        yarn.path = bspline_fit(centers, std::min(3, count - 1), count);
        const ArcLengthTable table(yarn.path);
        for (auto& section : yarn.sections) {
            section.station = table.length_at(table.closest_param(section.center));
        }
    }
    out.bbox.expand(section_bounds(out.yarns));
    return out;
}

double mean_section_area(const TextileModel& model) {
    double total = 0.0;
    std::size_t count = 0;
    for (const auto& y : model.yarns) {
        for (const auto& s : y.sections) {
            total += section_area(s);
            ++count;
        }
    }
    if (count == 0) throw EmptyModelError("mean_section_area: model has no sections");
    return total / static_cast<double>(count);
}

void TextileModel::validate(const SectionTolerances& tol, double path_tolerance) const {
    weave.validate();
    fibers.validate();
    std::vector<int> ids;
    ids.reserve(yarns.size());
    for (const auto& y : yarns) ids.push_back(y.id);
    std::sort(ids.begin(), ids.end());
    for (std::size_t i = 0; i < ids.size(); ++i) {
        if (ids[i] != static_cast<int>(i) + 1) {
            throw DomainError("model: yarn ids must be 1..n without gaps or duplicates");
        }
    }
    for (const auto& y : yarns) {
        if (y.sections.size() < 2) {
            throw DomainError("model: yarn " + std::to_string(y.id) + " has fewer than 2 sections");
        }
        const ArcLengthTable table(y.path);
        for (std::size_t s = 0; s < y.sections.size(); ++s) {
            const auto& sec = y.sections[s];
            if (s > 0 && !(sec.station > y.sections[s - 1].station)) {
                throw DomainError("model: yarn " + std::to_string(y.id) +
                                  " has non-increasing stations");
            }
            validate_section(sec, tol);
            const double off = (y.path.eval(table.closest_param(sec.center)) - sec.center).norm();
            if (off > path_tolerance) {
                std::ostringstream os;
                os << "model: yarn " << y.id << " section " << s << " center is " << off
                   << " from its path";
                throw DomainError(os.str());
            }
            for (const auto& p : sec.contour) {
                if (!bbox.contains(p, 1e-9)) {
                    throw DomainError("model: yarn " + std::to_string(y.id) +
                                      " has keypoints outside the bounding box");
                }
            }
        }
    }
}

}  // namespace textile
