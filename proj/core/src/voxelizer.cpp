#include "textile/voxelizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "textile/error.hpp"
#include "textile/parallel.hpp"

namespace textile {

namespace {

struct Segment {
    int tube = 0;
    Polyline ring0;
    Polyline ring1;
    Vec3 c0, c1, n0, n1;
    double reach = 0.0;  // max keypoint distance from the interpolated center
    bool last = false;
    std::array<std::int64_t, 3> lo{}, hi{};  // inclusive voxel index range
};

Vec3 oriented_plane_normal(const CrossSection& s, const Vec3& forward) {
    Vec3 n = fit_plane(s.contour).normal;
    if (n.dot(forward) < 0.0) n = -n;
    return n;
}

std::vector<Segment> build_segments(const GridGeometry& grid, std::span<const LoftTube> tubes,
                                    int densify) {
    std::vector<Segment> segments;
    for (std::size_t t = 0; t < tubes.size(); ++t) {
        const auto& sections = tubes[t].sections;
        if (sections.size() < 2) continue;
        for (std::size_t s = 0; s + 1 < sections.size(); ++s) {
            Segment seg;
            seg.tube = static_cast<int>(t);
            seg.c0 = sections[s].center;
            seg.c1 = sections[s + 1].center;
            Vec3 forward = seg.c1 - seg.c0;
            if (forward.norm() == 0.0) continue;
            seg.n0 = oriented_plane_normal(sections[s], forward);
            seg.n1 = oriented_plane_normal(sections[s + 1], forward);
            seg.ring0 = densify_closed(sections[s].contour, densify);
            seg.ring1 = densify_closed(sections[s + 1].contour, densify);
            seg.last = (s + 2 == sections.size());
            Box box;
            for (const auto& p : seg.ring0) {
                box.expand(p);
                seg.reach = std::max(seg.reach, (p - seg.c0).norm());
            }
            for (const auto& p : seg.ring1) {
                box.expand(p);
                seg.reach = std::max(seg.reach, (p - seg.c1).norm());
            }
            for (int a = 0; a < 3; ++a) {
                const double lo = (box.min[a] - grid.origin[a]) / grid.spacing - 0.5;
                const double hi = (box.max[a] - grid.origin[a]) / grid.spacing - 0.5;
                seg.lo[a] = std::max<std::int64_t>(0, static_cast<std::int64_t>(std::ceil(lo)));
                seg.hi[a] = std::min<std::int64_t>(grid.dims[a] - 1,
                                                   static_cast<std::int64_t>(std::floor(hi)));
            }
            if (seg.lo[0] > seg.hi[0] || seg.lo[1] > seg.hi[1] || seg.lo[2] > seg.hi[2]) continue;
            segments.push_back(std::move(seg));
        }
    }
    return segments;
}

bool inside_segment(const Segment& seg, const Vec3& p, std::vector<Vec2>& scratch) {
    const double d0 = seg.n0.dot(p - seg.c0);
    const double d1 = seg.n1.dot(p - seg.c1);
    if (d0 < 0.0) return false;
    if (seg.last ? d1 > 0.0 : d1 >= 0.0) return false;
    const double denom = d0 - d1;
    const double lambda = denom > 0.0 ? d0 / denom : 0.0;
    const Vec3 center = (1.0 - lambda) * seg.c0 + lambda * seg.c1;
    if ((p - center).norm() > seg.reach + 1e-9) return false;
    Vec3 n = (1.0 - lambda) * seg.n0 + lambda * seg.n1;
    if (n.norm() == 0.0) return false;
    const PlaneFrame frame = reference_frame(n);
    const std::size_t m = seg.ring0.size();
    scratch.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        const Vec3 q = (1.0 - lambda) * seg.ring0[i] + lambda * seg.ring1[i];
        scratch[i] = frame.project(q, center);
    }
    return point_in_polygon(frame.project(p, center), scratch);
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
    const Vec3 ab = b - a;
    const double len2 = ab.squaredNorm();
    const double t = len2 > 0.0 ? std::clamp((p - a).dot(ab) / len2, 0.0, 1.0) : 0.0;
    return (a + t * ab - p).norm();
}

double overlap_distance(const LoftTube& tube, const Vec3& p, OverlapRule rule) {
    double best = std::numeric_limits<double>::infinity();
    if (rule == OverlapRule::NearestPath && tube.axis.size() >= 2) {
        for (std::size_t i = 0; i + 1 < tube.axis.size(); ++i) {
            best = std::min(best, point_segment_distance(p, tube.axis[i], tube.axis[i + 1]));
        }
        return best;
    }
    for (const auto& s : tube.sections) best = std::min(best, (s.center - p).norm());
    return best;
}

}  // namespace

std::vector<std::uint16_t> rasterize_tubes(const GridGeometry& grid, std::span<const LoftTube> tubes,
                                           const RasterOptions& options) {
    if (grid.count() > options.voxel_budget) {
        std::ostringstream os;
        os << "volume of " << grid.dims[0] << "x" << grid.dims[1] << "x" << grid.dims[2] << " = "
           << grid.count() << " voxels exceeds the budget of " << options.voxel_budget;
        throw BudgetExceededError(os.str());
    }
    for (const auto& t : tubes) {
        if (t.label <= 0 || t.label > 65535) throw DomainError("rasterize_tubes: label out of range");
    }
    const std::vector<Segment> segments = build_segments(grid, tubes, options.ring_densify);

    std::vector<std::uint16_t> labels(static_cast<std::size_t>(grid.count()), 0);
    // per-voxel candidate sets for voxels claimed by more than one tube
    std::vector<std::map<std::size_t, std::vector<std::uint16_t>>> conflicts;
    const std::int64_t nz = grid.dims[2];
    const std::int64_t workers = std::min<std::int64_t>(
        nz, std::max(1u, std::thread::hardware_concurrency()));
    conflicts.resize(static_cast<std::size_t>(workers));

    parallel_chunks(0, workers, [&](std::int64_t wlo, std::int64_t whi) {
        for (std::int64_t w = wlo; w < whi; ++w) {
            const std::int64_t zlo = nz * w / workers;
            const std::int64_t zhi = nz * (w + 1) / workers;
            auto& local_conflicts = conflicts[static_cast<std::size_t>(w)];
            std::vector<Vec2> scratch;
            for (const auto& seg : segments) {
                const std::int64_t k0 = std::max(seg.lo[2], zlo);
                const std::int64_t k1 = std::min(seg.hi[2], zhi - 1);
                const auto label = static_cast<std::uint16_t>(tubes[seg.tube].label);
                for (std::int64_t k = k0; k <= k1; ++k)
                    for (std::int64_t j = seg.lo[1]; j <= seg.hi[1]; ++j)
                        for (std::int64_t i = seg.lo[0]; i <= seg.hi[0]; ++i) {
                            const Vec3 p = grid.voxel_center(i, j, k);
                            if (!inside_segment(seg, p, scratch)) continue;
                            const std::size_t idx = grid.index(i, j, k);
                            std::uint16_t& slot = labels[idx];
                            if (slot == 0) {
                                slot = label;
                            } else if (slot != label) {
                                auto& cands = local_conflicts[idx];
                                if (cands.empty()) cands.push_back(slot);
                                if (std::find(cands.begin(), cands.end(), label) == cands.end()) {
                                    cands.push_back(label);
                                }
                            }
                        }
            }
        }
    });

    std::map<int, std::size_t> tube_of_label;
    for (std::size_t t = 0; t < tubes.size(); ++t) tube_of_label[tubes[t].label] = t;
    for (const auto& local : conflicts) {
        for (const auto& [idx, cands] : local) {
            const auto i = static_cast<std::int64_t>(idx % grid.dims[0]);
            const auto j = static_cast<std::int64_t>((idx / grid.dims[0]) % grid.dims[1]);
            const auto k = static_cast<std::int64_t>(idx / (grid.dims[0] * grid.dims[1]));
            const Vec3 p = grid.voxel_center(i, j, k);
            std::uint16_t best = 0;
            double best_d = std::numeric_limits<double>::infinity();
            for (auto label : cands) {
                const double d = overlap_distance(tubes[tube_of_label.at(label)], p, options.overlap);
                if (d < best_d || (d == best_d && label < best)) {
                    best_d = d;
                    best = label;
                }
            }
            labels[idx] = best;
        }
    }
    return labels;
}

GridGeometry voxel_grid(const TextileModel& model, double voxel_size_um) {
    return grid_for_box(model.bbox, voxel_size_um, model.unit_um);
}

LabelMap label_map_of(const TextileModel& model) {
    LabelMap map;
    for (const auto& y : model.yarns) map.emplace(y.id, y.family);
    return map;
}

LabelVolume voxelize(const TextileModel& model, double voxel_size_um, const RasterOptions& options) {
    if (model.yarns.empty()) throw EmptyModelError("voxelize: model has no yarns");
    if (!(voxel_size_um > 0.0)) throw DomainError("voxelize: voxel size must be > 0");
    LabelVolume volume;
    volume.grid = voxel_grid(model, voxel_size_um);
    volume.label_map = label_map_of(model);

    std::vector<LoftTube> tubes;
    tubes.reserve(model.yarns.size());
    for (const auto& y : model.yarns) tubes.push_back({y.id, y.sections, {}});
    volume.voxels = rasterize_tubes(volume.grid, tubes, options);
    return volume;
}

}  // namespace textile
