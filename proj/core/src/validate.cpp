#include "textile/validate.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <tuple>

#include "textile/error.hpp"
#include "textile/parallel.hpp"

namespace textile {

namespace {

double directed(const Polyline& a, const Polyline& b) {
    double worst = 0.0;
    for (const auto& p : a) {
        double best = std::numeric_limits<double>::infinity();
        for (const auto& q : b) best = std::min(best, (p - q).squaredNorm());
        worst = std::max(worst, best);
    }
    return std::sqrt(worst);
}

}  // namespace

HausdorffResult hausdorff(std::span<const Vec3> a, std::span<const Vec3> b, int resample_n) {
    if (resample_n < 2) throw DomainError("hausdorff: resample_n must be >= 2");
    if (a.size() < 2 || b.size() < 2 || polyline_length(a) <= 0.0 || polyline_length(b) <= 0.0) {
        throw DegenerateGeometryError("hausdorff: degenerate polyline");
    }
    const Polyline ra = resample_arclength(a, resample_n);
    const Polyline rb = resample_arclength(b, resample_n);
    HausdorffResult r;
    r.a_to_b = directed(ra, rb);
    r.b_to_a = directed(rb, ra);
    r.symmetric = std::max(r.a_to_b, r.b_to_a);
    return r;
}

double PathReport::max_symmetric() const {
    double m = 0.0;
    for (const auto& p : pairs) m = std::max(m, p.voxels.symmetric);
    return m;
}

PathReport match_and_assess_paths(const TextileModel& gt, std::span<const ReconstructedYarn> rec,
                                  double voxel_size_um, const PathOptions& options) {
    if (gt.yarns.empty() || rec.empty()) {
        throw InsufficientDataError("match_and_assess_paths: empty yarn list");
    }
    if (!(voxel_size_um > 0.0)) throw DomainError("match_and_assess_paths: voxel size must be > 0");
    const double to_voxels = gt.unit_um / voxel_size_um;

    PathReport report;
    report.voxel_size_um = voxel_size_um;
    std::vector<Polyline> gt_lines(gt.yarns.size());
    std::vector<Polyline> rec_lines(rec.size());
    for (std::size_t i = 0; i < gt.yarns.size(); ++i) {
        gt_lines[i] = path_polyline(gt.yarns[i].path, options.gt_samples);
    }
    for (std::size_t j = 0; j < rec.size(); ++j) {
        rec_lines[j] = path_polyline(rec[j].path, options.gt_samples);
    }

    // all within-family distances, computed in parallel
    std::vector<std::pair<std::size_t, std::size_t>> candidates;
    for (std::size_t i = 0; i < gt.yarns.size(); ++i) {
        for (std::size_t j = 0; j < rec.size(); ++j) {
            if (gt.yarns[i].family == rec[j].family) candidates.emplace_back(i, j);
        }
    }
    std::vector<HausdorffResult> dist(candidates.size());
    parallel_chunks(0, static_cast<std::int64_t>(candidates.size()), [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t c = lo; c < hi; ++c) {
            const auto [i, j] = candidates[static_cast<std::size_t>(c)];
            dist[static_cast<std::size_t>(c)] = hausdorff(gt_lines[i], rec_lines[j], options.resample_n);
        }
    });

    std::vector<std::tuple<double, std::size_t, std::size_t, std::size_t>> order;
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        order.emplace_back(dist[c].symmetric, candidates[c].first, candidates[c].second, c);
    }
    std::sort(order.begin(), order.end());
    std::vector<char> gt_used(gt.yarns.size(), 0), rec_used(rec.size(), 0);
    for (const auto& [d, i, j, c] : order) {
        if (gt_used[i] || rec_used[j]) continue;
        gt_used[i] = rec_used[j] = 1;
        PathPair pair;
        pair.gt_id = gt.yarns[i].id;
        pair.rec_id = rec[j].id;
        pair.family = gt.yarns[i].family;
        const HausdorffResult& h = dist[c];
        pair.voxels = {h.a_to_b * to_voxels, h.b_to_a * to_voxels, h.symmetric * to_voxels};
        pair.um = {h.a_to_b * gt.unit_um, h.b_to_a * gt.unit_um, h.symmetric * gt.unit_um};
        report.total_cost += pair.voxels.symmetric;
        report.pairs.push_back(pair);
    }
    std::sort(report.pairs.begin(), report.pairs.end(),
              [](const PathPair& x, const PathPair& y) { return x.gt_id < y.gt_id; });
    for (std::size_t i = 0; i < gt.yarns.size(); ++i) {
        if (!gt_used[i]) report.unmatched_gt.push_back(gt.yarns[i].id);
    }
    for (std::size_t j = 0; j < rec.size(); ++j) {
        if (!rec_used[j]) report.unmatched_rec.push_back(rec[j].id);
    }
    for (Family f : {Family::Warp, Family::Weft}) {
        const auto ng = std::count_if(gt.yarns.begin(), gt.yarns.end(),
                                      [&](const YarnModel& y) { return y.family == f; });
        const auto nr = std::count_if(rec.begin(), rec.end(),
                                      [&](const ReconstructedYarn& y) { return y.family == f; });
        if (ng != nr) report.family_count_mismatch = true;
    }
    return report;
}

VfValue fiber_volume_fraction(const CrossSection& section, const FiberSpec& fibers) {
    fibers.validate();
    const double area = section_area(section);
    VfValue v;
    v.raw = fibers.fibers_per_yarn * std::numbers::pi * fibers.fiber_radius * fibers.fiber_radius / area;
    v.capped = v.raw > 1.0;
    v.vf = std::min(1.0, v.raw);
    v.over_hex = v.vf > kHexagonalPackingLimit;
    return v;
}

VfReport vf_distribution(std::span<const ReconstructedYarn> yarns, const FiberSpec& fibers,
                         int n_bins) {
    if (n_bins < 1) throw DomainError("vf_distribution: n_bins must be >= 1");
    std::size_t total = 0;
    for (const auto& y : yarns) total += y.sections.size();
    if (total == 0) throw InsufficientDataError("vf_distribution: no sections");

    VfReport report;
    report.histogram.assign(static_cast<std::size_t>(n_bins), 0);
    std::vector<std::vector<SectionVf>> per_yarn(yarns.size());
    parallel_chunks(0, static_cast<std::int64_t>(yarns.size()), [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t y = lo; y < hi; ++y) {
            const ReconstructedYarn& yarn = yarns[static_cast<std::size_t>(y)];
            const ArcLengthTable table(yarn.path);
            for (std::size_t s = 0; s < yarn.sections.size(); ++s) {
                const CrossSection& sec = yarn.sections[s];
                const Vec3 t = yarn.path.tangent(table.param_at(sec.station));
                per_yarn[static_cast<std::size_t>(y)].push_back(
                    {yarn.id, static_cast<int>(s), fiber_volume_fraction(project_section(sec, t), fibers)});
            }
        }
    });

    double sum = 0.0;
    for (std::size_t y = 0; y < yarns.size(); ++y) {
        const auto& values = per_yarn[y];
        YarnVfStats stats;
        stats.yarn_id = yarns[y].id;
        stats.sections = static_cast<int>(values.size());
        if (!values.empty()) {
            stats.min = stats.max = values.front().value.vf;
        }
        double ysum = 0.0;
        for (const auto& v : values) {
            const double vf = v.value.vf;
            ysum += vf;
            stats.min = std::min(stats.min, vf);
            stats.max = std::max(stats.max, vf);
            const int bin = std::min(n_bins - 1, static_cast<int>(vf * n_bins));
            ++report.histogram[static_cast<std::size_t>(bin)];
            report.count_capped += v.value.capped ? 1 : 0;
            report.count_over_hex += v.value.over_hex ? 1 : 0;
            report.sections.push_back(v);
        }
        if (!values.empty()) stats.mean = ysum / static_cast<double>(values.size());
        sum += ysum;
        report.yarns.push_back(stats);
    }
    report.mean = sum / static_cast<double>(total);
    return report;
}

}  // namespace textile
