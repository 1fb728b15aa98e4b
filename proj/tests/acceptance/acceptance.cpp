// Prints one PASS/FAIL line per acceptance criterion; exit status is the
// number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <string>

#include "fixtures.hpp"
#include "textile/io.hpp"
#include "textile/mesh.hpp"
#include "textile/pipeline.hpp"
#include "textile/reconstruct.hpp"
#include "textile/segmenter.hpp"
#include "textile/validate.hpp"
#include "textile/voxelizer.hpp"

using namespace textile;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kVoxelUm = 20.0;

struct Outcome {
    bool pass = true;
    std::string detail;

    void check(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string fmt(const char* f, double a, double b = 0, double c = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, f, a, b, c);
    return buf;
}

// The desk fixture shared by criteria 3 to 6, built once.
struct Fixture {
    TextileModel gt;
    LabelVolume labels;
    std::vector<DetectionSet> clean;
    double gen_seconds = 0;  // generation + voxelization + detection
};

const Fixture& fixture() {
    static const Fixture f = [] {
        const auto t0 = std::chrono::steady_clock::now();
        Fixture x;
        const TextileModel base = generate_interlock(fixtures::desk_weave(), FiberSpec{}, 33, 33);
        x.gt = base;
        x.gt.fibers = FiberSpec::for_target_vf(mean_section_area(base), 0.6, 0.35);
        x.labels = voxelize(x.gt, kVoxelUm);
        x.clean = {detect_batch(extract_slices(x.labels, SliceAxis::YZ)),
                   detect_batch(extract_slices(x.labels, SliceAxis::XZ))};
        x.gen_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return x;
    }();
    return f;
}

ReconstructOptions options_for(const Fixture& f) {
    ReconstructOptions o;
    o.tracking.d_gate = default_gate(f.gt.weave, f.labels.grid.spacing);
    return o;
}

Outcome table_bookkeeping() {
    Outcome o;
    const GridGeometry acquired = dims_for_extent(Vec3(1698, 1814, 402) * kVoxelUm, kVoxelUm);
    const GridGeometry cell = dims_for_extent(Vec3(1401, 1401, 321) * kVoxelUm, kVoxelUm);
    const auto& a = acquired.dims;
    const auto& c = cell.dims;
    o.check(a[0] == 1698 && a[1] == 1814 && a[2] == 402, "acquired dims");
    o.check(c[0] == 1401 && c[1] == 1401 && c[2] == 321, "cell dims");
    const auto xz = slice_count(acquired, SliceAxis::XZ);
    const auto yz = slice_count(acquired, SliceAxis::YZ);
    o.check(xz == 1814 && yz == 1698 && xz + yz == 3512, "slice counts");
    // the full-scale weaves have 75 and 64 yarns
    o.check(acquired_sample_weave().warp_count() + acquired_sample_weave().weft_count() == 75, "acquired yarns");
    o.check(simulated_cell_weave().warp_count() + simulated_cell_weave().weft_count() == 64, "cell yarns");
    char buf[160];
    std::snprintf(buf, sizeof buf, "%lldx%lldx%lld, %lldx%lldx%lld, %lld slices", (long long)a[0],
                  (long long)a[1], (long long)a[2], (long long)c[0], (long long)c[1], (long long)c[2],
                  (long long)(xz + yz));
    o.detail = o.pass ? buf : o.detail + " (" + buf + ")";
    return o;
}

Outcome compaction() {
    Outcome o;
    const TextileModel m = generate_interlock(fixtures::desk_weave(), FiberSpec{}, 17, 17);
    const double h0 = m.thickness;
    const double h1 = 0.7 * h0;
    const auto seq = compaction_sequence(m, h1, 12);
    o.check(seq.size() == 12, "12 models");
    const double zmid = 0.5 * (m.bbox.min.z() + m.bbox.max.z());
    double worst_h = 0, worst_mid = 0;
    for (std::size_t k = 1; k <= seq.size(); ++k) {
        const TextileModel& s = seq[k - 1];
        const double expect = h0 - static_cast<double>(k) * (h0 - h1) / 12.0;
        worst_h = std::max(worst_h, std::abs(s.thickness - expect) / expect);
        worst_h = std::max(worst_h, std::abs(s.bbox.extent().z() - expect) / expect);
        worst_mid = std::max(worst_mid, std::abs(0.5 * (s.bbox.min.z() + s.bbox.max.z()) - zmid) / h0);
        // section centers scale about the mid-plane by H_k / H_init
        const double f = expect / h0;
        for (std::size_t y = 0; y < m.yarns.size(); ++y)
            for (std::size_t i = 0; i < m.yarns[y].sections.size(); ++i) {
                const double z0 = m.yarns[y].sections[i].center.z();
                const double z1 = s.yarns[y].sections[i].center.z();
                worst_mid = std::max(worst_mid, std::abs((z1 - zmid) - f * (z0 - zmid)) / h0);
            }
    }
    o.check(worst_h <= 1e-9, fmt("thickness rel err %.3g", worst_h));
    o.check(worst_mid <= 1e-9, fmt("mid-plane rel err %.3g", worst_mid));
    if (o.pass) o.detail = fmt("thickness rel err %.2g, mid-plane rel err %.2g", worst_h, worst_mid);
    return o;
}

Outcome clean_round_trip() {
    Outcome o;
    const Fixture& f = fixture();
    const auto t0 = std::chrono::steady_clock::now();
    const auto yarns = reconstruct_yarns(f.clean, f.labels.grid, options_for(f));
    const PathReport r = match_and_assess_paths(f.gt, yarns, kVoxelUm);
    const double secs = f.gen_seconds + std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.check(yarns.size() == f.gt.yarns.size(), fmt("%g tracks for %g yarns", yarns.size(), f.gt.yarns.size()));
    o.check(r.pairs.size() == f.gt.yarns.size(), "unmatched yarns");
    o.check(r.max_symmetric() <= 2.0, fmt("max Hausdorff %.3f voxels", r.max_symmetric()));
    o.check(secs < 60, fmt("%.1f s", secs));
    if (o.pass) o.detail = fmt("%g tracks, max Hausdorff %.3f voxels, %.1f s", yarns.size(), r.max_symmetric(), secs);
    return o;
}

Outcome robust_round_trip() {
    Outcome o;
    const Fixture& f = fixture();
    const auto t0 = std::chrono::steady_clock::now();
    DegradeParams d;
    d.section_dropout_p = 0.2;
    d.keypoint_jitter_sigma = 0.5;
    d.seed = 2024;
    std::vector<DetectionSet> degraded;
    for (const auto& s : f.clean) {
        degraded.push_back(degrade(s, d));
        d.seed += 1;
    }
    std::vector<YarnTrack> tracks;
    const auto yarns = reconstruct_yarns(degraded, f.labels.grid, options_for(f), nullptr, &tracks);
    const PathReport r = match_and_assess_paths(f.gt, yarns, kVoxelUm);
    const double secs = f.gen_seconds + std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    std::size_t within = 0;
    for (const auto& p : r.pairs) within += p.voxels.symmetric <= 3.0;
    const double share = static_cast<double>(within) / f.gt.yarns.size();
    o.check(share >= 0.95, fmt("%.1f%% of yarns within 3 voxels", 100 * share));

    // Injected drops, recovered from the true labels of clean vs degraded sets.
    int interior = 0, filled = 0, boundary = 0, boundary_ok = 0;
    for (std::size_t s = 0; s < f.clean.size(); ++s) {
        std::map<int, std::set<int>> kept, dropped;  // label -> slice indices
        for (const auto& slice : degraded[s].slices)
            for (const auto& det : slice) kept[*det.true_label].insert(det.slice_index);
        for (const auto& slice : f.clean[s].slices)
            for (const auto& det : slice)
                if (!kept[*det.true_label].count(det.slice_index)) dropped[*det.true_label].insert(det.slice_index);
        for (const auto& [label, slices] : dropped) {
            const YarnTrack* track = nullptr;
            for (const auto& t : tracks)
                if (t.axis == f.clean[s].axis && t.majority_label() == label) track = &t;
            const auto& k = kept[label];
            for (int idx : slices) {
                const bool inside = !k.empty() && idx > *k.begin() && idx < *k.rbegin();
                if (inside) {
                    ++interior;
                    if (!track) continue;
                    for (const auto& e : track->entries) filled += e.slice_index == idx && e.completed;
                } else {
                    ++boundary;
                    if (!track) continue;
                    bool in_entries = false, reported = false;
                    for (const auto& e : track->entries) in_entries |= e.slice_index == idx;
                    for (const auto& g : track->boundary_gaps) reported |= idx >= g.first && idx <= g.last;
                    boundary_ok += !in_entries && reported;
                }
            }
        }
    }
    o.check(interior > 0 && filled == interior, fmt("%g of %g interior gaps filled", filled, interior));
    o.check(boundary_ok == boundary, fmt("%g of %g boundary gaps reported unfilled", boundary_ok, boundary));
    o.check(secs < 90, fmt("%.1f s", secs));
    if (o.pass) {
        char buf[200];
        std::snprintf(buf, sizeof buf,
                      "%zu/%zu yarns within 3 voxels (max %.3f), %d/%d interior gaps filled, %d boundary gaps unfilled, %.1f s",
                      within, f.gt.yarns.size(), r.max_symmetric(), filled, interior, boundary_ok, secs);
        o.detail = buf;
    }
    return o;
}

Outcome mesh_integrity() {
    Outcome o;
    const Fixture& f = fixture();
    const auto yarns = reconstruct_yarns(f.clean, f.labels.grid, options_for(f));
    const auto t0 = std::chrono::steady_clock::now();
    double worst = 0;
    for (const auto& y : yarns) {
        const auto S = static_cast<std::int64_t>(y.sections.size());
        const QuadSurfaceMesh m = build_surface_mesh(y);
        const MeshTopology t = topology(m);
        const std::string id = std::to_string(y.id);
        o.check(static_cast<std::int64_t>(m.quads.size()) == 10 * (S - 1), "quad count, yarn " + id);
        o.check(m.cap_triangles.size() == 20, "cap count, yarn " + id);
        o.check(t.watertight(), "not watertight, yarn " + id);
        o.check(t.euler() == 2, "Euler characteristic, yarn " + id);
        const double surface = enclosed_volume(m);
        const double wedges = total_volume(build_volume_mesh(y));
        worst = std::max(worst, std::abs(surface - wedges) / wedges);
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.check(worst <= 0.01, fmt("volume disagreement %.3g", worst));
    o.check(secs < 10, fmt("%.1f s", secs));
    if (o.pass) o.detail = fmt("%g yarns, worst surface/wedge volume rel diff %.2g, %.2f s", yarns.size(), worst, secs);
    return o;
}

Outcome vf_consistency() {
    Outcome o;
    const Fixture& f = fixture();
    const auto yarns = reconstruct_yarns(f.clean, f.labels.grid, options_for(f));
    const auto t0 = std::chrono::steady_clock::now();
    const VfReport r = vf_distribution(yarns, f.gt.fibers);
    o.check(r.mean >= 0.55 && r.mean <= 0.65, fmt("mean Vf %.4f", r.mean));
    bool in_range = true;
    for (const auto& s : r.sections) in_range &= s.value.vf >= 0.0 && s.value.vf <= 1.0;
    o.check(in_range, "Vf outside [0, 1]");

    // Edge cases on a decagon of known area: flags fire exactly per definition.
    const CrossSection sec = fixtures::decagon(5.0);
    const double area = 5.0 * std::sin(kPi / 5) * 25.0;
    const double hex = kPi / (2 * std::sqrt(3.0));
    const double fiber = 0.1;
    bool flags = true;
    for (int n = 1; n < 1800; n += 7) {
        const double raw = n * kPi * fiber * fiber / area;
        const VfValue v = fiber_volume_fraction(sec, FiberSpec{fiber, n});
        flags &= v.capped == (raw > 1.0);
        flags &= v.over_hex == (std::min(raw, 1.0) > hex);
        flags &= std::abs(v.vf - std::min(raw, 1.0)) <= 1e-12;
    }
    // counts straddling both thresholds
    for (double threshold : {hex, 1.0}) {
        const int below = static_cast<int>(std::floor(threshold * area / (kPi * fiber * fiber)));
        const VfValue lo = fiber_volume_fraction(sec, FiberSpec{fiber, below});
        const VfValue hi = fiber_volume_fraction(sec, FiberSpec{fiber, below + 1});
        if (threshold == 1.0) flags &= !lo.capped && hi.capped && hi.vf == 1.0;
        else flags &= !lo.over_hex && hi.over_hex && !hi.capped;
    }
    o.check(flags, "cap / hexagonal flags");
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.check(secs < 5, fmt("%.1f s", secs));
    if (o.pass) o.detail = fmt("mean Vf %.4f over %g sections, flags exact, %.2f s", r.mean, r.sections.size(), secs);
    return o;
}

Outcome determinism() {
    Outcome o;
    const fs::path root = fs::temp_directory_path() / "textile_acceptance_determinism";
    fs::remove_all(root);
    PipelineConfig c;
    c.seed = 11;
    c.degrade.section_dropout_p = 0.2;
    c.degrade.keypoint_jitter_sigma = 0.5;
    c.render.noise_sigma = 0.05;
    c.output_dir = root / "run";
    cmd_pipeline(c);
    fs::rename(root / "run", root / "first");
    cmd_pipeline(c);

    std::size_t compared = 0;
    for (const auto& e : fs::recursive_directory_iterator(root / "first")) {
        if (!e.is_regular_file()) continue;
        const fs::path rel = fs::relative(e.path(), root / "first");
        if (rel == "manifest.json") continue;
        const fs::path twin = root / "run" / rel;
        if (!fs::exists(twin)) {
            o.check(false, "missing " + rel.string());
            continue;
        }
        o.check(read_file(e.path()) == read_file(twin), "differs: " + rel.string());
        ++compared;
    }
    std::size_t second = 0;
    for (const auto& e : fs::recursive_directory_iterator(root / "run")) second += e.is_regular_file();
    o.check(second == compared + 1, "file sets differ");
    o.check(compared >= 8, "too few artifacts");
    fs::remove_all(root);
    if (o.pass) o.detail = fmt("%g artifacts byte-identical", compared);
    return o;
}

// Dense point-set oracle, independent of the library's resampling.
Polyline dense(const Polyline& p, double step) {
    Polyline out;
    for (std::size_t i = 0; i + 1 < p.size(); ++i) {
        const int n = std::max(1, static_cast<int>(std::ceil((p[i + 1] - p[i]).norm() / step)));
        for (int k = 0; k < n; ++k) out.push_back(p[i] + (p[i + 1] - p[i]) * (static_cast<double>(k) / n));
    }
    out.push_back(p.back());
    return out;
}

double directed_brute(const Polyline& a, const Polyline& b) {
    double worst = 0;
    for (const auto& p : a) {
        double best = 1e300;
        for (const auto& q : b) best = std::min(best, (p - q).squaredNorm());
        worst = std::max(worst, best);
    }
    return std::sqrt(worst);
}

Outcome metric_oracles() {
    Outcome o;
    std::mt19937_64 rng(8);
    std::uniform_real_distribution<double> u(-10, 10);
    std::uniform_int_distribution<int> count(2, 12);
    double worst_h = 0;
    for (int trial = 0; trial < 25; ++trial) {
        auto make = [&] {
            Polyline p;
            const int n = count(rng);
            for (int i = 0; i < n; ++i) p.emplace_back(u(rng), u(rng), u(rng));
            return p;
        };
        const Polyline a = make(), b = make();
        const double len = std::max(polyline_length(a), polyline_length(b));
        const Polyline da = dense(a, len / 4000), db = dense(b, len / 4000);
        const double oracle = std::max(directed_brute(da, db), directed_brute(db, da));
        const double h = hausdorff(a, b).symmetric;
        worst_h = std::max(worst_h, std::abs(h - oracle) / (len / 200));
    }
    o.check(worst_h <= 1.0, fmt("Hausdorff error %.3g of length/200", worst_h));

    double worst_a = 0;
    std::normal_distribution<double> g(0, 1);
    for (int trial = 0; trial < 25; ++trial) {
        const double r = 0.5 + std::abs(g(rng)) * 5;
        const Vec3 n = Vec3(g(rng), g(rng), g(rng)).normalized();
        const CrossSection s = ellipse_section(Vec3(g(rng), g(rng), g(rng)) * 20, n, r, r, Vec3::UnitX());
        // shoelace in a local frame of the section plane
        const Vec3 e1 = (s.contour[0] - s.center).normalized();
        const Vec3 e2 = n.cross(e1);
        double shoelace = 0;
        for (int i = 0; i < kContourPoints; ++i) {
            const Vec3 p = s.contour[i] - s.center, q = s.contour[(i + 1) % kContourPoints] - s.center;
            shoelace += p.dot(e1) * q.dot(e2) - q.dot(e1) * p.dot(e2);
        }
        shoelace = 0.5 * std::abs(shoelace);
        const double analytic = 5 * std::sin(kPi / 5) * r * r;
        worst_a = std::max({worst_a, std::abs(section_area(s) - shoelace) / shoelace,
                            std::abs(section_area(s) - analytic) / analytic});
    }
    o.check(worst_a <= 1e-9, fmt("area rel err %.3g", worst_a));
    if (o.pass) o.detail = fmt("Hausdorff within %.2f of length/200, area rel err %.2g", worst_h, worst_a);
    return o;
}

}  // namespace

int main() {
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"table bookkeeping", table_bookkeeping},
        {"compaction formula", compaction},
        {"clean oracle round trip", clean_round_trip},
        {"robustness round trip", robust_round_trip},
        {"mesh integrity", mesh_integrity},
        {"Vf self-consistency", vf_consistency},
        {"determinism", determinism},
        {"metric oracles", metric_oracles},
    };
    int failures = 0;
    int n = 0;
    for (const auto& [name, run] : criteria) {
        ++n;
        Outcome out;
        try {
            out = run();
        } catch (const std::exception& e) {
            out.pass = false;
            out.detail = std::string("exception: ") + e.what();
        }
        failures += !out.pass;
        std::printf("%s criterion %d (%s): %s\n", out.pass ? "PASS" : "FAIL", n, name, out.detail.c_str());
        std::fflush(stdout);
    }
    return failures;
}
