#include "textile/segmenter.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <unordered_map>

#include "textile/error.hpp"
#include "textile/parallel.hpp"
#include "textile/random.hpp"

namespace textile {

Vec2 contour_centroid(const Contour2& contour) {
    Vec2 c = Vec2::Zero();
    for (const auto& p : contour) c += p;
    return c / static_cast<double>(kContourPoints);
}

void validate_detection(const SectionDetection& d, double width, double height,
                        double centroid_tol) {
    for (const auto& p : d.contour) {
        if (!std::isfinite(p.x()) || !std::isfinite(p.y())) {
            throw InvalidContourError("detection: non-finite keypoint in slice " +
                                      std::to_string(d.slice_index));
        }
        if (width > 0.0 && height > 0.0 &&
            (p.x() < 0.0 || p.x() > width || p.y() < 0.0 || p.y() > height)) {
            throw InvalidContourError("detection: keypoint outside slice " +
                                      std::to_string(d.slice_index));
        }
    }
    if ((d.center - contour_centroid(d.contour)).norm() > centroid_tol) {
        throw InvalidContourError("detection: center is not the contour centroid in slice " +
                                  std::to_string(d.slice_index));
    }
    if (!is_simple_polygon(d.contour) || signed_area(d.contour) == 0.0) {
        throw InvalidContourError("detection: contour not simple in slice " +
                                  std::to_string(d.slice_index));
    }
    if (!(d.confidence >= 0.0 && d.confidence <= 1.0)) {
        throw InvalidContourError("detection: confidence outside [0, 1]");
    }
}

const char* to_string(Provenance provenance) noexcept {
    switch (provenance) {
        case Provenance::Oracle: return "oracle";
        case Provenance::Degraded: return "degraded";
        case Provenance::External: return "external";
    }
    return "oracle";
}

Provenance provenance_from_string(const std::string& name) {
    if (name == "oracle") return Provenance::Oracle;
    if (name == "degraded") return Provenance::Degraded;
    if (name == "external") return Provenance::External;
    throw DomainError("unknown provenance '" + name + "'");
}

std::size_t DetectionSet::total() const {
    std::size_t n = 0;
    for (const auto& s : slices) n += s.size();
    return n;
}

namespace {

// Edge crossing key inside a (w + 2) x (h + 2) padded lattice.
struct EdgeKeys {
    std::int64_t w, h;
    std::int64_t horizontal(std::int64_t cu, std::int64_t cv) const {
        return 2 * ((cv + 1) * (w + 2) + (cu + 1));
    }
    std::int64_t vertical(std::int64_t cu, std::int64_t cv) const {
        return 2 * ((cv + 1) * (w + 2) + (cu + 1)) + 1;
    }
};

}  // namespace

std::vector<Vec2> trace_outer_boundary(const std::vector<std::uint8_t>& mask, int width,
                                       int height) {
    auto value = [&](int u, int v) -> int {
        if (u < 0 || v < 0 || u >= width || v >= height) return 0;
        return mask[static_cast<std::size_t>(u + width * v)] ? 1 : 0;
    };
    const EdgeKeys keys{width, height};
    std::unordered_map<std::int64_t, std::int64_t> next;
    std::unordered_map<std::int64_t, Vec2> where;

    // cell (cu, cv) spans pixel centers (cu, cv) .. (cu + 1, cv + 1); corners
    // and edges are listed counter-clockwise starting at the lower left
    for (int cv = -1; cv < height; ++cv) {
        for (int cu = -1; cu < width; ++cu) {
            const int b[4] = {value(cu, cv), value(cu + 1, cv), value(cu + 1, cv + 1),
                              value(cu, cv + 1)};
            const int sum = b[0] + b[1] + b[2] + b[3];
            if (sum == 0 || sum == 4) continue;
            const std::int64_t key[4] = {keys.horizontal(cu, cv), keys.vertical(cu + 1, cv),
                                         keys.horizontal(cu, cv + 1), keys.vertical(cu, cv)};
            const Vec2 mid[4] = {Vec2(cu + 1.0, cv + 0.5), Vec2(cu + 1.5, cv + 1.0),
                                 Vec2(cu + 1.0, cv + 1.5), Vec2(cu + 0.5, cv + 1.0)};
            bool crossing[4];
            for (int e = 0; e < 4; ++e) crossing[e] = b[e] != b[(e + 1) % 4];
            // foreground stays on the left: leave through each 1 -> 0 edge
            // towards the next crossing; in saddle cells this keeps
            // diagonal foreground pixels joined
            for (int e = 0; e < 4; ++e) {
                if (!(b[e] == 1 && b[(e + 1) % 4] == 0)) continue;
                int f = (e + 1) % 4;
                while (!crossing[f]) f = (f + 1) % 4;
                next[key[e]] = key[f];
                where[key[e]] = mid[e];
                where[key[f]] = mid[f];
            }
        }
    }

    std::vector<Vec2> best;
    double best_area = 0.0;
    std::unordered_map<std::int64_t, bool> seen;
    // deterministic start order
    std::vector<std::int64_t> starts;
    starts.reserve(next.size());
    for (const auto& [k, _] : next) starts.push_back(k);
    std::sort(starts.begin(), starts.end());
    for (std::int64_t start : starts) {
        if (seen[start]) continue;
        std::vector<Vec2> loop;
        std::int64_t k = start;
        while (!seen[k]) {
            seen[k] = true;
            loop.push_back(where.at(k));
            const auto it = next.find(k);
            if (it == next.end()) break;
            k = it->second;
        }
        const double area = signed_area(loop);
        if (area > best_area) {
            best_area = area;
            best = std::move(loop);
        }
    }
    return best;
}

Contour2 canonical_contour(const std::vector<Vec2>& dense) {
    Polyline ring;
    ring.reserve(dense.size());
    for (const auto& p : dense) ring.emplace_back(p.x(), p.y(), 0.0);
    const Polyline pts = canonical_closed_resample(ring, Vec3::UnitZ(), kContourPoints);
    Contour2 out;
    for (int i = 0; i < kContourPoints; ++i) out[i] = pts[i].head<2>();
    return out;
}

Contour2 recanonicalize(const Contour2& contour) {
    Polyline ring;
    for (const auto& p : contour) ring.emplace_back(p.x(), p.y(), 0.0);
    const Polyline pts = recanonicalize(ring, Vec3::UnitZ());
    Contour2 out;
    for (int i = 0; i < kContourPoints; ++i) out[i] = pts[i].head<2>();
    return out;
}

std::vector<SectionDetection> detect_oracle(const LabelSlice& slice, SliceAxis axis,
                                            int slice_index, const DetectOptions& options,
                                            std::vector<SkippedComponent>* skipped) {
    if (options.family && !options.label_map) {
        throw DomainError("detect_oracle: family filter needs a label map");
    }
    const int w = slice.width;
    const int h = slice.height;
    std::vector<char> visited(slice.pixels.size(), 0);
    std::vector<SectionDetection> out;
    std::vector<std::pair<int, int>> stack;
    std::vector<std::pair<int, int>> component;

    for (int v0 = 0; v0 < h; ++v0) {
        for (int u0 = 0; u0 < w; ++u0) {
            const std::uint16_t label = slice.at(u0, v0);
            const std::size_t idx0 = static_cast<std::size_t>(u0 + w * v0);
            if (label == 0 || visited[idx0]) continue;

            // 8-connected flood fill of this label
            component.clear();
            stack.assign(1, {u0, v0});
            visited[idx0] = 1;
            int umin = u0, umax = u0, vmin = v0, vmax = v0;
            while (!stack.empty()) {
                const auto [u, v] = stack.back();
                stack.pop_back();
                component.emplace_back(u, v);
                umin = std::min(umin, u);
                umax = std::max(umax, u);
                vmin = std::min(vmin, v);
                vmax = std::max(vmax, v);
                for (int dv = -1; dv <= 1; ++dv) {
                    for (int du = -1; du <= 1; ++du) {
                        const int uu = u + du;
                        const int vv = v + dv;
                        if (uu < 0 || vv < 0 || uu >= w || vv >= h) continue;
                        const std::size_t idx = static_cast<std::size_t>(uu + w * vv);
                        if (visited[idx] || slice.pixels[idx] != label) continue;
                        visited[idx] = 1;
                        stack.emplace_back(uu, vv);
                    }
                }
            }

            if (options.family) {
                const auto it = options.label_map->find(label);
                if (it != options.label_map->end() && it->second != *options.family) continue;
            }
            const int area = static_cast<int>(component.size());
            if (area < options.min_area) {
                if (skipped) skipped->push_back({slice_index, label, area});
                continue;
            }

            const int bw = umax - umin + 1;
            const int bh = vmax - vmin + 1;
            std::vector<std::uint8_t> mask(static_cast<std::size_t>(bw) * bh, 0);
            for (const auto& [u, v] : component) {
                mask[static_cast<std::size_t>((u - umin) + bw * (v - vmin))] = 1;
            }
            std::vector<Vec2> dense = trace_outer_boundary(mask, bw, bh);
            for (auto& p : dense) p += Vec2(umin, vmin);

            SectionDetection det;
            det.slice_index = slice_index;
            det.axis = axis;
            det.contour = canonical_contour(dense);
            det.center = contour_centroid(det.contour);
            det.confidence = 1.0;
            det.true_label = label;
            out.push_back(det);
        }
    }
    return out;
}

DetectionSet detect_batch(const LabelDataset& dataset, int min_area, bool filter_family) {
    DetectionSet set;
    set.axis = dataset.axis;
    set.index_origin = dataset.index_origin;
    set.provenance = Provenance::Oracle;
    const std::int64_t n = static_cast<std::int64_t>(dataset.slices.size());
    set.slices.resize(static_cast<std::size_t>(n));
    if (n > 0) {
        set.width = dataset.slices.front().width;
        set.height = dataset.slices.front().height;
    }
    std::vector<std::vector<SkippedComponent>> skipped(static_cast<std::size_t>(n));
    DetectOptions options;
    options.min_area = min_area;
    if (filter_family) {
        options.family = sectioned_family(dataset.axis);
        options.label_map = &dataset.label_map;
    }
    parallel_chunks(0, n, [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t s = lo; s < hi; ++s) {
            const auto i = static_cast<std::size_t>(s);
            set.slices[i] = detect_oracle(dataset.slices[i], dataset.axis,
                                          dataset.index_origin + static_cast<int>(s), options,
                                          &skipped[i]);
        }
    });
    for (auto& s : skipped) set.skipped.insert(set.skipped.end(), s.begin(), s.end());
    return set;
}

void DegradeParams::validate() const {
    if (!(section_dropout_p >= 0.0 && section_dropout_p <= 1.0)) {
        throw DomainError("degrade: section_dropout_p must lie in [0, 1]");
    }
    if (!(keypoint_jitter_sigma >= 0.0) || !std::isfinite(keypoint_jitter_sigma)) {
        throw DomainError("degrade: keypoint_jitter_sigma must be >= 0");
    }
    if (!(confidence_floor >= 0.0 && confidence_floor <= 1.0)) {
        throw DomainError("degrade: confidence_floor must lie in [0, 1]");
    }
}

DetectionSet degrade(const DetectionSet& detections, const DegradeParams& params) {
    params.validate();
    DetectionSet out;
    out.axis = detections.axis;
    out.index_origin = detections.index_origin;
    out.width = detections.width;
    out.height = detections.height;
    out.skipped = detections.skipped;
    out.provenance = Provenance::Degraded;
    out.slices.resize(detections.slices.size());

    const double umax = detections.width > 0 ? detections.width : HUGE_VAL;
    const double vmax = detections.height > 0 ? detections.height : HUGE_VAL;
    constexpr int kAttempts = 8;

    for (std::size_t s = 0; s < detections.slices.size(); ++s) {
        // one stream per slice index keeps results independent of slice order
        std::mt19937_64 rng(derive_seed(params.seed, static_cast<std::uint64_t>(
                                                         detections.index_origin + s)));
        std::uniform_real_distribution<double> coin(0.0, 1.0);
        std::normal_distribution<double> jitter(0.0, params.keypoint_jitter_sigma);
        for (const auto& det : detections.slices[s]) {
            const bool drop = coin(rng) < params.section_dropout_p;
            // draws happen for dropped detections too, so the dropout mask
            // does not shift the jitter of later detections
            Contour2 jittered = det.contour;
            bool accepted = params.keypoint_jitter_sigma == 0.0;
            for (int attempt = 0; attempt < kAttempts && !accepted; ++attempt) {
                Contour2 trial;
                for (int i = 0; i < kContourPoints; ++i) {
                    const double du = jitter(rng);
                    const double dv = jitter(rng);
                    trial[i] = Vec2(std::clamp(det.contour[i].x() + du, 0.0, umax),
                                    std::clamp(det.contour[i].y() + dv, 0.0, vmax));
                }
                if (is_simple_polygon(trial) && signed_area(trial) > 0.0) {
                    jittered = trial;
                    accepted = true;
                }
            }
            if (drop || det.confidence < params.confidence_floor) continue;
            SectionDetection d = det;
            d.contour = jittered;
            d.center = contour_centroid(jittered);
            out.slices[s].push_back(d);
        }
    }
    return out;
}

}  // namespace textile
