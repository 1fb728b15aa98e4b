#include "textile/reconstruct.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <tuple>

#include "textile/error.hpp"
#include "textile/parallel.hpp"

namespace textile {

std::optional<int> YarnTrack::majority_label() const {
    std::map<int, int> votes;
    for (const auto& e : entries) {
        if (e.detection.true_label) ++votes[*e.detection.true_label];
    }
    std::optional<int> best;
    int best_votes = 0;
    for (const auto& [label, n] : votes) {
        if (n > best_votes) {
            best = label;
            best_votes = n;
        }
    }
    return best;
}

double default_gate(const WeaveSpec& weave, double grid_spacing) {
    if (!(grid_spacing > 0.0)) throw DomainError("default_gate: spacing must be > 0");
    return 1.5 * std::max(weave.ellipse_a, weave.ellipse_b) / grid_spacing;
}

namespace {

std::vector<SliceRun> missing_runs(const std::vector<TrackEntry>& entries) {
    std::vector<SliceRun> runs;
    for (std::size_t i = 1; i < entries.size(); ++i) {
        const int a = entries[i - 1].slice_index;
        const int b = entries[i].slice_index;
        if (b > a + 1) runs.push_back({a + 1, b - 1});
    }
    return runs;
}

}  // namespace

std::vector<YarnTrack> track_yarns(const DetectionSet& detections, const TrackOptions& options,
                                   TrackLog* log) {
    if (!(options.d_gate > 0.0)) throw DomainError("track_yarns: d_gate must be > 0");
    if (options.min_length < 1) throw DomainError("track_yarns: min_length must be >= 1");
    if (options.max_gap < 0) throw DomainError("track_yarns: max_gap must be >= 0");

    const Family family = sectioned_family(detections.axis);
    std::vector<YarnTrack> tracks;
    const double gate2 = options.d_gate * options.d_gate;

    for (int s = 0; s < detections.slice_count(); ++s) {
        const int slice = detections.index_origin + s;
        const auto& dets = detections.slices[static_cast<std::size_t>(s)];

        // all gated (distance, track, detection) candidates, closest first
        std::vector<std::tuple<double, std::size_t, std::size_t>> pairs;
        for (std::size_t t = 0; t < tracks.size(); ++t) {
            const TrackEntry& last = tracks[t].entries.back();
            if (slice - last.slice_index - 1 > options.max_gap) continue;
            for (std::size_t d = 0; d < dets.size(); ++d) {
                const double d2 = (dets[d].center - last.detection.center).squaredNorm();
                if (d2 <= gate2) pairs.emplace_back(d2, t, d);
            }
        }
        std::sort(pairs.begin(), pairs.end());
        std::vector<char> track_used(tracks.size(), 0);
        std::vector<char> det_used(dets.size(), 0);
        for (const auto& [d2, t, d] : pairs) {
            if (track_used[t] || det_used[d]) continue;
            track_used[t] = det_used[d] = 1;
            tracks[t].entries.push_back({slice, dets[d], false});
        }
        for (std::size_t d = 0; d < dets.size(); ++d) {
            if (det_used[d]) continue;
            YarnTrack track;
            track.family = family;
            track.axis = detections.axis;
            track.entries.push_back({slice, dets[d], false});
            tracks.push_back(std::move(track));
        }
    }

    std::vector<YarnTrack> kept;
    const int first_slice = detections.index_origin;
    const int last_slice = detections.index_origin + detections.slice_count() - 1;
    for (auto& track : tracks) {
        if (static_cast<int>(track.entries.size()) < options.min_length) {
            if (log) {
                ++log->discarded;
                log->discarded_detections += static_cast<int>(track.entries.size());
            }
            continue;
        }
        track.gaps = missing_runs(track.entries);
        const int a = track.entries.front().slice_index;
        const int b = track.entries.back().slice_index;
        if (a > first_slice) track.boundary_gaps.push_back({first_slice, a - 1});
        if (b < last_slice) track.boundary_gaps.push_back({b + 1, last_slice});
        kept.push_back(std::move(track));
    }
    return kept;
}

namespace {

// Natural cubic spline through (x[i], y[i]), x strictly increasing.
class NaturalSpline {
public:
    NaturalSpline(std::vector<double> x, std::vector<double> y)
        : x_(std::move(x)), y_(std::move(y)), m_(x_.size(), 0.0) {
        const std::size_t n = x_.size();
        if (n < 3) return;
        // tridiagonal system for the interior second derivatives
        std::vector<double> diag(n, 0.0), upper(n, 0.0), rhs(n, 0.0);
        for (std::size_t i = 1; i + 1 < n; ++i) {
            const double h0 = x_[i] - x_[i - 1];
            const double h1 = x_[i + 1] - x_[i];
            diag[i] = 2.0 * (h0 + h1);
            upper[i] = h1;
            rhs[i] = 6.0 * ((y_[i + 1] - y_[i]) / h1 - (y_[i] - y_[i - 1]) / h0);
        }
        for (std::size_t i = 2; i + 1 < n; ++i) {
            const double lower = x_[i] - x_[i - 1];
            const double w = lower / diag[i - 1];
            diag[i] -= w * upper[i - 1];
            rhs[i] -= w * rhs[i - 1];
        }
        for (std::size_t i = n - 2; i >= 1; --i) {
            m_[i] = (rhs[i] - upper[i] * m_[i + 1]) / diag[i];
            if (i == 1) break;
        }
    }

    double operator()(double t) const {
        std::size_t i = static_cast<std::size_t>(
            std::upper_bound(x_.begin(), x_.end(), t) - x_.begin());
        i = std::clamp<std::size_t>(i, 1, x_.size() - 1) - 1;
        const double h = x_[i + 1] - x_[i];
        const double a = (x_[i + 1] - t) / h;
        const double b = (t - x_[i]) / h;
        return a * y_[i] + b * y_[i + 1] +
               ((a * a * a - a) * m_[i] + (b * b * b - b) * m_[i + 1]) * h * h / 6.0;
    }

private:
    std::vector<double> x_, y_, m_;
};

}  // namespace

YarnTrack complete_missing(const YarnTrack& track, int spline_window) {
    std::vector<const TrackEntry*> retained;
    for (const auto& e : track.entries) {
        if (!e.completed) retained.push_back(&e);
    }
    if (retained.size() < 2) {
        throw InsufficientDataError("complete_missing: fewer than 2 retained sections");
    }
    if (track.gaps.empty()) return track;
    if (spline_window < 1) throw DomainError("complete_missing: spline_window must be >= 1");

    std::map<int, TrackEntry> by_slice;
    for (const auto& e : track.entries) by_slice.emplace(e.slice_index, e);

    for (const SliceRun& gap : track.gaps) {
        // retained neighbours around the run
        const auto after = std::find_if(retained.begin(), retained.end(), [&](const TrackEntry* e) {
            return e->slice_index > gap.last;
        });
        if (after == retained.begin() || after == retained.end()) continue;  // boundary
        const auto before = after - 1;
        const TrackEntry& lo = **before;
        const TrackEntry& hi = **after;

        std::vector<const TrackEntry*> knots;
        if (gap.length() > 1) {
            const auto from = before - std::min<std::ptrdiff_t>(spline_window - 1, before - retained.begin());
            const auto to = after + std::min<std::ptrdiff_t>(spline_window, retained.end() - after);
            knots.assign(from, to);
        }

        for (int s = gap.first; s <= gap.last; ++s) {
            if (by_slice.count(s)) continue;
            TrackEntry filled;
            filled.slice_index = s;
            filled.completed = true;
            filled.detection = lo.detection;
            filled.detection.slice_index = s;
            filled.detection.true_label.reset();
            filled.detection.confidence = std::min(lo.detection.confidence, hi.detection.confidence);
            if (knots.size() < 3) {
                const double w = static_cast<double>(s - lo.slice_index) /
                                 static_cast<double>(hi.slice_index - lo.slice_index);
                for (int k = 0; k < kContourPoints; ++k) {
                    filled.detection.contour[k] =
                        (1.0 - w) * lo.detection.contour[k] + w * hi.detection.contour[k];
                }
            } else {
                std::vector<double> x;
                for (const auto* e : knots) x.push_back(e->slice_index);
                for (int k = 0; k < kContourPoints; ++k) {
                    for (int c = 0; c < 2; ++c) {
                        std::vector<double> y;
                        for (const auto* e : knots) y.push_back(e->detection.contour[k][c]);
                        filled.detection.contour[k][c] = NaturalSpline(x, std::move(y))(s);
                    }
                }
            }
            filled.detection.center = contour_centroid(filled.detection.contour);
            by_slice.emplace(s, filled);
        }
    }

    YarnTrack out = track;
    out.entries.clear();
    for (auto& [s, e] : by_slice) out.entries.push_back(std::move(e));
    out.gaps = missing_runs(out.entries);
    return out;
}

ReconstructedYarn lift_and_fit(const YarnTrack& track, const GridGeometry& grid, int id,
                               const FitParams& params) {
    const int n = static_cast<int>(track.entries.size());
    if (n < 4) {
        throw InsufficientDataError("lift_and_fit: track has " + std::to_string(n) +
                                    " sections, need at least 4");
    }
    if (!track.gaps.empty()) throw DomainError("lift_and_fit: track still has interior gaps");

    ReconstructedYarn yarn;
    yarn.id = id;
    yarn.family = track.family;
    yarn.true_label = track.majority_label();
    yarn.sections.resize(static_cast<std::size_t>(n));
    yarn.completed.resize(static_cast<std::size_t>(n));
    Polyline centers(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const TrackEntry& e = track.entries[static_cast<std::size_t>(i)];
        CrossSection& sec = yarn.sections[static_cast<std::size_t>(i)];
        for (int k = 0; k < kContourPoints; ++k) {
            sec.contour[k] = lift_point(grid, track.axis, e.slice_index, e.detection.contour[k]);
        }
        sec.center = contour_centroid(sec.contour);
        centers[static_cast<std::size_t>(i)] = sec.center;
        yarn.completed[static_cast<std::size_t>(i)] = e.completed;
    }

    const int controls = params.n_controls > 0 ? params.n_controls : std::max(4, n / 4);
    yarn.path = bspline_fit(centers, params.degree, std::min(controls, n));

    const ArcLengthTable table(yarn.path, std::max(2048, 8 * n));
    double prev = -1.0;
    for (int i = 0; i < n; ++i) {
        CrossSection& sec = yarn.sections[static_cast<std::size_t>(i)];
        sec.station = table.length_at(table.closest_param(sec.center));
        if (i > 0 && !(sec.station > prev)) {
            throw DegenerateGeometryError("lift_and_fit: stations not increasing at section " +
                                          std::to_string(i));
        }
        prev = sec.station;
    }
    return yarn;
}

std::vector<ReconstructedYarn> reconstruct_yarns(const std::vector<DetectionSet>& sets,
                                                 const GridGeometry& grid,
                                                 const ReconstructOptions& options,
                                                 ReconstructSummary* summary,
                                                 std::vector<YarnTrack>* tracks_out) {
    std::vector<YarnTrack> tracks;
    ReconstructSummary local;
    for (const auto& set : sets) {
        TrackLog log;
        auto t = track_yarns(set, options.tracking, &log);
        local.discarded += log.discarded;
        tracks.insert(tracks.end(), std::make_move_iterator(t.begin()),
                      std::make_move_iterator(t.end()));
    }
    local.tracks = static_cast<int>(tracks.size());

    std::vector<ReconstructedYarn> yarns(tracks.size());
    std::vector<YarnTrack> completed(tracks.size());
    parallel_chunks(0, static_cast<std::int64_t>(tracks.size()), [&](std::int64_t lo, std::int64_t hi) {
        for (std::int64_t i = lo; i < hi; ++i) {
            const auto u = static_cast<std::size_t>(i);
            completed[u] = complete_missing(tracks[u], options.spline_window);
            yarns[u] = lift_and_fit(completed[u], grid, static_cast<int>(i) + 1, options.fit);
        }
    });
    for (const auto& t : completed) {
        for (const auto& e : t.entries) local.filled_sections += e.completed ? 1 : 0;
        local.boundary_gaps.insert(local.boundary_gaps.end(), t.boundary_gaps.begin(),
                                   t.boundary_gaps.end());
    }
    if (summary) *summary = local;
    if (tracks_out) *tracks_out = std::move(completed);
    return yarns;
}

}  // namespace textile
