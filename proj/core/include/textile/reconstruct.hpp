#ifndef TEXTILE_RECONSTRUCT_HPP
#define TEXTILE_RECONSTRUCT_HPP

#include <optional>
#include <vector>

#include "textile/bspline.hpp"
#include "textile/section.hpp"
#include "textile/segmenter.hpp"
#include "textile/synthgen.hpp"
#include "textile/volume.hpp"

namespace textile {

// Inclusive run of slice indices.
struct SliceRun {
    int first = 0;
    int last = 0;

    int length() const { return last - first + 1; }
    bool operator==(const SliceRun&) const = default;
};

struct TrackEntry {
    int slice_index = 0;
    SectionDetection detection;
    bool completed = false;  // synthesized by complete_missing

    bool operator==(const TrackEntry&) const = default;
};

struct YarnTrack {
    Family family = Family::Warp;
    SliceAxis axis = SliceAxis::YZ;
    std::vector<TrackEntry> entries;   // strictly increasing slice_index
    std::vector<SliceRun> gaps;        // interior runs without a detection
    std::vector<SliceRun> boundary_gaps;  // leading/trailing runs, never filled

    // Most frequent true_label among entries, if any carry one.
    std::optional<int> majority_label() const;

    bool operator==(const YarnTrack&) const = default;
};

struct TrackOptions {
    double d_gate = 21.0;  // voxels
    int min_length = 4;    // shorter tracks are discarded
    int max_gap = 10;      // slices a track may stay unmatched and remain active
};

// d_gate = 3 max(a, b) / 2 expressed in voxels of the given grid spacing.
double default_gate(const WeaveSpec& weave, double grid_spacing);

struct TrackLog {
    int discarded = 0;              // tracks below min_length
    int discarded_detections = 0;
};

std::vector<YarnTrack> track_yarns(const DetectionSet& detections, const TrackOptions& options,
                                   TrackLog* log = nullptr);

// Fills interior gaps keypoint by keypoint: linearly for one-slice gaps, by
// a natural cubic spline per channel over the surrounding retained sections
// otherwise. Boundary gaps stay in boundary_gaps. Throws
// InsufficientDataError with fewer than 2 retained entries.
YarnTrack complete_missing(const YarnTrack& track, int spline_window = 4);

struct ReconstructedYarn {
    int id = 0;
    Family family = Family::Warp;
    BSplineCurve path;
    std::vector<CrossSection> sections;
    std::vector<bool> completed;
    std::optional<int> true_label;

    bool operator==(const ReconstructedYarn&) const = default;
};

struct FitParams {
    int n_controls = 0;  // 0: max(4, S / 4)
    int degree = 3;
};

// Lifts the track into model coordinates and fits the path through the
// section centers. Throws InsufficientDataError below 4 sections,
// DomainError if interior gaps remain and DegenerateGeometryError if
// stations fail to increase.
ReconstructedYarn lift_and_fit(const YarnTrack& track, const GridGeometry& grid, int id,
                               const FitParams& params = {});

struct ReconstructOptions {
    TrackOptions tracking;
    FitParams fit;
    int spline_window = 4;
};

struct ReconstructSummary {
    int tracks = 0;
    int discarded = 0;
    int filled_sections = 0;
    std::vector<SliceRun> boundary_gaps;  // union over tracks, for reporting
};

// Track, complete and fit every set. Ids start at 1 and follow set order,
// then the order in which tracks were opened.
std::vector<ReconstructedYarn> reconstruct_yarns(const std::vector<DetectionSet>& sets,
                                                 const GridGeometry& grid,
                                                 const ReconstructOptions& options,
                                                 ReconstructSummary* summary = nullptr,
                                                 std::vector<YarnTrack>* tracks_out = nullptr);

}  // namespace textile

#endif  // TEXTILE_RECONSTRUCT_HPP
