#ifndef TEXTILE_VALIDATE_HPP
#define TEXTILE_VALIDATE_HPP

#include <span>
#include <vector>

#include "textile/geometry.hpp"
#include "textile/reconstruct.hpp"
#include "textile/synthgen.hpp"

namespace textile {

struct HausdorffResult {
    double a_to_b = 0.0;
    double b_to_a = 0.0;
    double symmetric = 0.0;

    bool operator==(const HausdorffResult&) const = default;
};

// Both polylines are resampled to n points by arc length, then compared as
// point sets. Throws DegenerateGeometryError for zero-length input and
// DomainError for n < 2.
HausdorffResult hausdorff(std::span<const Vec3> a, std::span<const Vec3> b, int resample_n = 200);

struct PathPair {
    int gt_id = 0;
    int rec_id = 0;
    Family family = Family::Warp;
    HausdorffResult voxels;  // distances in voxels
    HausdorffResult um;      // distances in micrometres
};

struct PathReport {
    std::vector<PathPair> pairs;
    std::vector<int> unmatched_gt;
    std::vector<int> unmatched_rec;
    double total_cost = 0.0;         // sum of matched symmetric distances, voxels
    bool family_count_mismatch = false;
    double voxel_size_um = 20.0;

    double max_symmetric() const;
};

struct PathOptions {
    int resample_n = 200;
    int gt_samples = 512;  // dense sampling of ground-truth curves
};

// Greedy within-family matching by smallest symmetric distance. The
// voxel size converts model units (unit_um each) into voxels.
PathReport match_and_assess_paths(const TextileModel& gt, std::span<const ReconstructedYarn> rec,
                                  double voxel_size_um, const PathOptions& options = {});

inline constexpr double kHexagonalPackingLimit = 0.90689968211710892529;  // pi / (2 sqrt 3)

struct VfValue {
    double vf = 0.0;   // capped to [0, 1]
    double raw = 0.0;  // uncapped ratio
    bool capped = false;    // raw > 1
    bool over_hex = false;  // vf > pi / (2 sqrt 3)
};

VfValue fiber_volume_fraction(const CrossSection& section, const FiberSpec& fibers);

struct SectionVf {
    int yarn_id = 0;
    int section = 0;
    VfValue value;
};

struct YarnVfStats {
    int yarn_id = 0;
    int sections = 0;
    double mean = 0.0;
    double min = 0.0;
    double max = 0.0;
};

struct VfReport {
    std::vector<SectionVf> sections;
    std::vector<YarnVfStats> yarns;
    std::vector<std::int64_t> histogram;  // n_bins equal bins over [0, 1]
    int count_capped = 0;
    int count_over_hex = 0;
    double mean = 0.0;
};

// Each section is projected onto the plane orthogonal to the path at its
// station before its area is taken. Throws InsufficientDataError when no
// section is present.
VfReport vf_distribution(std::span<const ReconstructedYarn> yarns, const FiberSpec& fibers,
                         int n_bins = 20);

}  // namespace textile

#endif  // TEXTILE_VALIDATE_HPP
