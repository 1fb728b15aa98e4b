#ifndef TEXTILE_SEGMENTER_HPP
#define TEXTILE_SEGMENTER_HPP

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "textile/geometry.hpp"
#include "textile/section.hpp"
#include "textile/volume.hpp"

namespace textile {

using Contour2 = std::array<Vec2, kContourPoints>;

// One yarn instance in one slice. Coordinates are in-slice voxel units with
// pixel centers at +1/2.
struct SectionDetection {
    int slice_index = 0;
    SliceAxis axis = SliceAxis::XZ;
    Contour2 contour{};
    Vec2 center = Vec2::Zero();
    double confidence = 1.0;
    std::optional<int> true_label;

    bool operator==(const SectionDetection&) const = default;
};

Vec2 contour_centroid(const Contour2& contour);

// Throws InvalidContourError if the detection breaks an invariant; bounds
// are checked when width/height are positive.
void validate_detection(const SectionDetection& detection, double width = 0.0,
                        double height = 0.0, double centroid_tol = 0.25);

enum class Provenance { Oracle, Degraded, External };

const char* to_string(Provenance provenance) noexcept;
Provenance provenance_from_string(const std::string& name);

struct SkippedComponent {
    int slice_index = 0;
    int label = 0;
    int pixel_area = 0;

    bool operator==(const SkippedComponent&) const = default;
};

struct DetectionSet {
    SliceAxis axis = SliceAxis::XZ;
    int index_origin = 0;
    int width = 0;   // slice extent, for bounds checks
    int height = 0;
    std::vector<std::vector<SectionDetection>> slices;
    Provenance provenance = Provenance::Oracle;
    std::vector<SkippedComponent> skipped;

    int slice_count() const { return static_cast<int>(slices.size()); }
    std::size_t total() const;

    bool operator==(const DetectionSet&) const = default;
};

struct DetectOptions {
    int min_area = 12;  // pixels; smaller components are skipped and logged
    // When set, only labels of this family are detected.
    std::optional<Family> family;
    const LabelMap* label_map = nullptr;  // required when family is set
};

// Dense outer boundary of a binary pixel set (iso 0.5, 8-connected
// foreground), counter-clockwise in (u, v).
std::vector<Vec2> trace_outer_boundary(const std::vector<std::uint8_t>& mask, int width,
                                       int height);

std::vector<SectionDetection> detect_oracle(const LabelSlice& slice, SliceAxis axis,
                                            int slice_index, const DetectOptions& options = {},
                                            std::vector<SkippedComponent>* skipped = nullptr);

// Oracle over every slice; by default only the family each orientation
// cuts across is detected.
DetectionSet detect_batch(const LabelDataset& dataset, int min_area = 12,
                          bool filter_family = true);

struct DegradeParams {
    double keypoint_jitter_sigma = 0.0;  // voxels
    double section_dropout_p = 0.0;
    double confidence_floor = 0.0;       // detections below it are discarded
    std::uint64_t seed = 0;

    void validate() const;  // throws DomainError

    bool operator==(const DegradeParams&) const = default;
};

DetectionSet degrade(const DetectionSet& detections, const DegradeParams& params);

// Keypoint ordering convention applied to an externally produced contour.
Contour2 canonical_contour(const std::vector<Vec2>& dense);
Contour2 recanonicalize(const Contour2& contour);

}  // namespace textile

#endif  // TEXTILE_SEGMENTER_HPP
