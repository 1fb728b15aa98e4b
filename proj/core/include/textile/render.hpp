#ifndef TEXTILE_RENDER_HPP
#define TEXTILE_RENDER_HPP

#include <cstdint>

#include "textile/volume.hpp"

namespace textile {

// Procedural pseudo-CT. Matrix voxels get matrix_level, yarn voxels get
// yarn_level plus a family-specific striped texture running along the
// fibers, then Gaussian noise; everything is clamped to [0, 1].
struct RenderParams {
    double matrix_level = 0.25;
    double yarn_level = 0.45;
    double warp_contrast = 0.20;
    double weft_contrast = 0.10;
    double fiber_texture_period = 4.0;  // voxels
    double noise_sigma = 0.02;
    double ring_amplitude = 0.0;        // optional concentric ring artifact
    double ring_period = 12.0;          // voxels
    std::uint64_t seed = 0;

    void validate() const;  // throws DomainError

    bool operator==(const RenderParams&) const = default;
};

GrayVolume render_pseudo_ct(const LabelVolume& labels, const RenderParams& params);

// One slice of the same rendering; slice_index selects the noise stream so
// slice and volume renders agree voxel for voxel. The ring artifact is
// centred on the volume axis, which needs the dataset's slice count.
GraySlice render_pseudo_ct(const LabelSlice& labels, SliceAxis axis, int slice_index,
                           const LabelMap& label_map, const RenderParams& params,
                           std::int64_t slice_count = 0);

}  // namespace textile

#endif  // TEXTILE_RENDER_HPP
