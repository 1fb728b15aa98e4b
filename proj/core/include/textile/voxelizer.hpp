#ifndef TEXTILE_VOXELIZER_HPP
#define TEXTILE_VOXELIZER_HPP

#include <cstdint>
#include <span>
#include <vector>

#include "textile/section.hpp"
#include "textile/synthgen.hpp"
#include "textile/volume.hpp"

namespace textile {

inline constexpr std::int64_t kDefaultVoxelBudget = std::int64_t{1} << 28;

// A swept solid: consecutive sections joined by a loft. The envelope
// between two sections interpolates their keypoints linearly; each section
// outline is the periodic Catmull-Rom curve through its 10 keypoints.
struct LoftTube {
    int label = 0;
    std::vector<CrossSection> sections;
    Polyline axis;  // used by OverlapRule::NearestPath
};

enum class OverlapRule {
    NearestSectionCenter,  // closest section center wins
    NearestPath,           // closest point of the tube axis wins
};

struct RasterOptions {
    OverlapRule overlap = OverlapRule::NearestSectionCenter;
    int ring_densify = 8;
    std::int64_t voxel_budget = kDefaultVoxelBudget;
};

// Labels every voxel center of `grid` that lies inside a tube. Ties in the
// overlap rule go to the smaller label, so the result does not depend on
// tube order.
std::vector<std::uint16_t> rasterize_tubes(const GridGeometry& grid, std::span<const LoftTube> tubes,
                                           const RasterOptions& options = {});

// Grid the model's bounding box at voxel_size_um without allocating.
GridGeometry voxel_grid(const TextileModel& model, double voxel_size_um);

// Throws EmptyModelError for models without yarns and BudgetExceededError
// when the grid has more than options.voxel_budget voxels.
LabelVolume voxelize(const TextileModel& model, double voxel_size_um,
                     const RasterOptions& options = {});

LabelMap label_map_of(const TextileModel& model);

}  // namespace textile

#endif  // TEXTILE_VOXELIZER_HPP
