#ifndef TEXTILE_MESH_HPP
#define TEXTILE_MESH_HPP

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "textile/geometry.hpp"
#include "textile/reconstruct.hpp"
#include "textile/voxelizer.hpp"

namespace textile {

// Capped tube surface. Ring r occupies vertices 10 r .. 10 r + 9; the two
// cap centers follow. Faces are wound outward.
struct QuadSurfaceMesh {
    std::vector<Vec3> vertices;
    std::vector<std::array<int, 4>> quads;
    std::vector<std::array<int, 3>> cap_triangles;
    std::vector<int> ring_offsets;  // chosen cyclic offset per segment

    bool operator==(const QuadSurfaceMesh&) const = default;
};

// Cyclic offset k minimizing sum_i |a_i - b_(i + k)| (smallest k on ties).
int minimal_twist_offset(const Contour& a, const Contour& b);

// Throws DomainError below 2 sections, DegenerateGeometryError for
// coincident consecutive sections or zero-area faces.
QuadSurfaceMesh build_surface_mesh(const ReconstructedYarn& yarn);

struct MeshTopology {
    std::int64_t vertices = 0;
    std::int64_t edges = 0;
    std::int64_t faces = 0;
    std::int64_t boundary_edges = 0;     // edges used once
    std::int64_t nonmanifold_edges = 0;  // edges used more than twice
    std::int64_t inconsistent_edges = 0; // edges traversed twice in one direction

    std::int64_t euler() const { return vertices - edges + faces; }
    bool watertight() const {
        return boundary_edges == 0 && nonmanifold_edges == 0 && inconsistent_edges == 0;
    }
};

MeshTopology topology(const QuadSurfaceMesh& mesh);

// Divergence-theorem volume with quads taken as bilinear patches, the same
// side faces the wedge volumes use.
double enclosed_volume(const QuadSurfaceMesh& mesh);

enum class CellType : int { Wedge = 13, Hexahedron = 12 };  // VTK cell type ids

struct VolumeMesh {
    std::vector<Vec3> vertices;
    std::vector<CellType> cell_types;
    std::vector<std::int64_t> connectivity;  // flattened, 6 or 8 per cell
    std::vector<std::int64_t> offsets;       // start of each cell in connectivity
    std::vector<int> cell_labels;

    std::size_t cell_count() const { return cell_types.size(); }
    std::span<const std::int64_t> cell(std::size_t c) const;

    bool operator==(const VolumeMesh&) const = default;
};

// Wedge: (0, 1, 2) is the base triangle wound away from (3, 4, 5). Side
// faces of both cell types are bilinear patches, so volumes are exact for
// non-planar quads and independent of any diagonal choice.
double wedge_volume(std::span<const Vec3, 6> p);
double hexahedron_volume(std::span<const Vec3, 8> p);
double cell_volume(const VolumeMesh& mesh, std::size_t cell);
double total_volume(const VolumeMesh& mesh);

// 10 wedges per segment fanning from the center polyline. Throws
// SelfIntersectionError naming the station of an inverted cell.
VolumeMesh build_volume_mesh(const ReconstructedYarn& yarn);

// Voxel hexahedra over `bbox`; yarn cells carry the yarn id, matrix cells 0.
VolumeMesh build_composite_mesh(std::span<const ReconstructedYarn> yarns, const Box& bbox,
                                double voxel_size_um, double unit_um,
                                std::int64_t voxel_budget = kDefaultVoxelBudget);

}  // namespace textile

#endif  // TEXTILE_MESH_HPP
