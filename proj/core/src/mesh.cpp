#include "textile/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include "textile/error.hpp"

namespace textile {

int minimal_twist_offset(const Contour& a, const Contour& b) {
    int best_k = 0;
    double best = std::numeric_limits<double>::infinity();
    for (int k = 0; k < kContourPoints; ++k) {
        double total = 0.0;
        for (int i = 0; i < kContourPoints; ++i) total += (a[i] - b[(i + k) % kContourPoints]).norm();
        if (total < best) {
            best = total;
            best_k = k;
        }
    }
    return best_k;
}

namespace {

// Rings wound counter-clockwise about the running direction; the start
// keypoint is kept when a ring has to be reversed. The direction comes from
// neighbouring centers, not the fitted tangent: a clamped fit through noisy
// end samples can hook backwards.
std::vector<Contour> oriented_rings(const ReconstructedYarn& yarn) {
    const auto& secs = yarn.sections;
    const std::size_t n = secs.size();
    std::vector<Contour> rings;
    rings.reserve(n);
    for (std::size_t s = 0; s < n; ++s) {
        const Vec3 t = secs[std::min(s + 1, n - 1)].center - secs[s == 0 ? 0 : s - 1].center;
        Contour ring = secs[s].contour;
        if (newell_normal(ring).dot(t) < 0.0) std::reverse(ring.begin() + 1, ring.end());
        rings.push_back(ring);
    }
    return rings;
}

void check_sections(const ReconstructedYarn& yarn, const char* who) {
    if (yarn.sections.size() < 2) {
        throw DomainError(std::string(who) + ": yarn " + std::to_string(yarn.id) +
                          " needs at least 2 sections");
    }
    for (std::size_t s = 1; s < yarn.sections.size(); ++s) {
        const auto& a = yarn.sections[s - 1];
        const auto& b = yarn.sections[s];
        const double scale = std::max(1.0, a.center.norm());
        if ((a.center - b.center).norm() <= 1e-12 * scale) {
            throw DegenerateGeometryError(std::string(who) + ": coincident sections at station " +
                                          std::to_string(b.station) + " of yarn " +
                                          std::to_string(yarn.id));
        }
    }
}

double triangle_area(const Vec3& a, const Vec3& b, const Vec3& c) {
    return 0.5 * (b - a).cross(c - a).norm();
}

double signed_tet(const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return (b - a).cross(c - a).dot(d - a) / 6.0;
}

// Cone from o over the bilinear patch (a, b, c, d). The exact flux equals
// the mean of the two diagonal splits, so no diagonal is preferred and the
// result is mirror-invariant.
double bilinear_cone(const Vec3& o, const Vec3& a, const Vec3& b, const Vec3& c, const Vec3& d) {
    return 0.5 * (signed_tet(o, a, b, c) + signed_tet(o, a, c, d) + signed_tet(o, a, b, d) +
                  signed_tet(o, b, c, d));
}

}  // namespace

QuadSurfaceMesh build_surface_mesh(const ReconstructedYarn& yarn) {
    check_sections(yarn, "build_surface_mesh");
    const std::vector<Contour> rings = oriented_rings(yarn);
    const int s_count = static_cast<int>(rings.size());

    QuadSurfaceMesh mesh;
    mesh.vertices.reserve(static_cast<std::size_t>(kContourPoints * s_count + 2));
    for (const auto& ring : rings) mesh.vertices.insert(mesh.vertices.end(), ring.begin(), ring.end());
    const int c0 = kContourPoints * s_count;
    const int c1 = c0 + 1;
    mesh.vertices.push_back(contour_centroid(rings.front()));
    mesh.vertices.push_back(contour_centroid(rings.back()));

    for (int r = 0; r + 1 < s_count; ++r) {
        const int k = minimal_twist_offset(rings[static_cast<std::size_t>(r)],
                                           rings[static_cast<std::size_t>(r + 1)]);
        mesh.ring_offsets.push_back(k);
        const int a = kContourPoints * r;
        const int b = kContourPoints * (r + 1);
        for (int i = 0; i < kContourPoints; ++i) {
            const int i1 = (i + 1) % kContourPoints;
            mesh.quads.push_back({a + i, a + i1, b + (i1 + k) % kContourPoints,
                                  b + (i + k) % kContourPoints});
        }
    }
    const int last = kContourPoints * (s_count - 1);
    for (int i = 0; i < kContourPoints; ++i) {
        const int i1 = (i + 1) % kContourPoints;
        mesh.cap_triangles.push_back({c0, i1, i});
    }
    for (int i = 0; i < kContourPoints; ++i) {
        const int i1 = (i + 1) % kContourPoints;
        mesh.cap_triangles.push_back({c1, last + i, last + i1});
    }

    const auto& v = mesh.vertices;
    double scale = 0.0;
    for (const auto& p : v) scale = std::max(scale, p.cwiseAbs().maxCoeff());
    const double eps = 1e-14 * std::max(1.0, scale * scale);
    for (const auto& q : mesh.quads) {
        if (triangle_area(v[q[0]], v[q[1]], v[q[3]]) <= eps ||
            triangle_area(v[q[1]], v[q[2]], v[q[3]]) <= eps) {
            throw DegenerateGeometryError("build_surface_mesh: degenerate quad in yarn " +
                                          std::to_string(yarn.id));
        }
    }
    for (const auto& t : mesh.cap_triangles) {
        if (triangle_area(v[t[0]], v[t[1]], v[t[2]]) <= eps) {
            throw DegenerateGeometryError("build_surface_mesh: degenerate cap in yarn " +
                                          std::to_string(yarn.id));
        }
    }
    return mesh;
}

MeshTopology topology(const QuadSurfaceMesh& mesh) {
    // directed edge counts keyed by (min, max) with per-direction tallies
    std::map<std::pair<int, int>, std::array<int, 2>> edges;
    auto add_face = [&](std::span<const int> f) {
        for (std::size_t i = 0; i < f.size(); ++i) {
            const int a = f[i];
            const int b = f[(i + 1) % f.size()];
            auto& e = edges[{std::min(a, b), std::max(a, b)}];
            ++e[a < b ? 0 : 1];
        }
    };
    for (const auto& q : mesh.quads) add_face(q);
    for (const auto& t : mesh.cap_triangles) add_face(t);

    MeshTopology topo;
    topo.vertices = static_cast<std::int64_t>(mesh.vertices.size());
    topo.faces = static_cast<std::int64_t>(mesh.quads.size() + mesh.cap_triangles.size());
    topo.edges = static_cast<std::int64_t>(edges.size());
    for (const auto& [key, count] : edges) {
        const int uses = count[0] + count[1];
        if (uses == 1) ++topo.boundary_edges;
        if (uses > 2) ++topo.nonmanifold_edges;
        if (count[0] > 1 || count[1] > 1) ++topo.inconsistent_edges;
    }
    return topo;
}

double enclosed_volume(const QuadSurfaceMesh& mesh) {
    const auto& v = mesh.vertices;
    const Vec3 o = v.empty() ? Vec3::Zero() : v.front();
    double vol = 0.0;
    for (const auto& q : mesh.quads) vol += bilinear_cone(o, v[q[0]], v[q[1]], v[q[2]], v[q[3]]);
    for (const auto& t : mesh.cap_triangles) vol += signed_tet(o, v[t[0]], v[t[1]], v[t[2]]);
    return vol;
}

std::span<const std::int64_t> VolumeMesh::cell(std::size_t c) const {
    const std::size_t begin = static_cast<std::size_t>(offsets[c]);
    const std::size_t n = cell_types[c] == CellType::Wedge ? 6 : 8;
    return {connectivity.data() + begin, n};
}

double wedge_volume(std::span<const Vec3, 6> p) {
    // outward faces: triangles (0, 1, 2) and (3, 5, 4), bilinear sides
    const Vec3& o = p[0];
    return signed_tet(o, p[3], p[5], p[4]) + bilinear_cone(o, p[0], p[3], p[4], p[1]) +
           bilinear_cone(o, p[1], p[4], p[5], p[2]) + bilinear_cone(o, p[2], p[5], p[3], p[0]);
}

double hexahedron_volume(std::span<const Vec3, 8> p) {
    // (0, 1, 2, 3) faces the top, so it is traversed backwards
    const Vec3& o = p[0];
    return bilinear_cone(o, p[0], p[3], p[2], p[1]) + bilinear_cone(o, p[4], p[5], p[6], p[7]) +
           bilinear_cone(o, p[0], p[1], p[5], p[4]) + bilinear_cone(o, p[1], p[2], p[6], p[5]) +
           bilinear_cone(o, p[2], p[3], p[7], p[6]) + bilinear_cone(o, p[3], p[0], p[4], p[7]);
}

double cell_volume(const VolumeMesh& mesh, std::size_t c) {
    const auto ids = mesh.cell(c);
    if (mesh.cell_types[c] == CellType::Wedge) {
        std::array<Vec3, 6> p;
        for (int i = 0; i < 6; ++i) p[i] = mesh.vertices[static_cast<std::size_t>(ids[i])];
        return wedge_volume(p);
    }
    std::array<Vec3, 8> p;
    for (int i = 0; i < 8; ++i) p[i] = mesh.vertices[static_cast<std::size_t>(ids[i])];
    return hexahedron_volume(p);
}

double total_volume(const VolumeMesh& mesh) {
    double vol = 0.0;
    for (std::size_t c = 0; c < mesh.cell_count(); ++c) vol += cell_volume(mesh, c);
    return vol;
}

VolumeMesh build_volume_mesh(const ReconstructedYarn& yarn) {
    check_sections(yarn, "build_volume_mesh");
    const std::vector<Contour> rings = oriented_rings(yarn);
    const int s_count = static_cast<int>(rings.size());

    VolumeMesh mesh;
    for (const auto& ring : rings) mesh.vertices.insert(mesh.vertices.end(), ring.begin(), ring.end());
    const std::int64_t centers = static_cast<std::int64_t>(mesh.vertices.size());
    for (const auto& ring : rings) mesh.vertices.push_back(contour_centroid(ring));

    for (int r = 0; r + 1 < s_count; ++r) {
        const int k = minimal_twist_offset(rings[static_cast<std::size_t>(r)],
                                           rings[static_cast<std::size_t>(r + 1)]);
        const std::int64_t a = kContourPoints * r;
        const std::int64_t b = kContourPoints * (r + 1);
        for (int i = 0; i < kContourPoints; ++i) {
            const int i1 = (i + 1) % kContourPoints;
            const std::array<std::int64_t, 6> ids{
                centers + r, a + i1, a + i,
                centers + r + 1, b + (i1 + k) % kContourPoints, b + (i + k) % kContourPoints};
            mesh.offsets.push_back(static_cast<std::int64_t>(mesh.connectivity.size()));
            mesh.connectivity.insert(mesh.connectivity.end(), ids.begin(), ids.end());
            mesh.cell_types.push_back(CellType::Wedge);
            mesh.cell_labels.push_back(yarn.id);
            if (!(cell_volume(mesh, mesh.cell_count() - 1) > 0.0)) {
                throw SelfIntersectionError(
                    "build_volume_mesh: inverted cell between stations " +
                    std::to_string(yarn.sections[static_cast<std::size_t>(r)].station) + " and " +
                    std::to_string(yarn.sections[static_cast<std::size_t>(r + 1)].station) +
                    " of yarn " + std::to_string(yarn.id));
            }
        }
    }
    return mesh;
}

VolumeMesh build_composite_mesh(std::span<const ReconstructedYarn> yarns, const Box& bbox,
                                double voxel_size_um, double unit_um, std::int64_t voxel_budget) {
    const GridGeometry grid = grid_for_box(bbox, voxel_size_um, unit_um);
    if (grid.count() > voxel_budget) {
        throw BudgetExceededError("build_composite_mesh: " + std::to_string(grid.count()) +
                                  " cells exceed the budget of " + std::to_string(voxel_budget));
    }
    std::vector<LoftTube> tubes;
    for (const auto& y : yarns) {
        tubes.push_back({y.id, y.sections, path_polyline(y.path)});
    }
    RasterOptions options;
    options.overlap = OverlapRule::NearestPath;
    options.voxel_budget = voxel_budget;
    const std::vector<std::uint16_t> labels = rasterize_tubes(grid, tubes, options);

    const auto [nx, ny, nz] = grid.dims;
    VolumeMesh mesh;
    mesh.vertices.reserve(static_cast<std::size_t>((nx + 1) * (ny + 1) * (nz + 1)));
    for (std::int64_t k = 0; k <= nz; ++k) {
        for (std::int64_t j = 0; j <= ny; ++j) {
            for (std::int64_t i = 0; i <= nx; ++i) {
                mesh.vertices.push_back(grid.origin + grid.spacing * Vec3(i, j, k));
            }
        }
    }
    auto node = [&](std::int64_t i, std::int64_t j, std::int64_t k) {
        return i + (nx + 1) * (j + (ny + 1) * k);
    };
    const std::size_t cells = static_cast<std::size_t>(grid.count());
    mesh.cell_types.assign(cells, CellType::Hexahedron);
    mesh.cell_labels.resize(cells);
    mesh.offsets.resize(cells);
    mesh.connectivity.reserve(cells * 8);
    for (std::int64_t k = 0; k < nz; ++k) {
        for (std::int64_t j = 0; j < ny; ++j) {
            for (std::int64_t i = 0; i < nx; ++i) {
                const std::size_t c = grid.index(i, j, k);
                mesh.offsets[c] = static_cast<std::int64_t>(mesh.connectivity.size());
                const std::array<std::int64_t, 8> ids{
                    node(i, j, k),         node(i + 1, j, k),
                    node(i + 1, j + 1, k), node(i, j + 1, k),
                    node(i, j, k + 1),     node(i + 1, j, k + 1),
                    node(i + 1, j + 1, k + 1), node(i, j + 1, k + 1)};
                mesh.connectivity.insert(mesh.connectivity.end(), ids.begin(), ids.end());
                mesh.cell_labels[c] = labels[c];
            }
        }
    }
    return mesh;
}

}  // namespace textile
