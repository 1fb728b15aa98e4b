#ifndef TEXTILE_MESH_IO_HPP
#define TEXTILE_MESH_IO_HPP

#include <string>
#include <vector>

#include "textile/mesh.hpp"

namespace textile {

// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

struct NamedSurface {
    std::string name;
    QuadSurfaceMesh mesh;
};

// Wavefront OBJ, one object per mesh, 1-based indices.
std::string write_obj(const std::vector<NamedSurface>& meshes);
std::vector<NamedSurface> read_obj(const std::string& text);

// Legacy ASCII VTK unstructured grid with a "yarn_id" cell scalar.
std::string write_vtk(const VolumeMesh& mesh, const std::string& title = "textile mesh");
VolumeMesh read_vtk(const std::string& text);

}  // namespace textile

#endif  // TEXTILE_MESH_IO_HPP
