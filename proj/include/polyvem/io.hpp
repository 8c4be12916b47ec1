#pragma once

#include "polyvem/loads.hpp"
#include "polyvem/mesh.hpp"

#include <optional>
#include <string>

namespace polyvem {

// Optional fields attached to a VTK output.
struct VtkFields {
    std::optional<NodalField> displacement;       // point vectors
    std::optional<Eigen::VectorXd> cell_scalars;  // one value per cell
    std::string cell_scalar_name = "max_strain";
};

/// Legacy ASCII VTK unstructured grid: 2D cells as polygons, 3D cells as
/// polyhedra (face-stream encoding).  Deterministic full-precision output.
std::string vtk_string(const PolyMesh& mesh, const VtkFields& fields = {});
void write_vtk(const PolyMesh& mesh, const std::string& path, const VtkFields& fields = {});

/// Plain-text mesh format (nodes / faces / signed cell-face lists).
std::string pvmesh_string(const PolyMesh& mesh);
void write_pvmesh(const PolyMesh& mesh, const std::string& path);
PolyMesh read_pvmesh(const std::string& path);
PolyMesh parse_pvmesh(const std::string& text);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

} // namespace polyvem
