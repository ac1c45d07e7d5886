#pragma once

#include <string>

#include "pharmonic/field.hpp"
#include "pharmonic/mesh.hpp"

namespace pharmonic {

/// Export mesh and an optional nodal field as legacy VTK ASCII
/// (DATASET UNSTRUCTURED_GRID, POINT_DATA VECTORS). Fields with
/// n_components == 2 are padded with a zero third component. Throws IoError
/// when the file cannot be written.
void write_vtk(const std::string& path, const TriMesh& mesh, const NodalField* field = nullptr,
               const std::string& field_name = "u");

}  // namespace pharmonic
