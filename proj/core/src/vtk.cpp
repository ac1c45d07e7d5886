#include "pharmonic/vtk.hpp"

#include <fstream>
#include <stdexcept>

#include "pharmonic/errors.hpp"
#include "pharmonic/trace_io.hpp"

namespace pharmonic {

void write_vtk(const std::string& path, const TriMesh& mesh, const NodalField* field,
               const std::string& field_name) {
  if (field != nullptr) {
    if (field->num_nodes() != mesh.num_nodes())
      throw std::invalid_argument("write_vtk: field does not match mesh");
    if (field->n_components != 2 && field->n_components != 3)
      throw std::invalid_argument("write_vtk: only 2- and 3-component fields are supported");
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("write_vtk: cannot open " + path + " for writing");

  out << "# vtk DataFile Version 3.0\n"
      << "pharmonic snapshot\n"
      << "ASCII\n"
      << "DATASET UNSTRUCTURED_GRID\n"
      << "POINTS " << mesh.num_nodes() << " double\n";
  for (const auto& node : mesh.nodes)
    out << format_double(node.x()) << ' ' << format_double(node.y()) << " 0\n";

  out << "CELLS " << mesh.num_elements() << ' ' << 4 * mesh.num_elements() << '\n';
  for (const auto& el : mesh.elements) out << "3 " << el[0] << ' ' << el[1] << ' ' << el[2] << '\n';

  out << "CELL_TYPES " << mesh.num_elements() << '\n';
  for (int e = 0; e < mesh.num_elements(); ++e) out << "5\n";  // VTK_TRIANGLE

  if (field != nullptr) {
    out << "POINT_DATA " << mesh.num_nodes() << '\n'
        << "VECTORS " << field_name << " double\n";
    for (int i = 0; i < field->num_nodes(); ++i) {
      const auto v = field->node(i);
      out << format_double(v[0]) << ' ' << format_double(v[1]) << ' '
          << format_double(field->n_components == 3 ? v[2] : 0.0) << '\n';
    }
  }
  out.flush();
  if (!out) throw IoError("write_vtk: write failed for " + path);
}

}  // namespace pharmonic
