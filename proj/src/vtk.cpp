#include "pointctl/vtk.hpp"

#include <cstdio>
#include <ostream>

#include "pointctl/errors.hpp"

namespace pointctl {

namespace {

std::string number(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

void write_grid(std::ostream& out, const Mesh& mesh, const std::string& title) {
  const int dim = mesh.dim();
  out << "# vtk DataFile Version 3.0\n" << title << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_vertices() << " double\n";
  for (const auto& v : mesh.vertices()) out << number(v[0]) << ' ' << number(v[1]) << ' ' << number(v[2]) << '\n';
  out << "CELLS " << mesh.num_cells() << ' ' << mesh.num_cells() * (dim + 2) << '\n';
  for (int c = 0; c < static_cast<int>(mesh.num_cells()); ++c) {
    out << dim + 1;
    for (int v : mesh.cell(c)) out << ' ' << v;
    out << '\n';
  }
  out << "CELL_TYPES " << mesh.num_cells() << '\n';
  const int type = dim == 2 ? 5 : 10;  // VTK_TRIANGLE, VTK_TETRA
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) out << type << '\n';
}

}  // namespace

void write_vtk(std::ostream& out, const Mesh& mesh) { write_grid(out, mesh, "pointctl mesh"); }

void write_vtk(std::ostream& out, const Mesh& mesh, const std::vector<VtkPointField>& fields,
               const std::string& title) {
  for (const auto& field : fields) {
    if (field.values.size() != mesh.num_vertices()) {
      throw DimensionMismatch("VTK field '" + field.name + "' does not have one value per vertex");
    }
  }
  write_grid(out, mesh, title);
  if (fields.empty()) return;
  out << "POINT_DATA " << mesh.num_vertices() << '\n';
  for (const auto& field : fields) {
    out << "SCALARS " << field.name << " double 1\nLOOKUP_TABLE default\n";
    for (double v : field.values) out << number(v) << '\n';
  }
}

void write_vtk(std::ostream& out, const FeFunction& fe, const std::string& name) {
  write_vtk(out, fe.dofs->mesh(), {{name, fe.vertex_values()}}, name);
}

}  // namespace pointctl
