#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "pointctl/assembly.hpp"

namespace pointctl {

struct VtkPointField {
  std::string name;
  std::vector<double> values;  // one per mesh vertex
};

/// Legacy ASCII unstructured grid without point data.
void write_vtk(std::ostream& out, const Mesh& mesh);

/// Legacy ASCII unstructured grid with POINT_DATA scalars.
void write_vtk(std::ostream& out, const Mesh& mesh, const std::vector<VtkPointField>& fields,
               const std::string& title = "pointctl");

/// A finite element function as point data (zero at boundary vertices).
void write_vtk(std::ostream& out, const FeFunction& fe, const std::string& name);

}  // namespace pointctl
