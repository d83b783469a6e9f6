#pragma once

#include <string>
#include <utility>
#include <vector>

#include "nashstokes/forms.hpp"

namespace nashstokes {

// Vertex-sampled fields sharing one mesh. Vector entries are coefficient
// vectors of a component-blocked space whose leading scalar dofs are the mesh
// vertices (P2 or P1 vector); scalars are P1 coefficient vectors.
struct FieldBundle {
  const TriMesh* mesh = nullptr;
  std::vector<std::pair<std::string, std::pair<const FESpace*, Vec>>> vectors;
  std::vector<std::pair<std::string, Vec>> scalars;
  // Element-local fields (the control spaces), written as per-cell vectors
  // sampled at triangle centroids.
  std::vector<std::pair<std::string, std::pair<const FESpace*, Vec>>>
      cell_vectors;
  std::vector<std::string> metadata;  // comment lines after the header

  void add_vector(const std::string& name, const FESpace& space, Vec coeffs);
  void add_scalar(const std::string& name, Vec coeffs);
  void add_cell_vector(const std::string& name, const FESpace& space,
                       Vec coeffs);
};

// Legacy-VTK unstructured-grid text file: POINTS, CELLS, CELL_TYPES (code 5),
// then per-point vectors and scalars. Formatting is fixed, so identical
// inputs produce byte-identical files.
void write_vtk(const FieldBundle& bundle, const std::string& path);

}  // namespace nashstokes
