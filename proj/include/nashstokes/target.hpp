#pragma once

#include <memory>

#include "nashstokes/forms.hpp"

namespace nashstokes {

// P2 streamfunction psi solving -Lap psi = 1 on the triangles carrying
// `label`, psi = 0 on the submesh boundary, stored with the submesh and the
// map back to the parent triangulation.
struct Streamfunction {
  TriMesh submesh;
  EdgeTable subedges;
  Vec psi;  // P2 scalar coefficients on the submesh
  std::vector<int> parent_to_sub;  // parent triangle -> submesh triangle or -1

  double max_value() const { return psi.maxCoeff(); }
  double min_value() const { return psi.minCoeff(); }
};

Streamfunction solve_streamfunction(const TriMesh& mesh, SubdomainLabel label);

// Rotated streamfunction gradient (d_y psi, -d_x psi) on the labeled region,
// extended by zero to the rest of the mesh. Divergence-free by construction.
std::shared_ptr<const VelocityField> streamfunction_target(
    std::shared_ptr<const Streamfunction> psi);

}  // namespace nashstokes
