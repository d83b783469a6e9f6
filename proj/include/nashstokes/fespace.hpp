#pragma once

#include <Eigen/Core>
#include <stdexcept>
#include <vector>

#include "nashstokes/mesh.hpp"
#include "nashstokes/quadrature.hpp"

namespace nashstokes {

enum class Family {
  P2Vector,         // Taylor-Hood velocity
  P1Scalar,         // Taylor-Hood pressure
  P0VectorControl,  // piecewise-constant control
  P1VectorControl,  // discontinuous piecewise-linear control
};

// Lagrange space with component-blocked dof numbering: global dof =
// component * scalar_dim + scalar index. P2 scalar dofs are vertices followed
// by edge midpoints; P1 dofs are vertices. The control families are
// element-local (no inter-element continuity): P0 dofs are triangles, P1
// control dofs come in per-triangle groups of three.
class FESpace {
 public:
  FESpace(const TriMesh& mesh, Family family, const EdgeTable* edges);

  const TriMesh& mesh() const { return *mesh_; }
  Family family() const { return family_; }
  int dim() const { return components_ * scalar_dim_; }
  int scalar_dim() const { return scalar_dim_; }
  int components() const { return components_; }
  int local_scalar_dofs() const { return n_local_; }

  // Global scalar index of local scalar dof `l` on element `e`.
  int scalar_dof(int e, int l) const;
  int dof(int e, int l, int comp) const {
    return comp * scalar_dim_ + scalar_dof(e, l);
  }

  // Scalar basis values / reference gradients at a barycentric point.
  void shape(const std::array<double, 3>& bary, double* values) const;
  void shape_ref_grad(const std::array<double, 3>& bary,
                      Eigen::Vector2d* grads) const;

  bool is_control() const {
    return family_ == Family::P0VectorControl ||
           family_ == Family::P1VectorControl;
  }

 private:
  const TriMesh* mesh_;
  Family family_;
  int components_;
  int scalar_dim_;
  int n_local_;
  const EdgeTable* edges_;  // P2 only
};

// Affine map data for one element.
struct ElementGeometry {
  Eigen::Matrix2d jacobian;      // columns: v1-v0, v2-v0
  Eigen::Matrix2d inv_jacobian_t;
  double area;
  Point v0;

  Point map(const std::array<double, 3>& bary, const TriMesh& mesh,
            int t) const;
};

ElementGeometry element_geometry(const TriMesh& mesh, int t);

// Evaluates an FE coefficient vector on one element at a barycentric point.
Eigen::Vector2d eval_vector_field(const FESpace& space,
                                  const Eigen::VectorXd& coeffs, int e,
                                  const std::array<double, 3>& bary);
// grad(i, j) = d v_i / d x_j in physical coordinates.
Eigen::Matrix2d eval_vector_gradient(const FESpace& space,
                                     const Eigen::VectorXd& coeffs, int e,
                                     const std::array<double, 3>& bary,
                                     const ElementGeometry& geom);
double eval_scalar_field(const FESpace& space, const Eigen::VectorXd& coeffs,
                         int e, const std::array<double, 3>& bary);

}  // namespace nashstokes
