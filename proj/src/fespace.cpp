#include "nashstokes/fespace.hpp"

#include <Eigen/LU>

namespace nashstokes {

FESpace::FESpace(const TriMesh& mesh, Family family, const EdgeTable* edges)
    : mesh_(&mesh), family_(family), edges_(edges) {
  switch (family) {
    case Family::P2Vector:
      if (edges == nullptr)
        throw std::runtime_error("P2 space requires an edge table");
      components_ = 2;
      scalar_dim_ = mesh.n_vertices() + edges->n_edges();
      n_local_ = 6;
      break;
    case Family::P1Scalar:
      components_ = 1;
      scalar_dim_ = mesh.n_vertices();
      n_local_ = 3;
      break;
    case Family::P0VectorControl:
      components_ = 2;
      scalar_dim_ = mesh.n_triangles();
      n_local_ = 1;
      break;
    case Family::P1VectorControl:
      components_ = 2;
      scalar_dim_ = 3 * mesh.n_triangles();
      n_local_ = 3;
      break;
  }
}

int FESpace::scalar_dof(int e, int l) const {
  switch (family_) {
    case Family::P2Vector:
      if (l < 3) return mesh_->triangles[e][l];
      return mesh_->n_vertices() + edges_->triangle_edges[e][l - 3];
    case Family::P1Scalar:
      return mesh_->triangles[e][l];
    case Family::P1VectorControl:
      return 3 * e + l;  // element-local linear dofs
    case Family::P0VectorControl:
      return e;
  }
  return -1;
}

void FESpace::shape(const std::array<double, 3>& bary, double* v) const {
  const double l0 = bary[0], l1 = bary[1], l2 = bary[2];
  switch (family_) {
    case Family::P2Vector:
      v[0] = l0 * (2 * l0 - 1);
      v[1] = l1 * (2 * l1 - 1);
      v[2] = l2 * (2 * l2 - 1);
      v[3] = 4 * l1 * l2;  // midpoint of edge opposite vertex 0
      v[4] = 4 * l0 * l2;
      v[5] = 4 * l0 * l1;
      break;
    case Family::P1Scalar:
    case Family::P1VectorControl:
      v[0] = l0;
      v[1] = l1;
      v[2] = l2;
      break;
    case Family::P0VectorControl:
      v[0] = 1.0;
      break;
  }
}

void FESpace::shape_ref_grad(const std::array<double, 3>& bary,
                             Eigen::Vector2d* g) const {
  // Reference coordinates (xi, eta) with l0 = 1-xi-eta, l1 = xi, l2 = eta.
  const double l0 = bary[0], l1 = bary[1], l2 = bary[2];
  const Eigen::Vector2d dl0(-1, -1), dl1(1, 0), dl2(0, 1);
  switch (family_) {
    case Family::P2Vector:
      g[0] = (4 * l0 - 1) * dl0;
      g[1] = (4 * l1 - 1) * dl1;
      g[2] = (4 * l2 - 1) * dl2;
      g[3] = 4.0 * (l2 * dl1 + l1 * dl2);
      g[4] = 4.0 * (l2 * dl0 + l0 * dl2);
      g[5] = 4.0 * (l1 * dl0 + l0 * dl1);
      break;
    case Family::P1Scalar:
    case Family::P1VectorControl:
      g[0] = dl0;
      g[1] = dl1;
      g[2] = dl2;
      break;
    case Family::P0VectorControl:
      g[0].setZero();
      break;
  }
}

ElementGeometry element_geometry(const TriMesh& mesh, int t) {
  const auto& tri = mesh.triangles[t];
  const Point& a = mesh.vertices[tri[0]];
  const Point& b = mesh.vertices[tri[1]];
  const Point& c = mesh.vertices[tri[2]];
  ElementGeometry geom;
  geom.v0 = a;
  geom.jacobian << b.x - a.x, c.x - a.x, b.y - a.y, c.y - a.y;
  geom.inv_jacobian_t = geom.jacobian.inverse().transpose();
  geom.area = 0.5 * geom.jacobian.determinant();
  return geom;
}

Point ElementGeometry::map(const std::array<double, 3>& bary,
                           const TriMesh& mesh, int t) const {
  const auto& tri = mesh.triangles[t];
  Point p;
  p.x = bary[0] * mesh.vertices[tri[0]].x + bary[1] * mesh.vertices[tri[1]].x +
        bary[2] * mesh.vertices[tri[2]].x;
  p.y = bary[0] * mesh.vertices[tri[0]].y + bary[1] * mesh.vertices[tri[1]].y +
        bary[2] * mesh.vertices[tri[2]].y;
  return p;
}

Eigen::Vector2d eval_vector_field(const FESpace& space,
                                  const Eigen::VectorXd& coeffs, int e,
                                  const std::array<double, 3>& bary) {
  double values[6];
  space.shape(bary, values);
  Eigen::Vector2d out = Eigen::Vector2d::Zero();
  for (int l = 0; l < space.local_scalar_dofs(); ++l)
    for (int c = 0; c < 2; ++c) out[c] += values[l] * coeffs[space.dof(e, l, c)];
  return out;
}

Eigen::Matrix2d eval_vector_gradient(const FESpace& space,
                                     const Eigen::VectorXd& coeffs, int e,
                                     const std::array<double, 3>& bary,
                                     const ElementGeometry& geom) {
  Eigen::Vector2d ref_grads[6];
  space.shape_ref_grad(bary, ref_grads);
  Eigen::Matrix2d out = Eigen::Matrix2d::Zero();
  for (int l = 0; l < space.local_scalar_dofs(); ++l) {
    const Eigen::Vector2d g = geom.inv_jacobian_t * ref_grads[l];
    for (int c = 0; c < 2; ++c)
      out.row(c) += coeffs[space.dof(e, l, c)] * g.transpose();
  }
  return out;
}

double eval_scalar_field(const FESpace& space, const Eigen::VectorXd& coeffs,
                         int e, const std::array<double, 3>& bary) {
  double values[6];
  space.shape(bary, values);
  double out = 0.0;
  for (int l = 0; l < space.local_scalar_dofs(); ++l)
    out += values[l] * coeffs[space.dof(e, l, 0)];
  return out;
}

}  // namespace nashstokes
