#include "nashstokes/target.hpp"

#include <Eigen/SparseCholesky>
#include <stdexcept>

namespace nashstokes {

namespace {

// Triangles carrying `label`, with vertices renumbered and boundary flags
// recomputed from the submesh's own edge audit.
TriMesh extract_submesh(const TriMesh& mesh, SubdomainLabel label,
                        std::vector<int>& parent_to_sub) {
  TriMesh sub;
  parent_to_sub.assign(mesh.n_triangles(), -1);
  std::vector<int> vertex_map(mesh.n_vertices(), -1);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    if (mesh.subdomain_labels[t] != label) continue;
    parent_to_sub[t] = sub.n_triangles();
    std::array<int, 3> tri;
    for (int k = 0; k < 3; ++k) {
      const int v = mesh.triangles[t][k];
      if (vertex_map[v] < 0) {
        vertex_map[v] = sub.n_vertices();
        sub.vertices.push_back(mesh.vertices[v]);
      }
      tri[k] = vertex_map[v];
    }
    sub.triangles.push_back(tri);
    sub.subdomain_labels.push_back(label);
  }
  if (sub.triangles.empty())
    throw std::runtime_error(std::string("no triangles carry label ") +
                             label_name(label));

  sub.boundary_vertex.assign(sub.n_vertices(), 0);
  const EdgeTable edges = build_edge_table(sub);
  for (int e = 0; e < edges.n_edges(); ++e) {
    if (!edges.boundary_edge[e]) continue;
    sub.boundary_vertex[edges.edges[e][0]] = 1;
    sub.boundary_vertex[edges.edges[e][1]] = 1;
  }
  return sub;
}

}  // namespace

Streamfunction solve_streamfunction(const TriMesh& mesh, SubdomainLabel label) {
  Streamfunction sf;
  sf.submesh = extract_submesh(mesh, label, sf.parent_to_sub);
  sf.subedges = build_edge_table(sf.submesh);

  // The vector space's scalar layer doubles as a P2 scalar space.
  const FESpace space(sf.submesh, Family::P2Vector, &sf.subedges);
  const int n = space.scalar_dim();
  const int nl = space.local_scalar_dofs();
  const QuadratureRule& rule = assembly_rule();

  std::vector<Eigen::Triplet<double>> trips;
  Vec load = Vec::Zero(n);
  std::vector<double> shapes(nl);
  std::vector<Eigen::Vector2d> ref_grads(nl), grads(nl);
  for (int t = 0; t < sf.submesh.n_triangles(); ++t) {
    const ElementGeometry geom = element_geometry(sf.submesh, t);
    for (const auto& qp : rule.points) {
      const auto& bary = qp.bary;
      const double w = 2.0 * geom.area * qp.weight;
      space.shape(bary, shapes.data());
      space.shape_ref_grad(bary, ref_grads.data());
      for (int l = 0; l < nl; ++l)
        grads[l] = geom.inv_jacobian_t * ref_grads[l];
      for (int i = 0; i < nl; ++i) {
        const int gi = space.scalar_dof(t, i);
        load[gi] += w * shapes[i];
        for (int j = 0; j < nl; ++j)
          trips.emplace_back(gi, space.scalar_dof(t, j),
                             w * grads[i].dot(grads[j]));
      }
    }
  }

  // psi = 0 on the submesh boundary: vertex dofs on boundary vertices, edge
  // dofs on boundary edges.
  std::vector<char> fixed(n, 0);
  for (int v = 0; v < sf.submesh.n_vertices(); ++v)
    if (sf.submesh.boundary_vertex[v]) fixed[v] = 1;
  for (int e = 0; e < sf.subedges.n_edges(); ++e)
    if (sf.subedges.boundary_edge[e]) fixed[sf.submesh.n_vertices() + e] = 1;

  std::vector<int> to_free(n, -1);
  std::vector<int> free_dofs;
  for (int i = 0; i < n; ++i)
    if (!fixed[i]) {
      to_free[i] = static_cast<int>(free_dofs.size());
      free_dofs.push_back(i);
    }

  std::vector<Eigen::Triplet<double>> free_trips;
  for (const auto& tr : trips)
    if (to_free[tr.row()] >= 0 && to_free[tr.col()] >= 0)
      free_trips.emplace_back(to_free[tr.row()], to_free[tr.col()],
                              tr.value());
  SpMat K(static_cast<int>(free_dofs.size()),
          static_cast<int>(free_dofs.size()));
  K.setFromTriplets(free_trips.begin(), free_trips.end());

  Vec rhs(free_dofs.size());
  for (std::size_t i = 0; i < free_dofs.size(); ++i)
    rhs[static_cast<int>(i)] = load[free_dofs[i]];

  Eigen::SimplicialLLT<SpMat> llt(K);
  if (llt.info() != Eigen::Success)
    throw std::runtime_error("streamfunction stiffness factorization failed");
  const Vec sol = llt.solve(rhs);

  sf.psi = Vec::Zero(n);
  for (std::size_t i = 0; i < free_dofs.size(); ++i)
    sf.psi[free_dofs[i]] = sol[static_cast<int>(i)];
  return sf;
}

namespace {

class StreamfunctionVelocity final : public VelocityField {
 public:
  explicit StreamfunctionVelocity(std::shared_ptr<const Streamfunction> sf)
      : sf_(std::move(sf)),
        space_(sf_->submesh, Family::P2Vector, &sf_->subedges) {}

  Eigen::Vector2d value(int tri, const std::array<double, 3>& bary,
                        const Point&) const override {
    const int s = sf_->parent_to_sub[tri];
    if (s < 0) return Eigen::Vector2d::Zero();
    const ElementGeometry geom = element_geometry(sf_->submesh, s);
    std::vector<Eigen::Vector2d> ref_grads(space_.local_scalar_dofs());
    space_.shape_ref_grad(bary, ref_grads.data());
    Eigen::Vector2d grad = Eigen::Vector2d::Zero();
    for (int l = 0; l < space_.local_scalar_dofs(); ++l)
      grad += sf_->psi[space_.scalar_dof(s, l)] *
              (geom.inv_jacobian_t * ref_grads[l]);
    return Eigen::Vector2d(grad.y(), -grad.x());
  }

 private:
  std::shared_ptr<const Streamfunction> sf_;
  FESpace space_;
};

}  // namespace

std::shared_ptr<const VelocityField> streamfunction_target(
    std::shared_ptr<const Streamfunction> psi) {
  return std::make_shared<StreamfunctionVelocity>(std::move(psi));
}

}  // namespace nashstokes
