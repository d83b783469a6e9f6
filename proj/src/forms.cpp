#include "nashstokes/forms.hpp"

#include <algorithm>

namespace nashstokes {

bool SubdomainSelector::contains(SubdomainLabel label) const {
  if (all) return true;
  return std::find(labels.begin(), labels.end(), label) != labels.end();
}

SubdomainSelector SubdomainSelector::whole() { return SubdomainSelector{}; }

SubdomainSelector SubdomainSelector::only(std::vector<SubdomainLabel> labels) {
  SubdomainSelector s;
  s.all = false;
  s.labels = std::move(labels);
  return s;
}

Vec DirichletMap::restrict_vec(const Vec& full) const {
  Vec out(n_free());
  for (int i = 0; i < n_free(); ++i) out[i] = full[free_dofs[i]];
  return out;
}

Vec DirichletMap::extend(const Vec& reduced) const {
  Vec out = Vec::Zero(full_to_free.size());
  for (int i = 0; i < n_free(); ++i) out[free_dofs[i]] = reduced[i];
  return out;
}

SpMat DirichletMap::restrict_rows(const SpMat& m) const {
  std::vector<Eigen::Triplet<double>> triplets;
  for (int col = 0; col < m.outerSize(); ++col)
    for (SpMat::InnerIterator it(m, col); it; ++it) {
      const int r = full_to_free[it.row()];
      if (r >= 0) triplets.emplace_back(r, it.col(), it.value());
    }
  SpMat out(n_free(), m.cols());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

SpMat DirichletMap::restrict_both(const SpMat& m) const {
  std::vector<Eigen::Triplet<double>> triplets;
  for (int col = 0; col < m.outerSize(); ++col)
    for (SpMat::InnerIterator it(m, col); it; ++it) {
      const int r = full_to_free[it.row()];
      const int c = full_to_free[it.col()];
      if (r >= 0 && c >= 0) triplets.emplace_back(r, c, it.value());
    }
  SpMat out(n_free(), n_free());
  out.setFromTriplets(triplets.begin(), triplets.end());
  return out;
}

DirichletMap make_dirichlet_map(const FESpace& velocity,
                                const EdgeTable& edges) {
  const TriMesh& mesh = velocity.mesh();
  const int sdim = velocity.scalar_dim();
  std::vector<char> constrained(sdim, 0);
  for (int v = 0; v < mesh.n_vertices(); ++v)
    if (mesh.boundary_vertex[v]) constrained[v] = 1;
  for (int e = 0; e < edges.n_edges(); ++e)
    if (edges.boundary_edge[e]) constrained[mesh.n_vertices() + e] = 1;

  DirichletMap map;
  map.full_to_free.assign(velocity.dim(), -1);
  for (int c = 0; c < velocity.components(); ++c)
    for (int s = 0; s < sdim; ++s) {
      const int g = c * sdim + s;
      if (constrained[s]) {
        ++map.n_eliminated;
      } else {
        map.full_to_free[g] = static_cast<int>(map.free_dofs.size());
        map.free_dofs.push_back(g);
      }
    }
  return map;
}

namespace {

using Triplets = std::vector<Eigen::Triplet<double>>;

SpMat from_triplets(int rows, int cols, const Triplets& t) {
  SpMat m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

AssembledForms assemble(const FESpace& velocity, const FESpace& pressure,
                        const FESpace& control, double nu,
                        const SubdomainSelector& omega1,
                        const SubdomainSelector& omega2) {
  const TriMesh& mesh = velocity.mesh();
  const QuadratureRule& rule = assembly_rule();
  const int nlv = velocity.local_scalar_dofs();
  const int nlp = pressure.local_scalar_dofs();
  const int nlc = control.local_scalar_dofs();

  Triplets tA, tB, tMv, tMp, tMc, tC[2];
  Vec m_p = Vec::Zero(pressure.dim());
  const SubdomainSelector* omegas[2] = {&omega1, &omega2};

  double vel_values[6], pres_values[3], ctl_values[3];
  Eigen::Vector2d vel_ref_grads[6];

  for (int e = 0; e < mesh.n_triangles(); ++e) {
    const ElementGeometry geom = element_geometry(mesh, e);
    const double jac = 2.0 * geom.area;  // |det J|
    const bool in_omega[2] = {
        omegas[0]->contains(mesh.subdomain_labels[e]),
        omegas[1]->contains(mesh.subdomain_labels[e]),
    };

    Eigen::MatrixXd ka = Eigen::MatrixXd::Zero(nlv, nlv);
    Eigen::MatrixXd kmv = Eigen::MatrixXd::Zero(nlv, nlv);
    Eigen::MatrixXd kmp = Eigen::MatrixXd::Zero(nlp, nlp);
    Eigen::MatrixXd kmc = Eigen::MatrixXd::Zero(nlc, nlc);
    Eigen::MatrixXd kc = Eigen::MatrixXd::Zero(nlv, nlc);
    // b-form couples pressure with each velocity component separately.
    Eigen::MatrixXd kb[2] = {Eigen::MatrixXd::Zero(nlp, nlv),
                             Eigen::MatrixXd::Zero(nlp, nlv)};
    Eigen::VectorXd kmean = Eigen::VectorXd::Zero(nlp);

    for (const auto& qp : rule.points) {
      const double w = qp.weight * jac;
      velocity.shape(qp.bary, vel_values);
      velocity.shape_ref_grad(qp.bary, vel_ref_grads);
      pressure.shape(qp.bary, pres_values);
      control.shape(qp.bary, ctl_values);

      Eigen::Vector2d grads[6];
      for (int i = 0; i < nlv; ++i)
        grads[i] = geom.inv_jacobian_t * vel_ref_grads[i];

      for (int i = 0; i < nlv; ++i)
        for (int j = 0; j < nlv; ++j) {
          ka(i, j) += w * nu * grads[i].dot(grads[j]);
          kmv(i, j) += w * vel_values[i] * vel_values[j];
        }
      for (int i = 0; i < nlp; ++i) {
        for (int j = 0; j < nlp; ++j)
          kmp(i, j) += w * pres_values[i] * pres_values[j];
        for (int j = 0; j < nlv; ++j)
          for (int c = 0; c < 2; ++c)
            kb[c](i, j) -= w * pres_values[i] * grads[j][c];
        kmean[i] += w * pres_values[i];
      }
      for (int i = 0; i < nlc; ++i) {
        for (int j = 0; j < nlc; ++j)
          kmc(i, j) += w * ctl_values[i] * ctl_values[j];
        for (int j = 0; j < nlv; ++j)
          kc(j, i) += w * ctl_values[i] * vel_values[j];
      }
    }

    for (int i = 0; i < nlv; ++i)
      for (int j = 0; j < nlv; ++j)
        for (int c = 0; c < 2; ++c) {
          tA.emplace_back(velocity.dof(e, i, c), velocity.dof(e, j, c),
                          ka(i, j));
          tMv.emplace_back(velocity.dof(e, i, c), velocity.dof(e, j, c),
                           kmv(i, j));
        }
    for (int i = 0; i < nlp; ++i) {
      for (int j = 0; j < nlp; ++j)
        tMp.emplace_back(pressure.scalar_dof(e, i), pressure.scalar_dof(e, j),
                         kmp(i, j));
      for (int j = 0; j < nlv; ++j)
        for (int c = 0; c < 2; ++c)
          tB.emplace_back(pressure.scalar_dof(e, i), velocity.dof(e, j, c),
                          kb[c](i, j));
      m_p[pressure.scalar_dof(e, i)] += kmean[i];
    }
    for (int i = 0; i < nlc; ++i) {
      for (int j = 0; j < nlc; ++j)
        for (int c = 0; c < 2; ++c)
          tMc.emplace_back(control.dof(e, i, c), control.dof(e, j, c),
                           kmc(i, j));
      for (int p = 0; p < 2; ++p)
        if (in_omega[p])
          for (int j = 0; j < nlv; ++j)
            for (int c = 0; c < 2; ++c)
              tC[p].emplace_back(velocity.dof(e, j, c), control.dof(e, i, c),
                                 kc(j, i));
    }
  }

  AssembledForms forms;
  forms.A = from_triplets(velocity.dim(), velocity.dim(), tA);
  forms.B = from_triplets(pressure.dim(), velocity.dim(), tB);
  forms.M_vel = from_triplets(velocity.dim(), velocity.dim(), tMv);
  forms.M_pres = from_triplets(pressure.dim(), pressure.dim(), tMp);
  forms.M_ctl = from_triplets(control.dim(), control.dim(), tMc);
  for (int p = 0; p < 2; ++p)
    forms.C[p] = from_triplets(velocity.dim(), control.dim(), tC[p]);
  forms.m_p = m_p;
  return forms;
}

FESystem::FESystem(TriMesh m, double nu_, int control_degree,
                   SubdomainSelector o1, SubdomainSelector o2)
    : mesh(std::move(m)),
      edges(build_edge_table(mesh)),
      velocity(mesh, Family::P2Vector, &edges),
      pressure(mesh, Family::P1Scalar, nullptr),
      control(mesh,
              control_degree == 0 ? Family::P0VectorControl
                                  : Family::P1VectorControl,
              nullptr),
      nu(nu_),
      omega{std::move(o1), std::move(o2)} {
  if (control_degree != 0 && control_degree != 1)
    throw std::runtime_error("control degree must be 0 or 1");
  if (nu <= 0.0) throw std::runtime_error("viscosity must be positive");
  forms = assemble(velocity, pressure, control, nu, omega[0], omega[1]);
  bc = make_dirichlet_map(velocity, edges);
  ctl_mass_llt.compute(forms.M_ctl);
  if (ctl_mass_llt.info() != Eigen::Success)
    throw std::runtime_error("control mass matrix factorization failed");
}

std::unique_ptr<FESystem> build_system(TriMesh mesh, double nu,
                                       int control_degree,
                                       SubdomainSelector omega1,
                                       SubdomainSelector omega2) {
  return std::unique_ptr<FESystem>(new FESystem(
      std::move(mesh), nu, control_degree, std::move(omega1),
      std::move(omega2)));
}

double FESystem::h() const { return mesh_size(mesh).h; }

double FESystem::ctl_dot(const Vec& a, const Vec& b) const {
  return a.dot(forms.M_ctl * b);
}
double FESystem::ctl_norm(const Vec& a) const {
  return std::sqrt(std::max(0.0, ctl_dot(a, a)));
}
double FESystem::vel_dot(const Vec& a, const Vec& b) const {
  return a.dot(forms.M_vel * b);
}
double FESystem::vel_norm(const Vec& a) const {
  return std::sqrt(std::max(0.0, vel_dot(a, a)));
}

namespace {

Vec assemble_load(const FESystem& sys, const FESpace& space,
                  const VelocityField& f) {
  const TriMesh& mesh = sys.mesh;
  const QuadratureRule& rule = norm_rule();
  Vec load = Vec::Zero(space.dim());
  double values[6];
  for (int e = 0; e < mesh.n_triangles(); ++e) {
    const ElementGeometry geom = element_geometry(mesh, e);
    const double jac = 2.0 * geom.area;
    for (const auto& qp : rule.points) {
      const Point xy = geom.map(qp.bary, mesh, e);
      const Eigen::Vector2d fv = f.value(e, qp.bary, xy);
      space.shape(qp.bary, values);
      const double w = qp.weight * jac;
      for (int l = 0; l < space.local_scalar_dofs(); ++l)
        for (int c = 0; c < 2; ++c)
          load[space.dof(e, l, c)] += w * values[l] * fv[c];
    }
  }
  return load;
}

}  // namespace

Vec assemble_velocity_load(const FESystem& sys, const VelocityField& f) {
  return assemble_load(sys, sys.velocity, f);
}

Vec assemble_control_load(const FESystem& sys, const VelocityField& f,
                          int /*player*/) {
  return assemble_load(sys, sys.control, f);
}

Vec l2_project_control(const FESystem& sys, const VelocityField& field) {
  const Vec rhs = assemble_load(sys, sys.control, field);
  return sys.ctl_mass_llt.solve(rhs);
}

}  // namespace nashstokes
