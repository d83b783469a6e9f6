#pragma once

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <functional>
#include <memory>

#include "nashstokes/fespace.hpp"

namespace nashstokes {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

// Control subdomain: whole domain or a set of triangle labels.
struct SubdomainSelector {
  bool all = true;
  std::vector<SubdomainLabel> labels;

  bool contains(SubdomainLabel label) const;
  static SubdomainSelector whole();
  static SubdomainSelector only(std::vector<SubdomainLabel> labels);
};

// Element-aware velocity-valued function: forcing terms, targets, exact
// solutions. Discrete fields use the barycentric point, analytic ones the
// physical point.
class VelocityField {
 public:
  virtual ~VelocityField() = default;
  virtual Eigen::Vector2d value(int tri, const std::array<double, 3>& bary,
                                const Point& xy) const = 0;
};

class AnalyticVelocity final : public VelocityField {
 public:
  using Fn = std::function<Eigen::Vector2d(double, double)>;
  explicit AnalyticVelocity(Fn fn) : fn_(std::move(fn)) {}
  Eigen::Vector2d value(int, const std::array<double, 3>&,
                        const Point& xy) const override {
    return fn_(xy.x, xy.y);
  }

 private:
  Fn fn_;
};

class ZeroVelocity final : public VelocityField {
 public:
  Eigen::Vector2d value(int, const std::array<double, 3>&,
                        const Point&) const override {
    return Eigen::Vector2d::Zero();
  }
};

// FE field viewed as a VelocityField (non-owning coefficient reference).
class DiscreteVelocity final : public VelocityField {
 public:
  DiscreteVelocity(const FESpace& space, const Vec& coeffs)
      : space_(&space), coeffs_(&coeffs) {}
  Eigen::Vector2d value(int tri, const std::array<double, 3>& bary,
                        const Point&) const override {
    return eval_vector_field(*space_, *coeffs_, tri, bary);
  }

 private:
  const FESpace* space_;
  const Vec* coeffs_;
};

struct AssembledForms {
  SpMat A;          // a(w,z) = nu (grad w, grad z), velocity x velocity
  SpMat B;          // b(z,q) = -(q, div z), pressure rows x velocity cols
  SpMat M_vel;      // velocity mass
  SpMat M_pres;     // pressure mass
  SpMat M_ctl;      // control mass (both players share the control family)
  SpMat C[2];       // (chi_{omega_i} v_i, w), velocity rows x control cols
  Vec m_p;          // pressure mean vector, entries int q_j
};

// Homogeneous Dirichlet constraints on the velocity space.
struct DirichletMap {
  std::vector<int> free_dofs;     // retained velocity dofs, ascending
  std::vector<int> full_to_free;  // -1 for eliminated dofs
  int n_eliminated = 0;

  int n_free() const { return static_cast<int>(free_dofs.size()); }
  Vec restrict_vec(const Vec& full) const;
  Vec extend(const Vec& reduced) const;  // eliminated dofs set to zero
  SpMat restrict_rows(const SpMat& m) const;
  SpMat restrict_both(const SpMat& m) const;
};

// Everything assembled on one mesh. Addresses must stay stable (spaces point
// into the mesh), hence heap construction only.
struct FESystem {
  TriMesh mesh;
  EdgeTable edges;
  FESpace velocity;
  FESpace pressure;
  FESpace control;
  double nu;
  SubdomainSelector omega[2];
  AssembledForms forms;
  DirichletMap bc;
  Eigen::SimplicialLLT<SpMat> ctl_mass_llt;

  FESystem(const FESystem&) = delete;
  FESystem& operator=(const FESystem&) = delete;

  double h() const;

  // L2 inner products via the assembled mass matrices.
  double ctl_dot(const Vec& a, const Vec& b) const;
  double ctl_norm(const Vec& a) const;
  double vel_dot(const Vec& a, const Vec& b) const;
  double vel_norm(const Vec& a) const;

 private:
  friend std::unique_ptr<FESystem> build_system(TriMesh, double, int,
                                                SubdomainSelector,
                                                SubdomainSelector);
  FESystem(TriMesh m, double nu_, int control_degree, SubdomainSelector o1,
           SubdomainSelector o2);
};

std::unique_ptr<FESystem> build_system(
    TriMesh mesh, double nu, int control_degree = 1,
    SubdomainSelector omega1 = SubdomainSelector::whole(),
    SubdomainSelector omega2 = SubdomainSelector::whole());

DirichletMap make_dirichlet_map(const FESpace& velocity,
                                const EdgeTable& edges);

AssembledForms assemble(const FESpace& velocity, const FESpace& pressure,
                        const FESpace& control, double nu,
                        const SubdomainSelector& omega1,
                        const SubdomainSelector& omega2);

// Load vector l_j = int f . w_j over the velocity space (degree-8 rule).
Vec assemble_velocity_load(const FESystem& sys, const VelocityField& f);
// Same against the control basis, restricted to omega_i.
Vec assemble_control_load(const FESystem& sys, const VelocityField& f,
                          int player);

// L2-projection of a velocity-valued function onto the control space.
Vec l2_project_control(const FESystem& sys, const VelocityField& field);

}  // namespace nashstokes
