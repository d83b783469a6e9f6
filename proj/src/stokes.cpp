#include "nashstokes/stokes.hpp"

#include <stdexcept>

namespace nashstokes {

StokesSolver::StokesSolver(const FESystem& sys) : sys_(&sys) {
  const DirichletMap& bc = sys.bc;
  nf_ = bc.n_free();
  np_ = sys.pressure.dim();

  const SpMat A_ff = bc.restrict_both(sys.forms.A);
  const SpMat B_f = bc.restrict_rows(
      SpMat(sys.forms.B.transpose())).transpose();  // pressure x free velocity

  std::vector<Eigen::Triplet<double>> triplets;
  for (int col = 0; col < A_ff.outerSize(); ++col)
    for (SpMat::InnerIterator it(A_ff, col); it; ++it)
      triplets.emplace_back(it.row(), it.col(), it.value());
  for (int col = 0; col < B_f.outerSize(); ++col)
    for (SpMat::InnerIterator it(B_f, col); it; ++it) {
      triplets.emplace_back(nf_ + it.row(), it.col(), it.value());
      triplets.emplace_back(it.col(), nf_ + it.row(), it.value());
    }
  for (int j = 0; j < np_; ++j) {
    const double mj = sys.forms.m_p[j];
    triplets.emplace_back(nf_ + j, nf_ + np_, mj);
    triplets.emplace_back(nf_ + np_, nf_ + j, mj);
  }

  saddle_.resize(nf_ + np_ + 1, nf_ + np_ + 1);
  saddle_.setFromTriplets(triplets.begin(), triplets.end());
  lu_.compute(saddle_);
  if (lu_.info() != Eigen::Success)
    throw std::runtime_error(
        "saddle matrix factorization failed: constrained Stokes system is "
        "singular");
}

FlowField StokesSolver::solve_with_load(const Vec& velocity_load) const {
  Vec rhs = Vec::Zero(nf_ + np_ + 1);
  rhs.head(nf_) = sys_->bc.restrict_vec(velocity_load);
  const Vec x = lu_.solve(rhs);

  FlowField field;
  field.velocity = sys_->bc.extend(x.head(nf_));
  field.pressure = x.segment(nf_, np_);
  field.multiplier = x[nf_ + np_];

  const double rhs_norm = rhs.norm();
  const double residual = (saddle_ * x - rhs).norm();
  if (rhs_norm > 0.0 && residual > 1e-10 * rhs_norm)
    throw std::runtime_error("saddle solve residual exceeds 1e-10 relative");
  return field;
}

FlowField StokesSolver::solve_state(const Vec& f_load, const Vec* u1,
                                    const Vec* u2) const {
  Vec load = f_load;
  if (u1 != nullptr) load += sys_->forms.C[0] * (*u1);
  if (u2 != nullptr) load += sys_->forms.C[1] * (*u2);
  return solve_with_load(load);
}

FlowField StokesSolver::solve_adjoint(const Vec& residual_velocity) const {
  return solve_with_load(sys_->forms.M_vel * residual_velocity);
}

FlowField StokesSolver::apply_Si(int player, const Vec& control) const {
  return solve_with_load(sys_->forms.C[player] * control);
}

Vec StokesSolver::apply_Si_star(int player, const Vec& velocity_coeffs) const {
  const FlowField adjoint = solve_adjoint(velocity_coeffs);
  return sys_->ctl_mass_llt.solve(
      Vec(sys_->forms.C[player].transpose() * adjoint.velocity));
}

FlowDiagnostics check_flow(const FESystem& sys, const FlowField& field,
                           const Vec& velocity_load) {
  FlowDiagnostics d{};
  const Vec av = sys.forms.A * field.velocity +
                 sys.forms.B.transpose() * field.pressure - velocity_load;
  // Residual is only meaningful on the free dofs (constrained rows carry the
  // boundary reaction forces).
  double res2 = 0.0;
  for (int g : sys.bc.free_dofs) res2 += av[g] * av[g];
  const Vec div = sys.forms.B * field.velocity;
  res2 += div.squaredNorm();
  const double scale = std::max(velocity_load.norm(), 1e-30);
  d.saddle_residual = std::sqrt(res2) / scale;

  const double vnorm = std::max(sys.vel_norm(field.velocity), 1e-30);
  d.divergence = div.cwiseAbs().maxCoeff() / vnorm;
  d.pressure_mean = std::abs(sys.forms.m_p.dot(field.pressure));
  return d;
}

}  // namespace nashstokes
