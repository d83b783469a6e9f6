#pragma once

#include <Eigen/SparseLU>

#include "nashstokes/forms.hpp"

namespace nashstokes {

// Discrete velocity/pressure pair with the mean-pressure multiplier.
struct FlowField {
  Vec velocity;  // full P2 vector coefficients (Dirichlet dofs zero)
  Vec pressure;  // P1 coefficients, mean-zero
  double multiplier = 0.0;
};

// Direct factorization of the bordered saddle matrix
//   [ A  B^T  0  ]
//   [ B   0  m_p ]
//   [ 0 m_p^T  0 ]
// on the Dirichlet-constrained velocity subspace. The factorization is
// computed once per mesh and reused for every state and adjoint solve.
class StokesSolver {
 public:
  explicit StokesSolver(const FESystem& sys);

  const FESystem& system() const { return *sys_; }

  // State solve: forcing load plus control action C_1 u_1 + C_2 u_2.
  // Null controls are treated as zero. `f_load` is a full velocity load
  // vector (use assemble_velocity_load for analytic forcing).
  FlowField solve_state(const Vec& f_load, const Vec* u1, const Vec* u2) const;

  // Adjoint-type solve with forcing (residual, w) for a velocity-space field.
  FlowField solve_adjoint(const Vec& residual_velocity) const;

  // Same saddle solve for an arbitrary full velocity load vector.
  FlowField solve_with_load(const Vec& velocity_load) const;

  // Control-to-state map S_i and its adjoint in the control space,
  // S_i^* w = M_ctl^{-1} C_i^T S^* w.
  FlowField apply_Si(int player, const Vec& control) const;
  Vec apply_Si_star(int player, const Vec& velocity_coeffs) const;

 private:
  const FESystem* sys_;
  SpMat saddle_;
  Eigen::SparseLU<SpMat> lu_;
  int nf_;  // free velocity dofs
  int np_;  // pressure dofs
};

// Post-solve invariant checks: relative saddle residual, discrete
// divergence-freeness, zero-mean pressure. Throws on violation.
struct FlowDiagnostics {
  double saddle_residual;   // relative to the load norm
  double divergence;        // max |b(y_h, q_j)| / ||y_h||_L2
  double pressure_mean;     // |int p_h|
};
FlowDiagnostics check_flow(const FESystem& sys, const FlowField& field,
                           const Vec& velocity_load);

}  // namespace nashstokes
