#include "nashstokes/nash.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <sstream>

namespace nashstokes {

const char* method_name(Method m) {
  switch (m) {
    case Method::FixedPoint: return "fixed-point";
    case Method::Gradient: return "gradient";
    case Method::ReducedCG: return "reduced-cg";
    case Method::DenseOracle: return "dense-oracle";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  if (name == "fixed-point") return Method::FixedPoint;
  if (name == "gradient") return Method::Gradient;
  if (name == "reduced-cg") return Method::ReducedCG;
  if (name == "dense-oracle") return Method::DenseOracle;
  throw std::runtime_error("unknown method: " + name);
}

GameOperator::GameOperator(const FESystem& sys, const StokesSolver& solver,
                           const GameSpec& spec)
    : sys_(&sys), solver_(&solver), spec_(&spec) {
  const ZeroVelocity zero;
  f_load_ = assemble_velocity_load(
      sys, spec.source ? *spec.source : static_cast<const VelocityField&>(zero));
  for (int i = 0; i < 2; ++i) {
    if (spec.players[i].alpha <= 0.0)
      throw std::runtime_error("alpha must be positive");
    target_load_[i] = assemble_velocity_load(
        sys, spec.players[i].target
                 ? *spec.players[i].target
                 : static_cast<const VelocityField&>(zero));
  }
}

double GameOperator::tracking_error_sq(const FlowField& state,
                                       int player) const {
  const TriMesh& mesh = sys_->mesh;
  const QuadratureRule& rule = norm_rule();
  const ZeroVelocity zero;
  const VelocityField& target =
      spec_->players[player].target
          ? *spec_->players[player].target
          : static_cast<const VelocityField&>(zero);
  double total = 0.0;
  for (int e = 0; e < mesh.n_triangles(); ++e) {
    const ElementGeometry geom = element_geometry(mesh, e);
    const double jac = 2.0 * geom.area;
    for (const auto& qp : rule.points) {
      const Point xy = geom.map(qp.bary, mesh, e);
      const Eigen::Vector2d diff =
          eval_vector_field(sys_->velocity, state.velocity, e, qp.bary) -
          target.value(e, qp.bary, xy);
      total += qp.weight * jac * diff.squaredNorm();
    }
  }
  return total;
}

double GameOperator::evaluate_cost(int player, const Vec& u1,
                                   const Vec& u2) const {
  const FlowField state = solver_->solve_state(f_load_, &u1, &u2);
  const Vec& u = (player == 0) ? u1 : u2;
  return 0.5 * tracking_error_sq(state, player) +
         0.5 * spec_->players[player].alpha * sys_->ctl_dot(u, u);
}

GameOperator::GradientEval GameOperator::gradients(const Vec& u1,
                                                   const Vec& u2) const {
  GradientEval out;
  out.state = solver_->solve_state(f_load_, &u1, &u2);
  const Vec my = sys_->forms.M_vel * out.state.velocity;
  for (int i = 0; i < 2; ++i) {
    out.adjoint[i] = solver_->solve_with_load(my - target_load_[i]);
    const Vec proj = sys_->ctl_mass_llt.solve(
        Vec(sys_->forms.C[i].transpose() * out.adjoint[i].velocity));
    out.g[i] = spec_->players[i].alpha * ((i == 0) ? u1 : u2) + proj;
    out.residual[i] = sys_->ctl_norm(out.g[i]);
  }
  return out;
}

Vec GameOperator::gradient(int player, const Vec& u1, const Vec& u2) const {
  return gradients(u1, u2).g[player];
}

EquilibriumBundle GameOperator::finalize(const Vec& u1, const Vec& u2,
                                         std::vector<double> history,
                                         int iterations, Method method) const {
  GradientEval eval = gradients(u1, u2);
  EquilibriumBundle bundle;
  bundle.state = std::move(eval.state);
  bundle.control[0] = u1;
  bundle.control[1] = u2;
  bundle.adjoint[0] = std::move(eval.adjoint[0]);
  bundle.adjoint[1] = std::move(eval.adjoint[1]);
  bundle.iterations = iterations;
  bundle.residual_history = std::move(history);
  bundle.method = method_name(method);
  return bundle;
}

namespace {

[[noreturn]] void report_divergence(const char* what,
                                    const std::vector<double>& history) {
  std::ostringstream msg;
  msg << what << " did not converge within the iteration budget; residuals:";
  const size_t n = history.size();
  for (size_t i = 0; i < std::min<size_t>(3, n); ++i) msg << " " << history[i];
  if (n > 6) msg << " ...";
  for (size_t i = (n > 6 ? n - 3 : std::min<size_t>(3, n)); i < n; ++i)
    msg << " " << history[i];
  throw DivergenceError(msg.str());
}

}  // namespace

EquilibriumBundle GameOperator::solve_fixed_point(
    const SolverOptions& opts) const {
  if (opts.theta <= 0.0 || opts.theta > 1.0)
    throw std::runtime_error("fixed-point damping must lie in (0, 1]");
  Vec u[2] = {zero_control(), zero_control()};
  std::vector<double> history;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const GradientEval eval = gradients(u[0], u[1]);
    history.push_back(std::max(eval.residual[0], eval.residual[1]));
    if (eval.residual[0] <= opts.tol && eval.residual[1] <= opts.tol)
      return finalize(u[0], u[1], std::move(history), iter, Method::FixedPoint);
    // u_i <- (1-theta) u_i - (theta/alpha_i) P B_i^* phi_i
    for (int i = 0; i < 2; ++i)
      u[i] -= (opts.theta / spec_->players[i].alpha) * eval.g[i];
  }
  report_divergence("fixed-point method", history);
}

EquilibriumBundle GameOperator::solve_gradient(
    const SolverOptions& opts) const {
  Vec u[2] = {zero_control(), zero_control()};
  std::vector<double> history;
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    GradientEval eval = gradients(u[0], u[1]);
    history.push_back(std::max(eval.residual[0], eval.residual[1]));
    if (eval.residual[0] <= opts.tol && eval.residual[1] <= opts.tol)
      return finalize(u[0], u[1], std::move(history), iter, Method::Gradient);
    for (int i = 0; i < 2; ++i) {
      if (opts.sequential && i == 1) eval = gradients(u[0], u[1]);
      const double gnorm2 = sys_->ctl_dot(eval.g[i], eval.g[i]);
      if (gnorm2 == 0.0) continue;
      // Exact quadratic line search along -g_i for player i alone.
      const FlowField sg = solver_->apply_Si(i, eval.g[i]);
      const double denom = sys_->vel_dot(sg.velocity, sg.velocity) +
                           spec_->players[i].alpha * gnorm2;
      u[i] -= (gnorm2 / denom) * eval.g[i];
    }
  }
  report_divergence("optimal-step gradient method", history);
}

void GameOperator::apply_reduced(const Vec& v1, const Vec& v2, Vec& out1,
                                 Vec& out2) const {
  const Vec load = sys_->forms.C[0] * v1 + sys_->forms.C[1] * v2;
  const FlowField sv = solver_->solve_with_load(load);
  const FlowField adj = solver_->solve_adjoint(sv.velocity);
  out1 = spec_->players[0].alpha * v1 +
         sys_->ctl_mass_llt.solve(
             Vec(sys_->forms.C[0].transpose() * adj.velocity));
  out2 = spec_->players[1].alpha * v2 +
         sys_->ctl_mass_llt.solve(
             Vec(sys_->forms.C[1].transpose() * adj.velocity));
}

EquilibriumBundle GameOperator::solve_reduced_cg(
    const SolverOptions& opts) const {
  // Right-hand side z_i = -S_i^*(y_0 - y_{i,d}).
  const FlowField y0 = solver_->solve_state(f_load_, nullptr, nullptr);
  const Vec my0 = sys_->forms.M_vel * y0.velocity;
  Vec z[2];
  for (int i = 0; i < 2; ++i) {
    const FlowField adj = solver_->solve_with_load(my0 - target_load_[i]);
    z[i] = -sys_->ctl_mass_llt.solve(
        Vec(sys_->forms.C[i].transpose() * adj.velocity));
  }

  // CG in the L2 control inner product; the CG residual is the negative of
  // the optimality residual, so the stopping rule matches the other methods.
  Vec u[2] = {zero_control(), zero_control()};
  Vec r[2] = {z[0], z[1]};
  Vec p[2] = {r[0], r[1]};
  Vec rp[2];
  std::vector<double> history;
  auto pair_dot = [&](const Vec* a, const Vec* b) {
    return sys_->ctl_dot(a[0], b[0]) + sys_->ctl_dot(a[1], b[1]);
  };
  double rr = pair_dot(r, r);
  for (int iter = 0; iter < opts.max_iter; ++iter) {
    const double res0 = sys_->ctl_norm(r[0]);
    const double res1 = sys_->ctl_norm(r[1]);
    history.push_back(std::max(res0, res1));
    if (res0 <= opts.tol && res1 <= opts.tol)
      return finalize(u[0], u[1], std::move(history), iter, Method::ReducedCG);

    apply_reduced(p[0], p[1], rp[0], rp[1]);
    const double curvature = pair_dot(p, rp);
    if (curvature <= 0.0)
      throw std::runtime_error(
          "reduced operator lost positive definiteness (internal fault)");
    const double step = rr / curvature;
    for (int i = 0; i < 2; ++i) {
      u[i] += step * p[i];
      r[i] -= step * rp[i];
    }
    const double rr_next = pair_dot(r, r);
    const double beta = rr_next / rr;
    rr = rr_next;
    for (int i = 0; i < 2; ++i) p[i] = r[i] + beta * p[i];
  }
  report_divergence("reduced conjugate gradient", history);
}

EquilibriumBundle GameOperator::solve_dense_oracle() const {
  const int nf = sys_->bc.n_free();
  const int np = sys_->pressure.dim();
  const int nc = sys_->control.dim();
  const int saddle = nf + np + 1;
  const int total = 3 * saddle + 2 * nc;
  if (total > 5000)
    throw std::runtime_error("dense oracle limited to 5000 dofs, got " +
                             std::to_string(total));

  const DirichletMap& bc = sys_->bc;
  const Eigen::MatrixXd A_ff =
      Eigen::MatrixXd(bc.restrict_both(sys_->forms.A));
  const Eigen::MatrixXd M_ff =
      Eigen::MatrixXd(bc.restrict_both(sys_->forms.M_vel));
  const Eigen::MatrixXd B_f = Eigen::MatrixXd(
      bc.restrict_rows(SpMat(sys_->forms.B.transpose())).transpose());
  Eigen::MatrixXd C_f[2];
  for (int i = 0; i < 2; ++i)
    C_f[i] = Eigen::MatrixXd(bc.restrict_rows(sys_->forms.C[i]));
  const Eigen::MatrixXd M_ctl = Eigen::MatrixXd(sys_->forms.M_ctl);
  const Vec& m_p = sys_->forms.m_p;

  // Unknowns: [y; p; l0 | phi1; r1; l1 | phi2; r2; l2 | u1; u2].
  const int off_u[2] = {3 * saddle, 3 * saddle + nc};
  Eigen::MatrixXd K = Eigen::MatrixXd::Zero(total, total);
  Vec rhs = Vec::Zero(total);

  auto put_saddle = [&](int off) {
    K.block(off, off, nf, nf) = A_ff;
    K.block(off, off + nf, nf, np) = B_f.transpose();
    K.block(off + nf, off, np, nf) = B_f;
    K.block(off + nf, off + nf + np, np, 1) = m_p;
    K.block(off + nf + np, off + nf, 1, np) = m_p.transpose();
  };

  put_saddle(0);
  for (int i = 0; i < 2; ++i) {
    K.block(0, off_u[i], nf, nc) = -C_f[i];
    const int off = saddle * (i + 1);
    put_saddle(off);
    K.block(off, 0, nf, nf) = -M_ff;
    rhs.segment(off, nf) = -bc.restrict_vec(target_load_[i]);
    K.block(off_u[i], off, nc, nf) = C_f[i].transpose();
    K.block(off_u[i], off_u[i], nc, nc) =
        spec_->players[i].alpha * M_ctl;
  }
  rhs.head(nf) = bc.restrict_vec(f_load_);

  const Eigen::PartialPivLU<Eigen::MatrixXd> lu(K);
  const Vec x = lu.solve(rhs);
  const double residual = (K * x - rhs).norm();
  if (residual > 1e-10 * std::max(rhs.norm(), 1.0))
    throw std::runtime_error(
        "dense oracle residual too large; monolithic system may be singular");

  EquilibriumBundle bundle;
  bundle.state.velocity = bc.extend(x.head(nf));
  bundle.state.pressure = x.segment(nf, np);
  bundle.state.multiplier = x[nf + np];
  for (int i = 0; i < 2; ++i) {
    const int off = saddle * (i + 1);
    bundle.adjoint[i].velocity = bc.extend(x.segment(off, nf));
    bundle.adjoint[i].pressure = x.segment(off + nf, np);
    bundle.adjoint[i].multiplier = x[off + nf + np];
    bundle.control[i] = x.segment(off_u[i], nc);
  }
  bundle.iterations = 1;
  const GradientEval eval = gradients(bundle.control[0], bundle.control[1]);
  bundle.residual_history = {std::max(eval.residual[0], eval.residual[1])};
  bundle.method = method_name(Method::DenseOracle);
  return bundle;
}

EquilibriumBundle GameOperator::solve(const SolverOptions& opts) const {
  switch (opts.method) {
    case Method::FixedPoint: return solve_fixed_point(opts);
    case Method::Gradient: return solve_gradient(opts);
    case Method::ReducedCG: return solve_reduced_cg(opts);
    case Method::DenseOracle: return solve_dense_oracle();
  }
  throw std::runtime_error("unreachable");
}

}  // namespace nashstokes
