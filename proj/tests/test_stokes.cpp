#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "nashstokes/errors.hpp"

using namespace nashstokes;

namespace {

struct Fixture {
  std::unique_ptr<FESystem> sys;
  std::unique_ptr<StokesSolver> solver;
  ManufacturedBundle exact;

  explicit Fixture(int n, double nu = 1.0) {
    sys = build_system(generate(DomainSpec::unit_square(n)), nu);
    solver = std::make_unique<StokesSolver>(*sys);
    exact = make_manufactured(nu, 1.0, 0.5, sys->omega[0], sys->omega[1]);
  }

  // Forcing of the exact state: f plus both exact controls.
  Vec state_load() const {
    const ManufacturedBundle& ex = exact;
    return assemble_velocity_load(
        *sys, AnalyticVelocity([&ex](double x, double y) {
          Eigen::Vector2d out = ex.f(x, y);
          for (int i = 0; i < 2; ++i) out += ex.u[i].value(x, y);
          return out;
        }));
  }
};

Vec random_vec(int n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss;
  Vec v(n);
  for (int i = 0; i < n; ++i) v[i] = gauss(rng);
  return v;
}

}  // namespace

TEST_CASE("velocity error shrinks by ~2^3 in L2 and ~2^2 in H1 per halving") {
  const Fixture coarse(8), fine(16);
  const FlowField yc = coarse.solver->solve_with_load(coarse.state_load());
  const FlowField yf = fine.solver->solve_with_load(fine.state_load());
  const ErrNorms ec =
      vector_field_error(coarse.sys->velocity, yc.velocity, coarse.exact.y);
  const ErrNorms ef =
      vector_field_error(fine.sys->velocity, yf.velocity, fine.exact.y);
  CHECK(ec.l2 / ef.l2 > 6.0);
  CHECK(ec.l2 / ef.l2 < 10.5);
  CHECK(ec.h1_semi / ef.h1_semi > 3.0);
  CHECK(ec.h1_semi / ef.h1_semi < 5.5);
  const double pc =
      scalar_field_error_l2(coarse.sys->pressure, yc.pressure, coarse.exact.p);
  const double pf =
      scalar_field_error_l2(fine.sys->pressure, yf.pressure, fine.exact.p);
  CHECK(pc / pf > 3.0);
  CHECK(pc / pf < 7.5);
}

TEST_CASE("solve invariants: saddle residual, divergence, pressure mean") {
  const Fixture fix(8, 0.7);
  const Vec load = fix.state_load();
  const FlowField y = fix.solver->solve_with_load(load);
  const FlowDiagnostics d = check_flow(*fix.sys, y, load);
  CHECK(d.saddle_residual <= 1e-10);
  CHECK(d.divergence <= 1e-10);
  CHECK(d.pressure_mean <= 1e-10);
  // Velocity honors the no-slip constraint exactly.
  for (int dof = 0; dof < fix.sys->velocity.dim(); ++dof)
    if (fix.sys->bc.full_to_free[dof] < 0) CHECK(y.velocity[dof] == 0.0);
}

TEST_CASE("solution operator is linear") {
  const Fixture fix(4);
  const int n = fix.sys->velocity.dim();
  const Vec l1 = random_vec(n, 1);
  const Vec l2 = random_vec(n, 2);
  const FlowField y1 = fix.solver->solve_with_load(l1);
  const FlowField y2 = fix.solver->solve_with_load(l2);
  const FlowField y12 = fix.solver->solve_with_load(l1 + 2.0 * l2);
  CHECK((y12.velocity - y1.velocity - 2.0 * y2.velocity).norm() <=
        1e-9 * y12.velocity.norm());
  CHECK((y12.pressure - y1.pressure - 2.0 * y2.pressure).norm() <=
        1e-8 * std::max(1.0, y12.pressure.norm()));
}

TEST_CASE("solution operator is self-adjoint") {
  const Fixture fix(6);
  const int n = fix.sys->velocity.dim();
  for (unsigned seed = 0; seed < 5; ++seed) {
    const Vec l1 = random_vec(n, 10 + seed);
    const Vec l2 = random_vec(n, 20 + seed);
    const double a = l2.dot(fix.solver->solve_with_load(l1).velocity);
    const double b = l1.dot(fix.solver->solve_with_load(l2).velocity);
    CHECK(a == doctest::Approx(b).epsilon(1e-9));
  }
}

TEST_CASE("control-to-state map and its adjoint are dual pairs") {
  auto sys = build_system(
      generate(DomainSpec::multi_domain(4)), 1.0, 1,
      SubdomainSelector::only({SubdomainLabel::Omega1}),
      SubdomainSelector::only({SubdomainLabel::O2}));
  const StokesSolver solver(*sys);
  for (int player = 0; player < 2; ++player) {
    const Vec u = random_vec(sys->control.dim(), 31 + player);
    const Vec w = random_vec(sys->velocity.dim(), 41 + player);
    // (S_i u, w)_{M_vel} = (u, S_i^* w)_{M_ctl}.
    const double lhs =
        solver.apply_Si(player, u).velocity.dot(sys->forms.M_vel * w);
    const double rhs =
        u.dot(sys->forms.M_ctl * solver.apply_Si_star(player, w));
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
}

TEST_CASE("energy identity: a(y_h, y_h) equals the work of the load") {
  const Fixture fix(8, 2.5);
  const Vec load = fix.state_load();
  const FlowField y = fix.solver->solve_with_load(load);
  const double energy = y.velocity.dot(fix.sys->forms.A * y.velocity);
  const double work = load.dot(y.velocity);  // velocity is zero on the boundary
  CHECK(energy == doctest::Approx(work).epsilon(1e-9));
  CHECK(energy > 0.0);
}

TEST_CASE("adjoint solve reproduces a manufactured adjoint pair") {
  const Fixture fix(16);
  // Forcing y - y_{1,d} evaluated from the closed forms.
  const ManufacturedBundle& ex = fix.exact;
  const Vec load = assemble_velocity_load(
      *fix.sys, AnalyticVelocity([&ex](double x, double y) {
        return (ex.y.value(x, y) - ex.y_d[0](x, y)).eval();
      }));
  const FlowField phi = fix.solver->solve_with_load(load);
  const ErrNorms e =
      vector_field_error(fix.sys->velocity, phi.velocity, ex.phi[0]);
  // Small relative to the adjoint's own magnitude.
  CHECK(e.l2 < 5e-4);
  const double r_err =
      scalar_field_error_l2(fix.sys->pressure, phi.pressure, ex.r[0]);
  CHECK(r_err < 5e-2);
}

TEST_CASE("multiplier vanishes for compatible loads") {
  const Fixture fix(8);
  const FlowField y = fix.solver->solve_with_load(fix.state_load());
  CHECK(std::abs(y.multiplier) <= 1e-10);
}
