#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <random>

#include "nashstokes/forms.hpp"

using namespace nashstokes;

namespace {

// Exact integral of x^a y^b over the reference triangle: a! b! / (a+b+2)!.
double monomial_integral(int a, int b) {
  auto fact = [](int n) {
    double f = 1;
    for (int i = 2; i <= n; ++i) f *= i;
    return f;
  };
  return fact(a) * fact(b) / fact(a + b + 2);
}

double quadrature_monomial(const QuadratureRule& rule, int a, int b) {
  double sum = 0.0;
  for (const auto& qp : rule.points) {
    const double x = qp.bary[1], y = qp.bary[2];
    sum += qp.weight * std::pow(x, a) * std::pow(y, b);
  }
  return sum;
}

}  // namespace

TEST_CASE("quadrature rules are exact to their stated degree") {
  for (const QuadratureRule* rule : {&assembly_rule(), &norm_rule()}) {
    double wsum = 0.0;
    for (const auto& qp : rule->points) wsum += qp.weight;
    CHECK(wsum == doctest::Approx(0.5).epsilon(1e-14));
    for (int a = 0; a <= rule->exactness_degree; ++a)
      for (int b = 0; a + b <= rule->exactness_degree; ++b)
        CHECK(quadrature_monomial(*rule, a, b) ==
              doctest::Approx(monomial_integral(a, b)).epsilon(1e-13));
  }
  CHECK(assembly_rule().exactness_degree == 5);
  CHECK(norm_rule().exactness_degree == 8);
}

TEST_CASE("space dimensions on the n = 2 unit square") {
  const TriMesh mesh = generate(DomainSpec::unit_square(2));
  const EdgeTable edges = build_edge_table(mesh);
  const FESpace velocity(mesh, Family::P2Vector, &edges);
  const FESpace pressure(mesh, Family::P1Scalar, nullptr);
  const FESpace control(mesh, Family::P1VectorControl, nullptr);
  CHECK(velocity.scalar_dim() == 9 + 16);  // vertices + edges
  CHECK(velocity.dim() == 2 * 25);
  CHECK(pressure.dim() == 9);
  CHECK(control.dim() == 2 * 3 * 8);  // element-local linears
}

TEST_CASE("P2 shape functions satisfy the Kronecker property") {
  const TriMesh mesh = generate(DomainSpec::unit_square(1));
  const EdgeTable edges = build_edge_table(mesh);
  const FESpace space(mesh, Family::P2Vector, &edges);
  // Nodes in barycentric coordinates: vertices then opposite-edge midpoints.
  const std::array<std::array<double, 3>, 6> nodes = {{{1, 0, 0},
                                                       {0, 1, 0},
                                                       {0, 0, 1},
                                                       {0, 0.5, 0.5},
                                                       {0.5, 0, 0.5},
                                                       {0.5, 0.5, 0}}};
  for (int i = 0; i < 6; ++i) {
    double v[6];
    space.shape(nodes[i], v);
    for (int j = 0; j < 6; ++j)
      CHECK(v[j] == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-14));
  }
}

TEST_CASE("P2 interpolation reproduces a quadratic exactly") {
  const TriMesh mesh = generate(DomainSpec::unit_square(3));
  const EdgeTable edges = build_edge_table(mesh);
  const FESpace space(mesh, Family::P2Vector, &edges);
  auto f = [](double x, double y) { return x * x + 2 * x * y - 3 * y + 1; };
  Vec coeffs = Vec::Zero(space.dim());
  for (int v = 0; v < mesh.n_vertices(); ++v)
    coeffs[v] = f(mesh.vertices[v].x, mesh.vertices[v].y);
  for (int e = 0; e < edges.n_edges(); ++e) {
    const Point& a = mesh.vertices[edges.edges[e][0]];
    const Point& b = mesh.vertices[edges.edges[e][1]];
    coeffs[mesh.n_vertices() + e] = f(0.5 * (a.x + b.x), 0.5 * (a.y + b.y));
  }
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> unif(0.05, 0.9);
  for (int trial = 0; trial < 50; ++trial) {
    const int t = trial % mesh.n_triangles();
    double l1 = unif(rng), l2 = unif(rng) * (1 - l1);
    const std::array<double, 3> bary = {1 - l1 - l2, l1, l2};
    const ElementGeometry geom = element_geometry(mesh, t);
    const Point xy = geom.map(bary, mesh, t);
    CHECK(eval_vector_field(space, coeffs, t, bary)[0] ==
          doctest::Approx(f(xy.x, xy.y)).epsilon(1e-12));
  }
}

TEST_CASE("assembled forms: symmetry, mass totals, divergence identity") {
  auto sys = build_system(generate(DomainSpec::unit_square(4)), 2.0);
  const AssembledForms& F = sys->forms;

  CHECK((F.A - SpMat(F.A.transpose())).norm() == doctest::Approx(0.0));
  CHECK((F.M_vel - SpMat(F.M_vel.transpose())).norm() == doctest::Approx(0.0));

  // Row sums of mass matrices integrate the constant 1 per component.
  CHECK(Vec(F.M_vel * Vec::Ones(F.M_vel.cols())).sum() ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(Vec(F.M_pres * Vec::Ones(F.M_pres.cols())).sum() ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(Vec(F.M_ctl * Vec::Ones(F.M_ctl.cols())).sum() ==
        doctest::Approx(2.0).epsilon(1e-12));
  CHECK(F.m_p.sum() == doctest::Approx(1.0).epsilon(1e-12));

  // The field z = (x, 0) is exactly representable in P2 and has div z = 1,
  // so b(z, q) = -(q, 1) = -m_p exactly.
  Vec z = Vec::Zero(sys->velocity.dim());
  for (int v = 0; v < sys->mesh.n_vertices(); ++v)
    z[v] = sys->mesh.vertices[v].x;
  for (int e = 0; e < sys->edges.n_edges(); ++e)
    z[sys->mesh.n_vertices() + e] =
        0.5 * (sys->mesh.vertices[sys->edges.edges[e][0]].x +
               sys->mesh.vertices[sys->edges.edges[e][1]].x);
  CHECK((Vec(F.B * z) + F.m_p).norm() == doctest::Approx(0.0).epsilon(1e-12));

  // Stiffness scales linearly in the viscosity.
  auto sys1 = build_system(generate(DomainSpec::unit_square(4)), 1.0);
  CHECK((F.A - 2.0 * sys1->forms.A).norm() ==
        doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("Dirichlet map eliminates exactly the boundary velocity dofs") {
  auto sys = build_system(generate(DomainSpec::unit_square(2)), 1.0);
  // n = 2: 8 boundary vertices + 8 boundary edges, both components.
  CHECK(sys->bc.n_eliminated == 2 * 16);
  CHECK(sys->bc.n_free() == sys->velocity.dim() - 32);
  const Vec full = Vec::LinSpaced(sys->velocity.dim(), 0, 1);
  const Vec red = sys->bc.restrict_vec(full);
  const Vec back = sys->bc.extend(red);
  for (int d : sys->bc.free_dofs) CHECK(back[d] == full[d]);
  CHECK(back.lpNorm<1>() < full.lpNorm<1>());
}

TEST_CASE("restricted stiffness is positive definite (coercivity witness)") {
  auto sys = build_system(generate(DomainSpec::unit_square(4)), 1.0);
  const SpMat A_free = sys->bc.restrict_both(sys->forms.A);
  const SpMat M_free = sys->bc.restrict_both(sys->forms.M_vel);
  std::mt19937 rng(11);
  std::normal_distribution<double> gauss;
  for (int trial = 0; trial < 10; ++trial) {
    Vec v(A_free.cols());
    for (int i = 0; i < v.size(); ++i) v[i] = gauss(rng);
    const double energy = v.dot(A_free * v);
    const double mass = v.dot(M_free * v);
    CHECK(energy > 0.0);
    // Poincare: |v|_1^2 >= 2 pi^2 ||v||_0^2 on the unit square (nu = 1).
    CHECK(energy >= 2 * M_PI * M_PI * mass * 0.99);
  }
}

TEST_CASE("discrete inf-sup constant stays bounded away from zero") {
  double beta_prev = -1.0;
  for (int n : {2, 4, 8}) {
    auto sys = build_system(generate(DomainSpec::unit_square(n)), 1.0);
    const SpMat A_free = sys->bc.restrict_both(sys->forms.A);
    const SpMat B_free = sys->bc.restrict_rows(SpMat(sys->forms.B.transpose()))
                             .transpose();
    Eigen::SimplicialLLT<SpMat> llt(A_free);
    REQUIRE(llt.info() == Eigen::Success);

    // Dense Schur complement S = B A^{-1} B^T; beta_h^2 is the smallest
    // generalized eigenvalue of S q = beta^2 M_p q over mean-zero pressures.
    const int np = sys->pressure.dim();
    Eigen::MatrixXd S(np, np);
    for (int j = 0; j < np; ++j) {
      const Vec col = Vec(SpMat(B_free.transpose()).col(j));
      S.col(j) = B_free * llt.solve(col);
    }
    const Eigen::MatrixXd Mp = Eigen::MatrixXd(sys->forms.M_pres);
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> eig(S, Mp);
    // The constant-pressure mode is the single zero eigenvalue.
    CHECK(eig.eigenvalues()[0] < 1e-10);
    const double beta = std::sqrt(eig.eigenvalues()[1]);
    CHECK(beta > 0.1);
    if (beta_prev > 0)  // no degeneration under refinement
      CHECK(beta > 0.8 * beta_prev);
    beta_prev = beta;
  }
}

TEST_CASE("control-space L2 projection is idempotent and orthogonal") {
  auto sys = build_system(generate(DomainSpec::unit_square(4)), 1.0);
  const AnalyticVelocity field([](double x, double y) {
    return Eigen::Vector2d(std::sin(3 * x) * y, std::cos(2 * y) - x);
  });
  const Vec proj = l2_project_control(*sys, field);

  // Projecting the projection changes nothing.
  const DiscreteVelocity as_field(sys->control, proj);
  const Vec twice = l2_project_control(*sys, as_field);
  CHECK(sys->ctl_norm(twice - proj) == doctest::Approx(0.0).epsilon(1e-10));

  // Orthogonality: (u - Pu, v_h) = 0 for every discrete control v_h. Both
  // subdomains are the whole domain here, so player 0's load is the full one.
  const Vec load = assemble_control_load(*sys, field, 0);
  const Vec defect = load - sys->forms.M_ctl * proj;
  CHECK(defect.lpNorm<Eigen::Infinity>() == doctest::Approx(0.0).epsilon(1e-10));
}

TEST_CASE("coupling matrices restrict to the control subdomain") {
  auto sys = build_system(
      generate(DomainSpec::multi_domain(4)), 1.0, 1,
      SubdomainSelector::only({SubdomainLabel::Omega1}),
      SubdomainSelector::only({SubdomainLabel::Omega2}));
  // A constant control (1, 0) acts like the indicator load of its subdomain:
  // summing C_i gives the subdomain area in the first component.
  Vec ones = Vec::Zero(sys->control.dim());
  ones.head(sys->control.scalar_dim()).setOnes();
  const Vec load1 = sys->forms.C[0] * ones;
  const Vec load2 = sys->forms.C[1] * ones;
  CHECK(load1.sum() == doctest::Approx(1.0).epsilon(1e-10));  // |Omega1|
  CHECK(load2.sum() == doctest::Approx(1.0).epsilon(1e-10));  // |Omega2|
  // Control dofs are element-local, so columns belonging to triangles
  // outside the player's subdomain must vanish entirely.
  for (int t = 0; t < sys->mesh.n_triangles(); ++t) {
    if (sys->mesh.subdomain_labels[t] == SubdomainLabel::Omega1) continue;
    for (int l = 0; l < 3; ++l)
      for (int c = 0; c < 2; ++c)
        CHECK(Vec(sys->forms.C[0].col(sys->control.dof(t, l, c))).norm() ==
              doctest::Approx(0.0));
  }
}

TEST_CASE("velocity load against a constant equals the mean of the basis") {
  auto sys = build_system(generate(DomainSpec::unit_square(3)), 1.0);
  const AnalyticVelocity one([](double, double) {
    return Eigen::Vector2d(1.0, 0.0);
  });
  const Vec load = assemble_velocity_load(*sys, one);
  // Sum of P2 basis integrals over each component: int 1 dx = 1 and 0.
  CHECK(load.head(sys->velocity.scalar_dim()).sum() ==
        doctest::Approx(1.0).epsilon(1e-10));
  CHECK(load.tail(sys->velocity.scalar_dim()).sum() ==
        doctest::Approx(0.0).epsilon(1e-10));
}
