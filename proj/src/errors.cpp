#include "nashstokes/errors.hpp"

#include <cmath>
#include <future>
#include <ostream>
#include <stdexcept>

namespace nashstokes {

double ErrNorms::h1() const { return std::sqrt(l2 * l2 + h1_semi * h1_semi); }

ErrNorms vector_field_error(const FESpace& space, const Vec& coeffs,
                            const AnalyticVector& exact) {
  const TriMesh& mesh = space.mesh();
  const QuadratureRule& rule = norm_rule();
  double l2 = 0.0, semi = 0.0;
  const bool with_grad = static_cast<bool>(exact.grad);
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const ElementGeometry geom = element_geometry(mesh, t);
    for (const auto& qp : rule.points) {
      const auto& bary = qp.bary;
      const Point xy = geom.map(bary, mesh, t);
      const double w = 2.0 * geom.area * qp.weight;
      const Eigen::Vector2d dv =
          eval_vector_field(space, coeffs, t, bary) - exact.value(xy.x, xy.y);
      l2 += w * dv.squaredNorm();
      if (with_grad) {
        const Eigen::Matrix2d dg =
            eval_vector_gradient(space, coeffs, t, bary, geom) -
            exact.grad(xy.x, xy.y);
        semi += w * dg.squaredNorm();
      }
    }
  }
  return {std::sqrt(l2), std::sqrt(semi)};
}

double scalar_field_error_l2(const FESpace& space, const Vec& coeffs,
                             const AnalyticScalar& exact) {
  const TriMesh& mesh = space.mesh();
  const QuadratureRule& rule = norm_rule();
  double l2 = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const ElementGeometry geom = element_geometry(mesh, t);
    for (const auto& qp : rule.points) {
      const Point xy = geom.map(qp.bary, mesh, t);
      const double d =
          eval_scalar_field(space, coeffs, t, qp.bary) - exact.value(xy.x, xy.y);
      l2 += 2.0 * geom.area * qp.weight * d * d;
    }
  }
  return std::sqrt(l2);
}

ErrorRow compute_errors(const ManufacturedBundle& exact,
                        const EquilibriumBundle& eq, const FESystem& sys) {
  ErrorRow row;
  row.h = sys.h();

  const ErrNorms ey = vector_field_error(sys.velocity, eq.state.velocity, exact.y);
  row.y_l2 = ey.l2;
  row.y_h1 = ey.h1();
  row.p_l2 = scalar_field_error_l2(sys.pressure, eq.state.pressure, exact.p);

  for (int i = 0; i < 2; ++i) {
    const ErrNorms ephi =
        vector_field_error(sys.velocity, eq.adjoint[i].velocity, exact.phi[i]);
    row.phi_l2[i] = ephi.l2;
    row.phi_h1[i] = ephi.h1();
    row.r_l2[i] =
        scalar_field_error_l2(sys.pressure, eq.adjoint[i].pressure, exact.r[i]);
    row.u_l2[i] = vector_field_error(sys.control, eq.control[i], exact.u[i]).l2;
    const Vec proj =
        l2_project_control(sys, AnalyticVelocity(exact.u[i].value));
    row.pu_l2[i] = sys.ctl_norm(proj - eq.control[i]);
  }
  return row;
}

double eoc(double e0, double e1, double h0, double h1) {
  return std::log(e0 / e1) / std::log(h0 / h1);
}

std::vector<double> ErrorReport::eoc_column(double ErrorRow::*col) const {
  std::vector<double> out;
  for (std::size_t j = 0; j + 1 < rows.size(); ++j)
    out.push_back(
        eoc(rows[j].*col, rows[j + 1].*col, rows[j].h, rows[j + 1].h));
  return out;
}

namespace {

void write_row(std::ostream& out, const char* tag, double h,
               const std::vector<double>& vals) {
  out << tag << "," << h;
  for (double v : vals) out << "," << v;
  out << "\n";
}

std::vector<double> row_values(const ErrorRow& r) {
  return {r.y_l2,     r.y_h1,     r.p_l2,    r.phi_l2[0], r.phi_h1[0],
          r.r_l2[0],  r.phi_l2[1], r.phi_h1[1], r.r_l2[1], r.u_l2[0],
          r.u_l2[1],  r.pu_l2[0], r.pu_l2[1]};
}

}  // namespace

void ErrorReport::write_csv(std::ostream& out) const {
  out << "row,h,y_L2,y_H1,p_L2,phi1_L2,phi1_H1,r1_L2,phi2_L2,phi2_H1,r2_L2,"
         "u1_L2,u2_L2,Pu1_L2,Pu2_L2\n";
  for (std::size_t j = 0; j < rows.size(); ++j) {
    write_row(out, "error", rows[j].h, row_values(rows[j]));
    if (j + 1 < rows.size()) {
      const auto v0 = row_values(rows[j]);
      const auto v1 = row_values(rows[j + 1]);
      std::vector<double> rates;
      for (std::size_t k = 0; k < v0.size(); ++k)
        rates.push_back(eoc(v0[k], v1[k], rows[j].h, rows[j + 1].h));
      write_row(out, "EOC", rows[j + 1].h, rates);
    }
  }
}

namespace {

struct LevelSetup {
  std::unique_ptr<FESystem> sys;
  std::unique_ptr<StokesSolver> solver;
  ManufacturedBundle exact;
  GameSpec spec;
};

LevelSetup build_level(const ConvergenceStudy& study, const TriMesh& mesh) {
  LevelSetup lvl;
  lvl.sys = build_system(mesh, study.nu, study.control_degree);
  lvl.solver = std::make_unique<StokesSolver>(*lvl.sys);
  lvl.exact = make_manufactured(study.nu, study.alpha1, study.alpha2,
                                lvl.sys->omega[0], lvl.sys->omega[1]);
  lvl.spec.source = std::make_shared<AnalyticVelocity>(lvl.exact.f);
  lvl.spec.players[0] = {study.alpha1,
                         std::make_shared<AnalyticVelocity>(lvl.exact.y_d[0])};
  lvl.spec.players[1] = {study.alpha2,
                         std::make_shared<AnalyticVelocity>(lvl.exact.y_d[1])};
  return lvl;
}

std::vector<TriMesh> nested_meshes(const ConvergenceStudy& study) {
  if (study.levels < 2)
    throw std::runtime_error("a rate study needs at least two mesh levels");
  std::vector<TriMesh> meshes;
  meshes.push_back(generate(DomainSpec::unit_square(study.base_resolution)));
  for (int l = 1; l < study.levels; ++l)
    meshes.push_back(refine(meshes.back()));
  return meshes;
}

}  // namespace

ErrorReport run_convergence(const ConvergenceStudy& study) {
  const std::vector<TriMesh> meshes = nested_meshes(study);
  ErrorReport report;
  report.rows.resize(meshes.size());

  auto run_level = [&](int l) {
    const LevelSetup lvl = build_level(study, meshes[l]);
    const GameOperator game(*lvl.sys, *lvl.solver, lvl.spec);
    const EquilibriumBundle eq = game.solve(study.opts);
    report.rows[l] = compute_errors(lvl.exact, eq, *lvl.sys);
  };

  const int threads = std::max(1, study.max_threads);
  for (std::size_t start = 0; start < meshes.size();
       start += static_cast<std::size_t>(threads)) {
    std::vector<std::future<void>> batch;
    for (std::size_t l = start;
         l < meshes.size() && l < start + static_cast<std::size_t>(threads);
         ++l)
      batch.push_back(std::async(std::launch::async, run_level,
                                 static_cast<int>(l)));
    for (auto& f : batch) f.get();
  }
  return report;
}

LemmaReport check_lemma_inequalities(const ConvergenceStudy& study) {
  const std::vector<TriMesh> meshes = nested_meshes(study);
  LemmaReport report;

  for (const TriMesh& mesh : meshes) {
    const LevelSetup lvl = build_level(study, mesh);
    const FESystem& sys = *lvl.sys;
    const StokesSolver& solver = *lvl.solver;
    const double h = sys.h();
    const double alpha[2] = {study.alpha1, study.alpha2};

    const GameOperator game(sys, solver, lvl.spec);
    const EquilibriumBundle eq = game.solve(study.opts);

    // Auxiliary discrete state driven by the *exact* controls: load
    // f + u_1 + u_2 (the control subdomains cover the whole domain here).
    const ManufacturedBundle& ex = lvl.exact;
    const AnalyticVelocity total_force([&ex](double x, double y) {
      Eigen::Vector2d out = ex.f(x, y);
      for (int i = 0; i < 2; ++i) out += ex.u[i].value(x, y);
      return out;
    });
    const FlowField yu =
        solver.solve_with_load(assemble_velocity_load(sys, total_force));

    // Auxiliary adjoints driven by the *exact* state: load y - y_{i,d}.
    FlowField phiu[2];
    Vec proj_u[2];
    for (int i = 0; i < 2; ++i) {
      const AnalyticVelocity gap([&ex, i](double x, double y) {
        return (ex.y.value(x, y) - ex.y_d[i](x, y)).eval();
      });
      phiu[i] = solver.solve_with_load(assemble_velocity_load(sys, gap));
      proj_u[i] = l2_project_control(sys, AnalyticVelocity(ex.u[i].value));
    }

    // FE-FE distances through the assembled matrices: the bilinear form A is
    // nu times the vector stiffness, so the H1 seminorm squared is d'A d / nu.
    auto fe_h1 = [&](const Vec& d) {
      return std::sqrt(d.dot(sys.forms.M_vel * d) +
                       d.dot(sys.forms.A * d) / sys.nu);
    };
    auto pres_l2 = [&](const Vec& d) {
      return std::sqrt(d.dot(sys.forms.M_pres * d));
    };

    LemmaReport::Row row{};
    row.h = h;

    // State bound: |y_h(u) - y_h|_1 + |p_h(u) - p_h|_0 against the sum of
    // projected-control gaps plus h-weighted projection errors.
    {
      const double lhs = fe_h1(yu.velocity - eq.state.velocity) +
                         pres_l2(yu.pressure - eq.state.pressure);
      double rhs = 0.0;
      for (int i = 0; i < 2; ++i) {
        rhs += sys.ctl_norm(proj_u[i] - eq.control[i]);
        rhs += h * vector_field_error(sys.control, proj_u[i], ex.u[i]).l2;
      }
      row.state_ratio = lhs / rhs;
    }

    // Adjoint bound: auxiliary-adjoint gaps against the state L2 error.
    {
      double lhs = 0.0;
      for (int i = 0; i < 2; ++i)
        lhs += fe_h1(phiu[i].velocity - eq.adjoint[i].velocity) +
               pres_l2(phiu[i].pressure - eq.adjoint[i].pressure);
      const double rhs =
          vector_field_error(sys.velocity, eq.state.velocity, ex.y).l2;
      row.adjoint_ratio = lhs / rhs;
    }

    // Control bound: projected-control gaps against the auxiliary state and
    // adjoint errors plus h-weighted projection errors.
    {
      double lhs = 0.0;
      double rhs = vector_field_error(sys.velocity, yu.velocity, ex.y).l2;
      for (int i = 0; i < 2; ++i) {
        lhs += sys.ctl_norm(proj_u[i] - eq.control[i]) / alpha[i];
        rhs += vector_field_error(sys.velocity, phiu[i].velocity, ex.phi[i]).l2;
        rhs += h * vector_field_error(sys.control, proj_u[i], ex.u[i]).l2;
      }
      row.control_ratio = lhs / rhs;
    }

    report.rows.push_back(row);
  }
  return report;
}

bool LemmaReport::bounded(double factor) const {
  if (rows.empty()) return false;
  for (const Row& row : rows) {
    if (!(row.state_ratio <= factor * rows.front().state_ratio)) return false;
    if (!(row.adjoint_ratio <= factor * rows.front().adjoint_ratio))
      return false;
    if (!(row.control_ratio <= factor * rows.front().control_ratio))
      return false;
  }
  return true;
}

}  // namespace nashstokes
