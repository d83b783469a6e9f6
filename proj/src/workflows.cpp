#include "nashstokes/workflows.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "nashstokes/target.hpp"
#include "nashstokes/vtk.hpp"

namespace nashstokes {

namespace {

struct Problem {
  std::unique_ptr<FESystem> sys;
  std::unique_ptr<StokesSolver> solver;
  GameSpec spec;
};

// Materializes the configured data: mesh, assembled system, forcing, and the
// per-player target fields.
Problem build_problem(const RunConfig& cfg) {
  Problem prob;
  prob.sys = build_system(generate(cfg.domain), cfg.nu, cfg.control_degree,
                          cfg.players[0].omega, cfg.players[1].omega);

  const bool any_manufactured =
      cfg.players[0].target == TargetKind::Manufactured ||
      cfg.players[1].target == TargetKind::Manufactured;
  ManufacturedBundle bundle;
  if (any_manufactured)
    bundle = make_manufactured(cfg.nu, cfg.players[0].alpha,
                               cfg.players[1].alpha, prob.sys->omega[0],
                               prob.sys->omega[1]);

  prob.spec.source = any_manufactured
                         ? std::shared_ptr<const VelocityField>(
                               std::make_shared<AnalyticVelocity>(bundle.f))
                         : std::make_shared<ZeroVelocity>();
  for (int i = 0; i < 2; ++i) {
    prob.spec.players[i].alpha = cfg.players[i].alpha;
    switch (cfg.players[i].target) {
      case TargetKind::Zero:
        prob.spec.players[i].target = std::make_shared<ZeroVelocity>();
        break;
      case TargetKind::Manufactured:
        prob.spec.players[i].target =
            std::make_shared<AnalyticVelocity>(bundle.y_d[i]);
        break;
      case TargetKind::StreamfunctionO1:
        prob.spec.players[i].target =
            streamfunction_target(std::make_shared<Streamfunction>(
                solve_streamfunction(prob.sys->mesh, SubdomainLabel::O1)));
        break;
    }
  }
  prob.solver = std::make_unique<StokesSolver>(*prob.sys);
  return prob;
}

std::ofstream open_out(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::string path = dir + "/" + name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  return out;
}

void write_solution_vtk(const FESystem& sys, const EquilibriumBundle& eq,
                        const std::string& dir,
                        const std::vector<std::string>& metadata) {
  FieldBundle fields;
  fields.metadata = metadata;
  fields.add_vector("velocity", sys.velocity, eq.state.velocity);
  fields.add_scalar("pressure", eq.state.pressure);
  for (int i = 0; i < 2; ++i) {
    const std::string tag = std::to_string(i + 1);
    fields.add_vector("adjoint" + tag + "_velocity", sys.velocity,
                      eq.adjoint[i].velocity);
    fields.add_scalar("adjoint" + tag + "_pressure", eq.adjoint[i].pressure);
    fields.add_cell_vector("control" + tag, sys.control, eq.control[i]);
  }
  std::filesystem::create_directories(dir);
  write_vtk(fields, dir + "/solution.vtk");
}

void write_history_csv(const EquilibriumBundle& eq, std::ofstream out) {
  out << "iter,residual\n";
  for (std::size_t i = 0; i < eq.residual_history.size(); ++i)
    out << i + 1 << "," << eq.residual_history[i] << "\n";
}

}  // namespace

EquilibriumBundle run_solve(const RunConfig& cfg, const std::string& out_dir) {
  const Problem prob = build_problem(cfg);
  const GameOperator game(*prob.sys, *prob.solver, prob.spec);
  EquilibriumBundle eq = game.solve(cfg.opts);
  write_solution_vtk(*prob.sys, eq, out_dir, {"method=" + eq.method});
  write_history_csv(eq, open_out(out_dir, "report.csv"));
  return eq;
}

ErrorReport run_converge(const RunConfig& cfg, const std::string& out_dir) {
  if (cfg.domain.kind != DomainSpec::Kind::UnitSquare)
    throw ConfigError("key 'domain.kind': converge needs unit-square");
  for (int i = 0; i < 2; ++i)
    if (cfg.players[i].target != TargetKind::Manufactured ||
        !cfg.players[i].omega.all)
      throw ConfigError(
          "key 'player" + std::to_string(i + 1) +
          ".target': converge needs manufactured targets on whole-domain "
          "controls");

  ConvergenceStudy study;
  study.nu = cfg.nu;
  study.alpha1 = cfg.players[0].alpha;
  study.alpha2 = cfg.players[1].alpha;
  study.base_resolution = cfg.domain.resolution;
  study.levels = cfg.levels;
  study.control_degree = cfg.control_degree;
  study.opts = cfg.opts;
  study.max_threads = worker_count();

  const ErrorReport report = run_convergence(study);
  std::ofstream csv = open_out(out_dir, "report.csv");
  report.write_csv(csv);
  return report;
}

void run_compare(const RunConfig& cfg, const std::string& out_dir) {
  const Problem prob = build_problem(cfg);
  const GameOperator game(*prob.sys, *prob.solver, prob.spec);

  std::vector<EquilibriumBundle> results;
  for (Method m :
       {Method::FixedPoint, Method::Gradient, Method::ReducedCG}) {
    SolverOptions opts = cfg.opts;
    opts.method = m;
    results.push_back(game.solve(opts));
  }
  // The monolithic solve only fits on coarse meshes; skip it above its guard.
  try {
    results.push_back(game.solve_dense_oracle());
  } catch (const std::runtime_error& e) {
    std::cerr << "compare: skipping dense oracle: " << e.what() << "\n";
  }

  std::ofstream out = open_out(out_dir, "report.csv");
  out << "method_a,method_b,control_gap\n";
  for (std::size_t a = 0; a < results.size(); ++a)
    for (std::size_t b = a + 1; b < results.size(); ++b) {
      double gap = 0.0, scale = 0.0;
      for (int i = 0; i < 2; ++i) {
        gap += prob.sys->ctl_norm(results[a].control[i] -
                                  results[b].control[i]);
        scale += prob.sys->ctl_norm(results[a].control[i]);
      }
      out << results[a].method << "," << results[b].method << ","
          << gap / std::max(scale, 1e-300) << "\n";
    }
}

void run_example_multidomain(const RunConfig& cfg,
                             const std::string& out_dir) {
  if (cfg.domain.kind != DomainSpec::Kind::MultiDomain)
    throw ConfigError(
        "key 'domain.kind': example-multidomain needs multi-domain");

  const Problem prob = build_problem(cfg);
  const GameOperator game(*prob.sys, *prob.solver, prob.spec);
  const EquilibriumBundle eq = game.solve(cfg.opts);

  // The Reynolds tags are bookkeeping carried into the artifacts; the linear
  // solve depends only on nu.
  std::vector<double> tags = cfg.re_tags;
  if (tags.empty()) tags = {240, 720, 1200};
  for (double re : tags) {
    std::ostringstream tag;
    tag << "re_" << re;
    const std::string dir = out_dir + "/" + tag.str();
    std::vector<std::string> metadata = {
        "Re=" + std::to_string(re), "a=" + std::to_string(cfg.example_a),
        "nu=" + std::to_string(cfg.nu), "method=" + eq.method};
    write_solution_vtk(*prob.sys, eq, dir, metadata);
    write_history_csv(eq, open_out(dir, "report.csv"));
  }
}

int run(const RunConfig& cfg) {
  try {
    if (cfg.workflow == "solve") {
      run_solve(cfg, cfg.out_dir);
    } else if (cfg.workflow == "converge") {
      run_converge(cfg, cfg.out_dir);
    } else if (cfg.workflow == "compare") {
      run_compare(cfg, cfg.out_dir);
    } else {
      run_example_multidomain(cfg, cfg.out_dir);
    }
  } catch (const DivergenceError& e) {
    std::cerr << "solver diverged: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

}  // namespace nashstokes
