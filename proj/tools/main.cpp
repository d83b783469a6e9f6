#include <CLI11.hpp>
#include <iostream>

#include "nashstokes/workflows.hpp"

namespace {

// Shared flags; each overrides the corresponding config key when given.
struct CliOverrides {
  std::string config;
  std::string out;
  std::string method;
  double tol = -1;
  int max_iter = -1;
  double theta = -1;
};

void attach_flags(CLI::App* cmd, CliOverrides& ov) {
  cmd->add_option("--config", ov.config, "Run configuration file");
  cmd->add_option("--out", ov.out, "Output directory");
  cmd->add_option("--method", ov.method,
                  "fixed-point | gradient | reduced-cg | dense-oracle");
  cmd->add_option("--tol", ov.tol, "Optimality residual tolerance");
  cmd->add_option("--max-iter", ov.max_iter, "Iteration cap");
  cmd->add_option("--theta", ov.theta, "Fixed-point damping in (0, 1]");
}

nashstokes::RunConfig make_config(const CliOverrides& ov,
                                  const std::string& workflow) {
  nashstokes::RunConfig cfg;
  if (!ov.config.empty()) cfg = nashstokes::load_config(ov.config);
  cfg.workflow = workflow;
  if (workflow == "example-multidomain" && ov.config.empty()) {
    // Built-in defaults for the five-rectangle demo: control in the two left
    // boxes, observation target from the streamfunction problem on O1.
    cfg.domain = nashstokes::DomainSpec::multi_domain(16);
    cfg.nu = 0.01;
    for (int i = 0; i < 2; ++i) cfg.players[i].alpha = 1.99;
    cfg.players[0].omega = nashstokes::SubdomainSelector::only(
        {nashstokes::SubdomainLabel::Omega1});
    cfg.players[1].omega = nashstokes::SubdomainSelector::only(
        {nashstokes::SubdomainLabel::Omega2});
    cfg.players[0].target = nashstokes::TargetKind::StreamfunctionO1;
    cfg.players[1].target = nashstokes::TargetKind::Zero;
  }
  if (workflow == "converge" && ov.config.empty())
    for (auto& p : cfg.players) p.target = nashstokes::TargetKind::Manufactured;
  if (!ov.out.empty()) cfg.out_dir = ov.out;
  if (!ov.method.empty()) cfg.opts.method = nashstokes::parse_method(ov.method);
  if (ov.tol > 0) cfg.opts.tol = ov.tol;
  if (ov.max_iter > 0) cfg.opts.max_iter = ov.max_iter;
  if (ov.theta > 0) cfg.opts.theta = ov.theta;
  nashstokes::validate(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Two-player Stokes control equilibrium solver"};
  app.require_subcommand(1);

  CliOverrides ov;
  const char* verbs[] = {"solve", "converge", "compare",
                         "example-multidomain"};
  const char* help[] = {
      "Solve one game and write solution fields",
      "Run a mesh-refinement error study",
      "Cross-check all solution methods on one game",
      "Run the five-rectangle demo for each Reynolds tag"};
  for (int i = 0; i < 4; ++i) attach_flags(app.add_subcommand(verbs[i], help[i]), ov);

  CLI11_PARSE(app, argc, argv);

  try {
    const std::string verb = app.get_subcommands().front()->get_name();
    return nashstokes::run(make_config(ov, verb));
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
