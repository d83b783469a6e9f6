#pragma once

#include "nashstokes/config.hpp"
#include "nashstokes/errors.hpp"

namespace nashstokes {

// Executes the configured workflow and writes its artifacts (solution.vtk,
// report.csv) under cfg.out_dir. Returns a process exit status: 0 on
// success, nonzero when a solver fails to converge.
int run(const RunConfig& cfg);

// Individual workflows, exposed for tests.
EquilibriumBundle run_solve(const RunConfig& cfg, const std::string& out_dir);
ErrorReport run_converge(const RunConfig& cfg, const std::string& out_dir);
void run_compare(const RunConfig& cfg, const std::string& out_dir);
void run_example_multidomain(const RunConfig& cfg, const std::string& out_dir);

}  // namespace nashstokes
