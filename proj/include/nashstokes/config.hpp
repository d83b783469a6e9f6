#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "nashstokes/nash.hpp"

namespace nashstokes {

// Raised with a message naming the offending key.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class TargetKind { Zero, Manufactured, StreamfunctionO1 };

struct PlayerConfig {
  double alpha = 1.0;
  TargetKind target = TargetKind::Zero;
  SubdomainSelector omega = SubdomainSelector::whole();
};

// Flat key=value run description; see README for the schema.
struct RunConfig {
  std::string workflow = "solve";  // solve | converge | compare | example-multidomain
  DomainSpec domain = DomainSpec::unit_square(8);
  double nu = 1.0;
  PlayerConfig players[2];
  int control_degree = 1;
  SolverOptions opts;
  int levels = 3;               // converge workflow
  std::string out_dir = "out";
  std::vector<double> re_tags;  // example metadata only
  double example_a = 1.99;      // example metadata only
};

RunConfig parse_config(std::istream& in);
RunConfig load_config(const std::string& path);
void validate(const RunConfig& cfg);

// Worker cap: NASH_STOKES_THREADS if set, else hardware concurrency, at
// least 1.
int worker_count();

}  // namespace nashstokes
