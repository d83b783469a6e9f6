#include "nashstokes/config.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>

namespace nashstokes {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& value) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &pos);
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': not a number: '" + value + "'");
  }
  if (pos != value.size())
    throw ConfigError("key '" + key + "': trailing characters in '" + value +
                      "'");
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  const double d = parse_double(key, value);
  const int i = static_cast<int>(d);
  if (static_cast<double>(i) != d)
    throw ConfigError("key '" + key + "': expected an integer, got '" + value +
                      "'");
  return i;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "true") return true;
  if (value == "false") return false;
  throw ConfigError("key '" + key + "': expected true or false, got '" +
                    value + "'");
}

TargetKind parse_target(const std::string& key, const std::string& value) {
  if (value == "zero") return TargetKind::Zero;
  if (value == "manufactured") return TargetKind::Manufactured;
  if (value == "streamfunction-O1") return TargetKind::StreamfunctionO1;
  throw ConfigError("key '" + key + "': unknown target '" + value + "'");
}

SubdomainLabel parse_label(const std::string& key, const std::string& value) {
  for (SubdomainLabel l :
       {SubdomainLabel::Omega, SubdomainLabel::Omega1, SubdomainLabel::Omega2,
        SubdomainLabel::O1, SubdomainLabel::O2, SubdomainLabel::OmegaC})
    if (value == label_name(l)) return l;
  throw ConfigError("key '" + key + "': unknown subdomain label '" + value +
                    "'");
}

SubdomainSelector parse_selector(const std::string& key,
                                 const std::string& value) {
  if (value == "whole") return SubdomainSelector::whole();
  std::vector<SubdomainLabel> labels;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ','))
    labels.push_back(parse_label(key, trim(item)));
  if (labels.empty())
    throw ConfigError("key '" + key + "': empty subdomain list");
  return SubdomainSelector::only(std::move(labels));
}

}  // namespace

RunConfig parse_config(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("line " + std::to_string(lineno) +
                        ": expected key = value, got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw ConfigError("line " + std::to_string(lineno) +
                        ": empty key or value");
    if (!kv.emplace(key, value).second)
      throw ConfigError("key '" + key + "': duplicated");
  }

  RunConfig cfg;
  std::string domain_kind = "unit-square";
  double width = 1.0, height = 1.0;
  int resolution = 8;

  for (const auto& [key, value] : kv) {
    if (key == "workflow") {
      cfg.workflow = value;
    } else if (key == "domain.kind") {
      domain_kind = value;
    } else if (key == "domain.resolution") {
      resolution = parse_int(key, value);
    } else if (key == "domain.width") {
      width = parse_double(key, value);
    } else if (key == "domain.height") {
      height = parse_double(key, value);
    } else if (key == "flow.nu") {
      cfg.nu = parse_double(key, value);
    } else if (key == "player1.alpha") {
      cfg.players[0].alpha = parse_double(key, value);
    } else if (key == "player2.alpha") {
      cfg.players[1].alpha = parse_double(key, value);
    } else if (key == "player1.target") {
      cfg.players[0].target = parse_target(key, value);
    } else if (key == "player2.target") {
      cfg.players[1].target = parse_target(key, value);
    } else if (key == "player1.omega") {
      cfg.players[0].omega = parse_selector(key, value);
    } else if (key == "player2.omega") {
      cfg.players[1].omega = parse_selector(key, value);
    } else if (key == "control.degree") {
      cfg.control_degree = parse_int(key, value);
    } else if (key == "solver.method") {
      try {
        cfg.opts.method = parse_method(value);
      } catch (const std::exception& e) {
        throw ConfigError("key 'solver.method': " + std::string(e.what()));
      }
    } else if (key == "solver.tol") {
      cfg.opts.tol = parse_double(key, value);
    } else if (key == "solver.max_iter") {
      cfg.opts.max_iter = parse_int(key, value);
    } else if (key == "solver.theta") {
      cfg.opts.theta = parse_double(key, value);
    } else if (key == "solver.sequential") {
      cfg.opts.sequential = parse_bool(key, value);
    } else if (key == "converge.levels") {
      cfg.levels = parse_int(key, value);
    } else if (key == "output.dir") {
      cfg.out_dir = value;
    } else if (key == "example.re") {
      cfg.re_tags.clear();
      std::stringstream ss(value);
      std::string item;
      while (std::getline(ss, item, ','))
        cfg.re_tags.push_back(parse_double(key, trim(item)));
    } else if (key == "example.a") {
      cfg.example_a = parse_double(key, value);
    } else {
      throw ConfigError("key '" + key + "': unknown");
    }
  }

  if (domain_kind == "unit-square") {
    cfg.domain = DomainSpec::unit_square(resolution);
  } else if (domain_kind == "rectangle") {
    cfg.domain = DomainSpec::rectangle(width, height, resolution);
  } else if (domain_kind == "multi-domain") {
    if (resolution % 4 != 0)
      throw ConfigError(
          "key 'domain.resolution': multi-domain needs a multiple of 4");
    cfg.domain = DomainSpec::multi_domain(resolution);
  } else {
    throw ConfigError("key 'domain.kind': unknown kind '" + domain_kind + "'");
  }

  validate(cfg);
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  return parse_config(in);
}

void validate(const RunConfig& cfg) {
  const bool known =
      cfg.workflow == "solve" || cfg.workflow == "converge" ||
      cfg.workflow == "compare" || cfg.workflow == "example-multidomain";
  if (!known)
    throw ConfigError("key 'workflow': unknown workflow '" + cfg.workflow +
                      "'");
  if (cfg.domain.resolution < 1)
    throw ConfigError("key 'domain.resolution': must be >= 1");
  if (cfg.nu <= 0) throw ConfigError("key 'flow.nu': must be positive");
  for (int i = 0; i < 2; ++i) {
    const std::string p = "player" + std::to_string(i + 1);
    if (cfg.players[i].alpha <= 0)
      throw ConfigError("key '" + p + ".alpha': must be positive");
    if (cfg.players[i].target == TargetKind::StreamfunctionO1 &&
        cfg.domain.kind != DomainSpec::Kind::MultiDomain)
      throw ConfigError("key '" + p +
                        ".target': streamfunction-O1 needs domain.kind = "
                        "multi-domain");
  }
  if (cfg.control_degree != 0 && cfg.control_degree != 1)
    throw ConfigError("key 'control.degree': must be 0 or 1");
  if (cfg.opts.tol <= 0) throw ConfigError("key 'solver.tol': must be positive");
  if (cfg.opts.max_iter < 1)
    throw ConfigError("key 'solver.max_iter': must be >= 1");
  if (cfg.opts.theta <= 0 || cfg.opts.theta > 1)
    throw ConfigError("key 'solver.theta': must be in (0, 1]");
  if (cfg.levels < 1) throw ConfigError("key 'converge.levels': must be >= 1");
  if (cfg.workflow == "converge" && cfg.levels < 3)
    throw ConfigError("key 'converge.levels': converge needs >= 3 levels");
  for (double re : cfg.re_tags)
    if (re <= 0) throw ConfigError("key 'example.re': tags must be positive");
}

int worker_count() {
  if (const char* env = std::getenv("NASH_STOKES_THREADS")) {
    const int n = std::atoi(env);
    if (n >= 1) return n;
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace nashstokes
