#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "nashstokes/target.hpp"
#include "nashstokes/workflows.hpp"

using namespace nashstokes;
namespace fs = std::filesystem;

namespace {

RunConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_config(in);
}

std::string thrown_message(const std::string& text) {
  try {
    (void)parse(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("nashstokes_test_" + std::to_string(std::rand()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

}  // namespace

TEST_CASE("config parser fills every field from the flat key=value form") {
  const RunConfig cfg = parse(
      "workflow = compare\n"
      "# a comment\n"
      "domain.kind = rectangle\n"
      "domain.width = 2\n"
      "domain.height = 1.5\n"
      "domain.resolution = 6\n"
      "flow.nu = 0.25\n"
      "player1.alpha = 2.0\n"
      "player2.alpha = 0.125\n"
      "player1.target = manufactured  # trailing comment\n"
      "solver.method = fixed-point\n"
      "solver.tol = 1e-8\n"
      "solver.max_iter = 321\n"
      "solver.theta = 0.7\n"
      "output.dir = /tmp/somewhere\n");
  CHECK(cfg.workflow == "compare");
  CHECK(cfg.domain.kind == DomainSpec::Kind::Rectangle);
  CHECK(cfg.domain.width == 2.0);
  CHECK(cfg.domain.height == 1.5);
  CHECK(cfg.domain.resolution == 6);
  CHECK(cfg.nu == 0.25);
  CHECK(cfg.players[0].alpha == 2.0);
  CHECK(cfg.players[1].alpha == 0.125);
  CHECK(cfg.players[0].target == TargetKind::Manufactured);
  CHECK(cfg.players[1].target == TargetKind::Zero);
  CHECK(cfg.opts.method == Method::FixedPoint);
  CHECK(cfg.opts.tol == 1e-8);
  CHECK(cfg.opts.max_iter == 321);
  CHECK(cfg.opts.theta == 0.7);
  CHECK(cfg.out_dir == "/tmp/somewhere");
}

TEST_CASE("config diagnostics name the offending key") {
  CHECK(thrown_message("bogus.key = 1\n").find("bogus.key") !=
        std::string::npos);
  CHECK(thrown_message("flow.nu = fast\n").find("flow.nu") !=
        std::string::npos);
  CHECK(thrown_message("flow.nu = -1\n").find("flow.nu") != std::string::npos);
  CHECK(thrown_message("solver.theta = 1.5\n").find("solver.theta") !=
        std::string::npos);
  CHECK(thrown_message("solver.method = newton\n").find("solver.method") !=
        std::string::npos);
  CHECK(thrown_message("workflow = dance\n").find("workflow") !=
        std::string::npos);
  CHECK(thrown_message("workflow = converge\nconverge.levels = 2\n")
            .find("converge.levels") != std::string::npos);
  CHECK(thrown_message("player1.target = streamfunction-O1\n")
            .find("player1.target") != std::string::npos);
  CHECK(thrown_message("domain.kind = multi-domain\ndomain.resolution = 6\n")
            .find("domain.resolution") != std::string::npos);
  CHECK(thrown_message("flow.nu = 1\nflow.nu = 2\n").find("duplicated") !=
        std::string::npos);
  CHECK(thrown_message("this is not an assignment\n").find("line 1") !=
        std::string::npos);
}

TEST_CASE("worker count honors the thread environment variable") {
  setenv("NASH_STOKES_THREADS", "3", 1);
  CHECK(worker_count() == 3);
  setenv("NASH_STOKES_THREADS", "0", 1);  // invalid: fall back
  CHECK(worker_count() >= 1);
  unsetenv("NASH_STOKES_THREADS");
  CHECK(worker_count() >= 1);
}

TEST_CASE("solve workflow writes a well-formed, reproducible VTK file") {
  TempDir tmp;
  RunConfig cfg = parse(
      "workflow = solve\n"
      "domain.resolution = 4\n"
      "player1.target = manufactured\n"
      "player2.target = manufactured\n"
      "solver.tol = 1e-10\n");
  (void)run_solve(cfg, tmp.path.string());
  const fs::path vtk = tmp.path / "solution.vtk";
  const std::string first = slurp(vtk);

  std::istringstream in(first);
  std::string line;
  std::getline(in, line);
  CHECK(line == "# vtk DataFile Version 3.0");
  std::getline(in, line);  // title with metadata
  CHECK(line.find("method=") != std::string::npos);
  std::getline(in, line);
  CHECK(line == "ASCII");
  std::getline(in, line);
  CHECK(line == "DATASET UNSTRUCTURED_GRID");
  std::getline(in, line);
  CHECK(line == "POINTS 25 double");  // (4+1)^2 vertices
  CHECK(first.find("CELLS 32 128") != std::string::npos);  // 2*4^2 triangles
  CHECK(first.find("CELL_TYPES 32") != std::string::npos);
  // Every cell type is the linear triangle code 5.
  const auto types_at = first.find("CELL_TYPES 32\n");
  REQUIRE(types_at != std::string::npos);
  std::istringstream types(first.substr(types_at + 14));
  for (int t = 0; t < 32; ++t) {
    int code = -1;
    types >> code;
    CHECK(code == 5);
  }
  CHECK(first.find("VECTORS velocity double") != std::string::npos);
  CHECK(first.find("SCALARS pressure double 1") != std::string::npos);
  CHECK(first.find("VECTORS control1 double") != std::string::npos);

  // report.csv holds the iteration history.
  const std::string csv = slurp(tmp.path / "report.csv");
  CHECK(csv.rfind("iter,residual\n", 0) == 0);

  // A rerun reproduces the artifact byte for byte.
  TempDir tmp2;
  (void)run_solve(cfg, tmp2.path.string());
  CHECK(slurp(tmp2.path / "solution.vtk") == first);
}

TEST_CASE("converge workflow writes the rate table") {
  TempDir tmp;
  RunConfig cfg = parse(
      "workflow = converge\n"
      "domain.resolution = 4\n"
      "converge.levels = 3\n"
      "player1.target = manufactured\n"
      "player2.target = manufactured\n");
  const ErrorReport report = run_converge(cfg, tmp.path.string());
  CHECK(report.rows.size() == 3);
  const std::string csv = slurp(tmp.path / "report.csv");
  CHECK(csv.rfind("row,h,", 0) == 0);
  CHECK(csv.find("\nEOC,") != std::string::npos);
}

TEST_CASE("compare workflow reports small pairwise gaps") {
  TempDir tmp;
  RunConfig cfg = parse(
      "workflow = compare\n"
      "domain.resolution = 4\n"
      "player1.target = manufactured\n"
      "player2.target = manufactured\n"
      "solver.tol = 1e-12\n");
  run_compare(cfg, tmp.path.string());
  std::istringstream csv(slurp(tmp.path / "report.csv"));
  std::string line;
  std::getline(csv, line);
  CHECK(line == "method_a,method_b,control_gap");
  int n_pairs = 0;
  while (std::getline(csv, line)) {
    const auto last_comma = line.rfind(',');
    REQUIRE(last_comma != std::string::npos);
    CHECK(std::stod(line.substr(last_comma + 1)) <= 1e-8);
    ++n_pairs;
  }
  CHECK(n_pairs >= 3);  // at least 3 methods pairwise
}

TEST_CASE("streamfunction matches the series solution on the unit square") {
  const TriMesh mesh = generate(DomainSpec::unit_square(32));
  const Streamfunction psi = solve_streamfunction(mesh, SubdomainLabel::Omega);
  CHECK(psi.min_value() >= -1e-12);
  // -Lap psi = 1, psi = 0 on the boundary: the double sine series gives the
  // peak value at the center.
  double series = 0.0;
  const double pi = 3.14159265358979323846;
  for (int k = 1; k <= 199; k += 2)
    for (int l = 1; l <= 199; l += 2) {
      const double sgn = (((k + l - 2) / 2) % 2 == 0) ? 1.0 : -1.0;
      series += 16.0 / (pi * pi * pi * pi) * sgn /
                (k * l * (double(k) * k + double(l) * l));
    }
  CHECK(psi.max_value() == doctest::Approx(series).epsilon(1e-2));
}

TEST_CASE("streamfunction target vanishes outside its subdomain") {
  const TriMesh mesh = generate(DomainSpec::multi_domain(8));
  const auto psi = std::make_shared<Streamfunction>(
      solve_streamfunction(mesh, SubdomainLabel::O1));
  const auto target = streamfunction_target(psi);
  const std::array<double, 3> center = {1.0 / 3, 1.0 / 3, 1.0 / 3};
  double inside_mag = 0.0;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const Point c = mesh.centroid(t);
    const Eigen::Vector2d v = target->value(t, center, c);
    if (mesh.subdomain_labels[t] == SubdomainLabel::O1)
      inside_mag = std::max(inside_mag, v.norm());
    else
      CHECK(v.norm() == 0.0);
  }
  CHECK(inside_mag > 0.0);
}

TEST_CASE("example workflow writes one directory per requested tag") {
  TempDir tmp;
  RunConfig cfg = parse(
      "workflow = example-multidomain\n"
      "domain.kind = multi-domain\n"
      "domain.resolution = 8\n"
      "player1.target = streamfunction-O1\n"
      "player1.omega = Omega1\n"
      "player2.omega = Omega2\n"
      "example.re = 10, 20\n"
      "solver.tol = 1e-9\n");
  run_example_multidomain(cfg, tmp.path.string());
  for (const char* tag : {"re_10", "re_20"}) {
    CHECK(fs::exists(tmp.path / tag / "solution.vtk"));
    CHECK(fs::exists(tmp.path / tag / "report.csv"));
  }
  const std::string vtk = slurp(tmp.path / "re_20" / "solution.vtk");
  CHECK(vtk.find("Re=20") != std::string::npos);
}

TEST_CASE("run dispatcher returns zero on success") {
  TempDir tmp;
  RunConfig cfg = parse(
      "workflow = solve\n"
      "domain.resolution = 4\n"
      "player1.target = manufactured\n"
      "output.dir = " +
      (tmp.path / "out").string() + "\n");
  CHECK(run(cfg) == 0);
  CHECK(fs::exists(tmp.path / "out" / "solution.vtk"));
}

TEST_CASE("run dispatcher maps solver divergence to exit code 2") {
  TempDir tmp;
  RunConfig cfg = parse(
      "workflow = solve\n"
      "domain.resolution = 4\n"
      "player1.target = manufactured\n"
      "solver.method = fixed-point\n"
      "solver.tol = 1e-15\n"
      "solver.max_iter = 1\n"
      "output.dir = " +
      (tmp.path / "out").string() + "\n");
  CHECK(run(cfg) == 2);
}
