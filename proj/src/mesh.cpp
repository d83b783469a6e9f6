#include "nashstokes/mesh.hpp"

#include <limits>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <queue>
#include <stdexcept>
#include <utility>

namespace nashstokes {

const char* label_name(SubdomainLabel label) {
  switch (label) {
    case SubdomainLabel::Omega: return "Omega";
    case SubdomainLabel::Omega1: return "Omega1";
    case SubdomainLabel::Omega2: return "Omega2";
    case SubdomainLabel::O1: return "O1";
    case SubdomainLabel::O2: return "O2";
    case SubdomainLabel::OmegaC: return "OmegaC";
  }
  return "?";
}

DomainSpec DomainSpec::unit_square(int n) {
  DomainSpec s;
  s.kind = Kind::UnitSquare;
  s.resolution = n;
  return s;
}

DomainSpec DomainSpec::rectangle(double w, double h, int n) {
  DomainSpec s;
  s.kind = Kind::Rectangle;
  s.width = w;
  s.height = h;
  s.resolution = n;
  return s;
}

DomainSpec DomainSpec::multi_domain(int n) {
  // The channel height 0.25 must land on grid lines of every rectangle.
  if (n % 4 != 0)
    throw std::runtime_error(
        "multi-domain resolution must be divisible by 4");
  DomainSpec s;
  s.kind = Kind::MultiDomain;
  s.resolution = n;
  s.rectangles = {
      {SubdomainLabel::Omega1, 0.0, 0.0, 1.0, 1.0},
      {SubdomainLabel::Omega2, 0.0, 1.0, 1.0, 2.0},
      {SubdomainLabel::O1, 3.0, 0.0, 4.0, 1.0},
      {SubdomainLabel::O2, 3.0, 1.0, 4.0, 2.0},
      {SubdomainLabel::OmegaC, 1.0, 1.0, 3.0, 1.25},
  };
  return s;
}

double TriMesh::signed_area(int t) const {
  const auto& tri = triangles[t];
  const Point& a = vertices[tri[0]];
  const Point& b = vertices[tri[1]];
  const Point& c = vertices[tri[2]];
  return 0.5 * ((b.x - a.x) * (c.y - a.y) - (c.x - a.x) * (b.y - a.y));
}

double TriMesh::diameter(int t) const {
  const auto& tri = triangles[t];
  double d = 0.0;
  for (int i = 0; i < 3; ++i) {
    const Point& a = vertices[tri[i]];
    const Point& b = vertices[tri[(i + 1) % 3]];
    d = std::max(d, std::hypot(b.x - a.x, b.y - a.y));
  }
  return d;
}

Point TriMesh::centroid(int t) const {
  const auto& tri = triangles[t];
  Point c;
  for (int i = 0; i < 3; ++i) {
    c.x += vertices[tri[i]].x / 3.0;
    c.y += vertices[tri[i]].y / 3.0;
  }
  return c;
}

double TriMesh::total_area() const {
  double a = 0.0;
  for (int t = 0; t < n_triangles(); ++t) a += signed_area(t);
  return a;
}

namespace {

// Merges vertices across rectangles by quantized coordinate. All generated
// coordinates are multiples of 1/(4n), so the key is exact.
class VertexMerger {
 public:
  explicit VertexMerger(int resolution) : scale_(4.0 * resolution) {}

  int insert(TriMesh& mesh, double x, double y) {
    const std::pair<long long, long long> key{std::llround(x * scale_),
                                              std::llround(y * scale_)};
    auto it = index_.find(key);
    if (it != index_.end()) return it->second;
    const int idx = mesh.n_vertices();
    mesh.vertices.push_back({x, y});
    index_.emplace(key, idx);
    return idx;
  }

 private:
  double scale_;
  std::map<std::pair<long long, long long>, int> index_;
};

void mesh_rectangle(TriMesh& mesh, VertexMerger& merger, const LabeledRect& r,
                    int resolution) {
  const int nx = static_cast<int>(std::lround(r.width() * resolution));
  const int ny = static_cast<int>(std::lround(r.height() * resolution));
  if (nx < 1 || ny < 1)
    throw std::runtime_error("rectangle " + std::string(label_name(r.label)) +
                             " is unresolved at resolution " +
                             std::to_string(resolution));
  const double dx = r.width() / nx;
  const double dy = r.height() / ny;

  std::vector<int> grid((nx + 1) * (ny + 1));
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i)
      grid[j * (nx + 1) + i] = merger.insert(mesh, r.x0 + i * dx, r.y0 + j * dy);

  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      const int v00 = grid[j * (nx + 1) + i];
      const int v10 = grid[j * (nx + 1) + i + 1];
      const int v01 = grid[(j + 1) * (nx + 1) + i];
      const int v11 = grid[(j + 1) * (nx + 1) + i + 1];
      mesh.triangles.push_back({v00, v10, v11});
      mesh.subdomain_labels.push_back(r.label);
      mesh.triangles.push_back({v00, v11, v01});
      mesh.subdomain_labels.push_back(r.label);
    }
  }
}

bool rects_overlap_interior(const LabeledRect& a, const LabeledRect& b) {
  const double w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const double h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  return w > 1e-12 && h > 1e-12;
}

bool rects_touch(const LabeledRect& a, const LabeledRect& b) {
  const double w = std::min(a.x1, b.x1) - std::max(a.x0, b.x0);
  const double h = std::min(a.y1, b.y1) - std::max(a.y0, b.y0);
  // Shared edge of positive length, not just a corner.
  return (w >= -1e-12 && h >= -1e-12) && (w > 1e-12 || h > 1e-12);
}

void validate_multi_domain(const DomainSpec& spec) {
  const auto& rects = spec.rectangles;
  for (size_t i = 0; i < rects.size(); ++i)
    for (size_t j = i + 1; j < rects.size(); ++j)
      if (rects_overlap_interior(rects[i], rects[j]))
        throw std::runtime_error(
            std::string("multi-domain rectangles overlap: ") +
            label_name(rects[i].label) + " and " + label_name(rects[j].label));

  // Connectivity over the shared-edge adjacency graph.
  std::vector<char> seen(rects.size(), 0);
  std::queue<size_t> work;
  work.push(0);
  seen[0] = 1;
  while (!work.empty()) {
    const size_t i = work.front();
    work.pop();
    for (size_t j = 0; j < rects.size(); ++j)
      if (!seen[j] && rects_touch(rects[i], rects[j])) {
        seen[j] = 1;
        work.push(j);
      }
  }
  for (size_t i = 0; i < rects.size(); ++i)
    if (!seen[i])
      throw std::runtime_error(std::string("multi-domain is disconnected: ") +
                               label_name(rects[i].label) +
                               " is not reachable");
}

void flag_boundary_vertices(TriMesh& mesh) {
  mesh.boundary_vertex.assign(mesh.n_vertices(), 0);
  const EdgeTable edges = build_edge_table(mesh);
  for (int e = 0; e < edges.n_edges(); ++e) {
    if (edges.boundary_edge[e]) {
      mesh.boundary_vertex[edges.edges[e][0]] = 1;
      mesh.boundary_vertex[edges.edges[e][1]] = 1;
    }
  }
}

}  // namespace

TriMesh generate(const DomainSpec& spec) {
  if (spec.resolution < 1) throw std::runtime_error("resolution must be >= 1");

  TriMesh mesh;
  VertexMerger merger(spec.resolution);
  switch (spec.kind) {
    case DomainSpec::Kind::UnitSquare:
      mesh_rectangle(mesh, merger, {SubdomainLabel::Omega, 0, 0, 1, 1},
                     spec.resolution);
      break;
    case DomainSpec::Kind::Rectangle:
      mesh_rectangle(mesh, merger,
                     {SubdomainLabel::Omega, 0, 0, spec.width, spec.height},
                     spec.resolution);
      break;
    case DomainSpec::Kind::MultiDomain:
      validate_multi_domain(spec);
      for (const auto& r : spec.rectangles)
        mesh_rectangle(mesh, merger, r, spec.resolution);
      break;
  }
  flag_boundary_vertices(mesh);
  audit_mesh(mesh);
  return mesh;
}

TriMesh refine(const TriMesh& mesh) {
  TriMesh fine;
  fine.vertices = mesh.vertices;

  const EdgeTable edges = build_edge_table(mesh);
  std::vector<int> midpoint(edges.n_edges());
  for (int e = 0; e < edges.n_edges(); ++e) {
    const Point& a = mesh.vertices[edges.edges[e][0]];
    const Point& b = mesh.vertices[edges.edges[e][1]];
    midpoint[e] = fine.n_vertices();
    fine.vertices.push_back({0.5 * (a.x + b.x), 0.5 * (a.y + b.y)});
  }

  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    // m[i] is the midpoint of the edge opposite vertex i.
    const std::array<int, 3> m = {midpoint[edges.triangle_edges[t][0]],
                                  midpoint[edges.triangle_edges[t][1]],
                                  midpoint[edges.triangle_edges[t][2]]};
    const SubdomainLabel label = mesh.subdomain_labels[t];
    const std::array<std::array<int, 3>, 4> children = {{
        {tri[0], m[2], m[1]},
        {m[2], tri[1], m[0]},
        {m[1], m[0], tri[2]},
        {m[0], m[1], m[2]},
    }};
    for (const auto& child : children) {
      fine.triangles.push_back(child);
      fine.subdomain_labels.push_back(label);
    }
  }
  flag_boundary_vertices(fine);
  audit_mesh(fine);
  return fine;
}

MeshSize mesh_size(const TriMesh& mesh) {
  MeshSize s{0.0, std::numeric_limits<double>::max()};
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const double d = mesh.diameter(t);
    s.h = std::max(s.h, d);
    s.h_min = std::min(s.h_min, d);
  }
  return s;
}

EdgeTable build_edge_table(const TriMesh& mesh) {
  EdgeTable table;
  table.triangle_edges.resize(mesh.n_triangles());
  std::map<std::pair<int, int>, int> index;
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    for (int i = 0; i < 3; ++i) {
      int a = tri[(i + 1) % 3];
      int b = tri[(i + 2) % 3];
      if (a > b) std::swap(a, b);
      auto [it, inserted] = index.emplace(std::make_pair(a, b), table.n_edges());
      if (inserted) {
        table.edges.push_back({a, b});
        table.edge_use_count.push_back(0);
      }
      table.triangle_edges[t][i] = it->second;
      ++table.edge_use_count[it->second];
    }
  }
  table.boundary_edge.resize(table.n_edges());
  for (int e = 0; e < table.n_edges(); ++e)
    table.boundary_edge[e] = (table.edge_use_count[e] == 1);
  return table;
}

void audit_mesh(const TriMesh& mesh) {
  if (mesh.subdomain_labels.size() != mesh.triangles.size())
    throw std::runtime_error("mesh audit: label/triangle count mismatch");

  for (int t = 0; t < mesh.n_triangles(); ++t)
    if (mesh.signed_area(t) <= 0.0)
      throw std::runtime_error("mesh audit: non-positive triangle area at " +
                               std::to_string(t));

  const EdgeTable edges = build_edge_table(mesh);
  for (int e = 0; e < edges.n_edges(); ++e) {
    const int uses = edges.edge_use_count[e];
    if (uses != 1 && uses != 2)
      throw std::runtime_error("mesh audit: non-conforming edge (used " +
                               std::to_string(uses) + " times)");
    if (uses == 1) {
      if (!mesh.boundary_vertex[edges.edges[e][0]] ||
          !mesh.boundary_vertex[edges.edges[e][1]])
        throw std::runtime_error(
            "mesh audit: boundary edge with unflagged vertex");
    }
  }
}

void export_mesh(const TriMesh& mesh, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open mesh file: " + path);
  out << mesh.n_vertices() << " " << mesh.n_triangles() << "\n";
  char buf[96];
  for (int v = 0; v < mesh.n_vertices(); ++v) {
    std::snprintf(buf, sizeof(buf), "%.17g %.17g %d\n", mesh.vertices[v].x,
                  mesh.vertices[v].y, static_cast<int>(mesh.boundary_vertex[v]));
    out << buf;
  }
  for (int t = 0; t < mesh.n_triangles(); ++t) {
    const auto& tri = mesh.triangles[t];
    out << tri[0] << " " << tri[1] << " " << tri[2] << " "
        << label_name(mesh.subdomain_labels[t]) << "\n";
  }
}

}  // namespace nashstokes
