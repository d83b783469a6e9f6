#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace nashstokes {

struct Point {
  double x = 0.0;
  double y = 0.0;
};

// Subdomain labels for the multi-domain geometry; simple domains carry Omega.
enum class SubdomainLabel : std::uint8_t { Omega, Omega1, Omega2, O1, O2, OmegaC };

const char* label_name(SubdomainLabel label);

struct LabeledRect {
  SubdomainLabel label;
  double x0, y0, x1, y1;

  double width() const { return x1 - x0; }
  double height() const { return y1 - y0; }
  bool contains(double x, double y) const {
    return x >= x0 && x <= x1 && y >= y0 && y <= y1;
  }
};

// Domain description. Structured rectangles are meshed on a uniform grid with
// `resolution` segments per unit length and a fixed diagonal direction, so a
// given spec always produces the same triangulation.
struct DomainSpec {
  enum class Kind { UnitSquare, Rectangle, MultiDomain };

  Kind kind = Kind::UnitSquare;
  double width = 1.0;   // Rectangle only
  double height = 1.0;  // Rectangle only
  std::vector<LabeledRect> rectangles;  // MultiDomain only
  int resolution = 1;

  static DomainSpec unit_square(int n);
  static DomainSpec rectangle(double w, double h, int n);
  // Default five-rectangle layout: two 1x1 boxes stacked on the left
  // (Omega1 below Omega2), two on the right (O1 below O2), joined by a
  // 2x0.25 channel at mid height. Requires resolution divisible by 4.
  static DomainSpec multi_domain(int n);
};

// Conforming triangulation. Immutable after construction.
struct TriMesh {
  std::vector<Point> vertices;
  std::vector<std::array<int, 3>> triangles;  // CCW vertex indices
  std::vector<char> boundary_vertex;          // per-vertex on-boundary flag
  std::vector<SubdomainLabel> subdomain_labels;  // per-triangle

  int n_vertices() const { return static_cast<int>(vertices.size()); }
  int n_triangles() const { return static_cast<int>(triangles.size()); }

  double signed_area(int t) const;
  double diameter(int t) const;
  Point centroid(int t) const;
  double total_area() const;
};

// Global edge enumeration; shared by P2 spaces and the conformity audit.
struct EdgeTable {
  // Each edge stores its two vertex indices (lo < hi).
  std::vector<std::array<int, 2>> edges;
  // Per triangle, the global index of the edge opposite each local vertex.
  std::vector<std::array<int, 3>> triangle_edges;
  std::vector<int> edge_use_count;  // 1 = boundary edge, 2 = interior edge
  std::vector<char> boundary_edge;

  int n_edges() const { return static_cast<int>(edges.size()); }
};

TriMesh generate(const DomainSpec& spec);
TriMesh refine(const TriMesh& mesh);

struct MeshSize {
  double h;      // max triangle diameter
  double h_min;  // min triangle diameter
};
MeshSize mesh_size(const TriMesh& mesh);

EdgeTable build_edge_table(const TriMesh& mesh);

// Invariant checks; throw std::runtime_error with a description on failure.
void audit_mesh(const TriMesh& mesh);

// Plain-text export: counts header, then one vertex per line (x y flag),
// then one triangle per line (v0 v1 v2 label).
void export_mesh(const TriMesh& mesh, const std::string& path);

}  // namespace nashstokes
