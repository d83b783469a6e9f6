#include "nashstokes/vtk.hpp"

#include <cstdio>
#include <fstream>
#include <stdexcept>

namespace nashstokes {

void FieldBundle::add_vector(const std::string& name, const FESpace& space,
                             Vec coeffs) {
  if (space.is_control())
    throw std::runtime_error("element-local fields need add_cell_vector: " +
                             name);
  if (mesh != nullptr && &space.mesh() != mesh)
    throw std::runtime_error("field mesh mismatch: " + name);
  if (mesh == nullptr) mesh = &space.mesh();
  vectors.push_back({name, {&space, std::move(coeffs)}});
}

void FieldBundle::add_scalar(const std::string& name, Vec coeffs) {
  if (mesh != nullptr && coeffs.size() != mesh->n_vertices())
    throw std::runtime_error("scalar field size mismatch: " + name);
  scalars.push_back({name, std::move(coeffs)});
}

void FieldBundle::add_cell_vector(const std::string& name,
                                  const FESpace& space, Vec coeffs) {
  if (mesh != nullptr && &space.mesh() != mesh)
    throw std::runtime_error("field mesh mismatch: " + name);
  if (mesh == nullptr) mesh = &space.mesh();
  cell_vectors.push_back({name, {&space, std::move(coeffs)}});
}

namespace {

// Fixed-width scientific notation keeps the output byte-stable.
void put(std::ostream& out, double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9e", v);
  out << buf;
}

}  // namespace

void write_vtk(const FieldBundle& bundle, const std::string& path) {
  if (bundle.mesh == nullptr)
    throw std::runtime_error("empty field bundle");
  const TriMesh& mesh = *bundle.mesh;

  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);

  out << "# vtk DataFile Version 3.0\n";
  out << "nashstokes fields";
  for (const std::string& line : bundle.metadata) out << " | " << line;
  out << "\nASCII\nDATASET UNSTRUCTURED_GRID\n";

  out << "POINTS " << mesh.n_vertices() << " double\n";
  for (const Point& v : mesh.vertices) {
    put(out, v.x);
    out << " ";
    put(out, v.y);
    out << " 0.0\n";
  }

  out << "CELLS " << mesh.n_triangles() << " " << 4 * mesh.n_triangles()
      << "\n";
  for (const auto& t : mesh.triangles)
    out << "3 " << t[0] << " " << t[1] << " " << t[2] << "\n";
  out << "CELL_TYPES " << mesh.n_triangles() << "\n";
  for (int t = 0; t < mesh.n_triangles(); ++t) out << "5\n";

  out << "POINT_DATA " << mesh.n_vertices() << "\n";
  for (const auto& [name, field] : bundle.vectors) {
    const FESpace& space = *field.first;
    const Vec& coeffs = field.second;
    out << "VECTORS " << name << " double\n";
    // Vertices lead the scalar dof numbering in both P1 and P2 spaces.
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      put(out, coeffs[v]);
      out << " ";
      put(out, coeffs[space.scalar_dim() + v]);
      out << " 0.0\n";
    }
  }
  for (const auto& [name, coeffs] : bundle.scalars) {
    out << "SCALARS " << name << " double 1\nLOOKUP_TABLE default\n";
    for (int v = 0; v < mesh.n_vertices(); ++v) {
      put(out, coeffs[v]);
      out << "\n";
    }
  }

  if (!bundle.cell_vectors.empty()) {
    out << "CELL_DATA " << mesh.n_triangles() << "\n";
    const std::array<double, 3> centroid = {1.0 / 3, 1.0 / 3, 1.0 / 3};
    for (const auto& [name, field] : bundle.cell_vectors) {
      out << "VECTORS " << name << " double\n";
      for (int t = 0; t < mesh.n_triangles(); ++t) {
        const Eigen::Vector2d v =
            eval_vector_field(*field.first, field.second, t, centroid);
        put(out, v.x());
        out << " ";
        put(out, v.y());
        out << " 0.0\n";
      }
    }
  }
}

}  // namespace nashstokes
