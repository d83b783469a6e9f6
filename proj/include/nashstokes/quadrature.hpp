#pragma once

#include <array>
#include <vector>

namespace nashstokes {

// Quadrature rule on the reference triangle {(x,y): x,y >= 0, x+y <= 1}.
// Weights sum to the reference-triangle area 1/2.
struct QuadratureRule {
  struct QPoint {
    std::array<double, 3> bary;  // barycentric coordinates
    double weight;
  };
  std::vector<QPoint> points;
  int exactness_degree = 0;
};

// 7-point rule, exact to degree 5. Used for form assembly.
const QuadratureRule& assembly_rule();

// 25-point conical-product rule, exact to degree 8. Used for error norms and
// data loads.
const QuadratureRule& norm_rule();

}  // namespace nashstokes
