#pragma once

#include <Eigen/Core>
#include <functional>

#include "nashstokes/forms.hpp"

namespace nashstokes {

// Closed-form vector field with the derivatives needed for error norms and
// data construction. grad(i, j) = d v_i / d x_j.
struct AnalyticVector {
  std::function<Eigen::Vector2d(double, double)> value;
  std::function<Eigen::Matrix2d(double, double)> grad;
  std::function<Eigen::Vector2d(double, double)> laplacian;
};

struct AnalyticScalar {
  std::function<double(double, double)> value;
  std::function<Eigen::Vector2d(double, double)> grad;
};

// Analytic Nash-equilibrium octuple on the unit square: state, pressure, per-
// player adjoints/adjoint pressures, exact controls, and the induced data
// (f, y_{1,d}, y_{2,d}) that make the full coupled optimality system hold
// identically.
struct ManufacturedBundle {
  double nu;
  double alpha[2];
  AnalyticVector y;
  AnalyticScalar p;
  AnalyticVector phi[2];
  AnalyticScalar r[2];
  AnalyticVector u[2];  // u_i = -(1/alpha_i) phi_i
  std::function<Eigen::Vector2d(double, double)> f;
  std::function<Eigen::Vector2d(double, double)> y_d[2];
};

// Requires omega_i to cover the whole domain: restricting the exact control
// to a strict subdomain would break the smoothness the rate study relies on.
ManufacturedBundle make_manufactured(double nu, double alpha1, double alpha2,
                                     const SubdomainSelector& omega1,
                                     const SubdomainSelector& omega2);

}  // namespace nashstokes
