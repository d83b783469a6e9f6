#include "nashstokes/quadrature.hpp"

#include <Eigen/Dense>
#include <cmath>

namespace nashstokes {

namespace {

void add_point(QuadratureRule& rule, double a, double b, double c, double w) {
  rule.points.push_back({{a, b, c}, 0.5 * w});
}

// One point per distinct permutation of (a, b, b).
void add_sym3(QuadratureRule& rule, double a, double b, double w) {
  add_point(rule, a, b, b, w);
  add_point(rule, b, a, b, w);
  add_point(rule, b, b, a, w);
}

QuadratureRule make_degree5() {
  QuadratureRule rule;
  rule.exactness_degree = 5;
  const double s15 = std::sqrt(15.0);
  add_point(rule, 1.0 / 3, 1.0 / 3, 1.0 / 3, 9.0 / 40);
  add_sym3(rule, (9.0 + 2.0 * s15) / 21.0, (6.0 - s15) / 21.0,
           (155.0 - s15) / 1200.0);
  add_sym3(rule, (9.0 - 2.0 * s15) / 21.0, (6.0 + s15) / 21.0,
           (155.0 + s15) / 1200.0);
  return rule;
}

// Nodes and weights of an n-point Gauss rule from the symmetric tridiagonal
// Jacobi matrix (Golub-Welsch): eigenvalues are the nodes on [-1, 1], the
// weights are mu0 times the squared first eigenvector components.
struct GaussRule1D {
  Eigen::VectorXd nodes;    // mapped to [0, 1]
  Eigen::VectorXd weights;  // scaled for the [0, 1] interval
};

GaussRule1D golub_welsch(const Eigen::VectorXd& diag,
                         const Eigen::VectorXd& offdiag, double mu0,
                         double weight_scale) {
  const int n = static_cast<int>(diag.size());
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    J(i, i) = diag[i];
    if (i + 1 < n) J(i, i + 1) = J(i + 1, i) = offdiag[i];
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(J);
  GaussRule1D rule;
  rule.nodes = (eig.eigenvalues().array() + 1.0) / 2.0;
  rule.weights = mu0 * weight_scale *
                 eig.eigenvectors().row(0).transpose().array().square();
  return rule;
}

// 25-point conical-product rule, exact to total degree 8 (and beyond): a
// 5-point Gauss-Legendre rule in the collapsed coordinate crossed with a
// 5-point Gauss-Jacobi rule (weight 1-x) absorbing the Duffy Jacobian. All
// coefficients come out at machine precision, unlike tabulated rules.
QuadratureRule make_degree8() {
  const int n = 5;
  // Legendre on [-1, 1]: zero diagonal, b_k = k / sqrt(4k^2 - 1).
  Eigen::VectorXd ldiag = Eigen::VectorXd::Zero(n), loff(n - 1);
  for (int k = 1; k < n; ++k)
    loff[k - 1] = k / std::sqrt(4.0 * k * k - 1.0);
  // Jacobi weight (1 - x) on [-1, 1] (alpha = 1, beta = 0).
  Eigen::VectorXd jdiag(n), joff(n - 1);
  jdiag[0] = -1.0 / 3.0;
  for (int k = 1; k < n; ++k) {
    jdiag[k] = -1.0 / ((2.0 * k + 1) * (2.0 * k + 3));
    joff[k - 1] = std::sqrt(k * (k + 1.0)) / (2.0 * k + 1);
  }
  // Interval maps: int_0^1 g dxi = (1/2) sum w_leg g; the Jacobi factor
  // additionally carries the (1 - xi) Jacobian, giving a 1/4 scale.
  const GaussRule1D eta = golub_welsch(ldiag, loff, 2.0, 0.5);
  const GaussRule1D xi = golub_welsch(jdiag, joff, 2.0, 0.25);

  QuadratureRule rule;
  rule.exactness_degree = 8;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      const double x = xi.nodes[i];
      const double y = eta.nodes[j] * (1.0 - x);
      rule.points.push_back(
          {{1.0 - x - y, x, y}, xi.weights[i] * eta.weights[j]});
    }
  return rule;
}

}  // namespace

const QuadratureRule& assembly_rule() {
  static const QuadratureRule rule = make_degree5();
  return rule;
}

const QuadratureRule& norm_rule() {
  static const QuadratureRule rule = make_degree8();
  return rule;
}

}  // namespace nashstokes
