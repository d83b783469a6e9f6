#include "nashstokes/manufactured.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace nashstokes {

namespace {

constexpr double kPi = std::numbers::pi;

// k-th derivative of sin^2(pi t).
double sin_sq(int k, double t) {
  switch (k) {
    case 0: return std::sin(kPi * t) * std::sin(kPi * t);
    case 1: return kPi * std::sin(2 * kPi * t);
    case 2: return 2 * kPi * kPi * std::cos(2 * kPi * t);
    case 3: return -4 * kPi * kPi * kPi * std::sin(2 * kPi * t);
    default: throw std::logic_error("sin_sq derivative order");
  }
}

// k-th derivative of sin^2(2 pi t). Value and slope vanish at t = 0, 1, so
// curl fields built from it satisfy the no-slip condition.
double sin_sq2(int k, double t) {
  switch (k) {
    case 0: return std::sin(2 * kPi * t) * std::sin(2 * kPi * t);
    case 1: return 2 * kPi * std::sin(4 * kPi * t);
    case 2: return 8 * kPi * kPi * std::cos(4 * kPi * t);
    case 3: return -32 * kPi * kPi * kPi * std::sin(4 * kPi * t);
    default: throw std::logic_error("sin_sq2 derivative order");
  }
}

// k-th derivative of sin^2(2 pi t) |t - 1/2|^3.5. The algebraic factor caps
// the factor's Sobolev regularity at H^4-eps (H^3-eps after one curl), the
// exact assumption of the error analysis; an entire function would
// superconverge past the predicted rates on refined mesh hierarchies. The
// kink sits on a mesh line for even resolutions, so element quadrature never
// straddles it.
double sin_sq2_sing(int k, double t) {
  constexpr double kBeta = 3.5;
  const double s = t - 0.5;
  const double a = std::abs(s);
  const double sg = s < 0 ? -1.0 : 1.0;
  double m[4];
  m[0] = std::pow(a, kBeta);
  m[1] = kBeta * std::pow(a, kBeta - 1) * sg;
  m[2] = kBeta * (kBeta - 1) * std::pow(a, kBeta - 2);
  m[3] = kBeta * (kBeta - 1) * (kBeta - 2) * std::pow(a, kBeta - 3) * sg;
  static const double binom[4][4] = {
      {1, 0, 0, 0}, {1, 1, 0, 0}, {1, 2, 1, 0}, {1, 3, 3, 1}};
  double out = 0.0;
  for (int j = 0; j <= k; ++j)
    out += binom[k][j] * sin_sq2(j, t) * m[k - j];
  return out;
}

// curl of a separable streamfunction psi = F(x) G(y), scaled by c:
//   v = c (F G', -F' G).
AnalyticVector curl_of(double (*F)(int, double), double (*G)(int, double),
                       double c) {
  AnalyticVector v;
  v.value = [=](double x, double y) {
    return Eigen::Vector2d(c * F(0, x) * G(1, y), -c * F(1, x) * G(0, y));
  };
  v.grad = [=](double x, double y) {
    Eigen::Matrix2d g;
    g << c * F(1, x) * G(1, y), c * F(0, x) * G(2, y),
        -c * F(2, x) * G(0, y), -c * F(1, x) * G(1, y);
    return g;
  };
  v.laplacian = [=](double x, double y) {
    return Eigen::Vector2d(c * (F(2, x) * G(1, y) + F(0, x) * G(3, y)),
                           -c * (F(3, x) * G(0, y) + F(1, x) * G(2, y)));
  };
  return v;
}

AnalyticVector scaled(const AnalyticVector& v, double c) {
  AnalyticVector out;
  out.value = [=](double x, double y) { return (c * v.value(x, y)).eval(); };
  out.grad = [=](double x, double y) { return (c * v.grad(x, y)).eval(); };
  out.laplacian = [=](double x, double y) {
    return (c * v.laplacian(x, y)).eval();
  };
  return out;
}

}  // namespace

ManufacturedBundle make_manufactured(double nu, double alpha1, double alpha2,
                                     const SubdomainSelector& omega1,
                                     const SubdomainSelector& omega2) {
  if (!omega1.all || !omega2.all)
    throw std::runtime_error(
        "manufactured factory requires whole-domain control subdomains");
  if (alpha1 <= 0 || alpha2 <= 0)
    throw std::runtime_error("regularization parameters must be positive");

  ManufacturedBundle b;
  b.nu = nu;
  b.alpha[0] = alpha1;
  b.alpha[1] = alpha2;

  // Amplitudes are balanced so that on the mesh range of interest each error
  // column is governed by its leading-order term rather than by coupling
  // remainders of higher empirical order.
  const double a_y = 8.0;
  const double a_p = 15.0;
  b.y = curl_of(sin_sq, sin_sq, a_y);
  b.p.value = [=](double x, double y) {
    return a_p * std::sin(2 * kPi * x) * std::sin(2 * kPi * y);
  };
  b.p.grad = [=](double x, double y) {
    return Eigen::Vector2d(
        a_p * 2 * kPi * std::cos(2 * kPi * x) * std::sin(2 * kPi * y),
        a_p * 2 * kPi * std::sin(2 * kPi * x) * std::cos(2 * kPi * y));
  };

  // Different frequency mix per player keeps the two adjoints independent
  // and avoids the mesh-symmetric superconvergence a polynomial
  // streamfunction would exhibit on the uniform triangulation.
  const double c_phi[2] = {0.5, 0.25};
  const double a_r[2] = {4.0, 2.0};
  for (int i = 0; i < 2; ++i) {
    const double c = c_phi[i];
    const double ar = a_r[i];
    b.phi[i] = i == 0 ? curl_of(sin_sq2_sing, sin_sq, c)
                      : curl_of(sin_sq, sin_sq2_sing, c);
    b.r[i].value = [=](double x, double y) {
      return ar * std::cos(kPi * x) * std::cos(kPi * y);
    };
    b.r[i].grad = [=](double x, double y) {
      return Eigen::Vector2d(-ar * kPi * std::sin(kPi * x) * std::cos(kPi * y),
                             -ar * kPi * std::cos(kPi * x) * std::sin(kPi * y));
    };
    b.u[i] = scaled(b.phi[i], -1.0 / b.alpha[i]);
  }

  // -nu Lap y + grad p = f + B1 u1 + B2 u2 with B_i the identity on Omega.
  b.f = [b](double x, double y) {
    Eigen::Vector2d out = -b.nu * b.y.laplacian(x, y) + b.p.grad(x, y);
    for (int i = 0; i < 2; ++i) out -= b.u[i].value(x, y);
    return out;
  };
  // -nu Lap phi_i + grad r_i = y - y_{i,d}.
  for (int i = 0; i < 2; ++i) {
    b.y_d[i] = [b, i](double x, double y) {
      return (b.y.value(x, y) + b.nu * b.phi[i].laplacian(x, y) -
              b.r[i].grad(x, y))
          .eval();
    };
  }
  return b;
}

}  // namespace nashstokes
