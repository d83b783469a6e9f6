#pragma once

#include <iosfwd>

#include "nashstokes/manufactured.hpp"
#include "nashstokes/nash.hpp"

namespace nashstokes {

// L2 and H1-seminorm distance between an FE coefficient vector and an
// analytic field, by the degree-8 rule. h1_semi is zero when the analytic
// gradient is absent.
struct ErrNorms {
  double l2 = 0.0;
  double h1_semi = 0.0;
  double h1() const;
};

ErrNorms vector_field_error(const FESpace& space, const Vec& coeffs,
                            const AnalyticVector& exact);
double scalar_field_error_l2(const FESpace& space, const Vec& coeffs,
                             const AnalyticScalar& exact);

// One row of the convergence table.
struct ErrorRow {
  double h = 0.0;
  double y_l2 = 0.0, y_h1 = 0.0, p_l2 = 0.0;
  double phi_l2[2] = {0, 0}, phi_h1[2] = {0, 0}, r_l2[2] = {0, 0};
  double u_l2[2] = {0, 0};   // ||u_i - u_{i,h}||_0
  double pu_l2[2] = {0, 0};  // ||P^h u_i - u_{i,h}||_0
};

ErrorRow compute_errors(const ManufacturedBundle& exact,
                        const EquilibriumBundle& eq, const FESystem& sys);

// EOC = log(e0/e1) / log(h0/h1).
double eoc(double e0, double e1, double h0, double h1);

struct ErrorReport {
  std::vector<ErrorRow> rows;

  // EOC exponents of the named column between rows j and j+1.
  std::vector<double> eoc_column(double ErrorRow::*col) const;
  // CSV with error rows and interleaved EOC rows.
  void write_csv(std::ostream& out) const;
};

struct ConvergenceStudy {
  double nu = 1.0;
  double alpha1 = 1.0;
  double alpha2 = 0.5;
  int base_resolution = 8;
  int levels = 3;
  int control_degree = 1;
  SolverOptions opts;
  int max_threads = 1;  // concurrent mesh levels
};

// Manufactured unit-square game over a nested refinement sequence.
ErrorReport run_convergence(const ConvergenceStudy& study);

// Fixed-h evaluation of the auxiliary-solution inequalities with the generic
// constant replaced by the observed left/right ratio.
struct LemmaReport {
  struct Row {
    double h;
    double state_ratio;    // discrete state/pressure vs control-error bound
    double adjoint_ratio;  // auxiliary-adjoint gap vs state L2 error
    double control_ratio;  // projected-control gap vs approximation terms
  };
  std::vector<Row> rows;

  // Every ratio stays within `factor` of its coarsest-mesh value.
  bool bounded(double factor = 10.0) const;
};

LemmaReport check_lemma_inequalities(const ConvergenceStudy& study);

}  // namespace nashstokes
