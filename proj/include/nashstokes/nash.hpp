#pragma once

#include <memory>
#include <string>
#include <vector>

#include "nashstokes/stokes.hpp"

namespace nashstokes {

struct PlayerSpec {
  double alpha = 1.0;
  std::shared_ptr<const VelocityField> target;  // y_{i,d}
};

// Full problem description. The control subdomains live in the FESystem
// (they shape the coupling matrices C_i).
struct GameSpec {
  std::shared_ptr<const VelocityField> source;  // f
  PlayerSpec players[2];
};

enum class Method { FixedPoint, Gradient, ReducedCG, DenseOracle };

const char* method_name(Method m);
Method parse_method(const std::string& name);

struct SolverOptions {
  Method method = Method::ReducedCG;
  double tol = 1e-9;   // optimality residual threshold, per player
  int max_iter = 10000;
  double theta = 1.0;  // fixed-point damping, in (0, 1]
  bool sequential = false;  // gradient method: update player 1, then player 2
};

struct EquilibriumBundle {
  FlowField state;
  Vec control[2];
  FlowField adjoint[2];
  int iterations = 0;
  std::vector<double> residual_history;  // max optimality residual per iter
  std::string method;
};

// Thrown when an iterative method exhausts max_iter.
struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Cost, gradient, and equilibrium computations for one assembled game.
// Precomputes the forcing and target load vectors once.
class GameOperator {
 public:
  GameOperator(const FESystem& sys, const StokesSolver& solver,
               const GameSpec& spec);

  const FESystem& system() const { return *sys_; }
  const StokesSolver& solver() const { return *solver_; }
  const GameSpec& spec() const { return *spec_; }
  const Vec& f_load() const { return f_load_; }
  const Vec& target_load(int i) const { return target_load_[i]; }

  // J_i = 1/2 ||y(u1,u2) - y_{i,d}||^2 + alpha_i/2 ||u_i||^2; one state solve.
  double evaluate_cost(int player, const Vec& u1, const Vec& u2) const;

  // int |y_h - y_{i,d}|^2 by the degree-8 rule.
  double tracking_error_sq(const FlowField& state, int player) const;

  struct GradientEval {
    FlowField state;
    FlowField adjoint[2];
    Vec g[2];
    double residual[2];  // ||g_i||_{L2}
  };
  // Both players' gradients at (u1, u2); one state + two adjoint solves.
  GradientEval gradients(const Vec& u1, const Vec& u2) const;
  Vec gradient(int player, const Vec& u1, const Vec& u2) const;

  EquilibriumBundle solve(const SolverOptions& opts) const;
  EquilibriumBundle solve_fixed_point(const SolverOptions& opts) const;
  EquilibriumBundle solve_gradient(const SolverOptions& opts) const;
  EquilibriumBundle solve_reduced_cg(const SolverOptions& opts) const;
  // Monolithic dense KKT solve; coarse meshes only (total dofs <= 5000).
  EquilibriumBundle solve_dense_oracle() const;

  // Reduced block operator R applied to a control pair. Costs one state-type
  // and one adjoint solve.
  void apply_reduced(const Vec& v1, const Vec& v2, Vec& out1, Vec& out2) const;

  Vec zero_control() const { return Vec::Zero(sys_->control.dim()); }

 private:
  EquilibriumBundle finalize(const Vec& u1, const Vec& u2,
                             std::vector<double> history, int iterations,
                             Method method) const;

  const FESystem* sys_;
  const StokesSolver* solver_;
  const GameSpec* spec_;
  Vec f_load_;
  Vec target_load_[2];
};

}  // namespace nashstokes
