#pragma once

// Scalar p-Poisson Dirichlet problem  div(|grad u|^{p-2} grad u) = f,
// u = h on the boundary, solved by minimizing the discrete energy
//   J(u) = sum_e (1/p)|grad u|^p |e| + sum_e mean_e(f u) |e|
// over P1 fields that agree with h on boundary nodes.

#include <string>
#include <vector>

#include "psys/field.hpp"

namespace psys::plap {

struct PPoissonProblem {
  double p;
  ScalarField f;
  ScalarField h;  // only boundary values are read
};

struct SolverOptions {
  double tol = 1e-8;  // on the Euclidean norm of the interior energy gradient
  int max_iter = 500;
  double eps_reg = 1e-8;
  double armijo = 1e-4;
  double backtrack = 0.5;
  int max_backtracks = 40;
  double cg_rel_tol = 1e-10;
  /// Solve at p = 2 first when p >= 4 or p <= 1.3.
  bool continuation = true;
};

struct SolveReport {
  ScalarField solution;
  int iterations = 0;
  double energy = 0.0;  // unregularized
  double gradient_norm = 0.0;
  double eps_reg = 0.0;
  bool converged = false;
  int gradient_fallbacks = 0;
  /// Regularized objective after each accepted step of the final-p solve,
  /// starting with the initial iterate.
  std::vector<double> objective_history;
  std::string message;
};

/// Unregularized discrete energy.
double energy(const ScalarField& u, double p, const ScalarField& f);

/// Regularized objective the solver descends on.
double regularized_energy(const ScalarField& u, double p, const ScalarField& f, double eps_reg);

/// Never throws on non-convergence; check `converged`. `initial`, when
/// given, replaces the default starting iterate (its boundary values are
/// overwritten by h).
SolveReport solve_p_poisson(const PPoissonProblem& problem, const SolverOptions& options = {},
                            const ScalarField* initial = nullptr);

/// Per-node flux term sum_e |grad u|^{p-2} grad u . grad(hat_i) |e|, for
/// every node (boundary entries included). Unregularized.
std::vector<double> p_laplace_action(const ScalarField& u, double p);

}  // namespace psys::plap
