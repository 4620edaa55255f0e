#pragma once

// Discrete weak-form checks. For every interior hat function eta_i:
//   R1(i) = sum_e |grad u|^{p-2} grad u . grad eta_i |e| + sum_e mean_e(phi(x,u,v) eta_i) |e|
// and R2 likewise with v and psi. A pair is a solution when every residual
// vanishes, a supersolution when none is negative and a subsolution when
// none is positive (all within the tolerance).

#include <cstddef>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psys/coupling.hpp"
#include "psys/field.hpp"
#include "psys/plap.hpp"

namespace psys::verify {

enum class Verdict { solution, supersolution, subsolution, neither };
std::string_view to_string(Verdict v);

constexpr double kDefaultTolerance = 1e-6;

struct Classification {
  std::vector<std::size_t> hats;  // node index of each interior hat
  std::vector<double> flux1, reaction1, flux2, reaction2;
  std::vector<double> r1, r2;
  double tol = kDefaultTolerance;
  Verdict verdict = Verdict::neither;

  bool is_solution() const;
  bool is_supersolution() const;
  bool is_subsolution() const;
  double max_abs() const;
  /// Hats whose residual breaks the reported verdict's nearest candidate:
  /// |R| > tol for any component.
  std::vector<std::size_t> offending() const;
};

Classification weak_residuals(const ScalarField& u, const ScalarField& v, const coupling::Coupling& c, double p,
                              double tol = kDefaultTolerance);

/// Max over interior hats of |R1| and |R2|.
double max_weak_residual(const ScalarField& u, const ScalarField& v, const coupling::Coupling& c, double p);

/// (R1(eta), R2(eta)) for an arbitrary nodal test field (its boundary
/// values are ignored, treated as zero).
std::pair<double, double> residual_against(const ScalarField& u, const ScalarField& v,
                                           const coupling::Coupling& c, double p, const ScalarField& eta);

enum class ShiftBranch { super, sub };

inline constexpr double kFluxRoundingTolerance = 1e-9;

struct ShiftReport {
  ShiftBranch branch = ShiftBranch::super;
  double alpha = 0.0, beta = 0.0;
  bool precondition_ok = false;
  std::string precondition_failure;
  std::optional<Classification> before, after;
  /// Largest change of the flux part of R1 or R2; zero up to rounding of u + alpha.
  double flux_change = 0.0;
  /// flux_change within kFluxRoundingTolerance relative to the largest flux.
  bool gradient_unchanged = false;
  bool pass = false;
};

/// Super branch: (u, v) supersolution => (u + alpha, v + beta) supersolution.
/// Sub branch: (u, v) subsolution => (u - alpha, v - beta) subsolution.
/// Requires alpha > 0, beta >= 0 and a coupling that samples as monotone
/// over the field ranges involved; failures there are reported as
/// precondition failures.
ShiftReport shift_test(const ScalarField& u, const ScalarField& v, const coupling::Coupling& c, double p,
                       double alpha, double beta, ShiftBranch branch = ShiftBranch::super,
                       double tol = kDefaultTolerance);

struct StudyCase {
  std::string name;
  Box box;
  double p = 2.0;
  std::function<double(double, double)> source;
  std::function<double(double, double)> boundary;
  std::function<double(double, double)> exact;
  plap::SolverOptions solver;

  /// p = 2, u = sin(pi x) sin(pi y) on the unit square, f = -2 pi^2 u.
  static StudyCase manufactured_sine();
  /// p = 2, f = 0, u = 2x + 3y on the unit square.
  static StudyCase affine();
  /// 1D, constant source c, zero boundary on [0, 1].
  static StudyCase constant_source_1d(double p = 3.0, double c = -1.0);
};

struct StudyRow {
  int n = 0;
  double error_max = 0.0;
  double error_l2 = 0.0;
  std::optional<double> order;  // observed against the previous row
  bool converged = false;
};

struct StudyReport {
  std::string name;
  std::vector<StudyRow> rows;
  /// Least-squares slope of log(error_max) against log(h).
  std::optional<double> fitted_order;
  /// Every max error <= 1e-8: order is indeterminate.
  bool exact = false;
};

StudyReport convergence_study(const StudyCase& c, std::span<const int> resolutions);

/// Least-squares slope of log(err) against log(1/n).
double fit_order(std::span<const int> resolutions, std::span<const double> errors);

}  // namespace psys::verify
