#pragma once

// Fixed-point machinery for the coupled system. T lifts a source pair
// (f, g) to the p-Poisson solutions (u_f, v_g) with boundary data (h, k);
// Lambda(f, g) = (phi(x, u_f, v_g), psi(x, u_f, v_g)). A fixed point of
// Lambda yields a weak solution of the system.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "psys/coupling.hpp"
#include "psys/field.hpp"
#include "psys/plap.hpp"

namespace psys::fixpoint {

struct Exponents {
  int d = 2;
  double p = 2.0;
  double r = 1.0;
  double p_prime = 2.0;  // p / (p - 1)
  double s = 0.0;        // d r (p - 1) / (d - p r)
};

/// Admissible r interval [d p'/(d + p'), d/p); throws what make_exponents
/// would throw for (d, p).
std::pair<double, double> admissible_r(int d, double p);

/// Validates 1 < p < d, d/p <= p', r in [d p'/(d + p'), d/p) and r != d/p.
/// Throws ExponentError.
Exponents make_exponents(int d, double p, double r);

/// 1/r - (p-1)/s - p/d.
double identity_defect(const Exponents& e);

struct SystemProblem {
  GridPtr grid;
  double p = 2.0;
  /// Lebesgue exponent of the source space; also the norm of every
  /// reported pair_norm.
  double r = 2.0;
  double eps = 1.0;  // splitting parameter of the homogeneous transform
  ScalarField h;
  ScalarField k;
  coupling::Coupling coupling;

  /// Checks grid (2D), p > 1, r >= 1, eps > 0 and field placement. Does not
  /// require admissible exponents; see exponents().
  void validate() const;
  /// make_exponents(2, p, r).
  Exponents exponents() const;
};

struct IterationState {
  ScalarField f, g;
  ScalarField u, v;  // p-Poisson lifts of f, g with boundary h, k
  double norm = 0.0;  // pair_norm(f, g, r)
  int inner_iterations = 0;
};

/// Warm start: a previous state whose (u, v) seed the two solves.
/// Throws SolverError naming the component that failed to converge.
IterationState apply_T(const SystemProblem& prob, const ScalarField& f, const ScalarField& g,
                       const plap::SolverOptions& opts = {}, const IterationState* warm = nullptr);

struct LambdaResult {
  ScalarField f_out, g_out;
  IterationState state;
};

LambdaResult apply_lambda(const SystemProblem& prob, const ScalarField& f, const ScalarField& g,
                          const plap::SolverOptions& opts = {}, const IterationState* warm = nullptr);

/// sum over the first modes x modes sine modes of the box with coefficients
/// uniform in [-1, 1] (modes terms in 1D). Vanishes on the boundary.
ScalarField random_smooth_field(const GridPtr& grid, std::mt19937_64& rng, int modes = 8);

/// w rescaled so that lq_norm(w, r) = target; the zero field stays zero.
ScalarField scaled_to_norm(const ScalarField& w, double r, double target);

constexpr double kCalibrationSafety = 2.0;
constexpr std::size_t kMinCalibrationSamples = 10;

struct Calibration {
  double C = 0.0;        // kCalibrationSafety * raw_max
  double raw_max = 0.0;  // max over samples of ||u_f||_s^{p-1} / ||f||_r
  std::size_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<double> ratios;
};

/// Ratio for one source with zero boundary data.
double calibration_ratio(const GridPtr& grid, const Exponents& e, const ScalarField& f,
                         const plap::SolverOptions& opts = {});

Calibration calibrate_C(const GridPtr& grid, const Exponents& e, std::span<const ScalarField> sources,
                        const plap::SolverOptions& opts = {});
Calibration calibrate_C(const GridPtr& grid, const Exponents& e, std::size_t samples, std::uint64_t seed,
                        const plap::SolverOptions& opts = {});

/// max_constant * C * measure^{p/d}
double smallness_constant(double max_constant, double C, double measure, double p, int d);
/// max(norm_c, norm_c_prime) / (1 - lambda) when lambda < 1.
std::optional<double> invariant_radius(double norm_c, double norm_c_prime, double lambda);

struct Certificate {
  Exponents exponents;
  double C = 0.0;
  std::size_t C_samples = 0;
  std::uint64_t seed = 0;
  double epsilon = 0.0;
  double a1p = 0.0, a2p = 0.0, b1p = 0.0, b2p = 0.0;
  double measure = 0.0;
  double norm_c = 0.0, norm_c_prime = 0.0;
  double lambda = 0.0;
  std::optional<double> M0;
  bool valid = false;
};

/// Requires admissible exponents and C > 0. An invalid certificate is a
/// value, not an error.
Certificate certify(const SystemProblem& prob, const Calibration& cal);
Certificate certify(const SystemProblem& prob, double C, std::size_t samples = 0, std::uint64_t seed = 0);

struct BallReport {
  double radius = 0.0;
  std::size_t trials = 0;
  std::vector<double> input_norms, output_norms;
  double max_output_norm = 0.0;
  std::size_t violations = 0;
  bool pass = false;
};

constexpr double kBallSlack = 1e-6;

/// Draws `trials` pairs with pair_norm <= M (each component a random smooth
/// field scaled to a uniform fraction of M), applies Lambda and counts
/// outputs above M (1 + kBallSlack). Trial 0 is the zero pair.
/// Throws PreconditionError unless cert.valid, M >= M0 and trials >= 1.
BallReport check_ball_invariance(const SystemProblem& prob, const Certificate& cert, double M, std::size_t trials,
                                 std::uint64_t seed, const plap::SolverOptions& opts = {});

struct TraceRecord {
  int iter = 0;
  double norm_f = 0.0, norm_g = 0.0;
  double delta = 0.0;          // pair_norm of the successive difference
  double weak_residual = 0.0;  // max |R| of the lifts of the iterate's input
};

struct ConvergenceTrace {
  std::vector<TraceRecord> records;
  bool converged = false;
  double theta_final = 1.0;
  bool damping_fallback = false;
  double final_weak_residual = 0.0;
};

struct PicardOptions {
  double theta = 1.0;
  int max_iter = 200;
  double tol = 1e-7;
  /// Drop theta to 0.5 after this many consecutive increases of delta; 0 disables.
  int oscillation_window = 3;
  plap::SolverOptions solver;
};

struct PicardResult {
  ScalarField u, v;
  ScalarField f, g;
  ConvergenceTrace trace;
};

/// From (f, g) = (0, 0): (f, g) <- (1 - theta)(f, g) + theta Lambda(f, g)
/// until pair_norm of the step <= tol. Returns the lifts of the final pair.
PicardResult picard_solve(const SystemProblem& prob, const PicardOptions& opts = {});

}  // namespace psys::fixpoint
