#include "psys/fixpoint.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "psys/error.hpp"
#include "psys/verify.hpp"

namespace psys::fixpoint {

namespace {

std::string num(double v) { return format_double(v); }

void check_p(int d, double p) {
  if (d < 1) throw ExponentError(ExponentError::Kind::p_range, "dimension d must be >= 1");
  if (!(p > 1.0) || !(p < d))
    throw ExponentError(ExponentError::Kind::p_range,
                        "p = " + num(p) + " violates 1 < p < d with d = " + std::to_string(d));
  const double pp = p / (p - 1.0);
  if (d / p > pp)
    throw ExponentError(ExponentError::Kind::dual_condition,
                        "d/p = " + num(d / p) + " exceeds p' = " + num(pp) + " (need d/p <= p')");
}

ScalarField solve_component(const SystemProblem& prob, const ScalarField& src, const ScalarField& bc,
                            const plap::SolverOptions& opts, const ScalarField* warm, const char* name,
                            int& iterations) {
  const auto rep = plap::solve_p_poisson(plap::PPoissonProblem{prob.p, src, bc}, opts, warm);
  iterations += rep.iterations;
  if (!rep.converged)
    throw SolverError(std::string("p-Poisson solve for ") + name + " did not converge: " + rep.message);
  return rep.solution;
}

}  // namespace

std::pair<double, double> admissible_r(int d, double p) {
  check_p(d, p);
  const double pp = p / (p - 1.0);
  return {d * pp / (d + pp), d / p};
}

Exponents make_exponents(int d, double p, double r) {
  const auto [lo, hi] = admissible_r(d, p);
  if (!std::isfinite(r)) throw ExponentError(ExponentError::Kind::r_range, "r must be finite");
  const double denom = d - p * r;
  if (std::fabs(denom) <= 1e-12 * d)
    throw ExponentError(ExponentError::Kind::singular,
                        "r = " + num(r) + " equals d/p: s = d r (p-1)/(d - p r) is singular");
  if (r < lo || r >= hi)
    throw ExponentError(ExponentError::Kind::r_range,
                        "r = " + num(r) + " outside the admissible interval [" + num(lo) + ", " + num(hi) + ")");
  Exponents e;
  e.d = d;
  e.p = p;
  e.r = r;
  e.p_prime = p / (p - 1.0);
  e.s = d * r * (p - 1.0) / denom;
  return e;
}

double identity_defect(const Exponents& e) { return 1.0 / e.r - (e.p - 1.0) / e.s - e.p / e.d; }

void SystemProblem::validate() const {
  if (!grid) throw PreconditionError("system problem has no grid");
  if (grid->dim() != 2) throw PreconditionError("system problem requires a 2D grid");
  if (!(p > 1.0) || !std::isfinite(p)) throw PreconditionError("system problem requires p > 1");
  if (!(r >= 1.0) || !std::isfinite(r)) throw PreconditionError("system problem requires r >= 1");
  if (!(eps > 0.0) || !std::isfinite(eps)) throw PreconditionError("system problem requires eps > 0");
  if (h.grid() != *grid || k.grid() != *grid) throw GridError("boundary data lives on a different grid");
}

Exponents SystemProblem::exponents() const { return make_exponents(2, p, r); }

IterationState apply_T(const SystemProblem& prob, const ScalarField& f, const ScalarField& g,
                       const plap::SolverOptions& opts, const IterationState* warm) {
  prob.validate();
  if (f.grid() != *prob.grid || g.grid() != *prob.grid) throw GridError("apply_T: sources on a different grid");
  int iters = 0;
  ScalarField u = solve_component(prob, f, prob.h, opts, warm ? &warm->u : nullptr, "u", iters);
  ScalarField v = solve_component(prob, g, prob.k, opts, warm ? &warm->v : nullptr, "v", iters);
  return IterationState{f, g, std::move(u), std::move(v), pair_norm(f, g, prob.r), iters};
}

LambdaResult apply_lambda(const SystemProblem& prob, const ScalarField& f, const ScalarField& g,
                          const plap::SolverOptions& opts, const IterationState* warm) {
  IterationState st = apply_T(prob, f, g, opts, warm);
  auto [phi, psi] = coupling::nemytskii(prob.coupling, st.u, st.v);
  return LambdaResult{std::move(phi), std::move(psi), std::move(st)};
}

ScalarField random_smooth_field(const GridPtr& grid, std::mt19937_64& rng, int modes) {
  if (modes < 1) throw PreconditionError("random_smooth_field needs at least one mode");
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  const Box& b = grid->box();
  const int ny = grid->dim() == 1 ? 1 : modes;
  std::vector<double> c(static_cast<std::size_t>(modes * ny));
  for (double& x : c) x = coef(rng);
  const double pi = std::numbers::pi;
  std::vector<double> vals(grid->node_count());
  std::vector<double> sx(modes), sy(ny, 1.0);
  for (std::size_t i = 0; i < vals.size(); ++i) {
    const double xi = (grid->x(i) - b.x0) / (b.x1 - b.x0);
    for (int m = 0; m < modes; ++m) sx[m] = std::sin((m + 1) * pi * xi);
    if (grid->dim() == 2) {
      const double eta = (grid->y(i) - b.y0) / (b.y1 - b.y0);
      for (int l = 0; l < ny; ++l) sy[l] = std::sin((l + 1) * pi * eta);
    }
    double acc = 0.0;
    for (int l = 0; l < ny; ++l)
      for (int m = 0; m < modes; ++m) acc += c[static_cast<std::size_t>(l * modes + m)] * sx[m] * sy[l];
    vals[i] = acc;
  }
  return ScalarField(grid, std::move(vals));
}

ScalarField scaled_to_norm(const ScalarField& w, double r, double target) {
  const double n = lq_norm(w, r);
  if (n == 0.0) return w;
  return (target / n) * w;
}

double calibration_ratio(const GridPtr& grid, const Exponents& e, const ScalarField& f,
                         const plap::SolverOptions& opts) {
  if (f.grid() != *grid) throw GridError("calibration source on a different grid");
  const double fn = lq_norm(f, e.r);
  if (!(fn > 0.0)) throw PreconditionError("calibration source has zero norm");
  const auto rep = plap::solve_p_poisson(plap::PPoissonProblem{e.p, f, ScalarField::zeros(grid)}, opts);
  if (!rep.converged) throw SolverError("calibration solve did not converge: " + rep.message);
  return std::pow(lq_norm(rep.solution, e.s), e.p - 1.0) / fn;
}

Calibration calibrate_C(const GridPtr& grid, const Exponents& e, std::span<const ScalarField> sources,
                        const plap::SolverOptions& opts) {
  if (sources.size() < kMinCalibrationSamples)
    throw PreconditionError("calibrate_C needs at least " + std::to_string(kMinCalibrationSamples) + " samples");
  Calibration cal;
  cal.samples = sources.size();
  for (const ScalarField& f : sources) {
    const double ratio = calibration_ratio(grid, e, f, opts);
    cal.ratios.push_back(ratio);
    cal.raw_max = std::max(cal.raw_max, ratio);
  }
  cal.C = kCalibrationSafety * cal.raw_max;
  return cal;
}

Calibration calibrate_C(const GridPtr& grid, const Exponents& e, std::size_t samples, std::uint64_t seed,
                        const plap::SolverOptions& opts) {
  if (samples < kMinCalibrationSamples)
    throw PreconditionError("calibrate_C needs at least " + std::to_string(kMinCalibrationSamples) + " samples");
  std::mt19937_64 rng(seed);
  std::vector<ScalarField> sources;
  sources.reserve(samples);
  for (std::size_t i = 0; i < samples; ++i) sources.push_back(random_smooth_field(grid, rng));
  Calibration cal = calibrate_C(grid, e, sources, opts);
  cal.seed = seed;
  return cal;
}

double smallness_constant(double max_constant, double C, double measure, double p, int d) {
  return max_constant * C * std::pow(measure, p / d);
}

std::optional<double> invariant_radius(double norm_c, double norm_c_prime, double lambda) {
  if (!(lambda < 1.0)) return std::nullopt;
  return std::max(norm_c, norm_c_prime) / (1.0 - lambda);
}

Certificate certify(const SystemProblem& prob, double C, std::size_t samples, std::uint64_t seed) {
  prob.validate();
  if (!(C > 0.0) || !std::isfinite(C)) throw PreconditionError("certify requires a finite C > 0");
  Certificate cert;
  cert.exponents = prob.exponents();
  cert.C = C;
  cert.C_samples = samples;
  cert.seed = seed;
  cert.epsilon = prob.eps;
  const auto t = coupling::transform_homogeneous(prob.coupling, prob.h, prob.k, prob.p, prob.eps);
  cert.a1p = t.a1p;
  cert.a2p = t.a2p;
  cert.b1p = t.b1p;
  cert.b2p = t.b2p;
  cert.measure = prob.grid->measure();
  cert.norm_c = lq_norm(t.c, prob.r);
  cert.norm_c_prime = lq_norm(t.c_prime, prob.r);
  cert.lambda = smallness_constant(t.max_constant(), C, cert.measure, prob.p, cert.exponents.d);
  cert.M0 = invariant_radius(cert.norm_c, cert.norm_c_prime, cert.lambda);
  cert.valid = cert.M0.has_value() && std::isfinite(*cert.M0);
  if (!cert.valid) cert.M0.reset();
  return cert;
}

Certificate certify(const SystemProblem& prob, const Calibration& cal) {
  return certify(prob, cal.C, cal.samples, cal.seed);
}

BallReport check_ball_invariance(const SystemProblem& prob, const Certificate& cert, double M, std::size_t trials,
                                 std::uint64_t seed, const plap::SolverOptions& opts) {
  if (!cert.valid || !cert.M0) throw PreconditionError("ball invariance requires a valid certificate");
  if (!(M >= *cert.M0)) throw PreconditionError("ball radius " + num(M) + " is below M0 = " + num(*cert.M0));
  if (trials < 1) throw PreconditionError("ball invariance needs at least one trial");

  BallReport rep;
  rep.radius = M;
  rep.trials = trials;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> frac(0.0, 1.0);
  const double limit = M * (1.0 + kBallSlack);
  std::optional<IterationState> warm;
  for (std::size_t t = 0; t < trials; ++t) {
    ScalarField f = ScalarField::zeros(prob.grid);
    ScalarField g = ScalarField::zeros(prob.grid);
    if (t > 0) {
      ScalarField wf = random_smooth_field(prob.grid, rng);
      ScalarField wg = random_smooth_field(prob.grid, rng);
      const double tf = frac(rng), tg = frac(rng);
      f = scaled_to_norm(wf, prob.r, tf * M);
      g = scaled_to_norm(wg, prob.r, tg * M);
    }
    LambdaResult out = apply_lambda(prob, f, g, opts, warm ? &*warm : nullptr);
    const double on = pair_norm(out.f_out, out.g_out, prob.r);
    rep.input_norms.push_back(out.state.norm);
    rep.output_norms.push_back(on);
    rep.max_output_norm = std::max(rep.max_output_norm, on);
    if (on > limit) ++rep.violations;
    warm = std::move(out.state);
  }
  rep.pass = rep.violations == 0;
  return rep;
}

PicardResult picard_solve(const SystemProblem& prob, const PicardOptions& opts) {
  prob.validate();
  if (!(opts.theta > 0.0) || opts.theta > 1.0) throw PreconditionError("damping theta must lie in (0, 1]");
  if (!(opts.tol > 0.0)) throw PreconditionError("Picard tolerance must be > 0");
  if (opts.max_iter < 1) throw PreconditionError("Picard max_iter must be >= 1");

  PicardResult res{ScalarField::zeros(prob.grid), ScalarField::zeros(prob.grid), ScalarField::zeros(prob.grid),
                   ScalarField::zeros(prob.grid), {}};
  ConvergenceTrace& trace = res.trace;
  double theta = opts.theta;
  ScalarField f = ScalarField::zeros(prob.grid);
  ScalarField g = ScalarField::zeros(prob.grid);
  std::optional<IterationState> warm;
  double prev_delta = 0.0;
  int rises = 0;

  for (int it = 1; it <= opts.max_iter; ++it) {
    LambdaResult lam = apply_lambda(prob, f, g, opts.solver, warm ? &*warm : nullptr);
    const double wr = verify::max_weak_residual(lam.state.u, lam.state.v, prob.coupling, prob.p);
    ScalarField fn = blend(f, lam.f_out, theta);
    ScalarField gn = blend(g, lam.g_out, theta);
    const double delta = pair_norm(fn - f, gn - g, prob.r);
    trace.records.push_back({it, lq_norm(fn, prob.r), lq_norm(gn, prob.r), delta, wr});
    f = std::move(fn);
    g = std::move(gn);
    warm = std::move(lam.state);
    if (delta <= opts.tol) {
      trace.converged = true;
      break;
    }
    if (it > 1 && delta > prev_delta) {
      ++rises;
    } else {
      rises = 0;
    }
    if (opts.oscillation_window > 0 && rises >= opts.oscillation_window && theta > 0.5) {
      theta = 0.5;
      trace.damping_fallback = true;
      rises = 0;
    }
    prev_delta = delta;
  }

  IterationState fin = apply_T(prob, f, g, opts.solver, warm ? &*warm : nullptr);
  trace.theta_final = theta;
  trace.final_weak_residual = verify::max_weak_residual(fin.u, fin.v, prob.coupling, prob.p);
  res.u = std::move(fin.u);
  res.v = std::move(fin.v);
  res.f = std::move(f);
  res.g = std::move(g);
  return res;
}

}  // namespace psys::fixpoint
