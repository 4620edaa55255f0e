#include "psys/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "psys/error.hpp"

namespace psys::verify {

namespace {

Verdict classify(std::span<const double> r1, std::span<const double> r2, double tol) {
  double lo = 0.0, hi = 0.0;
  for (auto r : {r1, r2})
    for (double x : r) {
      lo = std::min(lo, x);
      hi = std::max(hi, x);
    }
  if (lo >= -tol && hi <= tol) return Verdict::solution;
  if (lo >= -tol) return Verdict::supersolution;
  if (hi <= tol) return Verdict::subsolution;
  return Verdict::neither;
}

void require_pair(const ScalarField& u, const ScalarField& v) {
  if (!u.same_grid(v)) throw GridError("u and v live on different grids");
}

}  // namespace

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::solution: return "solution";
    case Verdict::supersolution: return "supersolution";
    case Verdict::subsolution: return "subsolution";
    case Verdict::neither: return "neither";
  }
  return "neither";
}

bool Classification::is_solution() const { return verdict == Verdict::solution; }
bool Classification::is_supersolution() const {
  return verdict == Verdict::solution || verdict == Verdict::supersolution;
}
bool Classification::is_subsolution() const {
  return verdict == Verdict::solution || verdict == Verdict::subsolution;
}

double Classification::max_abs() const {
  double m = 0.0;
  for (std::size_t i = 0; i < r1.size(); ++i) m = std::max({m, std::fabs(r1[i]), std::fabs(r2[i])});
  return m;
}

std::vector<std::size_t> Classification::offending() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < hats.size(); ++i)
    if (std::fabs(r1[i]) > tol || std::fabs(r2[i]) > tol) out.push_back(hats[i]);
  return out;
}

Classification weak_residuals(const ScalarField& u, const ScalarField& v, const coupling::Coupling& c, double p,
                              double tol) {
  require_pair(u, v);
  if (!(tol >= 0.0)) throw PreconditionError("classification tolerance must be non-negative");
  const Grid& g = u.grid();
  const auto flux_u = plap::p_laplace_action(u, p);
  const auto flux_v = plap::p_laplace_action(v, p);
  const auto [phi, psi] = coupling::nemytskii(c, u, v);
  const auto mass = g.lumped_mass();

  Classification out;
  out.tol = tol;
  const auto interior = g.interior_nodes();
  out.hats.assign(interior.begin(), interior.end());
  const std::size_t m = out.hats.size();
  out.flux1.resize(m);
  out.flux2.resize(m);
  out.reaction1.resize(m);
  out.reaction2.resize(m);
  out.r1.resize(m);
  out.r2.resize(m);
  for (std::size_t k = 0; k < m; ++k) {
    const std::size_t i = out.hats[k];
    out.flux1[k] = flux_u[i];
    out.flux2[k] = flux_v[i];
    out.reaction1[k] = mass[i] * phi[i];
    out.reaction2[k] = mass[i] * psi[i];
    out.r1[k] = out.flux1[k] + out.reaction1[k];
    out.r2[k] = out.flux2[k] + out.reaction2[k];
  }
  out.verdict = classify(out.r1, out.r2, tol);
  return out;
}

double max_weak_residual(const ScalarField& u, const ScalarField& v, const coupling::Coupling& c, double p) {
  return weak_residuals(u, v, c, p, 0.0).max_abs();
}

std::pair<double, double> residual_against(const ScalarField& u, const ScalarField& v,
                                           const coupling::Coupling& c, double p, const ScalarField& eta) {
  require_pair(u, v);
  if (!eta.same_grid(u)) throw GridError("test function lives on a different grid");
  const Grid& g = u.grid();
  const auto flux_u = plap::p_laplace_action(u, p);
  const auto flux_v = plap::p_laplace_action(v, p);
  const auto [phi, psi] = coupling::nemytskii(c, u, v);
  const auto mass = g.lumped_mass();
  double r1 = 0.0, r2 = 0.0;
  for (std::size_t i : g.interior_nodes()) {
    r1 += (flux_u[i] + mass[i] * phi[i]) * eta[i];
    r2 += (flux_v[i] + mass[i] * psi[i]) * eta[i];
  }
  return {r1, r2};
}

ShiftReport shift_test(const ScalarField& u, const ScalarField& v, const coupling::Coupling& c, double p,
                       double alpha, double beta, ShiftBranch branch, double tol) {
  require_pair(u, v);
  ShiftReport rep;
  rep.branch = branch;
  rep.alpha = alpha;
  rep.beta = beta;
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    rep.precondition_failure = "alpha must be > 0";
    return rep;
  }
  if (!(beta >= 0.0) || !std::isfinite(beta)) {
    rep.precondition_failure = "beta must be >= 0";
    return rep;
  }

  rep.before = weak_residuals(u, v, c, p, tol);
  const bool super = branch == ShiftBranch::super;
  if (super ? !rep.before->is_supersolution() : !rep.before->is_subsolution()) {
    rep.precondition_failure = std::string("input pair is not a ") + (super ? "supersolution" : "subsolution") +
                               " (verdict " + std::string(to_string(rep.before->verdict)) + ")";
    return rep;
  }

  coupling::SampleSpec spec = coupling::SampleSpec::over(u.grid().box());
  spec.u_min = u.min() - alpha;
  spec.u_max = u.max() + alpha;
  spec.v_min = v.min() - beta;
  spec.v_max = v.max() + beta;
  const auto mono = coupling::check_monotone(c, spec);
  if (!mono.pass) {
    rep.precondition_failure = "coupling is not monotone over the field ranges (" +
                               std::to_string(mono.violations.size()) + " violations, " +
                               std::to_string(mono.evaluation_failures) + " evaluation failures)";
    return rep;
  }
  rep.precondition_ok = true;

  const double sign = super ? 1.0 : -1.0;
  const auto grid = u.grid_ptr();
  const ScalarField us = u + ScalarField::constant(grid, sign * alpha);
  const ScalarField vs = v + ScalarField::constant(grid, sign * beta);
  rep.after = weak_residuals(us, vs, c, p, tol);
  double scale = 0.0;
  for (std::size_t i = 0; i < rep.before->flux1.size(); ++i) {
    scale = std::max({scale, std::fabs(rep.before->flux1[i]), std::fabs(rep.before->flux2[i])});
    rep.flux_change = std::max({rep.flux_change, std::fabs(rep.after->flux1[i] - rep.before->flux1[i]),
                                std::fabs(rep.after->flux2[i] - rep.before->flux2[i])});
  }
  rep.gradient_unchanged = rep.flux_change <= kFluxRoundingTolerance * std::max(scale, 1.0);
  rep.pass = super ? rep.after->is_supersolution() : rep.after->is_subsolution();
  return rep;
}

StudyCase StudyCase::manufactured_sine() {
  StudyCase c;
  c.name = "manufactured_sine";
  c.box = Box::unit_square();
  c.p = 2.0;
  const double pi = std::numbers::pi;
  c.source = [pi](double x, double y) { return -2.0 * pi * pi * std::sin(pi * x) * std::sin(pi * y); };
  c.boundary = [](double, double) { return 0.0; };
  c.exact = [pi](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); };
  return c;
}

StudyCase StudyCase::affine() {
  StudyCase c;
  c.name = "affine";
  c.box = Box::unit_square();
  c.p = 2.0;
  c.source = [](double, double) { return 0.0; };
  c.boundary = [](double x, double y) { return 2.0 * x + 3.0 * y; };
  c.exact = c.boundary;
  return c;
}

StudyCase StudyCase::constant_source_1d(double p, double c0) {
  if (!(p > 1.0)) throw PreconditionError("constant_source_1d requires p > 1");
  StudyCase c;
  c.name = "constant_source_1d";
  c.box = Box::interval(0.0, 1.0);
  c.p = p;
  c.source = [c0](double, double) { return c0; };
  c.boundary = [](double, double) { return 0.0; };
  // |u'|^{p-2} u' = c0 (x - 1/2), integrated from 0.
  const double q = 1.0 / (p - 1.0);
  const double amp = (c0 > 0 ? 1.0 : (c0 < 0 ? -1.0 : 0.0)) * std::pow(std::fabs(c0), q) / (q + 1.0);
  c.exact = [amp, q](double x, double) {
    return amp * (std::pow(std::fabs(x - 0.5), q + 1.0) - std::pow(0.5, q + 1.0));
  };
  return c;
}

double fit_order(std::span<const int> resolutions, std::span<const double> errors) {
  if (resolutions.size() != errors.size() || resolutions.size() < 2)
    throw PreconditionError("fit_order needs matching lists of length >= 2");
  const std::size_t m = resolutions.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::log(1.0 / resolutions[i]);
    const double y = std::log(errors[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = m * sxx - sx * sx;
  if (denom == 0.0) throw PreconditionError("fit_order needs distinct resolutions");
  return (m * sxy - sx * sy) / denom;
}

StudyReport convergence_study(const StudyCase& c, std::span<const int> resolutions) {
  if (resolutions.size() < 3) throw PreconditionError("convergence_study needs at least 3 resolutions");
  if (!c.source || !c.boundary || !c.exact) throw PreconditionError("study case is missing a source, boundary or exact solution");

  StudyReport rep;
  rep.name = c.name;
  std::vector<double> errs;
  for (int n : resolutions) {
    const GridPtr grid = build_grid(c.box, n);
    plap::PPoissonProblem prob{c.p, ScalarField::interpolate(grid, c.source),
                               ScalarField::interpolate(grid, c.boundary)};
    const auto sol = plap::solve_p_poisson(prob, c.solver);
    const ScalarField err = sol.solution - ScalarField::interpolate(grid, c.exact);
    StudyRow row;
    row.n = n;
    row.error_max = max_abs(err);
    row.error_l2 = lq_norm(err, 2.0);
    row.converged = sol.converged;
    rep.rows.push_back(row);
    errs.push_back(row.error_max);
  }

  rep.exact = std::all_of(errs.begin(), errs.end(), [](double e) { return e <= 1e-8; });
  if (rep.exact) return rep;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) {
    const auto& a = rep.rows[i - 1];
    const auto& b = rep.rows[i];
    if (a.error_max > 0 && b.error_max > 0 && a.n != b.n)
      rep.rows[i].order = std::log(a.error_max / b.error_max) / std::log(static_cast<double>(b.n) / a.n);
  }
  if (std::all_of(errs.begin(), errs.end(), [](double e) { return e > 0.0; }))
    rep.fitted_order = fit_order(resolutions, errs);
  return rep;
}

}  // namespace psys::verify
