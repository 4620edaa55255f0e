// Acceptance gate: one PASS/FAIL line per criterion. Exit status is the
// number of failing criteria (0 when all pass).

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "psys/coupling.hpp"
#include "psys/error.hpp"
#include "psys/fixpoint.hpp"
#include "psys/verify.hpp"
#include "support.hpp"

using namespace psys;
using coupling::Coupling;

namespace {

// Pinned tolerances and budgets.
constexpr double kC1MinOrder = 1.7;
constexpr double kC1Seconds = 30.0;
constexpr double kC2MaxRelErr = 1e-2;
constexpr double kC2MinOrder = 0.9;
constexpr double kC2Seconds = 10.0;
constexpr double kC3IdentityTol = 1e-12;
constexpr double kC3Seconds = 1.0;
constexpr double kC4Tol = 1e-14;
constexpr double kC5RadiusFactor = 1.1;
constexpr double kC5Slack = 1e-6;
constexpr double kC5Seconds = 300.0;
constexpr int kC5Trials = 100;
constexpr double kC6PicardTol = 1e-7;
constexpr int kC6MaxIter = 200;
constexpr double kC6ClassifyTol = 1e-6;
constexpr double kC6OracleTol = 1e-6;
constexpr double kC8Tol = 0.0;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

fixpoint::SystemProblem system(const Box& box, int n, double p, double r, Coupling c,
                               std::function<double(double, double)> h, std::function<double(double, double)> k) {
  const auto g = build_grid(box, n);
  return {g, p, r, 1.0, ScalarField::interpolate(g, h), ScalarField::interpolate(g, k), std::move(c)};
}

Outcome criterion1() {
  const auto t0 = std::chrono::steady_clock::now();
  const double pi = std::numbers::pi;
  verify::StudyCase c;
  c.name = "sine";
  c.box = Box::unit_square();
  c.p = 2.0;
  c.source = [pi](double x, double y) { return -2 * pi * pi * std::sin(pi * x) * std::sin(pi * y); };
  c.boundary = [](double, double) { return 0.0; };
  c.exact = [pi](double x, double y) { return std::sin(pi * x) * std::sin(pi * y); };
  const int res[] = {16, 32, 64};
  const auto rep = verify::convergence_study(c, res);
  const double secs = seconds_since(t0);
  bool decreasing = true;
  for (std::size_t i = 1; i < rep.rows.size(); ++i) decreasing &= rep.rows[i].error_max < rep.rows[i - 1].error_max;
  const double order = rep.fitted_order.value_or(0.0);
  Outcome o;
  o.pass = decreasing && order >= kC1MinOrder && secs <= kC1Seconds;
  o.detail = "fitted order " + fmt("%.4f", order) + " (min " + fmt("%.1f", kC1MinOrder) + "), errors " +
             (decreasing ? "decreasing" : "NOT decreasing") + ", " + fmt("%.2f", secs) + " s";
  return o;
}

Outcome criterion2() {
  const auto t0 = std::chrono::steady_clock::now();
  // |u'| u' = -(x - 1/2): u = (2/3) ((1/2)^{3/2} - |x - 1/2|^{3/2})
  verify::StudyCase c;
  c.name = "p3_1d";
  c.box = Box::interval(0, 1);
  c.p = 3.0;
  c.source = [](double, double) { return -1.0; };
  c.boundary = [](double, double) { return 0.0; };
  c.exact = [](double x, double) { return (2.0 / 3.0) * (std::pow(0.5, 1.5) - std::pow(std::fabs(x - 0.5), 1.5)); };
  const int res[] = {64, 128, 256};
  const auto rep = verify::convergence_study(c, res);
  const double secs = seconds_since(t0);
  const double rel = rep.rows.back().error_max / ((2.0 / 3.0) * std::pow(0.5, 1.5));
  const double order = rep.fitted_order.value_or(0.0);
  Outcome o;
  o.pass = rel <= kC2MaxRelErr && order >= kC2MinOrder && secs <= kC2Seconds;
  o.detail = "relative Linf at n=256 " + fmt("%.3e", rel) + ", fitted order " + fmt("%.4f", order) + ", " +
             fmt("%.2f", secs) + " s";
  return o;
}

Outcome criterion3() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<int> dd(2, 8);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  int accepted = 0;
  double worst = 0.0;
  while (accepted < 1000) {
    const int d = dd(rng);
    const double p = 1.0 + (d - 1.0) * unit(rng);
    std::pair<double, double> range;
    try {
      range = fixpoint::admissible_r(d, p);
    } catch (const ExponentError&) {
      continue;
    }
    const double r = range.first + (range.second - range.first) * unit(rng) * (1 - 1e-9);
    const auto e = fixpoint::make_exponents(d, p, r);
    worst = std::max(worst, std::fabs(1.0 / e.r - (e.p - 1.0) / e.s - e.p / e.d));
    ++accepted;
  }
  const double secs = seconds_since(t0);
  return {worst <= kC3IdentityTol && secs <= kC3Seconds,
          "1000 triples, worst defect " + fmt("%.3e", worst) + ", " + fmt("%.3f", secs) + " s"};
}

Outcome criterion4() {
  const auto g = build_grid(Box::rect(0, 1, 0, 1), 8);
  const auto h = ScalarField::interpolate(g, [](double x, double y) { return 1.5 * x - y + 0.25; });
  const auto k = ScalarField::interpolate(g, [](double x, double y) { return std::sin(3 * x) + y * y - 0.5; });
  const double a1 = 0.7, a2 = 1.3, b1 = 0.4, b2 = 2.1;
  double worst = 0.0;
  auto rel = [](double got, double want) {
    return want == 0.0 ? std::fabs(got) : std::fabs(got - want) / std::fabs(want);
  };
  for (double eps : {0.5, 1.0, 2.0})
    for (double p : {1.5, 2.0, 3.0}) {
      const auto t = coupling::transform_homogeneous(Coupling::power_family(p, a1, a2, b1, b2), h, k, p, eps);
      const double near = std::pow(1.0 + eps, p - 1.0);
      const double far = std::pow(1.0 + 1.0 / eps, p - 1.0);
      worst = std::max({worst, rel(t.a1p, a1 * near), rel(t.a2p, a2 * near), rel(t.b1p, b1 * near),
                        rel(t.b2p, b2 * near)});
      for (std::size_t i = 0; i < h.size(); ++i) {
        const double hq = std::pow(std::fabs(h[i]), p - 1.0), kq = std::pow(std::fabs(k[i]), p - 1.0);
        worst = std::max(worst, rel(t.c[i], a1 * far * hq + a2 * far * kq));
        worst = std::max(worst, rel(t.c_prime[i], b1 * far * kq + b2 * far * hq));
      }
    }
  return {worst <= kC4Tol, "9 (eps, p) pairs, worst relative deviation " + fmt("%.3e", worst)};
}

// Admissible stand-in used to exercise the same pipeline when the stated
// exponent is rejected.
void criterion5_admissible_info() {
  const auto t0 = std::chrono::steady_clock::now();
  const double p = 1.8, r = 1.08;
  const auto prob = system(Box::rect(0, 0.3, 0, 0.3), 24, p, r, Coupling::power_family(p, 0.5, 0.5, 0.5, 0.5),
                           [](double x, double) { return 1 + x; }, [](double, double y) { return 1 + y; });
  const auto cal = fixpoint::calibrate_C(prob.grid, prob.exponents(), 20, 5);
  const auto cert = fixpoint::certify(prob, cal);
  if (!cert.valid) {
    std::printf("  info: p=1.8 r=1.08 stand-in: lambda %.4g, certificate invalid\n", cert.lambda);
    return;
  }
  const auto ball = fixpoint::check_ball_invariance(prob, cert, kC5RadiusFactor * *cert.M0, kC5Trials, 6);
  std::printf("  info: p=1.8 r=1.08 stand-in: lambda %.4g, M0 %.4g, %zu/%d trials inside the ball, %.1f s\n",
              cert.lambda, *cert.M0, ball.trials - ball.violations, kC5Trials, seconds_since(t0));
}

Outcome criterion5() {
  const auto t0 = std::chrono::steady_clock::now();
  const double p = 2.2;
  const int d = 2;
  Outcome o;
  try {
    const auto [lo, hi] = fixpoint::admissible_r(d, p);
    const double r = lo;
    const auto prob = system(Box::rect(0, 0.3, 0, 0.3), 24, p, r, Coupling::power_family(p, 0.5, 0.5, 0.5, 0.5),
                             [](double x, double) { return 1 + x; }, [](double, double y) { return 1 + y; });
    const auto cal = fixpoint::calibrate_C(prob.grid, prob.exponents(), 20, 5);
    const auto cert = fixpoint::certify(prob, cal);
    if (!cert.valid) return {false, "lambda " + fmt("%.4g", cert.lambda) + " >= 1"};
    const auto ball = fixpoint::check_ball_invariance(prob, cert, kC5RadiusFactor * *cert.M0, kC5Trials, 6);
    const double secs = seconds_since(t0);
    o.pass = ball.violations == 0 && secs <= kC5Seconds && fixpoint::kBallSlack <= kC5Slack;
    o.detail = "lambda " + fmt("%.4g", cert.lambda) + ", violations " + std::to_string(ball.violations);
  } catch (const ExponentError& e) {
    o.pass = false;
    o.detail = std::string("no admissible r exists for p = 2.2, d = 2: ") + e.what();
  }
  return o;
}

Outcome criterion6() {
  Outcome o;
  const double p = 2.2;
  const double r = p / (p - 1.0);
  const auto prob = system(Box::rect(0, 0.3, 0, 0.3), 24, p, r, Coupling::power_family(p, 0.5, 0.5, 0.5, 0.5),
                           [](double x, double) { return 1 + x; }, [](double, double y) { return 1 + y; });
  fixpoint::PicardOptions opt;
  opt.tol = kC6PicardTol;
  opt.max_iter = kC6MaxIter;
  const auto res = fixpoint::picard_solve(prob, opt);
  const auto cls = verify::weak_residuals(res.u, res.v, prob.coupling, p, kC6ClassifyTol);

  const Box lin_box = Box::rect(0, 0.5, 0, 0.5);
  const int n = 16;
  const auto lin = system(lin_box, n, 2.0, 2.0, Coupling::power_family(2.0, 1, 0, 1, 0),
                          [](double, double) { return 1.0; }, [](double, double) { return 1.0; });
  const auto lres = fixpoint::picard_solve(lin, opt);
  const auto oracle = test::monolithic_reaction_diffusion(lin_box, n, 1.0, 1.0);
  double disc = 0.0;
  for (std::size_t i = 0; i < oracle.size(); ++i)
    disc = std::max({disc, std::fabs(lres.u[i] - oracle[i]), std::fabs(lres.v[i] - oracle[i])});

  o.pass = res.trace.converged && cls.is_solution() && lres.trace.converged && disc <= kC6OracleTol;
  o.detail = std::string(res.trace.converged ? "converged" : "NOT converged") + " in " +
             std::to_string(res.trace.records.size()) + " iterations, verdict " +
             std::string(verify::to_string(cls.verdict)) + " (max |R| " + fmt("%.2e", cls.max_abs()) +
             "), linear oracle discrepancy " + fmt("%.2e", disc);
  return o;
}

Outcome criterion7() {
  const std::pair<double, double> shifts[] = {{1, 0}, {0.5, 0.2}, {2, 1}};
  int passed = 0, total = 0;
  std::string failures;
  auto run = [&](const char* label, const ScalarField& u, const ScalarField& v, const Coupling& c, double p,
                 verify::ShiftBranch b) {
    for (const auto& [a, be] : shifts) {
      ++total;
      const auto rep = verify::shift_test(u, v, c, p, a, be, b);
      if (rep.precondition_ok && rep.pass && rep.gradient_unchanged) {
        ++passed;
      } else {
        failures += std::string(" ") + label + "(" + fmt("%g", a) + "," + fmt("%g", be) + ")" +
                    (rep.precondition_ok ? "" : ":" + rep.precondition_failure) +
                    (rep.pass ? "" : ":class lost") + (rep.gradient_unchanged ? "" : ":flux moved");
      }
    }
  };

  const auto g = build_grid(Box::unit_square(), 16);
  const auto para = [&](double s) {
    return ScalarField::interpolate(g, [s](double x, double y) { return s * (x * x + y * y); });
  };
  run("paraboloid-super", para(-1), ScalarField::zeros(g), Coupling::zero(), 2.0, verify::ShiftBranch::super);
  run("paraboloid-sub", para(1), ScalarField::zeros(g), Coupling::zero(), 2.0, verify::ShiftBranch::sub);

  const auto c = Coupling::power_family(2.0, 0.5, 0.5, 0.5, 0.5);
  auto constant_source = [&](double shift) {
    fixpoint::SystemProblem prob{g, 2.0, 2.0, 1.0, ScalarField::constant(g, 0.5), ScalarField::constant(g, 0.2),
                                 c.shifted(shift, shift)};
    return fixpoint::picard_solve(prob);
  };
  const auto sup = constant_source(-1.0);
  const auto sub = constant_source(1.0);
  if (!sup.trace.converged || !sub.trace.converged) return {false, "Picard failed on the constant-source problems"};
  run("monotone-super", sup.u, sup.v, c, 2.0, verify::ShiftBranch::super);
  run("monotone-sub", sub.u, sub.v, c, 2.0, verify::ShiftBranch::sub);

  return {passed == total, std::to_string(passed) + "/" + std::to_string(total) + " shifted pairs kept their class" +
                               (failures.empty() ? "" : "; failed:" + failures)};
}

Outcome criterion8() {
  const auto s = coupling::SampleSpec::over(Box::unit_square());
  const auto growth = coupling::check_growth(Coupling::from_strings("u^3", "0", 1, 0, 0, 0), 2.0, s);
  const auto mono = coupling::check_monotone(Coupling::from_strings("0-u", "0", 1, 0, 0, 0), s);
  const bool ok = !growth.pass && growth.max_violation > kC8Tol && !mono.pass && !mono.violations.empty();
  return {ok, "growth max violation " + fmt("%.6g", growth.max_violation) + " at |u| = " +
                  fmt("%g", std::fabs(growth.worst[2])) + ", monotone violations " +
                  std::to_string(mono.violations.size())};
}

}  // namespace

int main() {
  struct Entry {
    int id;
    const char* name;
    Outcome (*fn)();
  };
  const Entry entries[] = {
      {1, "manufactured p=2 solution", criterion1},
      {2, "1D p=3 closed form", criterion2},
      {3, "exponent identity", criterion3},
      {4, "homogeneous transform constants", criterion4},
      {5, "ball invariance at p=2.2", criterion5},
      {6, "Picard end-to-end", criterion6},
      {7, "shift proposition", criterion7},
      {8, "hypothesis falsification", criterion8},
  };
  int failures = 0;
  for (const auto& e : entries) {
    Outcome o;
    try {
      o = e.fn();
    } catch (const std::exception& ex) {
      o = {false, std::string("exception: ") + ex.what()};
    }
    std::printf("criterion %d [%s] %s: %s\n", e.id, o.pass ? "PASS" : "FAIL", e.name, o.detail.c_str());
    std::fflush(stdout);
    if (e.id == 5) {
      try {
        criterion5_admissible_info();
      } catch (const std::exception& ex) {
        std::printf("  info: stand-in run failed: %s\n", ex.what());
      }
    }
    if (!o.pass) ++failures;
  }
  std::printf("%d of 8 criteria passed\n", 8 - failures);
  return failures;
}
