#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "psys/error.hpp"
#include "psys/plap.hpp"
#include "support.hpp"

using namespace psys;
using namespace psys::plap;

namespace {
const double kPi = std::numbers::pi;

double interior_weak_defect(const ScalarField& u, double p, const ScalarField& f) {
  const auto flux = p_laplace_action(u, p);
  const auto mass = u.grid().lumped_mass();
  double worst = 0;
  for (std::size_t i : u.grid().interior_nodes()) worst = std::max(worst, std::fabs(flux[i] + mass[i] * f[i]));
  return worst;
}
}  // namespace

TEST(Energy, Examples) {
  const auto g2 = build_grid(Box::unit_square(), 8);
  EXPECT_EQ(energy(ScalarField::zeros(g2), 2.5, ScalarField::zeros(g2)), 0.0);
  EXPECT_NEAR(energy(ScalarField::constant(g2, 3.0), 1.7, ScalarField::constant(g2, 1.0)), 3.0, 1e-13);
  for (int n : {10, 100}) {
    const auto g1 = build_grid(Box::interval(0, 1), n);
    const auto u = ScalarField::interpolate(g1, [](double x, double) { return x; });
    EXPECT_NEAR(energy(u, 2.0, ScalarField::zeros(g1)), 0.5, 1e-13);
  }
}

TEST(Energy, GridMismatch) {
  EXPECT_THROW(energy(ScalarField::zeros(build_grid(Box::unit_square(), 4)), 2.0,
                      ScalarField::zeros(build_grid(Box::unit_square(), 5))),
               GridError);
}

TEST(Solve, RejectsPAtMostOne) {
  const auto g = build_grid(Box::unit_square(), 4);
  EXPECT_THROW(solve_p_poisson({1.0, ScalarField::zeros(g), ScalarField::zeros(g)}), PreconditionError);
}

TEST(Solve, AffineHarmonic) {
  const auto g = build_grid(Box::unit_square(), 20);
  const auto h = ScalarField::interpolate(g, [](double x, double y) { return 2 * x + 3 * y; });
  const auto rep = solve_p_poisson({2.0, ScalarField::zeros(g), h});
  ASSERT_TRUE(rep.converged);
  EXPECT_LE(max_abs(rep.solution - h), 1e-8);
}

TEST(Solve, ConstantsArePHarmonic) {
  const auto g = build_grid(Box::rect(0, 2, -1, 1), 12);
  for (double p : {1.2, 1.5, 2.0, 3.0, 4.5}) {
    const auto rep = solve_p_poisson({p, ScalarField::zeros(g), ScalarField::constant(g, -2.5)});
    ASSERT_TRUE(rep.converged) << p;
    EXPECT_LE(max_abs(rep.solution - ScalarField::constant(g, -2.5)), 1e-12) << p;
  }
}

TEST(Solve, BoundaryValuesExact) {
  const auto g = build_grid(Box::unit_square(), 10);
  std::mt19937_64 rng(1);
  const auto h = test::random_field(g, rng);
  const auto rep = solve_p_poisson({2.7, test::random_field(g, rng), h});
  for (std::size_t i : g->boundary_nodes()) EXPECT_EQ(rep.solution[i], h[i]);
}

TEST(Solve, ManufacturedSineSecondOrder) {
  double prev = 0;
  for (int n : {16, 32, 64}) {
    const auto g = build_grid(Box::unit_square(), n);
    const auto f = ScalarField::interpolate(
        g, [](double x, double y) { return -2 * kPi * kPi * std::sin(kPi * x) * std::sin(kPi * y); });
    const auto rep = solve_p_poisson({2.0, f, ScalarField::zeros(g)});
    ASSERT_TRUE(rep.converged);
    const auto ex = ScalarField::interpolate(g, [](double x, double y) { return std::sin(kPi * x) * std::sin(kPi * y); });
    const double err = max_abs(rep.solution - ex);
    if (prev > 0) {
      EXPECT_GT(std::log2(prev / err), 1.8);
    }
    prev = err;
  }
}

TEST(Solve, OneDimensionalClosedForm) {
  // |u'| u' = c (x - 1/2) integrates to u = -sgn(c) (2/3) sqrt|c| ((1/2)^{3/2} - |x - 1/2|^{3/2}).
  for (double c : {-1.0, 2.0}) {
    const auto g = build_grid(Box::interval(0, 1), 256);
    const auto rep = solve_p_poisson({3.0, ScalarField::constant(g, c), ScalarField::zeros(g)});
    ASSERT_TRUE(rep.converged);
    const double sc = c < 0 ? -1.0 : 1.0;
    const auto ex = ScalarField::interpolate(g, [&](double x, double) {
      return -sc * (2.0 / 3.0) * std::sqrt(std::fabs(c)) * (std::pow(0.5, 1.5) - std::pow(std::fabs(x - 0.5), 1.5));
    });
    EXPECT_LE(max_abs(rep.solution - ex) / max_abs(ex), 1e-2);
  }
}

TEST(SolveProperty, EnergyMonotone) {
  std::mt19937_64 rng(2);
  const auto g = build_grid(Box::unit_square(), 16);
  for (double p : {1.3, 1.7, 2.5, 4.0, 6.0}) {
    const auto rep = solve_p_poisson({p, test::random_field(g, rng, -5, 5), test::random_field(g, rng)});
    ASSERT_TRUE(rep.converged) << p << " " << rep.message;
    for (std::size_t k = 1; k < rep.objective_history.size(); ++k)
      EXPECT_LE(rep.objective_history[k], rep.objective_history[k - 1] + 1e-12) << "p=" << p << " k=" << k;
  }
}

TEST(SolveProperty, MaximumPrinciple) {
  std::mt19937_64 rng(3);
  const auto g = build_grid(Box::rect(0, 1, 0, 2), 14);
  for (double p : {1.4, 2.0, 3.3}) {
    const auto h = test::random_field(g, rng, -2, 3);
    double lo = 1e300, hi = -1e300;
    for (std::size_t i : g->boundary_nodes()) {
      lo = std::min(lo, h[i]);
      hi = std::max(hi, h[i]);
    }
    const auto rep = solve_p_poisson({p, ScalarField::zeros(g), h});
    ASSERT_TRUE(rep.converged);
    for (std::size_t i = 0; i < g->node_count(); ++i) {
      EXPECT_GE(rep.solution[i], lo - 1e-9);
      EXPECT_LE(rep.solution[i], hi + 1e-9);
    }
  }
}

TEST(SolveProperty, BoundaryScalingCovariance) {
  std::mt19937_64 rng(4);
  const auto g = build_grid(Box::unit_square(), 12);
  for (double p : {1.5, 2.0, 3.0}) {
    const auto h = test::random_field(g, rng);
    const auto base = solve_p_poisson({p, ScalarField::zeros(g), h});
    for (double a : {0.1, 3.0, -2.0}) {
      const auto scaled = solve_p_poisson({p, ScalarField::zeros(g), a * h});
      ASSERT_TRUE(scaled.converged);
      EXPECT_LE(max_abs(scaled.solution - a * base.solution), 1e-6 * std::fabs(a) * max_abs(base.solution));
    }
  }
}

TEST(SolveProperty, WeakFormConsistency) {
  std::mt19937_64 rng(5);
  SolverOptions opt;
  const auto g = build_grid(Box::unit_square(), 16);
  for (double p : {1.5, 1.8, 2.0, 2.6, 3.5}) {
    const auto f = test::random_field(g, rng, -3, 3);
    const auto rep = solve_p_poisson({p, f, test::random_field(g, rng)}, opt);
    ASSERT_TRUE(rep.converged);
    EXPECT_LE(interior_weak_defect(rep.solution, p, f), 10 * opt.tol) << p;
  }
}

TEST(SolveProperty, SourceHomogeneity) {
  std::mt19937_64 rng(6);
  const auto g = build_grid(Box::unit_square(), 12);
  const double p = 1.7;
  const auto f = test::random_field(g, rng);
  const auto u1 = solve_p_poisson({p, f, ScalarField::zeros(g)});
  const auto u2 = solve_p_poisson({p, 4.0 * f, ScalarField::zeros(g)});
  const double s = std::pow(4.0, 1.0 / (p - 1));
  EXPECT_LE(max_abs(u2.solution - s * u1.solution), 1e-6 * s * max_abs(u1.solution));
}

TEST(Solve, NonConvergenceIsReported) {
  const auto g = build_grid(Box::unit_square(), 16);
  SolverOptions opt;
  opt.max_iter = 1;
  opt.continuation = false;
  std::mt19937_64 rng(7);
  const auto rep = solve_p_poisson({3.0, test::random_field(g, rng, -10, 10), ScalarField::zeros(g)}, opt);
  EXPECT_FALSE(rep.converged);
  EXPECT_GT(rep.gradient_norm, opt.tol);
}
