#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "psys/error.hpp"
#include "psys/field.hpp"
#include "support.hpp"

using namespace psys;

TEST(Grid, UnitSquareCounts) {
  const auto g = build_grid(Box::unit_square(), 4);
  EXPECT_EQ(g->node_count(), 25u);
  EXPECT_EQ(g->interior_nodes().size(), 9u);
  EXPECT_EQ(g->boundary_nodes().size(), 16u);
  EXPECT_EQ(g->element_count(), 32u);
  EXPECT_EQ(g->measure(), 1.0);
}

TEST(Grid, IntervalCounts) {
  const auto g = build_grid(Box::interval(0, 1), 10);
  EXPECT_EQ(g->node_count(), 11u);
  EXPECT_EQ(g->interior_nodes().size(), 9u);
  EXPECT_EQ(g->element_count(), 10u);
}

TEST(Grid, RectMeasure) { EXPECT_EQ(build_grid(Box::rect(0, 1, 0, 2), 8)->measure(), 2.0); }

TEST(Grid, Errors) {
  EXPECT_THROW(build_grid(Box::unit_square(), 1), GridError);
  EXPECT_THROW(build_grid(Box::rect(0, 0, 0, 1), 4), GridError);
  EXPECT_THROW(build_grid(Box::interval(1, 0), 4), GridError);
}

TEST(Grid, BoundaryCountInvariant) {
  for (int n : {2, 3, 7, 16}) {
    const auto g = build_grid(Box::rect(-1, 2, 0.5, 1), n);
    const std::size_t total = (n + 1) * (n + 1), inner = (n - 1) * (n - 1);
    EXPECT_EQ(g->node_count(), total);
    EXPECT_EQ(g->boundary_nodes().size(), total - inner);
    EXPECT_DOUBLE_EQ(g->element_measure(), g->hx() * g->hy() / 2);
  }
}

TEST(Grid, TrianglesPositiveArea) {
  const auto g = build_grid(Box::rect(0, 2, 0, 1), 5);
  for (std::size_t e = 0; e < g->element_count(); ++e) {
    const auto v = g->element(e);
    const double ax = g->x(v[1]) - g->x(v[0]), ay = g->y(v[1]) - g->y(v[0]);
    const double bx = g->x(v[2]) - g->x(v[0]), by = g->y(v[2]) - g->y(v[0]);
    EXPECT_NEAR(0.5 * (ax * by - ay * bx), g->hx() * g->hy() / 2, 1e-15);
  }
}

TEST(Grid, LumpedMassSumsToMeasure) {
  const auto g = build_grid(Box::rect(0, 3, 0, 1), 9);
  double s = 0;
  for (double m : g->lumped_mass()) s += m;
  EXPECT_NEAR(s, 3.0, 1e-13);
}

TEST(Field, RejectsNonFinite) {
  const auto g = build_grid(Box::unit_square(), 2);
  std::vector<double> v(g->node_count(), 0.0);
  v[3] = std::nan("");
  EXPECT_THROW(ScalarField(g, v), Error);
  EXPECT_THROW(ScalarField(g, std::vector<double>(3, 0.0)), Error);
}

TEST(Field, AffineGradientExact) {
  const auto g = build_grid(Box::rect(0, 1, 0, 2), 7);
  const auto u = ScalarField::interpolate(g, [](double x, double y) { return 2 * x + 3 * y; });
  const auto grad = gradient(u);
  ASSERT_EQ(grad.size(), g->element_count());
  for (std::size_t e = 0; e < grad.size(); ++e) {
    EXPECT_NEAR(grad.gx[e], 2.0, 1e-13);
    EXPECT_NEAR(grad.gy[e], 3.0, 1e-13);
  }
}

TEST(Field, ConstantGradientZero) {
  const auto g = build_grid(Box::unit_square(), 5);
  const auto grad = gradient(ScalarField::constant(g, 4.2));
  for (std::size_t e = 0; e < grad.size(); ++e) {
    EXPECT_EQ(grad.gx[e], 0.0);
    EXPECT_EQ(grad.gy[e], 0.0);
  }
}

TEST(Field, SquareSlopeMidpointAndConvergence) {
  double prev = 1e9;
  for (int n : {25, 50, 100, 200}) {
    const auto g = build_grid(Box::interval(0, 1), n);
    const auto u = ScalarField::interpolate(g, [](double x, double) { return x * x; });
    const auto grad = gradient(u);
    const double h = 1.0 / n;
    double l2 = 0;
    for (std::size_t e = 0; e < grad.size(); ++e) {
      const double x = e * h;
      EXPECT_NEAR(grad.gx[e], ((x + h) * (x + h) - x * x) / h, 1e-11);
      // |2x_mid + ... - 2x| integrated exactly over the cell
      const double c = grad.gx[e];
      l2 += (std::pow(c - 2 * x, 3) - std::pow(c - 2 * (x + h), 3)) / 6.0;
    }
    l2 = std::sqrt(l2);
    EXPECT_LT(l2, prev);
    if (n == 100) {
      EXPECT_NEAR(l2 * n, 1.0 / std::sqrt(3.0), 1e-6);  // h/sqrt(3)
    }
    prev = l2;
  }
}

TEST(Norms, Constants) {
  const auto g = build_grid(Box::unit_square(), 6);
  EXPECT_NEAR(lq_norm(ScalarField::constant(g, 1.0), 2), 1.0, 1e-14);
  EXPECT_EQ(lq_norm(ScalarField::zeros(g), 3.5), 0.0);
  EXPECT_THROW(lq_norm(ScalarField::zeros(g), 0.5), Error);
}

TEST(Norms, LinearIntervalL2) {
  const auto g = build_grid(Box::interval(0, 1), 256);
  const auto w = ScalarField::interpolate(g, [](double x, double) { return x; });
  EXPECT_LE(std::fabs(lq_norm(w, 2) - std::sqrt(1.0 / 3.0)), 1e-3);
}

TEST(Norms, PairNorm) {
  const auto g = build_grid(Box::unit_square(), 4);
  std::mt19937_64 rng(3);
  const auto w = test::random_field(g, rng);
  EXPECT_EQ(pair_norm(ScalarField::zeros(g), ScalarField::zeros(g), 2), 0.0);
  EXPECT_EQ(pair_norm(w, ScalarField::zeros(g), 1.5), lq_norm(w, 1.5));
  EXPECT_NEAR(pair_norm(ScalarField::constant(g, 1), ScalarField::constant(g, 2), 2), 2.0, 1e-14);
  const auto other = ScalarField::zeros(build_grid(Box::unit_square(), 5));
  EXPECT_THROW(pair_norm(w, other, 2), GridError);
}

TEST(NormProperty, Homogeneity) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> a(-10, 10), q(1, 6);
  const auto g = build_grid(Box::rect(0, 2, 0, 1), 9);
  for (int t = 0; t < 200; ++t) {
    const auto w = test::random_field(g, rng);
    const double al = a(rng), qq = q(rng);
    EXPECT_LE(test::rel_err(lq_norm(al * w, qq), std::fabs(al) * lq_norm(w, qq)), 1e-12);
  }
}

TEST(NormProperty, TriangleInequality) {
  std::mt19937_64 rng(6);
  std::uniform_real_distribution<double> q(1, 8);
  const auto g = build_grid(Box::unit_square(), 8);
  for (int t = 0; t < 200; ++t) {
    const auto a = test::random_field(g, rng), b = test::random_field(g, rng);
    const double qq = q(rng);
    EXPECT_LE(lq_norm(a + b, qq), lq_norm(a, qq) + lq_norm(b, qq) + 1e-12);
  }
}

TEST(NormProperty, NestedNormMonotonicity) {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> q(1, 10), side(0.1, 3);
  for (int t = 0; t < 200; ++t) {
    const auto g = build_grid(Box::rect(0, side(rng), 0, side(rng)), 6);
    const auto w = test::random_field(g, rng, -3, 3);
    double q1 = q(rng), q2 = q(rng);
    if (q1 > q2) std::swap(q1, q2);
    EXPECT_LE(lq_norm(w, q1), std::pow(g->measure(), 1 / q1 - 1 / q2) * lq_norm(w, q2) * (1 + 1e-10));
  }
}

TEST(Csv, RoundTripBitExact) {
  std::mt19937_64 rng(8);
  for (const Box& b : {Box::unit_square(), Box::interval(-1, 3)}) {
    const auto g = build_grid(b, 7);
    const auto w = test::random_field(g, rng, -1e3, 1e3);
    std::stringstream ss;
    write_csv(ss, w);
    const auto back = read_csv(ss, g);
    for (std::size_t i = 0; i < w.size(); ++i) EXPECT_EQ(back[i], w[i]);
  }
}

TEST(Csv, HeaderAndRowsChecked) {
  const auto g = build_grid(Box::unit_square(), 2);
  std::stringstream ss;
  write_csv(ss, ScalarField::zeros(g));
  std::string text = ss.str();
  EXPECT_EQ(text.substr(0, 12), "x,y,value\n0,");

  std::stringstream missing(text.substr(0, text.rfind('\n', text.size() - 2) + 1));
  EXPECT_THROW(read_csv(missing, g), CsvError);
  std::stringstream bad_header("a,b,c\n");
  EXPECT_THROW(read_csv(bad_header, g), CsvError);
  std::stringstream wrong_grid(text);
  EXPECT_THROW(read_csv(wrong_grid, build_grid(Box::unit_square(), 3)), CsvError);
}

TEST(Field, BlendAndAbsPow) {
  const auto g = build_grid(Box::unit_square(), 3);
  const auto a = ScalarField::constant(g, 2.0), b = ScalarField::constant(g, -4.0);
  const auto m = blend(a, b, 0.25);
  EXPECT_EQ(m[0], 0.5);
  EXPECT_EQ(abs_pow(b, 0.5)[2], 2.0);
}
