#pragma once

// The reaction pair (phi, psi) of the system
//   -div(|grad u|^{p-2} grad u) + phi(x, u, v) = 0
//   -div(|grad v|^{p-2} grad v) + psi(x, u, v) = 0
// together with the growth constants it is claimed to satisfy:
//   |phi| <= a1 |u|^{p-1} + a2 |v|^{p-1},   |psi| <= b1 |v|^{p-1} + b2 |u|^{p-1}.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "psys/expr.hpp"
#include "psys/field.hpp"

namespace psys::coupling {

struct Coupling {
  expr::Expr phi;
  expr::Expr psi;
  double a1 = 0.0, a2 = 0.0, b1 = 0.0, b2 = 0.0;

  /// Throws on parse errors or negative constants.
  static Coupling from_strings(std::string_view phi, std::string_view psi, double a1, double a2,
                               double b1, double b2);
  /// phi = a1 odd_pow(u, p-1) + a2 odd_pow(v, p-1),
  /// psi = b1 odd_pow(v, p-1) + b2 odd_pow(u, p-1).
  static Coupling power_family(double p, double a1, double a2, double b1, double b2);
  static Coupling zero();

  /// Adds the constants (phi_shift, psi_shift) to the two expressions.
  Coupling shifted(double phi_shift, double psi_shift) const;

  double phi_at(double x, double y, double u, double v) const {
    return phi.evaluate(expr::Bindings::at(x, y, u, v));
  }
  double psi_at(double x, double y, double u, double v) const {
    return psi.evaluate(expr::Bindings::at(x, y, u, v));
  }
};

/// phi~(x, u, v) = phi(x, u + h, v + k), psi~ likewise, with the growth
/// bound |phi~| <= a1' |u|^{p-1} + a2' |v|^{p-1} + c(x) obtained from
/// |a + b|^q <= (1+eps)^q |a|^q + (1+1/eps)^q |b|^q, q = p - 1.
struct TransformedCoupling {
  Coupling base;
  ScalarField h;
  ScalarField k;
  double p;
  double eps;
  double a1p, a2p, b1p, b2p;
  ScalarField c;        // a1 (1+1/eps)^{p-1} |h|^{p-1} + a2 (1+1/eps)^{p-1} |k|^{p-1}
  ScalarField c_prime;  // b1 (1+1/eps)^{p-1} |k|^{p-1} + b2 (1+1/eps)^{p-1} |h|^{p-1}

  double max_constant() const;
};

TransformedCoupling transform_homogeneous(const Coupling& c, const ScalarField& h, const ScalarField& k,
                                          double p, double eps);

/// Nodewise (phi(x, u, v), psi(x, u, v)).
std::pair<ScalarField, ScalarField> nemytskii(const Coupling& c, const ScalarField& u, const ScalarField& v);
/// Nodewise (phi(x, u + h, v + k), psi(x, u + h, v + k)).
std::pair<ScalarField, ScalarField> nemytskii(const TransformedCoupling& c, const ScalarField& u,
                                              const ScalarField& v);

/// Points in space times a u-lattice times a v-lattice.
struct SampleSpec {
  std::vector<Vec2> points;
  double u_min = -10.0, u_max = 10.0;
  int u_count = 41;
  double v_min = -10.0, v_max = 10.0;
  int v_count = 41;

  /// `per_axis`^d evenly spaced points covering the box (64 points by default in 2D).
  static SampleSpec over(const Box& box, int per_axis = 8);
  std::size_t sample_count() const {
    return points.size() * static_cast<std::size_t>(u_count) * static_cast<std::size_t>(v_count);
  }
  double u_at(int i) const;
  double v_at(int j) const;
};

enum class Component { phi, psi };
enum class Argument { u, v };

/// Adjacent lattice pair where a map failed to be non-decreasing.
struct MonotoneViolation {
  Component component;
  Argument argument;
  Vec2 point;
  double fixed;           // value of the other argument
  double from, to;        // lattice values of the varying argument, from < to
  double value_from, value_to;
};

struct HypothesisReport {
  std::size_t samples = 0;
  double max_violation = 0.0;  // growth: worst excess over the bound; monotone: worst drop
  std::array<double, 4> worst{};  // (x, y, u, v) of the worst growth sample
  std::vector<MonotoneViolation> violations;
  std::size_t evaluation_failures = 0;
  bool pass = true;
};

constexpr double kGrowthTolerance = 1e-12;

HypothesisReport check_growth(const Coupling& c, double p, const SampleSpec& sampler);
HypothesisReport check_monotone(const Coupling& c, const SampleSpec& sampler);

}  // namespace psys::coupling
