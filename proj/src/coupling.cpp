#include "psys/coupling.hpp"

#include <algorithm>
#include <cmath>

#include "psys/error.hpp"

namespace psys::coupling {

namespace {

void require_nonnegative(double a1, double a2, double b1, double b2) {
  for (double c : {a1, a2, b1, b2})
    if (!(c >= 0.0) || !std::isfinite(c)) throw PreconditionError("growth constants must be finite and non-negative");
}

std::pair<ScalarField, ScalarField> apply(const Coupling& c, const ScalarField& u, const ScalarField& v,
                                          const ScalarField* h, const ScalarField* k) {
  if (!u.same_grid(v)) throw GridError("nemytskii: u and v live on different grids");
  if (h && (!h->same_grid(u) || !k->same_grid(u))) throw GridError("nemytskii: boundary data on a different grid");
  const Grid& g = u.grid();
  std::vector<double> out_phi(g.node_count()), out_psi(g.node_count());
  for (std::size_t i = 0; i < g.node_count(); ++i) {
    const double ui = h ? u[i] + (*h)[i] : u[i];
    const double vi = k ? v[i] + (*k)[i] : v[i];
    try {
      const auto b = expr::Bindings::at(g.x(i), g.y(i), ui, vi);
      out_phi[i] = c.phi.evaluate(b);
      out_psi[i] = c.psi.evaluate(b);
    } catch (const EvaluationError& e) {
      throw EvaluationError(e.kind(), std::string(e.what()) + " at node " + std::to_string(i) + " (x=" +
                                          format_double(g.x(i)) + ", y=" + format_double(g.y(i)) + ")");
    }
  }
  return {ScalarField(u.grid_ptr(), std::move(out_phi)), ScalarField(u.grid_ptr(), std::move(out_psi))};
}

double lattice(double lo, double hi, int count, int i) {
  if (count <= 1) return lo;
  return i == count - 1 ? hi : lo + (hi - lo) * static_cast<double>(i) / (count - 1);
}

bool drops(double from, double to) { return to < from - 1e-12 * std::max(1.0, std::fabs(from)); }

}  // namespace

Coupling Coupling::from_strings(std::string_view phi, std::string_view psi, double a1, double a2, double b1,
                                double b2) {
  require_nonnegative(a1, a2, b1, b2);
  return Coupling{expr::parse(phi), expr::parse(psi), a1, a2, b1, b2};
}

Coupling Coupling::power_family(double p, double a1, double a2, double b1, double b2) {
  require_nonnegative(a1, a2, b1, b2);
  const std::string e = format_double(p - 1.0);
  auto term = [&e](double coef, const char* var) {
    return format_double(coef) + "*odd_pow(" + var + ", " + e + ")";
  };
  return from_strings(term(a1, "u") + " + " + term(a2, "v"), term(b1, "v") + " + " + term(b2, "u"), a1, a2, b1,
                      b2);
}

Coupling Coupling::zero() { return from_strings("0", "0", 0.0, 0.0, 0.0, 0.0); }

Coupling Coupling::shifted(double phi_shift, double psi_shift) const {
  using expr::Binary;
  using expr::BinaryOp;
  auto add = [](const expr::Expr& e, double s) {
    return expr::Expr(std::make_shared<const expr::Node>(
        expr::Node{Binary{BinaryOp::add, e.root_ptr(), expr::Expr::constant(s).root_ptr()}}));
  };
  Coupling out = *this;
  out.phi = add(phi, phi_shift);
  out.psi = add(psi, psi_shift);
  return out;
}

double TransformedCoupling::max_constant() const { return std::max({a1p, a2p, b1p, b2p}); }

TransformedCoupling transform_homogeneous(const Coupling& c, const ScalarField& h, const ScalarField& k, double p,
                                          double eps) {
  if (!(eps > 0.0)) throw PreconditionError("transform_homogeneous requires eps > 0");
  if (!(p > 1.0)) throw PreconditionError("transform_homogeneous requires p > 1");
  if (!h.same_grid(k)) throw GridError("transform_homogeneous: h and k live on different grids");

  const double q = p - 1.0;
  const double near = std::pow(1.0 + eps, q);
  const double far = std::pow(1.0 + 1.0 / eps, q);

  std::vector<double> cv(h.size()), cpv(h.size());
  for (std::size_t i = 0; i < h.size(); ++i) {
    const double hq = std::pow(std::fabs(h[i]), q);
    const double kq = std::pow(std::fabs(k[i]), q);
    cv[i] = c.a1 * far * hq + c.a2 * far * kq;
    cpv[i] = c.b1 * far * kq + c.b2 * far * hq;
  }
  return TransformedCoupling{c,
                             h,
                             k,
                             p,
                             eps,
                             c.a1 * near,
                             c.a2 * near,
                             c.b1 * near,
                             c.b2 * near,
                             ScalarField(h.grid_ptr(), std::move(cv)),
                             ScalarField(h.grid_ptr(), std::move(cpv))};
}

std::pair<ScalarField, ScalarField> nemytskii(const Coupling& c, const ScalarField& u, const ScalarField& v) {
  return apply(c, u, v, nullptr, nullptr);
}

std::pair<ScalarField, ScalarField> nemytskii(const TransformedCoupling& c, const ScalarField& u,
                                              const ScalarField& v) {
  return apply(c.base, u, v, &c.h, &c.k);
}

SampleSpec SampleSpec::over(const Box& box, int per_axis) {
  SampleSpec s;
  if (box.dim == 1) {
    const int count = per_axis * per_axis;
    for (int i = 0; i < count; ++i) s.points.push_back({lattice(box.x0, box.x1, count, i), 0.0});
  } else {
    for (int j = 0; j < per_axis; ++j)
      for (int i = 0; i < per_axis; ++i)
        s.points.push_back({lattice(box.x0, box.x1, per_axis, i), lattice(box.y0, box.y1, per_axis, j)});
  }
  return s;
}

double SampleSpec::u_at(int i) const { return lattice(u_min, u_max, u_count, i); }
double SampleSpec::v_at(int j) const { return lattice(v_min, v_max, v_count, j); }

HypothesisReport check_growth(const Coupling& c, double p, const SampleSpec& s) {
  HypothesisReport rep;
  const double q = p - 1.0;
  for (const Vec2& pt : s.points) {
    for (int i = 0; i < s.u_count; ++i) {
      const double u = s.u_at(i);
      const double uq = std::pow(std::fabs(u), q);
      for (int j = 0; j < s.v_count; ++j) {
        const double v = s.v_at(j);
        const double vq = std::pow(std::fabs(v), q);
        ++rep.samples;
        double excess;
        try {
          const double phi = c.phi_at(pt[0], pt[1], u, v);
          const double psi = c.psi_at(pt[0], pt[1], u, v);
          excess = std::max({0.0, std::fabs(phi) - c.a1 * uq - c.a2 * vq, std::fabs(psi) - c.b1 * vq - c.b2 * uq});
        } catch (const EvaluationError&) {
          ++rep.evaluation_failures;
          continue;
        }
        if (excess > rep.max_violation) {
          rep.max_violation = excess;
          rep.worst = {pt[0], pt[1], u, v};
        }
      }
    }
  }
  rep.pass = rep.max_violation <= kGrowthTolerance && rep.evaluation_failures == 0;
  return rep;
}

HypothesisReport check_monotone(const Coupling& c, const SampleSpec& s) {
  HypothesisReport rep;
  auto eval = [&c](Component comp, const Vec2& pt, double u, double v) {
    return comp == Component::phi ? c.phi_at(pt[0], pt[1], u, v) : c.psi_at(pt[0], pt[1], u, v);
  };
  auto sweep = [&](Component comp, Argument arg, const Vec2& pt, double fixed, int count, auto at) {
    double prev_s = at(0);
    double prev = 0.0;
    try {
      prev = arg == Argument::u ? eval(comp, pt, prev_s, fixed) : eval(comp, pt, fixed, prev_s);
    } catch (const EvaluationError&) {
      ++rep.evaluation_failures;
      return;
    }
    for (int i = 1; i < count; ++i) {
      const double cur_s = at(i);
      double cur;
      try {
        cur = arg == Argument::u ? eval(comp, pt, cur_s, fixed) : eval(comp, pt, fixed, cur_s);
      } catch (const EvaluationError&) {
        ++rep.evaluation_failures;
        return;
      }
      ++rep.samples;
      if (drops(prev, cur)) {
        rep.violations.push_back({comp, arg, pt, fixed, prev_s, cur_s, prev, cur});
        rep.max_violation = std::max(rep.max_violation, prev - cur);
      }
      prev_s = cur_s;
      prev = cur;
    }
  };

  for (const Vec2& pt : s.points) {
    for (Component comp : {Component::phi, Component::psi}) {
      for (int j = 0; j < s.v_count; ++j)
        sweep(comp, Argument::u, pt, s.v_at(j), s.u_count, [&s](int i) { return s.u_at(i); });
      for (int i = 0; i < s.u_count; ++i)
        sweep(comp, Argument::v, pt, s.u_at(i), s.v_count, [&s](int j) { return s.v_at(j); });
    }
  }
  rep.pass = rep.violations.empty() && rep.evaluation_failures == 0;
  return rep;
}

}  // namespace psys::coupling
