#include "psys/plap.hpp"

#include <algorithm>
#include <cmath>
#include <map>

#include "psys/error.hpp"
#include "psys/simd.hpp"
#include "psys/sparse.hpp"

namespace psys::plap {

namespace {

// Neumaier-compensated running sum.
struct CompensatedSum {
  double sum = 0.0, carry = 0.0;
  void add(double x) {
    const double t = sum + x;
    carry += std::fabs(sum) >= std::fabs(x) ? (sum - t) + x : (x - t) + sum;
    sum = t;
  }
  double value() const { return sum + carry; }
};

/// Interior-dof bookkeeping and the fixed Hessian sparsity of one grid.
class Workspace {
 public:
  explicit Workspace(const Grid& grid) : grid_(grid) {
    const std::size_t nn = grid.node_count();
    dof_.assign(nn, -1);
    int next = 0;
    for (std::size_t node : grid.interior_nodes()) dof_[node] = next++;
    ndof_ = static_cast<std::size_t>(next);

    const std::size_t nv = grid.vertices_per_element();
    std::vector<std::map<int, int>> rows(ndof_);
    for (std::size_t e = 0; e < grid.element_count(); ++e) {
      auto verts = grid.element(e);
      for (std::size_t a = 0; a < nv; ++a) {
        const int ra = dof_[verts[a]];
        if (ra < 0) continue;
        for (std::size_t b = 0; b < nv; ++b) {
          const int cb = dof_[verts[b]];
          if (cb >= 0) rows[ra].emplace(cb, 0);
        }
      }
    }
    hess_.rows = ndof_;
    hess_.row_ptr.assign(ndof_ + 1, 0);
    for (std::size_t r = 0; r < ndof_; ++r) {
      hess_.row_ptr[r + 1] = hess_.row_ptr[r] + static_cast<int>(rows[r].size());
      int k = hess_.row_ptr[r];
      for (auto& [col, slot] : rows[r]) {
        hess_.cols.push_back(col);
        slot = k++;
      }
    }
    hess_.vals.assign(hess_.cols.size(), 0.0);

    slots_.assign(grid.element_count() * nv * nv, -1);
    for (std::size_t e = 0; e < grid.element_count(); ++e) {
      auto verts = grid.element(e);
      for (std::size_t a = 0; a < nv; ++a) {
        const int ra = dof_[verts[a]];
        if (ra < 0) continue;
        for (std::size_t b = 0; b < nv; ++b) {
          const int cb = dof_[verts[b]];
          if (cb >= 0) slots_[(e * nv + a) * nv + b] = rows[ra].at(cb);
        }
      }
    }
    gx_.resize(grid.element_count());
    gy_.resize(grid.element_count());
    dx_.resize(grid.element_count());
    dy_.resize(grid.element_count());
  }

  const Grid& grid() const { return grid_; }
  std::size_t ndof() const { return ndof_; }
  int dof(std::size_t node) const { return dof_[node]; }
  CsrMatrix& hessian() { return hess_; }

  std::vector<double> gx_, gy_, dx_, dy_;
  std::vector<int> slots_;

 private:
  const Grid& grid_;
  std::vector<int> dof_;
  std::size_t ndof_ = 0;
  CsrMatrix hess_;
};

/// Regularized energy (1/p)(|g|^2 + eps^2)^{p/2} plus the lumped source term.
class Objective {
 public:
  Objective(Workspace& ws, double p, const ScalarField& f, double eps)
      : ws_(ws), p_(p), eps2_(eps * eps), f_(f.values()), mass_(ws.grid().lumped_mass()) {}

  double value(std::span<const double> u) {
    const Grid& g = ws_.grid();
    element_gradients(g, u, ws_.gx_, ws_.gy_);
    CompensatedSum s;
    const double area = g.element_measure();
    for (std::size_t e = 0; e < g.element_count(); ++e) {
      const double a2 = ws_.gx_[e] * ws_.gx_[e] + ws_.gy_[e] * ws_.gy_[e] + eps2_;
      s.add(area * std::pow(a2, 0.5 * p_) / p_);
    }
    for (std::size_t i = 0; i < u.size(); ++i) s.add(mass_[i] * f_[i] * u[i]);
    return s.value();
  }

  /// J(u + t du) - J(u), computed termwise to avoid cancellation.
  /// Requires gradients of u to be current in the workspace (call
  /// prepare_direction first).
  double change(double t) const {
    const Grid& g = ws_.grid();
    CompensatedSum s;
    const double area = g.element_measure();
    for (std::size_t e = 0; e < g.element_count(); ++e) {
      const double dx = ws_.dx_[e], dy = ws_.dy_[e];
      if (dx == 0.0 && dy == 0.0) continue;
      const double gx = ws_.gx_[e], gy = ws_.gy_[e];
      const double a2 = gx * gx + gy * gy + eps2_;
      const double delta = 2.0 * t * (gx * dx + gy * dy) + t * t * (dx * dx + dy * dy);
      s.add(area * std::pow(a2, 0.5 * p_) / p_ * std::expm1(0.5 * p_ * std::log1p(delta / a2)));
    }
    s.add(t * source_dot_);
    return s.value();
  }

  void prepare_direction(std::span<const double> u, std::span<const double> du) {
    const Grid& g = ws_.grid();
    element_gradients(g, u, ws_.gx_, ws_.gy_);
    element_gradients(g, du, ws_.dx_, ws_.dy_);
    CompensatedSum s;
    for (std::size_t i = 0; i < du.size(); ++i) s.add(mass_[i] * f_[i] * du[i]);
    source_dot_ = s.value();
  }

  /// Interior gradient (length ndof).
  void gradient(std::span<const double> u, std::vector<double>& out) {
    const Grid& g = ws_.grid();
    element_gradients(g, u, ws_.gx_, ws_.gy_);
    out.assign(ws_.ndof(), 0.0);
    const double area = g.element_measure();
    for (std::size_t e = 0; e < g.element_count(); ++e) {
      const double gx = ws_.gx_[e], gy = ws_.gy_[e];
      const double a2 = gx * gx + gy * gy + eps2_;
      const double coef = area * std::pow(a2, 0.5 * (p_ - 2.0));
      auto verts = g.element(e);
      auto hats = g.hat_gradients(e);
      for (std::size_t a = 0; a < verts.size(); ++a) {
        const int r = ws_.dof(verts[a]);
        if (r >= 0) out[r] += coef * (gx * hats[a][0] + gy * hats[a][1]);
      }
    }
    for (std::size_t node : g.interior_nodes()) out[ws_.dof(node)] += mass_[node] * f_[node];
  }

  /// Assembles the Hessian into the workspace matrix; gradients of u must be current.
  void hessian() {
    const Grid& g = ws_.grid();
    CsrMatrix& h = ws_.hessian();
    std::fill(h.vals.begin(), h.vals.end(), 0.0);
    const double area = g.element_measure();
    const std::size_t nv = g.vertices_per_element();
    for (std::size_t e = 0; e < g.element_count(); ++e) {
      const double gx = ws_.gx_[e], gy = ws_.gy_[e];
      const double a2 = gx * gx + gy * gy + eps2_;
      const double iso = std::pow(a2, 0.5 * (p_ - 2.0));
      const double aniso = (p_ - 2.0) * std::pow(a2, 0.5 * (p_ - 4.0));
      const double hxx = iso + aniso * gx * gx, hyy = iso + aniso * gy * gy, hxy = aniso * gx * gy;
      auto hats = g.hat_gradients(e);
      const int* slot = ws_.slots_.data() + e * nv * nv;
      for (std::size_t a = 0; a < nv; ++a) {
        const double wx = hxx * hats[a][0] + hxy * hats[a][1];
        const double wy = hxy * hats[a][0] + hyy * hats[a][1];
        for (std::size_t b = 0; b < nv; ++b) {
          const int k = slot[a * nv + b];
          if (k >= 0) h.vals[k] += area * (wx * hats[b][0] + wy * hats[b][1]);
        }
      }
    }
  }

 private:
  Workspace& ws_;
  double p_;
  double eps2_;
  std::span<const double> f_;
  std::span<const double> mass_;
  double source_dot_ = 0.0;
};

struct NewtonOutcome {
  std::vector<double> u;
  int iterations = 0;
  double gradient_norm = 0.0;
  bool converged = false;
  int gradient_fallbacks = 0;
  std::vector<double> history;
  std::string message;
};

NewtonOutcome newton(Workspace& ws, double p, const ScalarField& f, std::vector<double> u,
                     const SolverOptions& opt) {
  const Grid& g = ws.grid();
  Objective obj(ws, p, f, opt.eps_reg);
  NewtonOutcome out;
  const std::size_t ndof = ws.ndof();
  std::vector<double> grad, step(ndof), du_full(g.node_count(), 0.0), neg_grad(ndof);

  out.history.push_back(obj.value(u));

  auto scatter = [&](const std::vector<double>& d) {
    for (std::size_t node : g.interior_nodes()) du_full[node] = d[ws.dof(node)];
  };

  auto line_search = [&](const std::vector<double>& d, double slope, double t0) -> double {
    scatter(d);
    obj.prepare_direction(u, du_full);
    double t = t0;
    for (int bt = 0; bt <= opt.max_backtracks; ++bt) {
      const double dj = obj.change(t);
      if (dj <= opt.armijo * t * slope) return t;
      t *= opt.backtrack;
    }
    return 0.0;
  };

  for (int it = 0;; ++it) {
    obj.gradient(u, grad);
    out.gradient_norm = std::sqrt(simd::dot(grad, grad));
    out.iterations = it;
    if (out.gradient_norm <= opt.tol) {
      out.converged = true;
      break;
    }
    if (it >= opt.max_iter) {
      out.message = "maximum iterations reached";
      break;
    }

    obj.hessian();  // gradients of u are current after gradient()
    for (std::size_t i = 0; i < ndof; ++i) neg_grad[i] = -grad[i];
    const CgResult cg = pcg(ws.hessian(), neg_grad, step, opt.cg_rel_tol, static_cast<int>(10 * ndof + 100));
    double slope = simd::dot(grad, step);

    double t = 0.0;
    if (!cg.indefinite && slope < 0.0) t = line_search(step, slope, 1.0);
    if (t == 0.0) {
      // Steepest descent with the step that minimizes the local quadratic model.
      ++out.gradient_fallbacks;
      std::vector<double> hg(ndof);
      ws.hessian().multiply(neg_grad, hg);
      const double curv = simd::dot(neg_grad, hg);
      const double t0 = curv > 0.0 ? out.gradient_norm * out.gradient_norm / curv : 1.0;
      step = neg_grad;
      slope = -out.gradient_norm * out.gradient_norm;
      t = line_search(step, slope, t0);
      if (t == 0.0) {
        out.message = "line search failed";
        break;
      }
    }
    for (std::size_t node : g.interior_nodes()) u[node] += t * step[ws.dof(node)];
    out.history.push_back(obj.value(u));
  }
  out.u = std::move(u);
  return out;
}

std::vector<double> with_boundary(const ScalarField& h, const ScalarField* initial) {
  const Grid& g = h.grid();
  std::vector<double> u(g.node_count(), 0.0);
  if (initial) std::copy(initial->values().begin(), initial->values().end(), u.begin());
  for (std::size_t node : g.boundary_nodes()) u[node] = h[node];
  return u;
}

}  // namespace

double energy(const ScalarField& u, double p, const ScalarField& f) {
  if (!u.same_grid(f)) throw GridError("energy: u and f live on different grids");
  const Grid& g = u.grid();
  const VectorField grad = gradient(u);
  CompensatedSum s;
  for (std::size_t e = 0; e < g.element_count(); ++e) {
    const double n2 = grad.gx[e] * grad.gx[e] + grad.gy[e] * grad.gy[e];
    s.add(g.element_measure() * std::pow(n2, 0.5 * p) / p);
  }
  const double third = 1.0 / static_cast<double>(g.vertices_per_element());
  for (std::size_t e = 0; e < g.element_count(); ++e) {
    double m = 0.0;
    for (std::size_t v : g.element(e)) m += f[v] * u[v];
    s.add(g.element_measure() * m * third);
  }
  return s.value();
}

double regularized_energy(const ScalarField& u, double p, const ScalarField& f, double eps_reg) {
  if (!u.same_grid(f)) throw GridError("energy: u and f live on different grids");
  Workspace ws(u.grid());
  Objective obj(ws, p, f, eps_reg);
  return obj.value(u.values());
}

SolveReport solve_p_poisson(const PPoissonProblem& problem, const SolverOptions& options,
                            const ScalarField* initial) {
  if (!(problem.p > 1.0)) throw PreconditionError("p-Poisson solve requires p > 1");
  if (!(options.tol > 0.0)) throw PreconditionError("p-Poisson solve requires tol > 0");
  if (!problem.f.same_grid(problem.h)) throw GridError("p-Poisson: f and h live on different grids");
  if (initial && !initial->same_grid(problem.h)) throw GridError("p-Poisson: initial iterate on a different grid");

  const GridPtr& grid = problem.h.grid_ptr();
  Workspace ws(*grid);
  int extra_iterations = 0;

  std::vector<double> start = with_boundary(problem.h, initial);
  if (!initial) {
    // 2-harmonic extension of h.
    const ScalarField zero = ScalarField::zeros(grid);
    NewtonOutcome ext = newton(ws, 2.0, zero, std::move(start), options);
    extra_iterations += ext.iterations;
    start = std::move(ext.u);
    const bool far_from_two = problem.p >= 4.0 || problem.p <= 1.3;
    if (options.continuation && far_from_two) {
      NewtonOutcome warm = newton(ws, 2.0, problem.f, std::move(start), options);
      extra_iterations += warm.iterations;
      start = std::move(warm.u);
    }
  }

  NewtonOutcome res = newton(ws, problem.p, problem.f, std::move(start), options);
  SolveReport report{ScalarField(grid, std::move(res.u)), 0, 0.0, 0.0, 0.0, false, 0, {}, {}};
  report.iterations = res.iterations + extra_iterations;
  report.gradient_norm = res.gradient_norm;
  report.eps_reg = options.eps_reg;
  report.converged = res.converged;
  report.gradient_fallbacks = res.gradient_fallbacks;
  report.objective_history = std::move(res.history);
  report.message = res.converged ? "converged" : res.message;
  report.energy = energy(report.solution, problem.p, problem.f);
  return report;
}

std::vector<double> p_laplace_action(const ScalarField& u, double p) {
  const Grid& g = u.grid();
  const VectorField grad = gradient(u);
  std::vector<double> out(g.node_count(), 0.0);
  for (std::size_t e = 0; e < g.element_count(); ++e) {
    const double gx = grad.gx[e], gy = grad.gy[e];
    const double n2 = gx * gx + gy * gy;
    if (n2 == 0.0) continue;
    const double coef = g.element_measure() * std::pow(n2, 0.5 * (p - 2.0));
    auto verts = g.element(e);
    auto hats = g.hat_gradients(e);
    for (std::size_t a = 0; a < verts.size(); ++a) out[verts[a]] += coef * (gx * hats[a][0] + gy * hats[a][1]);
  }
  return out;
}

}  // namespace psys::plap
