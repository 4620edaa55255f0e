#include "psys/field.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "psys/error.hpp"
#include "psys/simd.hpp"

namespace psys {

Grid::Grid(const Box& box, int n) : box_(box), n_(n) {
  const std::size_t m = nodes_per_axis();
  hx_ = (box.x1 - box.x0) / n;
  if (box.dim == 1) {
    hy_ = 0.0;
    element_measure_ = hx_;
    measure_ = box.x1 - box.x0;
    x_.resize(m);
    y_.assign(m, 0.0);
    boundary_flag_.assign(m, 0);
    for (std::size_t i = 0; i < m; ++i) x_[i] = i == m - 1 ? box.x1 : box.x0 + static_cast<double>(i) * hx_;
    boundary_flag_[0] = boundary_flag_[m - 1] = 1;
    for (std::size_t i = 0; i + 1 < m; ++i) {
      conn_.push_back(i);
      conn_.push_back(i + 1);
    }
    hat_grad_[0] = {Vec2{-1.0 / hx_, 0.0}, Vec2{1.0 / hx_, 0.0}, Vec2{0.0, 0.0}};
    hat_grad_[1] = hat_grad_[0];
  } else {
    hy_ = (box.y1 - box.y0) / n;
    element_measure_ = 0.5 * hx_ * hy_;
    measure_ = (box.x1 - box.x0) * (box.y1 - box.y0);
    x_.resize(m * m);
    y_.resize(m * m);
    boundary_flag_.assign(m * m, 0);
    for (std::size_t j = 0; j < m; ++j) {
      const double yj = j == m - 1 ? box.y1 : box.y0 + static_cast<double>(j) * hy_;
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t k = node_index(i, j);
        x_[k] = i == m - 1 ? box.x1 : box.x0 + static_cast<double>(i) * hx_;
        y_[k] = yj;
        boundary_flag_[k] = (i == 0 || j == 0 || i == m - 1 || j == m - 1) ? 1 : 0;
      }
    }
    const std::size_t cells = static_cast<std::size_t>(n);
    conn_.reserve(6 * cells * cells);
    for (std::size_t j = 0; j < cells; ++j) {
      for (int kind = 0; kind < 2; ++kind) {
        for (std::size_t i = 0; i < cells; ++i) {
          const std::size_t ll = node_index(i, j), lr = node_index(i + 1, j);
          const std::size_t ul = node_index(i, j + 1), ur = node_index(i + 1, j + 1);
          if (kind == 0) {
            conn_.insert(conn_.end(), {ll, lr, ur});
          } else {
            conn_.insert(conn_.end(), {ll, ur, ul});
          }
        }
      }
    }
    const double ix = 1.0 / hx_, iy = 1.0 / hy_;
    hat_grad_[0] = {Vec2{-ix, 0.0}, Vec2{ix, -iy}, Vec2{0.0, iy}};
    hat_grad_[1] = {Vec2{0.0, -iy}, Vec2{ix, 0.0}, Vec2{-ix, iy}};
  }

  for (std::size_t k = 0; k < x_.size(); ++k) (boundary_flag_[k] ? boundary_ : interior_).push_back(k);

  mass_.assign(x_.size(), 0.0);
  const double share = element_measure_ / static_cast<double>(vertices_per_element());
  for (std::size_t e = 0; e < element_count(); ++e)
    for (std::size_t v : element(e)) mass_[v] += share;
}

std::shared_ptr<const Grid> Grid::build(const Box& box, int n) {
  if (box.dim != 1 && box.dim != 2) throw GridError("grid dimension must be 1 or 2");
  if (n < 2) throw GridError("grid resolution must be at least 2, got " + std::to_string(n));
  const bool degenerate = !(box.x1 > box.x0) || (box.dim == 2 && !(box.y1 > box.y0)) ||
                          !std::isfinite(box.x0) || !std::isfinite(box.x1) || !std::isfinite(box.y0) ||
                          !std::isfinite(box.y1);
  if (degenerate) throw GridError("degenerate box: every side must have positive finite length");
  return std::shared_ptr<const Grid>(new Grid(box, n));
}

ScalarField::ScalarField(GridPtr grid, std::vector<double> values)
    : grid_(std::move(grid)), values_(std::move(values)) {
  if (!grid_) throw GridError("scalar field without a grid");
  if (values_.size() != grid_->node_count())
    throw GridError("field has " + std::to_string(values_.size()) + " values, grid has " +
                    std::to_string(grid_->node_count()) + " nodes");
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!std::isfinite(values_[i])) throw GridError("non-finite field value at node " + std::to_string(i));
}

ScalarField ScalarField::zeros(GridPtr grid) { return constant(std::move(grid), 0.0); }

ScalarField ScalarField::constant(GridPtr grid, double value) {
  const std::size_t n = grid->node_count();
  return ScalarField(std::move(grid), std::vector<double>(n, value));
}

ScalarField ScalarField::interpolate(GridPtr grid, const std::function<double(double, double)>& fn) {
  std::vector<double> v(grid->node_count());
  for (std::size_t k = 0; k < v.size(); ++k) v[k] = fn(grid->x(k), grid->y(k));
  return ScalarField(std::move(grid), std::move(v));
}

ScalarField ScalarField::interpolate(GridPtr grid, const expr::Expr& e) {
  std::vector<double> v(grid->node_count());
  for (std::size_t k = 0; k < v.size(); ++k) {
    expr::Bindings b;
    b.set(expr::Var::x, grid->x(k)).set(expr::Var::y, grid->y(k));
    v[k] = e.evaluate(b);
  }
  return ScalarField(std::move(grid), std::move(v));
}

void ScalarField::set(std::size_t i, double value) {
  if (!std::isfinite(value)) throw GridError("non-finite field value at node " + std::to_string(i));
  values_[i] = value;
}

double ScalarField::min() const { return *std::min_element(values_.begin(), values_.end()); }
double ScalarField::max() const { return *std::max_element(values_.begin(), values_.end()); }

bool ScalarField::same_grid(const ScalarField& other) const {
  return grid_ == other.grid_ || *grid_ == *other.grid_;
}

namespace {

void require_same_grid(const ScalarField& a, const ScalarField& b) {
  if (!a.same_grid(b)) throw GridError("fields live on different grids");
}

template <class Op>
ScalarField zip(const ScalarField& a, const ScalarField& b, Op op) {
  require_same_grid(a, b);
  std::vector<double> out(a.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = op(a[i], b[i]);
  return ScalarField(a.grid_ptr(), std::move(out));
}

}  // namespace

ScalarField operator+(const ScalarField& a, const ScalarField& b) {
  return zip(a, b, [](double x, double y) { return x + y; });
}

ScalarField operator-(const ScalarField& a, const ScalarField& b) {
  return zip(a, b, [](double x, double y) { return x - y; });
}

ScalarField operator*(double alpha, const ScalarField& a) {
  std::vector<double> out(a.values().begin(), a.values().end());
  for (double& x : out) x *= alpha;
  return ScalarField(a.grid_ptr(), std::move(out));
}

ScalarField blend(const ScalarField& a, const ScalarField& b, double theta) {
  if (theta == 1.0) {
    require_same_grid(a, b);
    return b;
  }
  return zip(a, b, [theta](double x, double y) { return (1.0 - theta) * x + theta * y; });
}

ScalarField abs_pow(const ScalarField& w, double e) {
  std::vector<double> out(w.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = std::pow(std::fabs(w[i]), e);
  return ScalarField(w.grid_ptr(), std::move(out));
}

void element_gradients(const Grid& g, std::span<const double> values, std::span<double> gx,
                       std::span<double> gy) {
  const auto& k = simd::active();
  const std::size_t n = static_cast<std::size_t>(g.n());
  const double* vals = values.data();
  if (g.dim() == 1) {
    k.slopes(vals, n, 1.0 / g.hx(), gx.data());
    std::fill(gy.begin(), gy.end(), 0.0);
    return;
  }
  const std::size_t m = g.nodes_per_axis();
  for (std::size_t j = 0; j < n; ++j) {
    const double* lower = vals + j * m;
    const std::size_t lo = 2 * j * n, up = (2 * j + 1) * n;
    k.tri_gradients(lower, lower + m, n, 1.0 / g.hx(), 1.0 / g.hy(), gx.data() + lo, gy.data() + lo,
                    gx.data() + up, gy.data() + up);
  }
}

VectorField gradient(const ScalarField& u) {
  const std::size_t ne = u.grid().element_count();
  VectorField out{u.grid_ptr(), std::vector<double>(ne), std::vector<double>(ne)};
  element_gradients(u.grid(), u.values(), out.gx, out.gy);
  return out;
}

std::vector<double> element_means(const ScalarField& w) {
  const Grid& g = w.grid();
  std::vector<double> out(g.element_count());
  const std::size_t n = static_cast<std::size_t>(g.n());
  const double* vals = w.values().data();
  if (g.dim() == 1) {
    for (std::size_t i = 0; i < n; ++i) out[i] = 0.5 * (vals[i] + vals[i + 1]);
    return out;
  }
  const std::size_t m = g.nodes_per_axis();
  const auto& k = simd::active();
  for (std::size_t j = 0; j < n; ++j) {
    const double* lower = vals + j * m;
    k.tri_means(lower, lower + m, n, out.data() + 2 * j * n, out.data() + (2 * j + 1) * n);
  }
  return out;
}

double lq_quasinorm(const ScalarField& w, double q) {
  if (!(q > 0.0)) throw PreconditionError("Lebesgue exponent must be positive");
  const std::vector<double> means = element_means(w);
  double sum = 0.0;
  if (q == 2.0) {
    for (double m : means) sum += m * m;
  } else if (q == 1.0) {
    for (double m : means) sum += std::fabs(m);
  } else {
    for (double m : means) sum += std::pow(std::fabs(m), q);
  }
  return std::pow(sum * w.grid().element_measure(), 1.0 / q);
}

double lq_norm(const ScalarField& w, double q) {
  if (!(q >= 1.0)) throw PreconditionError("lq_norm requires q >= 1");
  return lq_quasinorm(w, q);
}

double pair_norm(const ScalarField& f, const ScalarField& g, double r) {
  require_same_grid(f, g);
  return std::max(lq_norm(f, r), lq_norm(g, r));
}

double max_abs(const ScalarField& w) {
  double m = 0.0;
  for (double x : w.values()) m = std::max(m, std::fabs(x));
  return m;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_csv(std::ostream& out, const ScalarField& w) {
  const Grid& g = w.grid();
  out << (g.dim() == 2 ? "x,y,value\n" : "x,value\n");
  for (std::size_t k = 0; k < w.size(); ++k) {
    out << format_double(g.x(k)) << ',';
    if (g.dim() == 2) out << format_double(g.y(k)) << ',';
    out << format_double(w[k]) << '\n';
  }
}

void write_csv(const std::string& path, const ScalarField& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw CsvError("cannot open '" + path + "' for writing");
  write_csv(out, w);
  if (!out) throw CsvError("write to '" + path + "' failed");
}

namespace {

std::vector<double> parse_row(const std::string& line, std::size_t row) {
  std::vector<double> cols;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    char* end = nullptr;
    const double v = std::strtod(cell.c_str(), &end);
    if (cell.empty() || end == cell.c_str() || *end != '\0' || !std::isfinite(v))
      throw CsvError("malformed number '" + cell + "' in row " + std::to_string(row));
    cols.push_back(v);
  }
  return cols;
}

bool close_to(double a, double b) { return std::fabs(a - b) <= 1e-9 * (1.0 + std::fabs(a) + std::fabs(b)); }

}  // namespace

ScalarField read_csv(std::istream& in, GridPtr grid) {
  const bool two_d = grid->dim() == 2;
  std::string line;
  if (!std::getline(in, line)) throw CsvError("empty CSV input");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  const std::string expected = two_d ? "x,y,value" : "x,value";
  if (line != expected) throw CsvError("unexpected CSV header '" + line + "', expected '" + expected + "'");

  std::vector<double> values;
  values.reserve(grid->node_count());
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    ++row;
    const auto cols = parse_row(line, row);
    if (cols.size() != (two_d ? 3u : 2u)) throw CsvError("wrong column count in row " + std::to_string(row));
    const std::size_t k = values.size();
    if (k >= grid->node_count())
      throw CsvError("CSV has more rows than the grid's " + std::to_string(grid->node_count()) + " nodes");
    if (!close_to(cols[0], grid->x(k)) || (two_d && !close_to(cols[1], grid->y(k))))
      throw CsvError("row " + std::to_string(row) + " coordinates do not match grid node " + std::to_string(k));
    values.push_back(cols.back());
  }
  if (values.size() != grid->node_count())
    throw CsvError("CSV has " + std::to_string(values.size()) + " rows, grid has " +
                   std::to_string(grid->node_count()) + " nodes");
  return ScalarField(std::move(grid), std::move(values));
}

ScalarField read_csv(const std::string& path, GridPtr grid) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CsvError("cannot open '" + path + "'");
  return read_csv(in, std::move(grid));
}

}  // namespace psys
