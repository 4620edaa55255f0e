#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <memory>
#include <string>
#include <span>
#include <vector>

#include "psys/expr.hpp"

namespace psys {

/// Axis-aligned interval (dim 1) or rectangle (dim 2).
struct Box {
  int dim = 2;
  double x0 = 0.0, x1 = 1.0;
  double y0 = 0.0, y1 = 0.0;

  static Box interval(double x0, double x1) { return {1, x0, x1, 0.0, 0.0}; }
  static Box rect(double x0, double x1, double y0, double y1) { return {2, x0, x1, y0, y1}; }
  static Box unit_square() { return rect(0.0, 1.0, 0.0, 1.0); }

  bool operator==(const Box&) const = default;
};

using Vec2 = std::array<double, 2>;

/// Uniform lattice on a box. In 2D each cell is split along its
/// lower-left to upper-right diagonal into a lower triangle (ll, lr, ur)
/// and an upper triangle (ll, ur, ul). Nodes are numbered row-major from
/// (x0, y0); elements of cell row j are numbered (2j + kind) * n + i.
class Grid {
 public:
  static std::shared_ptr<const Grid> build(const Box& box, int n);

  int dim() const { return box_.dim; }
  int n() const { return n_; }
  const Box& box() const { return box_; }
  double hx() const { return hx_; }
  double hy() const { return hy_; }

  std::size_t nodes_per_axis() const { return static_cast<std::size_t>(n_) + 1; }
  std::size_t node_count() const { return x_.size(); }
  std::size_t element_count() const { return conn_.size() / vertices_per_element(); }
  std::size_t vertices_per_element() const { return dim() == 1 ? 2 : 3; }

  std::size_t node_index(std::size_t i, std::size_t j = 0) const { return j * nodes_per_axis() + i; }
  double x(std::size_t node) const { return x_[node]; }
  double y(std::size_t node) const { return y_[node]; }
  bool on_boundary(std::size_t node) const { return boundary_flag_[node] != 0; }
  std::span<const std::size_t> interior_nodes() const { return interior_; }
  std::span<const std::size_t> boundary_nodes() const { return boundary_; }

  std::span<const std::size_t> element(std::size_t e) const {
    return {conn_.data() + e * vertices_per_element(), vertices_per_element()};
  }
  /// 0 for the lower triangle (and every 1D cell), 1 for the upper one.
  int element_kind(std::size_t e) const {
    return dim() == 1 ? 0 : static_cast<int>((e / static_cast<std::size_t>(n_)) % 2);
  }
  /// Gradients of the element's local hat functions, in vertex order.
  std::span<const Vec2> hat_gradients(std::size_t e) const {
    return {hat_grad_[element_kind(e)].data(), vertices_per_element()};
  }
  /// Length (1D) or area (2D) of every element; the lattice is uniform.
  double element_measure() const { return element_measure_; }
  double measure() const { return measure_; }
  /// Per-node vertex-averaged quadrature weight: sum of measure/(d+1).
  std::span<const double> lumped_mass() const { return mass_; }

  bool operator==(const Grid& other) const { return box_ == other.box_ && n_ == other.n_; }

 private:
  Grid(const Box& box, int n);

  Box box_;
  int n_;
  double hx_, hy_;
  double element_measure_, measure_;
  std::vector<double> x_, y_;
  std::vector<unsigned char> boundary_flag_;
  std::vector<std::size_t> interior_, boundary_;
  std::vector<std::size_t> conn_;
  std::array<std::array<Vec2, 3>, 2> hat_grad_{};
  std::vector<double> mass_;
};

using GridPtr = std::shared_ptr<const Grid>;

inline GridPtr build_grid(const Box& box, int n) { return Grid::build(box, n); }

/// Nodal values on a grid; always finite.
class ScalarField {
 public:
  ScalarField(GridPtr grid, std::vector<double> values);

  static ScalarField zeros(GridPtr grid);
  static ScalarField constant(GridPtr grid, double value);
  static ScalarField interpolate(GridPtr grid, const std::function<double(double, double)>& fn);
  /// Evaluates `e` at every node with x, y bound (u, v left unbound).
  static ScalarField interpolate(GridPtr grid, const expr::Expr& e);

  const Grid& grid() const { return *grid_; }
  const GridPtr& grid_ptr() const { return grid_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }
  double operator[](std::size_t i) const { return values_[i]; }
  void set(std::size_t i, double value);

  double min() const;
  double max() const;

  bool same_grid(const ScalarField& other) const;

 private:
  GridPtr grid_;
  std::vector<double> values_;
};

ScalarField operator+(const ScalarField& a, const ScalarField& b);
ScalarField operator-(const ScalarField& a, const ScalarField& b);
ScalarField operator*(double alpha, const ScalarField& a);
/// (1 - theta) a + theta b
ScalarField blend(const ScalarField& a, const ScalarField& b, double theta);
/// Nodewise |w|^e.
ScalarField abs_pow(const ScalarField& w, double e);

/// One gradient per element, stored by component.
struct VectorField {
  GridPtr grid;
  std::vector<double> gx;
  std::vector<double> gy;  // zeros in 1D

  std::size_t size() const { return gx.size(); }
  Vec2 operator[](std::size_t e) const { return {gx[e], gy[e]}; }
};

/// Elementwise gradient of the piecewise-linear interpolant.
VectorField gradient(const ScalarField& u);
/// Same, on raw nodal values; gx and gy hold one entry per element.
void element_gradients(const Grid& grid, std::span<const double> values, std::span<double> gx,
                       std::span<double> gy);

/// Mean of each element's vertex values.
std::vector<double> element_means(const ScalarField& w);

/// (sum_e |mean_e w|^q * measure_e)^(1/q); requires q >= 1.
double lq_norm(const ScalarField& w, double q);
/// Same formula for any q > 0 (a quasi-norm below 1).
double lq_quasinorm(const ScalarField& w, double q);
/// max(lq_norm(f, r), lq_norm(g, r)); requires matching grids.
double pair_norm(const ScalarField& f, const ScalarField& g, double r);
/// Largest nodal magnitude.
double max_abs(const ScalarField& w);

/// CSV with header `x,y,value` (2D) or `x,value` (1D), one row per node,
/// 17 significant digits, LF line endings.
void write_csv(std::ostream& out, const ScalarField& w);
void write_csv(const std::string& path, const ScalarField& w);
/// Reads a field written by write_csv; the row count and coordinates must
/// match `grid`.
ScalarField read_csv(std::istream& in, GridPtr grid);
ScalarField read_csv(const std::string& path, GridPtr grid);

std::string format_double(double v);

}  // namespace psys
