#pragma once

// Charts, tensor fields in coordinate components, metrics and frames.
//
// Component layout: contravariant indices first, then covariant, row-major
// with the first index most significant. A (1,2) field T has T(k, i, j) =
// T^k_{ij}. Frames are only used to express results, never for storage.

#include <functional>
#include <initializer_list>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "lcsgeom/expr.hpp"

namespace lcsgeom {

struct Interval {
  double lo = -1.0;
  double hi = 1.0;
};

class Chart {
 public:
  /// An empty box means [-1, 1] for every coordinate.
  explicit Chart(std::vector<std::string> coordinates, std::vector<Interval> box = {});

  std::size_t dim() const { return coordinates_.size(); }
  const std::vector<std::string>& coordinates() const { return coordinates_; }
  const std::vector<Interval>& box() const { return box_; }
  int symbol(std::size_t i) const { return symbols_[i]; }
  Expr coord(std::size_t i) const { return Expr::coord(coordinates_[i]); }
  std::optional<std::size_t> index_of(std::string_view name) const;

  Point point(std::span<const double> values) const;
  Point center() const;

 private:
  std::vector<std::string> coordinates_;
  std::vector<Interval> box_;
  std::vector<int> symbols_;
};

using ChartPtr = std::shared_ptr<const Chart>;

ChartPtr make_chart(std::vector<std::string> coordinates, std::vector<Interval> box = {});

class TensorField {
 public:
  TensorField() = default;
  TensorField(ChartPtr chart, int up, int down);  // all components zero
  TensorField(ChartPtr chart, int up, int down, std::vector<Expr> components);

  static TensorField scalar(ChartPtr chart, Expr value);
  static TensorField vector(ChartPtr chart, std::vector<Expr> components);
  static TensorField covector(ChartPtr chart, std::vector<Expr> components);
  /// The coordinate field d/dx^i.
  static TensorField basis(ChartPtr chart, std::size_t i);
  /// The (1,1) identity.
  static TensorField identity(ChartPtr chart);

  const ChartPtr& chart() const { return chart_; }
  std::size_t dim() const { return chart_->dim(); }
  int up() const { return up_; }
  int down() const { return down_; }
  int rank() const { return up_ + down_; }
  std::size_t size() const { return components_.size(); }

  std::size_t flat_index(std::span<const std::size_t> index) const;
  std::vector<std::size_t> unflatten(std::size_t flat) const;

  const Expr& operator()(std::initializer_list<std::size_t> index) const;
  Expr& operator()(std::initializer_list<std::size_t> index);
  const Expr& at(std::span<const std::size_t> index) const { return components_[flat_index(index)]; }
  Expr& at(std::span<const std::size_t> index) { return components_[flat_index(index)]; }
  const Expr& operator[](std::size_t flat) const { return components_[flat]; }
  Expr& operator[](std::size_t flat) { return components_[flat]; }

  const std::vector<Expr>& components() const { return components_; }

  TensorField map(const std::function<Expr(const Expr&)>& f) const;

  friend TensorField operator+(const TensorField& a, const TensorField& b);
  friend TensorField operator-(const TensorField& a, const TensorField& b);
  friend TensorField operator-(const TensorField& a);
  friend TensorField operator*(const Expr& s, const TensorField& t);

 private:
  void require_same_shape(const TensorField& other, const char* what) const;

  ChartPtr chart_;
  int up_ = 0;
  int down_ = 0;
  std::vector<Expr> components_;
};

/// a ⊗ b with index order (a.up, b.up, a.down, b.down).
TensorField tensor_product(const TensorField& a, const TensorField& b);

/// Sums the upper slot `upper` against the lower slot `lower` (positions
/// within the contravariant and covariant groups respectively).
TensorField contract(const TensorField& t, int upper, int lower);

/// Reorders covariant slots: new lower slot k is old lower slot order[k].
TensorField permute_lower(const TensorField& t, std::span<const int> order);

/// [X, Y]^k = X^i d_i Y^k - Y^i d_i X^k.
TensorField lie_bracket(const TensorField& x, const TensorField& y);

/// X(f) = X^i d_i f.
Expr directional(const TensorField& x, const Expr& f);

/// Symbolic inverse of a square matrix of expressions. Cofactor expansion up
/// to 6x6 (diagonal matrices invert entrywise); larger matrices use
/// elimination with pivots chosen by magnitude at `pivot_point`.
std::vector<Expr> symbolic_inverse(const std::vector<Expr>& m, std::size_t n, const Point& pivot_point);
Expr symbolic_determinant(const std::vector<Expr>& m, std::size_t n);

class Metric {
 public:
  /// g must be (0,2); the lower triangle is mirrored from the upper one.
  /// negatives is the declared number of negative eigenvalues.
  explicit Metric(TensorField g, int negatives = 1);

  const ChartPtr& chart() const { return g_.chart(); }
  std::size_t dim() const { return g_.dim(); }
  int negatives() const { return negatives_; }
  const TensorField& tensor() const { return g_; }
  const TensorField& inverse() const { return inv_; }
  const Expr& determinant() const { return det_; }
  const Expr& operator()(std::size_t i, std::size_t j) const { return g_({i, j}); }
  const Expr& inv(std::size_t i, std::size_t j) const { return inv_({i, j}); }

  /// Lowers contravariant slot `upper`; the new covariant slot is inserted at
  /// covariant position `insert_at`.
  TensorField lower(const TensorField& t, int upper, int insert_at = 0) const;
  /// Raises covariant slot `lower`; the new contravariant slot is appended last.
  TensorField raise(const TensorField& t, int lower) const;

  /// g(X, Y) for vector fields.
  Expr inner(const TensorField& x, const TensorField& y) const;

 private:
  TensorField g_;
  TensorField inv_;
  Expr det_;
  int negatives_;
};

/// Numeric values of every component at p, in storage order.
std::vector<double> evaluate(const TensorField& t, const Point& p);
Eigen::MatrixXd evaluate_matrix(const TensorField& t, const Point& p);  // rank-2 fields

/// Number of negative eigenvalues of g at p and |det g|.
struct MetricSample {
  int negatives = 0;
  double abs_det = 0.0;
};
MetricSample sample_metric(const Metric& g, const Point& p);

class FrameField {
 public:
  FrameField(ChartPtr chart, std::vector<TensorField> vectors, std::vector<int> signs = {});

  std::size_t size() const { return vectors_.size(); }
  const TensorField& operator[](std::size_t i) const { return vectors_[i]; }
  const std::vector<int>& signs() const { return signs_; }
  const ChartPtr& chart() const { return chart_; }

  /// n x m matrix with the frame vectors as columns. Throws if dependent.
  Eigen::MatrixXd matrix_at(const Point& p) const;

 private:
  ChartPtr chart_;
  std::vector<TensorField> vectors_;
  std::vector<int> signs_;
};

/// Components of t against a frame at p: covariant slots are fed frame
/// vectors, contravariant slots are read with the dual coframe. A full frame
/// uses the matrix inverse; a partial frame needs the metric for its dual.
std::vector<double> frame_components(const TensorField& t, const FrameField& frame, const Point& p,
                                     const Metric* metric = nullptr);

}  // namespace lcsgeom
