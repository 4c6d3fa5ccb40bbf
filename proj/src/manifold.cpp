#include "lcsgeom/manifold.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include <fmt/format.h>

namespace lcsgeom {

namespace {

std::size_t ipow(std::size_t n, int k) {
  std::size_t r = 1;
  for (int i = 0; i < k; ++i) r *= n;
  return r;
}

std::string describe(const Chart& chart, const Point& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < chart.dim(); ++i) {
    if (i) s += ", ";
    s += fmt::format("{}={:.6g}", chart.coordinates()[i], p.at(chart.symbol(i)));
  }
  return s + ")";
}

void require_same_chart(const TensorField& a, const TensorField& b, const char* what) {
  if (a.chart() != b.chart() && a.chart()->coordinates() != b.chart()->coordinates()) {
    throw Error(std::string(what) + ": fields live on different charts");
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Chart

Chart::Chart(std::vector<std::string> coordinates, std::vector<Interval> box)
    : coordinates_(std::move(coordinates)), box_(std::move(box)) {
  if (coordinates_.empty()) throw Error("chart needs at least one coordinate");
  for (std::size_t i = 0; i < coordinates_.size(); ++i) {
    for (std::size_t j = 0; j < i; ++j) {
      if (coordinates_[i] == coordinates_[j]) throw Error("duplicate coordinate '" + coordinates_[i] + "'");
    }
  }
  if (box_.empty()) box_.assign(coordinates_.size(), Interval{});
  if (box_.size() != coordinates_.size()) throw Error("box has a different length than the coordinate list");
  for (std::size_t i = 0; i < box_.size(); ++i) {
    if (!(box_[i].lo <= box_[i].hi) || !std::isfinite(box_[i].lo) || !std::isfinite(box_[i].hi)) {
      throw Error("empty sampling interval for '" + coordinates_[i] + "'");
    }
  }
  for (const auto& c : coordinates_) symbols_.push_back(intern_symbol(c));
}

std::optional<std::size_t> Chart::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < coordinates_.size(); ++i) {
    if (coordinates_[i] == name) return i;
  }
  return std::nullopt;
}

Point Chart::point(std::span<const double> values) const {
  if (values.size() != dim()) throw Error("point has wrong dimension");
  Point p;
  for (std::size_t i = 0; i < dim(); ++i) p.set(symbols_[i], values[i]);
  return p;
}

Point Chart::center() const {
  std::vector<double> c(dim());
  for (std::size_t i = 0; i < dim(); ++i) c[i] = 0.5 * (box_[i].lo + box_[i].hi);
  return point(c);
}

ChartPtr make_chart(std::vector<std::string> coordinates, std::vector<Interval> box) {
  return std::make_shared<const Chart>(std::move(coordinates), std::move(box));
}

// ---------------------------------------------------------------------------
// TensorField

TensorField::TensorField(ChartPtr chart, int up, int down)
    : chart_(std::move(chart)), up_(up), down_(down) {
  if (!chart_) throw Error("tensor field without a chart");
  if (up < 0 || down < 0) throw Error("negative valence");
  components_.assign(ipow(chart_->dim(), up + down), Expr());
}

TensorField::TensorField(ChartPtr chart, int up, int down, std::vector<Expr> components)
    : TensorField(std::move(chart), up, down) {
  if (components.size() != components_.size()) {
    throw Error(fmt::format("tensor of valence ({},{}) needs {} components, got {}", up, down,
                            components_.size(), components.size()));
  }
  components_ = std::move(components);
}

TensorField TensorField::scalar(ChartPtr chart, Expr value) {
  return TensorField(std::move(chart), 0, 0, {std::move(value)});
}

TensorField TensorField::vector(ChartPtr chart, std::vector<Expr> components) {
  return TensorField(std::move(chart), 1, 0, std::move(components));
}

TensorField TensorField::covector(ChartPtr chart, std::vector<Expr> components) {
  return TensorField(std::move(chart), 0, 1, std::move(components));
}

TensorField TensorField::basis(ChartPtr chart, std::size_t i) {
  TensorField t(std::move(chart), 1, 0);
  t.components_.at(i) = Expr(1);
  return t;
}

TensorField TensorField::identity(ChartPtr chart) {
  TensorField t(std::move(chart), 1, 1);
  for (std::size_t i = 0; i < t.dim(); ++i) t({i, i}) = Expr(1);
  return t;
}

std::size_t TensorField::flat_index(std::span<const std::size_t> index) const {
  if (index.size() != static_cast<std::size_t>(rank())) throw Error("index has wrong rank");
  std::size_t flat = 0;
  for (std::size_t k : index) {
    if (k >= dim()) throw Error("index out of range");
    flat = flat * dim() + k;
  }
  return flat;
}

std::vector<std::size_t> TensorField::unflatten(std::size_t flat) const {
  std::vector<std::size_t> index(static_cast<std::size_t>(rank()));
  for (std::size_t k = index.size(); k-- > 0;) {
    index[k] = flat % dim();
    flat /= dim();
  }
  return index;
}

const Expr& TensorField::operator()(std::initializer_list<std::size_t> index) const {
  return components_[flat_index(std::span<const std::size_t>(index.begin(), index.size()))];
}

Expr& TensorField::operator()(std::initializer_list<std::size_t> index) {
  return components_[flat_index(std::span<const std::size_t>(index.begin(), index.size()))];
}

TensorField TensorField::map(const std::function<Expr(const Expr&)>& f) const {
  TensorField out(chart_, up_, down_);
  for (std::size_t i = 0; i < components_.size(); ++i) out.components_[i] = f(components_[i]);
  return out;
}

void TensorField::require_same_shape(const TensorField& other, const char* what) const {
  require_same_chart(*this, other, what);
  if (up_ != other.up_ || down_ != other.down_) throw Error(std::string(what) + ": valence mismatch");
}

TensorField operator+(const TensorField& a, const TensorField& b) {
  a.require_same_shape(b, "tensor sum");
  TensorField out(a.chart_, a.up_, a.down_);
  for (std::size_t i = 0; i < a.size(); ++i) out.components_[i] = a.components_[i] + b.components_[i];
  return out;
}

TensorField operator-(const TensorField& a, const TensorField& b) {
  a.require_same_shape(b, "tensor difference");
  TensorField out(a.chart_, a.up_, a.down_);
  for (std::size_t i = 0; i < a.size(); ++i) out.components_[i] = a.components_[i] - b.components_[i];
  return out;
}

TensorField operator-(const TensorField& a) {
  return a.map([](const Expr& e) { return -e; });
}

TensorField operator*(const Expr& s, const TensorField& t) {
  return t.map([&](const Expr& e) { return s * e; });
}

TensorField tensor_product(const TensorField& a, const TensorField& b) {
  require_same_chart(a, b, "tensor product");
  TensorField out(a.chart(), a.up() + b.up(), a.down() + b.down());
  std::vector<std::size_t> ia(static_cast<std::size_t>(a.rank())), ib(static_cast<std::size_t>(b.rank()));
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    auto idx = out.unflatten(flat);
    std::size_t k = 0;
    for (int i = 0; i < a.up(); ++i) ia[static_cast<std::size_t>(i)] = idx[k++];
    for (int i = 0; i < b.up(); ++i) ib[static_cast<std::size_t>(i)] = idx[k++];
    for (int i = 0; i < a.down(); ++i) ia[static_cast<std::size_t>(a.up() + i)] = idx[k++];
    for (int i = 0; i < b.down(); ++i) ib[static_cast<std::size_t>(b.up() + i)] = idx[k++];
    out[flat] = a.at(ia) * b.at(ib);
  }
  return out;
}

TensorField contract(const TensorField& t, int upper, int lower) {
  if (upper < 0 || upper >= t.up() || lower < 0 || lower >= t.down()) {
    throw Error("contraction index out of range");
  }
  TensorField out(t.chart(), t.up() - 1, t.down() - 1);
  std::vector<std::size_t> full(static_cast<std::size_t>(t.rank()));
  const auto up_pos = static_cast<std::size_t>(upper);
  const auto low_pos = static_cast<std::size_t>(t.up() + lower);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    auto idx = out.unflatten(flat);
    std::size_t k = 0;
    for (std::size_t s = 0; s < full.size(); ++s) {
      if (s != up_pos && s != low_pos) full[s] = idx[k++];
    }
    Expr acc;
    for (std::size_t m = 0; m < t.dim(); ++m) {
      full[up_pos] = m;
      full[low_pos] = m;
      acc = acc + t.at(full);
    }
    out[flat] = acc;
  }
  return out;
}

TensorField permute_lower(const TensorField& t, std::span<const int> order) {
  if (order.size() != static_cast<std::size_t>(t.down())) throw Error("permutation has wrong length");
  TensorField out(t.chart(), t.up(), t.down());
  std::vector<std::size_t> src(static_cast<std::size_t>(t.rank()));
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    auto idx = out.unflatten(flat);
    for (int i = 0; i < t.up(); ++i) src[static_cast<std::size_t>(i)] = idx[static_cast<std::size_t>(i)];
    for (std::size_t k = 0; k < order.size(); ++k) {
      src[static_cast<std::size_t>(t.up() + order[k])] = idx[static_cast<std::size_t>(t.up()) + k];
    }
    out[flat] = t.at(src);
  }
  return out;
}

TensorField lie_bracket(const TensorField& x, const TensorField& y) {
  require_same_chart(x, y, "lie bracket");
  if (x.up() != 1 || x.down() != 0 || y.up() != 1 || y.down() != 0) {
    throw Error("lie bracket needs two vector fields");
  }
  const auto& chart = *x.chart();
  TensorField out(x.chart(), 1, 0);
  for (std::size_t k = 0; k < chart.dim(); ++k) {
    Expr acc;
    for (std::size_t i = 0; i < chart.dim(); ++i) {
      acc = acc + x[i] * diff(y[k], chart.symbol(i)) - y[i] * diff(x[k], chart.symbol(i));
    }
    out[k] = acc;
  }
  return out;
}

Expr directional(const TensorField& x, const Expr& f) {
  if (x.up() != 1 || x.down() != 0) throw Error("directional derivative needs a vector field");
  Expr acc;
  for (std::size_t i = 0; i < x.dim(); ++i) acc = acc + x[i] * diff(f, x.chart()->symbol(i));
  return acc;
}

// ---------------------------------------------------------------------------
// Determinants and inverses

namespace {

class MinorDeterminant {
 public:
  MinorDeterminant(const std::vector<Expr>& m, std::size_t n) : m_(m), n_(n) {}

  // Determinant of rows [n - |cols|, n) restricted to the column set.
  Expr operator()(std::uint32_t cols) {
    if (cols == 0) return Expr(1);
    auto it = memo_.find(cols);
    if (it != memo_.end()) return it->second;
    const std::size_t row = n_ - static_cast<std::size_t>(std::popcount(cols));
    Expr acc;
    int sign = 1;
    for (std::size_t c = 0; c < n_; ++c) {
      if (!(cols & (1U << c))) continue;
      const Expr& a = m_[row * n_ + c];
      if (!a.is_zero()) {
        Expr term = a * (*this)(cols & ~(1U << c));
        acc = sign > 0 ? acc + term : acc - term;
      }
      sign = -sign;
    }
    memo_.emplace(cols, acc);
    return acc;
  }

 private:
  const std::vector<Expr>& m_;
  std::size_t n_;
  std::unordered_map<std::uint32_t, Expr> memo_;
};

bool is_diagonal(const std::vector<Expr>& m, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      if (i != j && !m[i * n + j].is_zero()) return false;
    }
  }
  return true;
}

std::vector<Expr> cofactor_inverse(const std::vector<Expr>& m, std::size_t n) {
  Expr det = symbolic_determinant(m, n);
  std::vector<Expr> inv(n * n);
  std::vector<Expr> minor((n - 1) * (n - 1));
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      // cofactor C_ij, placed at inv(j, i)
      std::size_t r = 0;
      for (std::size_t a = 0; a < n; ++a) {
        if (a == i) continue;
        std::size_t c = 0;
        for (std::size_t b = 0; b < n; ++b) {
          if (b == j) continue;
          minor[r * (n - 1) + c] = m[a * n + b];
          ++c;
        }
        ++r;
      }
      Expr cof = symbolic_determinant(minor, n - 1);
      if ((i + j) % 2 == 1) cof = -cof;
      inv[j * n + i] = cof.is_zero() ? Expr() : cof / det;
    }
  }
  return inv;
}

std::vector<Expr> elimination_inverse(std::vector<Expr> a, std::size_t n, const Point& pivot_point) {
  std::vector<Expr> inv(n * n);
  for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = Expr(1);
  auto value = [&](const Expr& e) {
    try {
      return std::abs(eval(e, pivot_point));
    } catch (const Error&) {
      return 0.0;
    }
  };
  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = col;
    double best_value = -1.0;
    for (std::size_t r = col; r < n; ++r) {
      double v = value(a[r * n + col]);
      if (v > best_value) {
        best_value = v;
        best = r;
      }
    }
    if (!(best_value > 0.0)) throw Error("metric is singular at the pivot point");
    if (best != col) {
      for (std::size_t c = 0; c < n; ++c) {
        std::swap(a[best * n + c], a[col * n + c]);
        std::swap(inv[best * n + c], inv[col * n + c]);
      }
    }
    Expr pivot = a[col * n + col];
    for (std::size_t c = 0; c < n; ++c) {
      a[col * n + c] = a[col * n + c] / pivot;
      inv[col * n + c] = inv[col * n + c] / pivot;
    }
    for (std::size_t r = 0; r < n; ++r) {
      if (r == col) continue;
      Expr f = a[r * n + col];
      if (f.is_zero()) continue;
      for (std::size_t c = 0; c < n; ++c) {
        a[r * n + c] = a[r * n + c] - f * a[col * n + c];
        inv[r * n + c] = inv[r * n + c] - f * inv[col * n + c];
      }
    }
  }
  return inv;
}

}  // namespace

Expr symbolic_determinant(const std::vector<Expr>& m, std::size_t n) {
  if (n == 0) return Expr(1);
  if (n > 20) throw Error("determinant too large for cofactor expansion");
  MinorDeterminant det(m, n);
  return det((1U << n) - 1U);
}

std::vector<Expr> symbolic_inverse(const std::vector<Expr>& m, std::size_t n, const Point& pivot_point) {
  if (m.size() != n * n) throw Error("matrix has wrong size");
  if (is_diagonal(m, n)) {
    std::vector<Expr> inv(n * n);
    for (std::size_t i = 0; i < n; ++i) inv[i * n + i] = Expr(1) / m[i * n + i];
    return inv;
  }
  if (n <= 6) return cofactor_inverse(m, n);
  return elimination_inverse(m, n, pivot_point);
}

// ---------------------------------------------------------------------------
// Metric

Metric::Metric(TensorField g, int negatives) : negatives_(negatives) {
  if (g.up() != 0 || g.down() != 2) throw Error("metric must be a (0,2) field");
  const std::size_t n = g.dim();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < i; ++j) g({i, j}) = g({j, i});
  }
  g_ = std::move(g);
  det_ = symbolic_determinant(g_.components(), n);
  inv_ = TensorField(g_.chart(), 2, 0, symbolic_inverse(g_.components(), n, g_.chart()->center()));
}

TensorField Metric::lower(const TensorField& t, int upper, int insert_at) const {
  if (upper < 0 || upper >= t.up() || insert_at < 0 || insert_at > t.down()) {
    throw Error("lower: index out of range");
  }
  TensorField out(t.chart(), t.up() - 1, t.down() + 1);
  std::vector<std::size_t> src(static_cast<std::size_t>(t.rank()));
  const std::size_t new_slot = static_cast<std::size_t>(out.up() + insert_at);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    auto idx = out.unflatten(flat);
    std::size_t k = 0;
    for (std::size_t s = 0; s < idx.size(); ++s) {
      if (s == new_slot) continue;
      if (k == static_cast<std::size_t>(upper)) ++k;
      src[k++] = idx[s];
    }
    Expr acc;
    for (std::size_t m = 0; m < dim(); ++m) {
      const Expr& gm = g_({idx[new_slot], m});
      if (gm.is_zero()) continue;
      src[static_cast<std::size_t>(upper)] = m;
      acc = acc + gm * t.at(src);
    }
    out[flat] = acc;
  }
  return out;
}

TensorField Metric::raise(const TensorField& t, int lower) const {
  if (lower < 0 || lower >= t.down()) throw Error("raise: index out of range");
  TensorField out(t.chart(), t.up() + 1, t.down() - 1);
  std::vector<std::size_t> src(static_cast<std::size_t>(t.rank()));
  const std::size_t new_slot = static_cast<std::size_t>(t.up());
  const std::size_t old_slot = static_cast<std::size_t>(t.up() + lower);
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    auto idx = out.unflatten(flat);
    std::size_t k = 0;
    for (std::size_t s = 0; s < idx.size(); ++s) {
      if (s == new_slot) continue;
      if (k == old_slot) ++k;
      src[k++] = idx[s];
    }
    Expr acc;
    for (std::size_t m = 0; m < dim(); ++m) {
      const Expr& gm = inv_({idx[new_slot], m});
      if (gm.is_zero()) continue;
      src[old_slot] = m;
      acc = acc + gm * t.at(src);
    }
    out[flat] = acc;
  }
  return out;
}

Expr Metric::inner(const TensorField& x, const TensorField& y) const {
  if (x.up() != 1 || x.down() != 0 || y.up() != 1 || y.down() != 0) throw Error("inner product of non-vectors");
  Expr acc;
  for (std::size_t i = 0; i < dim(); ++i) {
    for (std::size_t j = 0; j < dim(); ++j) {
      if (g_({i, j}).is_zero()) continue;
      acc = acc + g_({i, j}) * x[i] * y[j];
    }
  }
  return acc;
}

// ---------------------------------------------------------------------------
// Numeric views

std::vector<double> evaluate(const TensorField& t, const Point& p) {
  Tape tape(t.components());
  std::vector<double> out;
  tape.evaluate(p, out);
  return out;
}

Eigen::MatrixXd evaluate_matrix(const TensorField& t, const Point& p) {
  if (t.rank() != 2) throw Error("evaluate_matrix needs a rank-2 field");
  auto v = evaluate(t, p);
  const auto n = static_cast<Eigen::Index>(t.dim());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) m(i, j) = v[static_cast<std::size_t>(i * n + j)];
  }
  return m;
}

MetricSample sample_metric(const Metric& g, const Point& p) {
  Eigen::MatrixXd m = evaluate_matrix(g.tensor(), p);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m, Eigen::EigenvaluesOnly);
  MetricSample s;
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    if (es.eigenvalues()(i) < 0) ++s.negatives;
  }
  s.abs_det = std::abs(m.determinant());
  return s;
}

FrameField::FrameField(ChartPtr chart, std::vector<TensorField> vectors, std::vector<int> signs)
    : chart_(std::move(chart)), vectors_(std::move(vectors)), signs_(std::move(signs)) {
  if (vectors_.empty() || vectors_.size() > chart_->dim()) throw Error("frame size out of range");
  for (const auto& v : vectors_) {
    if (v.up() != 1 || v.down() != 0) throw Error("frame members must be vector fields");
  }
  if (signs_.empty()) signs_.assign(vectors_.size(), 1);
  if (signs_.size() != vectors_.size()) throw Error("frame sign list has wrong length");
}

Eigen::MatrixXd FrameField::matrix_at(const Point& p) const {
  const auto n = static_cast<Eigen::Index>(chart_->dim());
  Eigen::MatrixXd e(n, static_cast<Eigen::Index>(vectors_.size()));
  for (std::size_t j = 0; j < vectors_.size(); ++j) {
    auto v = evaluate(vectors_[j], p);
    for (Eigen::Index i = 0; i < n; ++i) e(i, static_cast<Eigen::Index>(j)) = v[static_cast<std::size_t>(i)];
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(e);
  lu.setThreshold(1e-12);
  if (lu.rank() < e.cols()) throw Error("frame vectors are dependent at " + describe(*chart_, p));
  return e;
}

std::vector<double> frame_components(const TensorField& t, const FrameField& frame, const Point& p,
                                     const Metric* metric) {
  const std::size_t n = t.dim();
  const std::size_t m = frame.size();
  Eigen::MatrixXd e = frame.matrix_at(p);
  Eigen::MatrixXd coframe;  // m x n
  if (t.up() > 0) {
    if (m == n) {
      coframe = e.inverse();
    } else {
      if (!metric) throw Error("partial frame needs a metric to build its coframe");
      Eigen::MatrixXd g = evaluate_matrix(metric->tensor(), p);
      Eigen::MatrixXd gram = e.transpose() * g * e;
      coframe = gram.inverse() * e.transpose() * g;
    }
  }
  Eigen::MatrixXd et = e.transpose();

  // Transform one slot at a time: dims[s] goes from n to m.
  std::vector<double> cur = evaluate(t, p);
  std::vector<std::size_t> dims(static_cast<std::size_t>(t.rank()), n);
  for (std::size_t s = 0; s < dims.size(); ++s) {
    const Eigen::MatrixXd& mat = static_cast<int>(s) < t.up() ? coframe : et;
    std::size_t outer = 1, inner = 1;
    for (std::size_t k = 0; k < s; ++k) outer *= dims[k];
    for (std::size_t k = s + 1; k < dims.size(); ++k) inner *= dims[k];
    std::vector<double> next(outer * m * inner, 0.0);
    for (std::size_t o = 0; o < outer; ++o) {
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t a = 0; a < n; ++a) {
          double c = mat(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(a));
          if (c == 0.0) continue;
          for (std::size_t q = 0; q < inner; ++q) {
            next[(o * m + i) * inner + q] += c * cur[(o * n + a) * inner + q];
          }
        }
      }
    }
    cur = std::move(next);
    dims[s] = m;
  }
  return cur;
}

}  // namespace lcsgeom
