#pragma once

// Submanifolds given by an immersion f: source chart -> target chart.
//
// Everything is pulled back to the source chart: a field along f with values
// in the ambient tangent space is an AmbientVector, n expressions in the
// source coordinates. Tangent coordinate fields push forward to the columns
// of the Jacobian. Source-side vectors are plain component lists of size m.

#include <vector>

#include "lcsgeom/check.hpp"
#include "lcsgeom/lcs.hpp"
#include "lcsgeom/recurrence.hpp"

namespace lcsgeom {

using AmbientVector = std::vector<Expr>;

class ImmersionError : public Error {
 public:
  using Error::Error;
};

class Immersion {
 public:
  /// map[a] = f^a(source coordinates). Throws Error when the sizes do not fit
  /// (need source dim < target dim) or a map entry uses a non-source symbol.
  Immersion(ChartPtr source, ChartPtr target, std::vector<Expr> map);

  const ChartPtr& source() const { return source_; }
  const ChartPtr& target() const { return target_; }
  std::size_t dim() const { return source_->dim(); }
  std::size_t ambient_dim() const { return target_->dim(); }
  const std::vector<Expr>& map() const { return map_; }
  /// ∂f^a / ∂x^i
  const Expr& jacobian(std::size_t a, std::size_t i) const { return jac_[a * dim() + i]; }
  AmbientVector tangent(std::size_t i) const;

  /// e ∘ f for an expression in the target coordinates.
  Expr pull(const Expr& e) const;
  std::vector<Expr> pull(std::span<const Expr> es) const;

  Eigen::MatrixXd jacobian_at(const Point& source_point) const;

 private:
  ChartPtr source_;
  ChartPtr target_;
  std::vector<Expr> map_;
  std::vector<Expr> jac_;
};

/// Induced geometry of f for one ambient metric connection.
class SubmanifoldGeometry {
 public:
  SubmanifoldGeometry(Immersion f, const Metric& g, const Connection& ambient);

  const Immersion& immersion() const { return f_; }
  std::size_t dim() const { return f_.dim(); }
  std::size_t ambient_dim() const { return f_.ambient_dim(); }
  const ChartPtr& chart() const { return f_.source(); }

  const Metric& induced_metric() const { return h_; }
  /// Tangential part of the ambient connection on coordinate fields.
  const Connection& induced_connection() const { return induced_; }

  const Expr& ambient_metric(std::size_t a, std::size_t b) const { return g_[a * ambient_dim() + b]; }
  const Expr& ambient_gamma(std::size_t k, std::size_t i, std::size_t j) const;

  Expr inner(const AmbientVector& v, const AmbientVector& w) const;
  /// ∇̃_{∂i} W for a field along f.
  AmbientVector derivative(std::size_t i, const AmbientVector& w) const;
  /// Source components c with tan(W) = c^k f_* ∂k.
  std::vector<Expr> tangent_part(const AmbientVector& w) const;
  AmbientVector normal_part(const AmbientVector& w) const;
  AmbientVector push(std::span<const Expr> source_vector) const;

  /// σ(∂i, ∂j), the normal part of ∇̃_{∂i} f_*∂j.
  const AmbientVector& sigma(std::size_t i, std::size_t j) const { return sigma_[i * dim() + j]; }
  AmbientVector sigma(std::span<const Expr> x, std::span<const Expr> y) const;
  /// (1/m) h^{ij} σ(∂i, ∂j)
  const AmbientVector& mean_curvature() const { return mean_; }

  /// A_V as a (1,1) field on the source: h(A_V ∂i, ∂j) = g(σ(∂i, ∂j), V).
  TensorField shape_operator(const AmbientVector& v) const;
  /// ∇⊥_{∂i} V
  AmbientVector normal_derivative(std::size_t i, const AmbientVector& v) const;

  /// (∇̃_{∂x} σ)(∂y, ∂z) at index (y * m + z) * m + x.
  std::vector<AmbientVector> third_fundamental_form() const;
  /// (∇̃_{∂x} ∇̃_{∂y} σ)(∂z, ∂w) at index ((z * m + w) * m + x) * m + y.
  std::vector<AmbientVector> second_derivative_sigma(const std::vector<AmbientVector>& third) const;

  /// Normal parts of the ambient coordinate fields; they span the normal bundle.
  std::vector<AmbientVector> normal_fields() const;

 private:
  Metric pull_metric() const;
  Connection build_induced(bool torsion_free) const;

  Immersion f_;
  std::vector<Expr> g_;      // pulled metric, n x n
  std::vector<Expr> gamma_;  // pulled Γ, n x n x n
  Metric h_;
  Connection induced_;
  std::vector<AmbientVector> sigma_;
  AmbientVector mean_;
};

/// g-orthonormal basis of the normal space at a source point: Gram-Schmidt
/// of the ambient coordinate basis against the tangent space, first nonzero
/// component positive. Columns are the vectors; signs are g(N, N).
struct NormalFrame {
  Eigen::MatrixXd vectors;
  std::vector<int> signs;
};

/// Throws ImmersionError on rank deficiency or a null normal direction.
NormalFrame normal_frame_at(const SubmanifoldGeometry& geometry, const Point& source_point);

/// Checks that hold for any immersion: induced metric, normal frame,
/// Gauss split, σ symmetry, (3.18) and (3.19). `prefix` names the connection.
CheckReport submanifold_suite(const SubmanifoldGeometry& geometry, const CheckRunner& runner,
                              const std::string& prefix);

/// An immersion into an LCS manifold with both induced geometries.
struct SubmanifoldContext {
  AmbientGeometry ambient;
  SubmanifoldGeometry lc;  // from the Levi-Civita connection
  SubmanifoldGeometry qs;  // from the quarter-symmetric connection
  CheckRunner runner;      // on the source chart
  AmbientVector xi;        // ξ ∘ f
  std::vector<Expr> phi_components;  // φ ∘ f, n x n
  std::vector<Expr> eta;   // η(f_* ∂i)
  Expr alpha;
  Expr rho;

  const Immersion& immersion() const { return lc.immersion(); }
  std::size_t dim() const { return lc.dim(); }
  AmbientVector phi(const AmbientVector& v) const;
  /// Tangent components of ξ and of φ f_*∂i (meaningful when invariant).
  std::vector<Expr> xi_tangent() const;
  TensorField phi_tangent() const;  // (1,1) on the source
};

/// Builds both geometries and samples the source chart; throws ImmersionError
/// when the Jacobian loses rank or a normal frame cannot be built.
SubmanifoldContext immerse(const Immersion& f, const AmbientGeometry& ambient, int points, std::uint64_t seed,
                           Tolerance tol);

/// ξ and φ(TM) tangent to M. The boolean is report.passed().
CheckReport invariance_check(const SubmanifoldContext& ctx);

CheckReport invariant_identity_suite(const SubmanifoldContext& ctx);

/// Q(B, T)(X1..Xl; X, Y) = −Σ_k T(X1, .., (X ∧_B Y) X_k, .., Xl) with
/// (X ∧_B Y) Z = B(Y, Z) X − B(X, Z) Y. t holds `values` numbers per slot
/// tuple (1 for a scalar-valued tensor); b is m x m.
std::vector<Expr> tachibana_q(std::span<const Expr> b, std::span<const Expr> t, std::size_t m, std::size_t rank,
                              std::size_t values);
/// Scalar-valued version on tensor fields; returns a (0, l + 2) field.
TensorField tachibana_q(const TensorField& b, const TensorField& t);

/// Measured residuals: semiparallel, pseudoparallel (L1 vs Q(g, σ)),
/// Ricci generalized pseudoparallel (L2 vs Q(S, σ), S the Ricci tensor of M),
/// η-parallel.
CheckReport parallelism_residuals(const SubmanifoldContext& ctx);

/// Recurrence of σ under the induced quarter-symmetric derivative.
RecurrenceVerdict sigma_recurrence(const SubmanifoldContext& ctx, const CheckRunner& runner);

/// Computational core of the recurrence theorems at points with α ≠ 1.
/// Throws Error when no sample point has |α − 1| >= 1e-6.
CheckReport theorem5_suite(const SubmanifoldContext& ctx);

/// f(x, y, z) = (x, y, z, 0, 0) into the built-in example.
Immersion paper_example_immersion(const ChartPtr& target);

}  // namespace lcsgeom
