#pragma once

// Affine connections in coordinate components.
//
// Γ^k_{ij} is stored as a (1,2) field with gamma(k, i, j), meaning
// ∇_{∂i} ∂j = Γ^k_{ij} ∂k: the first lower index is the direction.
// The curvature tensor R^l_{kij} is stored as riemann(l, k, i, j) with
// R(∂i, ∂j) ∂k = R^l_{kij} ∂l and R(X,Y)Z = ∇_X∇_Y Z − ∇_Y∇_X Z − ∇_[X,Y] Z.

#include "lcsgeom/manifold.hpp"

namespace lcsgeom {

class Connection {
 public:
  Connection(TensorField gamma, bool torsion_free);

  const ChartPtr& chart() const { return gamma_.chart(); }
  std::size_t dim() const { return gamma_.dim(); }
  const TensorField& coefficients() const { return gamma_; }
  const Expr& operator()(std::size_t k, std::size_t i, std::size_t j) const { return gamma_({k, i, j}); }
  bool torsion_free() const { return torsion_free_; }

 private:
  TensorField gamma_;
  bool torsion_free_;
};

Connection levi_civita(const Metric& g);

/// ∇̄_X Y = ∇_X Y + η(Y) φX − g(φX, Y) ξ.
Connection quarter_symmetric(const Connection& ambient, const Metric& g, const TensorField& phi,
                             const TensorField& eta, const TensorField& xi);

/// ∇T with the derivative direction appended as the last covariant slot.
TensorField covariant_derivative(const Connection& c, const TensorField& t);

/// ∇_X Y for vector fields.
TensorField nabla(const Connection& c, const TensorField& x, const TensorField& y);

/// T^k_{ij} = Γ^k_{ij} − Γ^k_{ji}.
TensorField torsion(const Connection& c);

/// ∇g as a (0,3) field (slot order: g's two slots, then direction).
TensorField metric_derivative(const Connection& c, const Metric& g);

struct CurvatureBundle {
  TensorField riemann;          // (1,3): riemann(l, k, i, j)
  TensorField ricci;            // (0,2): S(∂j, ∂k) = trace of X ↦ R(X, ∂j)∂k
  TensorField ricci_operator;   // (1,1): g(QX, Y) = S(X, Y)
  Expr scalar;                  // r = g^{ij} S_{ij}
};

TensorField riemann(const Connection& c);
/// Contraction of riemann(l, k, i, j) over l and i, reordered to S(j, k).
TensorField ricci(const TensorField& riemann);
CurvatureBundle curvature(const Connection& c, const Metric& g);

/// (R(X,Y)Z)^l = R^l_{kij} X^i Y^j Z^k.
TensorField apply_riemann(const TensorField& riemann, const TensorField& x, const TensorField& y,
                          const TensorField& z);

/// R(X,Y)Z computed from the operator definition through nabla and the Lie bracket.
TensorField curvature_operator(const Connection& c, const TensorField& x, const TensorField& y,
                               const TensorField& z);

/// T(X, ...) for a (1,1) field acting on a vector field: (TX)^k = T^k_i X^i.
TensorField apply(const TensorField& endomorphism, const TensorField& x);

/// ω(X) for a 1-form.
Expr pair(const TensorField& form, const TensorField& x);

}  // namespace lcsgeom
