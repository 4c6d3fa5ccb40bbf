#include "lcsgeom/connection.hpp"

namespace lcsgeom {

Connection::Connection(TensorField gamma, bool torsion_free)
    : gamma_(std::move(gamma)), torsion_free_(torsion_free) {
  if (gamma_.up() != 1 || gamma_.down() != 2) throw Error("connection coefficients must be a (1,2) array");
}

Connection levi_civita(const Metric& g) {
  const std::size_t n = g.dim();
  const auto& chart = *g.chart();
  // First kind: [ij, l] = ½(∂_i g_{jl} + ∂_j g_{il} − ∂_l g_{ij})
  std::vector<Expr> first(n * n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t l = 0; l < n; ++l) {
        Expr s = diff(g(j, l), chart.symbol(i)) + diff(g(i, l), chart.symbol(j)) - diff(g(i, j), chart.symbol(l));
        first[(i * n + j) * n + l] = s.is_zero() ? Expr() : Expr(*Rational::make(1, 2)) * s;
      }
    }
  }
  TensorField gamma(g.chart(), 1, 2);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        Expr acc;
        for (std::size_t l = 0; l < n; ++l) {
          const Expr& f = first[(i * n + j) * n + l];
          if (f.is_zero() || g.inv(k, l).is_zero()) continue;
          acc = acc + g.inv(k, l) * f;
        }
        gamma({k, i, j}) = acc;
      }
    }
  }
  return Connection(std::move(gamma), true);
}

Connection quarter_symmetric(const Connection& ambient, const Metric& g, const TensorField& phi,
                             const TensorField& eta, const TensorField& xi) {
  const std::size_t n = ambient.dim();
  if (g.dim() != n || phi.dim() != n || eta.dim() != n || xi.dim() != n) {
    throw Error("quarter-symmetric connection: structure and connection live on different charts");
  }
  if (phi.up() != 1 || phi.down() != 1 || eta.up() != 0 || eta.down() != 1 || xi.up() != 1 || xi.down() != 0) {
    throw Error("quarter-symmetric connection: expected phi (1,1), eta (0,1), xi (1,0)");
  }
  TensorField gamma = ambient.coefficients();
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      Expr g_phi_ij;  // g(φ∂i, ∂j)
      for (std::size_t l = 0; l < n; ++l) {
        if (phi({l, i}).is_zero() || g(l, j).is_zero()) continue;
        g_phi_ij = g_phi_ij + phi({l, i}) * g(l, j);
      }
      for (std::size_t k = 0; k < n; ++k) {
        gamma({k, i, j}) = gamma({k, i, j}) + eta[j] * phi({k, i}) - g_phi_ij * xi[k];
      }
    }
  }
  return Connection(std::move(gamma), false);
}

TensorField covariant_derivative(const Connection& c, const TensorField& t) {
  const std::size_t n = t.dim();
  if (c.dim() != n) throw Error("covariant derivative: chart mismatch");
  const auto& chart = *t.chart();
  TensorField out(t.chart(), t.up(), t.down() + 1);
  std::vector<std::size_t> src(static_cast<std::size_t>(t.rank()));
  for (std::size_t flat = 0; flat < out.size(); ++flat) {
    auto idx = out.unflatten(flat);
    const std::size_t dir = idx.back();
    std::copy(idx.begin(), idx.end() - 1, src.begin());
    Expr acc = diff(t.at(src), chart.symbol(dir));
    for (std::size_t s = 0; s < src.size(); ++s) {
      const std::size_t keep = src[s];
      const bool upper = static_cast<int>(s) < t.up();
      for (std::size_t m = 0; m < n; ++m) {
        const Expr& gm = upper ? c(keep, dir, m) : c(m, dir, keep);
        if (gm.is_zero()) continue;
        src[s] = m;
        const Expr& tm = t.at(src);
        if (!tm.is_zero()) acc = upper ? acc + gm * tm : acc - gm * tm;
      }
      src[s] = keep;
    }
    out[flat] = acc;
  }
  return out;
}

TensorField nabla(const Connection& c, const TensorField& x, const TensorField& y) {
  if (x.up() != 1 || x.down() != 0 || y.up() != 1 || y.down() != 0) throw Error("nabla needs vector fields");
  const std::size_t n = c.dim();
  TensorField out(x.chart(), 1, 0);
  for (std::size_t k = 0; k < n; ++k) {
    Expr acc = directional(x, y[k]);
    for (std::size_t i = 0; i < n; ++i) {
      if (x[i].is_zero()) continue;
      for (std::size_t j = 0; j < n; ++j) {
        if (c(k, i, j).is_zero() || y[j].is_zero()) continue;
        acc = acc + c(k, i, j) * x[i] * y[j];
      }
    }
    out[k] = acc;
  }
  return out;
}

TensorField torsion(const Connection& c) {
  const std::size_t n = c.dim();
  TensorField out(c.chart(), 1, 2);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) out({k, i, j}) = c(k, i, j) - c(k, j, i);
    }
  }
  return out;
}

TensorField metric_derivative(const Connection& c, const Metric& g) { return covariant_derivative(c, g.tensor()); }

TensorField riemann(const Connection& c) {
  const std::size_t n = c.dim();
  const auto& chart = *c.chart();
  TensorField r(c.chart(), 1, 3);
  for (std::size_t l = 0; l < n; ++l) {
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
          Expr acc = diff(c(l, j, k), chart.symbol(i)) - diff(c(l, i, k), chart.symbol(j));
          for (std::size_t m = 0; m < n; ++m) {
            if (!c(l, i, m).is_zero() && !c(m, j, k).is_zero()) acc = acc + c(l, i, m) * c(m, j, k);
            if (!c(l, j, m).is_zero() && !c(m, i, k).is_zero()) acc = acc - c(l, j, m) * c(m, i, k);
          }
          r({l, k, i, j}) = acc;
        }
      }
    }
  }
  return r;
}

TensorField ricci(const TensorField& r) {
  if (r.up() != 1 || r.down() != 3) throw Error("ricci: expected a (1,3) field");
  // contract l with i: result (k, j); S(∂j, ∂k) needs the transpose
  const int order[] = {1, 0};
  return permute_lower(contract(r, 0, 1), order);
}

CurvatureBundle curvature(const Connection& c, const Metric& g) {
  CurvatureBundle b;
  b.riemann = riemann(c);
  b.ricci = ricci(b.riemann);
  b.ricci_operator = g.raise(b.ricci, 1);
  b.scalar = contract(b.ricci_operator, 0, 0)[0];
  return b;
}

TensorField apply_riemann(const TensorField& r, const TensorField& x, const TensorField& y, const TensorField& z) {
  const std::size_t n = r.dim();
  TensorField out(r.chart(), 1, 0);
  for (std::size_t l = 0; l < n; ++l) {
    Expr acc;
    for (std::size_t k = 0; k < n; ++k) {
      if (z[k].is_zero()) continue;
      for (std::size_t i = 0; i < n; ++i) {
        if (x[i].is_zero()) continue;
        for (std::size_t j = 0; j < n; ++j) {
          if (y[j].is_zero() || r({l, k, i, j}).is_zero()) continue;
          acc = acc + r({l, k, i, j}) * x[i] * y[j] * z[k];
        }
      }
    }
    out[l] = acc;
  }
  return out;
}

TensorField curvature_operator(const Connection& c, const TensorField& x, const TensorField& y,
                               const TensorField& z) {
  return nabla(c, x, nabla(c, y, z)) - nabla(c, y, nabla(c, x, z)) - nabla(c, lie_bracket(x, y), z);
}

TensorField apply(const TensorField& t, const TensorField& x) {
  if (t.up() != 1 || t.down() != 1 || x.up() != 1 || x.down() != 0) throw Error("apply: expected (1,1) and vector");
  const std::size_t n = t.dim();
  TensorField out(t.chart(), 1, 0);
  for (std::size_t k = 0; k < n; ++k) {
    Expr acc;
    for (std::size_t i = 0; i < n; ++i) {
      if (t({k, i}).is_zero() || x[i].is_zero()) continue;
      acc = acc + t({k, i}) * x[i];
    }
    out[k] = acc;
  }
  return out;
}

Expr pair(const TensorField& form, const TensorField& x) {
  if (form.up() != 0 || form.down() != 1 || x.up() != 1 || x.down() != 0) throw Error("pair: expected 1-form and vector");
  Expr acc;
  for (std::size_t i = 0; i < form.dim(); ++i) {
    if (form[i].is_zero() || x[i].is_zero()) continue;
    acc = acc + form[i] * x[i];
  }
  return acc;
}

}  // namespace lcsgeom
