#include "lcsgeom/lcs.hpp"

#include <cmath>

namespace lcsgeom {

using Idx = std::span<const std::size_t>;
using Sides = std::pair<Expr, Expr>;

namespace {

// Smooth non-coordinate vector fields used to probe operator identities.
std::vector<TensorField> probe_fields(const ChartPtr& chart) {
  const std::size_t n = chart->dim();
  std::vector<Expr> x, y, z;
  for (std::size_t k = 0; k < n; ++k) {
    Expr a = chart->coord(k), b = chart->coord((k + 1) % n), c = chart->coord((k + 2) % n);
    x.push_back(Expr(1) + a * b);
    y.push_back(c - Expr(*Rational::make(static_cast<std::int64_t>(k + 1), 3)) * pow(a, 2));
    z.push_back(sin(b) + Expr(*Rational::make(1, 2)) * a);
  }
  return {TensorField::vector(chart, x), TensorField::vector(chart, y), TensorField::vector(chart, z)};
}

// g(φ∂i, ∂j)
Expr g_phi(const LcsStructure& L, std::size_t i, std::size_t j) {
  Expr acc;
  for (std::size_t l = 0; l < L.dim(); ++l) {
    if (L.phi({l, i}).is_zero() || L.metric(l, j).is_zero()) continue;
    acc = acc + L.phi({l, i}) * L.metric(l, j);
  }
  return acc;
}

}  // namespace

LcsStructure derive_structure(const Metric& g, const TensorField& xi) {
  if (xi.up() != 1 || xi.down() != 0) throw Error("structure field must be a vector field");
  if (xi.dim() != g.dim()) throw Error("structure field and metric have different dimensions");
  const std::size_t n = g.dim();
  if (n < 3) throw Error("an LCS structure needs dimension at least 3");
  Connection lc = levi_civita(g);
  TensorField eta = g.lower(xi, 0);
  TensorField nabla_xi = covariant_derivative(lc, xi);
  Expr trace = contract(nabla_xi, 0, 0)[0];
  if (trace.is_zero()) throw Error("the covariant derivative of xi vanishes identically, so alpha = 0");
  Expr alpha = trace / Expr(static_cast<int>(n - 1));
  TensorField phi = nabla_xi.map([&](const Expr& e) { return e / alpha; });
  Expr rho = -directional(xi, alpha);
  Expr beta = -directional(xi, rho);
  Expr trace_phi = contract(phi, 0, 0)[0];
  return LcsStructure{g, std::move(lc), xi, std::move(eta), std::move(nabla_xi), std::move(phi),
                      std::move(alpha), std::move(rho), std::move(beta), std::move(trace_phi)};
}

namespace {

Check unit_timelike_check(const LcsStructure& L) {
  return indexed_check("EQ(3.1)", "lcs_unit_timelike", {},
                       [&](Idx) { return Sides{L.metric.inner(L.xi, L.xi), Expr(-1)}; });
}

Check concircular_check(const LcsStructure& L) {
  return indexed_check("EQ(3.4)", "lcs_concircular", {L.dim(), L.dim()}, [&](Idx s) {
    const std::size_t i = s[0], k = s[1];
    return Sides{L.nabla_xi({k, i}), L.alpha * (delta(k, i) + L.eta[i] * L.xi[k])};
  });
}

}  // namespace

LcsStructure build_structure(const Metric& g, const TensorField& xi, const CheckRunner& runner) {
  LcsStructure L = derive_structure(g, xi);
  CheckReport gate;
  gate.suite = "structure_gate";
  gate.checks.push_back(runner.run(unit_timelike_check(L)));

  CheckResult nonzero;
  nonzero.tag = "EQ(3.3)";
  nonzero.name = "lcs_alpha_nonzero";
  double smallest = INFINITY;
  for (std::size_t i = 0; i < runner.points().size(); ++i) {
    if (!runner.usable(i)) {
      ++nonzero.skipped;
      continue;
    }
    try {
      smallest = std::min(smallest, std::abs(eval(L.alpha, runner.points()[i])));
      ++nonzero.points;
    } catch (const DomainError&) {
      ++nonzero.skipped;
    }
  }
  nonzero.scale = smallest;
  nonzero.verdict = nonzero.points > 0 && smallest > 1e-12 ? Verdict::pass : Verdict::fail;
  nonzero.note = "min |alpha| over the sample";
  gate.checks.push_back(nonzero);
  gate.checks.push_back(runner.run(concircular_check(L)));

  if (!gate.passed()) {
    std::string failing;
    for (const auto& c : gate.checks) {
      if (c.verdict == Verdict::fail) failing += (failing.empty() ? "" : ", ") + c.name;
    }
    throw StructureError("(g, xi) is not an LCS structure: " + failing + " failed", std::move(gate));
  }
  return L;
}

AmbientGeometry make_ambient(LcsStructure structure) {
  Connection qsmc = quarter_symmetric(structure.levi_civita, structure.metric, structure.phi, structure.eta,
                                      structure.xi);
  CurvatureBundle curv = curvature(structure.levi_civita, structure.metric);
  CurvatureBundle curv_bar = curvature(qsmc, structure.metric);
  return AmbientGeometry{std::move(structure), std::move(qsmc), std::move(curv), std::move(curv_bar)};
}

CheckReport validate_structure(const AmbientGeometry& A, const CheckRunner& runner) {
  const LcsStructure& L = A.structure;
  const std::size_t n = L.dim();
  const auto& g = L.metric;
  const auto& R = A.curvature.riemann;
  const auto& S = A.curvature.ricci;
  const Expr c = pow(L.alpha, 2) - L.rho;  // α² − ρ
  CheckReport report;
  report.suite = "structure";
  auto add = [&](const Check& check) { report.checks.push_back(runner.run(check)); };

  {
    CheckResult sig = runner.run_numeric("DEF", "lcs_lorentzian_signature",
                                         [&](const Point& p, std::vector<double>& l, std::vector<double>& r) {
                                           l = {static_cast<double>(sample_metric(g, p).negatives)};
                                           r = {static_cast<double>(g.negatives())};
                                         });
    report.checks.push_back(sig);
  }
  add(unit_timelike_check(L));
  add(indexed_check("EQ(3.2)", "lcs_eta_dual", {n}, [&](Idx s) {
    Expr acc;
    for (std::size_t j = 0; j < n; ++j) acc = acc + g(s[0], j) * L.xi[j];
    return Sides{L.eta[s[0]], acc};
  }));
  {
    TensorField d_eta = covariant_derivative(L.levi_civita, L.eta);  // (Y, X)
    add(indexed_check("EQ(3.3)", "lcs_nabla_eta", {n, n}, [&](Idx s) {
      const std::size_t x = s[0], y = s[1];
      return Sides{d_eta({y, x}), L.alpha * (g(x, y) + L.eta[x] * L.eta[y])};
    }));
  }
  add(concircular_check(L));
  add(indexed_check("EQ(3.5)", "lcs_alpha_gradient", {n}, [&](Idx s) {
    return Sides{diff(L.alpha, L.chart()->symbol(s[0])), L.rho * L.eta[s[0]]};
  }));
  add(indexed_check("EQ(3.7)", "lcs_phi_form", {n, n}, [&](Idx s) {
    const std::size_t i = s[0], k = s[1];
    return Sides{L.phi({k, i}), delta(k, i) + L.eta[i] * L.xi[k]};
  }));
  add(indexed_check("EQ(3.8)", "lcs_phi_symmetric", {n, n},
                    [&](Idx s) { return Sides{g_phi(L, s[0], s[1]), g_phi(L, s[1], s[0])}; }));
  add(indexed_check("EQ(3.9)", "lcs_eta_xi", {}, [&](Idx) { return Sides{pair(L.eta, L.xi), Expr(-1)}; }));
  add(indexed_check("EQ(3.9)", "lcs_phi_xi", {n}, [&](Idx s) { return Sides{apply(L.phi, L.xi)[s[0]], Expr()}; }));
  add(indexed_check("EQ(3.9)", "lcs_eta_phi", {n}, [&](Idx s) {
    Expr acc;
    for (std::size_t k = 0; k < n; ++k) acc = acc + L.eta[k] * L.phi({k, s[0]});
    return Sides{acc, Expr()};
  }));
  add(indexed_check("EQ(3.9)", "lcs_phi_metric", {n, n}, [&](Idx s) {
    const std::size_t i = s[0], j = s[1];
    Expr acc;
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) {
        if (g(a, b).is_zero()) continue;
        acc = acc + L.phi({a, i}) * L.phi({b, j}) * g(a, b);
      }
    }
    return Sides{acc, g(i, j) + L.eta[i] * L.eta[j]};
  }));
  add(indexed_check("EQ(3.10)", "lcs_phi_squared", {n, n}, [&](Idx s) {
    const std::size_t i = s[0], k = s[1];
    Expr acc;
    for (std::size_t m = 0; m < n; ++m) acc = acc + L.phi({k, m}) * L.phi({m, i});
    return Sides{acc, delta(k, i) + L.eta[i] * L.xi[k]};
  }));
  add(indexed_check("EQ(3.11)", "lcs_ricci_xi", {n}, [&](Idx s) {
    Expr acc;
    for (std::size_t k = 0; k < n; ++k) acc = acc + S({s[0], k}) * L.xi[k];
    return Sides{acc, Expr(static_cast<int>(n - 1)) * c * L.eta[s[0]]};
  }));
  add(indexed_check("EQ(3.12)", "lcs_curvature_xi", {n, n, n}, [&](Idx s) {
    const std::size_t i = s[0], j = s[1], l = s[2];
    Expr acc;
    for (std::size_t k = 0; k < n; ++k) acc = acc + R({l, k, i, j}) * L.xi[k];
    return Sides{acc, c * (L.eta[j] * delta(l, i) - L.eta[i] * delta(l, j))};
  }));
  add(indexed_check("EQ(3.13)", "lcs_curvature_xi_first", {n, n, n}, [&](Idx s) {
    const std::size_t j = s[0], k = s[1], l = s[2];
    Expr acc;
    for (std::size_t i = 0; i < n; ++i) acc = acc + R({l, k, i, j}) * L.xi[i];
    return Sides{acc, c * (g(j, k) * L.xi[l] - L.eta[k] * delta(l, j))};
  }));
  {
    TensorField d_phi = covariant_derivative(L.levi_civita, L.phi);  // (k, Y, X)
    add(indexed_check("EQ(3.14)", "lcs_nabla_phi", {n, n, n}, [&](Idx s) {
      const std::size_t x = s[0], y = s[1], k = s[2];
      return Sides{d_phi({k, y, x}), L.alpha * (g(x, y) * L.xi[k] + Expr(2) * L.eta[x] * L.eta[y] * L.xi[k] +
                                                L.eta[y] * delta(k, x))};
    }));
  }
  add(indexed_check("EQ(3.15)", "lcs_rho_gradient", {n}, [&](Idx s) {
    return Sides{diff(L.rho, L.chart()->symbol(s[0])), L.beta * L.eta[s[0]]};
  }));
  auto phi_curvature = [&](int sign) {
    return [&, sign](Idx s) {
      const std::size_t i = s[0], j = s[1], k = s[2], l = s[3];
      Expr phi_r;
      for (std::size_t m = 0; m < n; ++m) {
        if (L.phi({l, m}).is_zero()) continue;
        phi_r = phi_r + L.phi({l, m}) * R({m, k, i, j});
      }
      Expr tail = c * (g(j, k) * L.eta[i] - g(i, k) * L.eta[j]) * L.xi[l];
      return Sides{R({l, k, i, j}), sign > 0 ? phi_r + tail : phi_r - tail};
    };
  };
  add(indexed_check("EQ(3.16)", "lcs_phi_curvature", {n, n, n, n}, phi_curvature(-1)));
  {
    Check printed = indexed_check("EQ(3.16)", "lcs_phi_curvature_printed_sign", {n, n, n, n}, phi_curvature(+1));
    printed.measured = true;
    add(printed);
  }
  add(indexed_check("DEF", "lcs_trace_phi", {},
                    [&](Idx) { return Sides{L.trace_phi, Expr(static_cast<int>(n - 1))}; }));
  return report;
}

CheckReport qsmc_identity_suite(const AmbientGeometry& A, const CheckRunner& runner) {
  const LcsStructure& L = A.structure;
  const std::size_t n = L.dim();
  const auto& g = L.metric;
  const auto& lc = L.levi_civita;
  const auto& bar = A.qsmc;
  const auto& R = A.curvature.riemann;
  const auto& Rb = A.curvature_bar.riemann;
  const auto& S = A.curvature.ricci;
  const auto& Sb = A.curvature_bar.ricci;
  const auto& Q = A.curvature.ricci_operator;
  const auto& Qb = A.curvature_bar.ricci_operator;
  const Expr c = pow(L.alpha, 2) - L.alpha - L.rho;  // α² − α − ρ
  const Expr two_alpha_1 = Expr(2) * L.alpha - Expr(1);
  const Expr a = L.trace_phi;
  CheckReport report;
  report.suite = "qsmc";
  auto add = [&](const Check& check) { report.checks.push_back(runner.run(check)); };

  // T(∂i, ∂j)^k = η_j φ^k_i − η_i φ^k_j
  TensorField t(L.chart(), 1, 2);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) t({k, i, j}) = L.eta[j] * L.phi({k, i}) - L.eta[i] * L.phi({k, j});
    }
  }
  TensorField tb = torsion(bar);
  add(indexed_check("EQ(1.2)", "qsmc_torsion", {n, n, n},
                    [&](Idx s) { return Sides{tb({s[2], s[0], s[1]}), t({s[2], s[0], s[1]})}; }));
  {
    auto probes = probe_fields(L.chart());
    const auto& x = probes[0];
    const auto& y = probes[1];
    TensorField lhs = nabla(bar, x, y) - nabla(bar, y, x) - lie_bracket(x, y);
    TensorField rhs = pair(L.eta, y) * apply(L.phi, x) - pair(L.eta, x) * apply(L.phi, y);
    add(indexed_check("EQ(1.1)", "qsmc_torsion_operator", {n}, [&](Idx s) { return Sides{lhs[s[0]], rhs[s[0]]}; }));
  }
  {
    // U = ½[T(X,Y) + T'(X,Y) + T'(Y,X)], g(T'(X,Y), Z) = g(T(Z,X), Y)
    TensorField tp(L.chart(), 1, 2);
    for (std::size_t k = 0; k < n; ++k) {
      for (std::size_t x = 0; x < n; ++x) {
        for (std::size_t y = 0; y < n; ++y) {
          Expr acc;
          for (std::size_t z = 0; z < n; ++z) {
            if (g.inv(k, z).is_zero()) continue;
            Expr gt;
            for (std::size_t m = 0; m < n; ++m) {
              if (g(m, y).is_zero()) continue;
              gt = gt + g(m, y) * t({m, z, x});
            }
            acc = acc + g.inv(k, z) * gt;
          }
          tp({k, x, y}) = acc;
        }
      }
    }
    const Expr half(*Rational::make(1, 2));
    add(indexed_check("EQ(4.6)", "qsmc_connection", {n, n, n}, [&](Idx s) {
      const std::size_t i = s[0], j = s[1], k = s[2];
      return Sides{bar(k, i, j) - lc(k, i, j), half * (t({k, i, j}) + tp({k, i, j}) + tp({k, j, i}))};
    }));
  }
  {
    TensorField dg = metric_derivative(bar, g);
    add(indexed_check("DEF", "qsmc_metric_compatible", {n, n, n},
                      [&](Idx s) { return Sides{dg({s[0], s[1], s[2]}), Expr()}; }));
  }
  {
    auto probes = probe_fields(L.chart());
    TensorField op = curvature_operator(bar, probes[0], probes[1], probes[2]);
    TensorField co = apply_riemann(Rb, probes[0], probes[1], probes[2]);
    add(indexed_check("EQ(5.11)", "qsmc_curvature_operator", {n}, [&](Idx s) { return Sides{op[s[0]], co[s[0]]}; }));
  }
  add(indexed_check("EQ(4.7)", "qsmc_curvature", {n, n, n, n}, [&](Idx s) {
    const std::size_t i = s[0], j = s[1], k = s[2], l = s[3];
    Expr rhs = R({l, k, i, j}) + two_alpha_1 * (g_phi(L, i, k) * L.phi({l, j}) - g_phi(L, j, k) * L.phi({l, i})) +
               L.alpha * (L.eta[j] * delta(l, i) - L.eta[i] * delta(l, j)) * L.eta[k] +
               L.alpha * (g(j, k) * L.eta[i] - g(i, k) * L.eta[j]) * L.xi[l];
    return Sides{Rb({l, k, i, j}), rhs};
  }));
  add(indexed_check("EQ(4.8)", "qsmc_ricci", {n, n}, [&](Idx s) {
    const std::size_t y = s[0], z = s[1];
    Expr rhs = S({y, z}) + (L.alpha - Expr(1)) * g(y, z) +
               (Expr(static_cast<int>(n)) * L.alpha - Expr(1)) * L.eta[y] * L.eta[z] - two_alpha_1 * a * g_phi(L, y, z);
    return Sides{Sb({y, z}), rhs};
  }));
  add(indexed_check("EQ(4.9)", "qsmc_scalar", {}, [&](Idx) {
    return Sides{A.curvature_bar.scalar,
                 A.curvature.scalar - two_alpha_1 * pow(a, 2) - Expr(static_cast<int>(n - 1))};
  }));
  add(indexed_check("EQ(4.10)", "qsmc_ricci_operator", {n, n}, [&](Idx s) {
    const std::size_t y = s[0], k = s[1];
    Expr rhs = Q({k, y}) + (L.alpha - Expr(1)) * delta(k, y) +
               (Expr(static_cast<int>(n)) * L.alpha - Expr(1)) * L.eta[y] * L.xi[k] - two_alpha_1 * a * L.phi({k, y});
    return Sides{Qb({k, y}), rhs};
  }));
  auto rb_xi = [&](std::size_t l, std::size_t i, std::size_t j) {
    Expr acc;
    for (std::size_t k = 0; k < n; ++k) acc = acc + Rb({l, k, i, j}) * L.xi[k];
    return acc;
  };
  add(indexed_check("EQ(4.11)", "qsmc_curvature_xi_difference", {n, n, n}, [&](Idx s) {
    const std::size_t i = s[0], j = s[1], l = s[2];
    Expr r_xi;
    for (std::size_t k = 0; k < n; ++k) r_xi = r_xi + R({l, k, i, j}) * L.xi[k];
    return Sides{rb_xi(l, i, j), r_xi - L.alpha * (L.eta[j] * delta(l, i) - L.eta[i] * delta(l, j))};
  }));
  add(indexed_check("EQ(4.11)", "qsmc_curvature_xi", {n, n, n}, [&](Idx s) {
    const std::size_t i = s[0], j = s[1], l = s[2];
    return Sides{rb_xi(l, i, j), c * (L.eta[j] * delta(l, i) - L.eta[i] * delta(l, j))};
  }));
  auto rb_x_xi = [&](std::size_t l, std::size_t x, std::size_t y) {  // R̄(∂x, ξ)∂y
    Expr acc;
    for (std::size_t j = 0; j < n; ++j) acc = acc + Rb({l, y, x, j}) * L.xi[j];
    return acc;
  };
  add(indexed_check("EQ(4.12)", "qsmc_curvature_xi_middle", {n, n, n}, [&](Idx s) {
    const std::size_t x = s[0], y = s[1], l = s[2];
    return Sides{rb_x_xi(l, x, y), c * (L.eta[y] * delta(l, x) - g(x, y) * L.xi[l])};
  }));
  add(indexed_check("EQ(4.12)", "qsmc_curvature_xi_swap", {n, n, n}, [&](Idx s) {
    const std::size_t x = s[0], y = s[1], l = s[2];
    Expr xi_x;  // R̄(ξ, ∂x)∂y
    for (std::size_t i = 0; i < n; ++i) xi_x = xi_x + Rb({l, y, i, x}) * L.xi[i];
    return Sides{rb_x_xi(l, x, y), -xi_x};
  }));
  add(indexed_check("EQ(4.13)", "qsmc_ricci_xi", {n}, [&](Idx s) {
    Expr acc;
    for (std::size_t k = 0; k < n; ++k) acc = acc + Sb({s[0], k}) * L.xi[k];
    return Sides{acc, Expr(static_cast<int>(n - 1)) * c * L.eta[s[0]]};
  }));
  add(indexed_check("EQ(4.14)", "qsmc_ricci_operator_xi", {n}, [&](Idx s) {
    Expr acc;
    for (std::size_t y = 0; y < n; ++y) acc = acc + Qb({s[0], y}) * L.xi[y];
    return Sides{acc, Expr(static_cast<int>(n - 1)) * c * L.xi[s[0]]};
  }));

  add(indexed_check("THM(3.1)", "qsmc_bianchi", {n, n, n, n}, [&](Idx s) {
    const std::size_t i = s[0], j = s[1], k = s[2], l = s[3];
    return Sides{Rb({l, k, i, j}) + Rb({l, i, j, k}) + Rb({l, j, k, i}), Expr()};
  }));
  TensorField r4(L.chart(), 0, 4);  // R̄(X, Y, Z, U) = g(R̄(X,Y)Z, U)
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t u = 0; u < n; ++u) {
          Expr acc;
          for (std::size_t l = 0; l < n; ++l) {
            if (g(l, u).is_zero()) continue;
            acc = acc + Rb({l, k, i, j}) * g(l, u);
          }
          r4({i, j, k, u}) = acc;
        }
      }
    }
  }
  add(indexed_check("THM(3.1)", "qsmc_skew_first_pair", {n, n, n, n}, [&](Idx s) {
    return Sides{r4({s[0], s[1], s[2], s[3]}) + r4({s[1], s[0], s[2], s[3]}), Expr()};
  }));
  add(indexed_check("THM(3.1)", "qsmc_skew_last_pair", {n, n, n, n}, [&](Idx s) {
    return Sides{r4({s[0], s[1], s[2], s[3]}) + r4({s[0], s[1], s[3], s[2]}), Expr()};
  }));
  add(indexed_check("THM(3.1)", "qsmc_pair_symmetry", {n, n, n, n}, [&](Idx s) {
    return Sides{r4({s[0], s[1], s[2], s[3]}), r4({s[2], s[3], s[0], s[1]})};
  }));

  for (const auto* bundle : {&A.curvature, &A.curvature_bar}) {
    const bool is_bar = bundle == &A.curvature_bar;
    const std::string prefix = is_bar ? "qsmc" : "lc";
    add(indexed_check("DEF", prefix + "_ricci_contraction", {n, n}, [&](Idx s) {
      const std::size_t j = s[0], k = s[1];
      Expr acc;
      for (std::size_t i = 0; i < n; ++i) acc = acc + bundle->riemann({i, k, i, j});
      return Sides{bundle->ricci({j, k}), acc};
    }));
    add(indexed_check("DEF", prefix + "_ricci_operator_metric", {n, n}, [&](Idx s) {
      const std::size_t x = s[0], y = s[1];
      Expr acc;
      for (std::size_t m = 0; m < n; ++m) acc = acc + g(m, y) * bundle->ricci_operator({m, x});
      return Sides{acc, bundle->ricci({x, y})};
    }));
  }
  return report;
}

ChartPtr paper_example_chart() { return make_chart({"x", "y", "z", "u", "v"}); }

Metric paper_example_metric(const ChartPtr& chart) {
  TensorField g(chart, 0, 2);
  for (std::size_t i = 0; i < 5; ++i) g({i, i}) = parse("exp(2*z)");
  g({2, 2}) = parse("-exp(4*z)");
  return Metric(g, 1);
}

TensorField paper_example_xi(const ChartPtr& chart) {
  TensorField xi(chart, 1, 0);
  xi[2] = parse("exp(-2*z)");
  return xi;
}

FrameField paper_example_frame(const ChartPtr& chart) {
  std::vector<TensorField> e;
  for (std::size_t i = 0; i < 5; ++i) {
    TensorField v(chart, 1, 0);
    v[i] = parse(i == 2 ? "exp(-2*z)" : "exp(-z)");
    e.push_back(v);
  }
  return FrameField(chart, e, {1, 1, -1, 1, 1});
}

LcsStructure paper_example() {
  auto chart = paper_example_chart();
  return derive_structure(paper_example_metric(chart), paper_example_xi(chart));
}

}  // namespace lcsgeom
