#include "doctest.h"
#include "support.hpp"

using namespace testing;

namespace {

Metric sphere_metric(const ChartPtr& chart) {
  TensorField g(chart, 0, 2);
  g({0, 0}) = Expr(1);
  g({1, 1}) = E("sin(th)^2");
  return Metric(g, 0);
}

ChartPtr sphere_chart() { return make_chart({"th", "ph"}, {{0.3, 2.8}, {-3, 3}}); }

// Christoffel symbols from central differences of the metric (Koszul formula
// evaluated numerically), independent of the symbolic path.
double fd_christoffel(const Metric& g, const Point& p, std::size_t k, std::size_t i, std::size_t j) {
  const auto& chart = *g.chart();
  const std::size_t n = chart.dim();
  const double h = 1e-5;
  auto dg = [&](std::size_t a, std::size_t b, std::size_t c) {
    Point pp = p, pm = p;
    pp.set(chart.symbol(c), p.at(chart.symbol(c)) + h);
    pm.set(chart.symbol(c), p.at(chart.symbol(c)) - h);
    return (eval(g(a, b), pp) - eval(g(a, b), pm)) / (2 * h);
  };
  Eigen::MatrixXd inv = evaluate_matrix(g.tensor(), p).inverse();
  double acc = 0.0;
  for (std::size_t l = 0; l < n; ++l) {
    acc += 0.5 * inv(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(l)) *
           (dg(j, l, i) + dg(i, l, j) - dg(i, j, l));
  }
  return acc;
}

}  // namespace

TEST_CASE("Euclidean metric has vanishing symbols") {
  auto c = make_chart({"x", "y", "z"});
  TensorField g(c, 0, 2);
  for (std::size_t i = 0; i < 3; ++i) g({i, i}) = Expr(1);
  auto lc = levi_civita(Metric(g, 0));
  for (const auto& e : lc.coefficients().components()) CHECK(e.is_zero());
}

TEST_CASE("Levi-Civita symbols of the example metric") {
  auto chart = example_chart();
  Metric g = example_metric(chart);
  auto lc = levi_civita(g);
  auto pts = points_for(*chart);
  // hand values: Γ^z_xx = e^{-2z}, Γ^x_xz = Γ^x_zx = 1, Γ^z_zz = 2
  TensorField expected(chart, 1, 2);
  for (std::size_t a : {0u, 1u, 3u, 4u}) {
    expected({2, a, a}) = E("exp(-2*z)");
    expected({a, a, 2}) = Expr(1);
    expected({a, 2, a}) = Expr(1);
  }
  expected({2, 2, 2}) = Expr(2);
  CHECK(max_abs(lc.coefficients() - expected, pts) < 1e-13);
  CHECK(lc.torsion_free());
  CHECK(max_abs(torsion(lc), pts) == 0.0);

  // ∇_{e1} e1 = e^{-2z} e3 in frame components
  auto e = example_frame(chart);
  auto v = nabla(lc, e[0], e[0]);
  for (const auto& p : pts) {
    auto fc = frame_components(v, e, p);
    double z = p.at("z");
    CHECK(std::abs(fc[2] - std::exp(-2 * z)) < 1e-12);
    CHECK(std::abs(fc[0]) + std::abs(fc[1]) + std::abs(fc[3]) + std::abs(fc[4]) < 1e-12);
  }
}

TEST_CASE("round sphere: symbols and curvature against closed forms") {
  auto chart = sphere_chart();
  Metric g = sphere_metric(chart);
  auto lc = levi_civita(g);
  auto pts = points_for(*chart);
  for (const auto& p : pts) {
    double th = p.at("th");
    CHECK(std::abs(eval(lc(0, 1, 1), p) + std::sin(th) * std::cos(th)) < 1e-12);
    CHECK(std::abs(eval(lc(1, 0, 1), p) - std::cos(th) / std::sin(th)) < 1e-12);
    for (std::size_t k = 0; k < 2; ++k) {
      for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
          CHECK(std::abs(eval(lc(k, i, j), p) - fd_christoffel(g, p, k, i, j)) < 1e-7);
        }
      }
    }
  }
  auto curv = curvature(lc, g);
  // unit sphere: R(X,Y)Z = g(Y,Z)X - g(X,Z)Y, S = g, r = 2
  TensorField oracle(chart, 1, 3);
  for (std::size_t l = 0; l < 2; ++l) {
    for (std::size_t k = 0; k < 2; ++k) {
      for (std::size_t i = 0; i < 2; ++i) {
        for (std::size_t j = 0; j < 2; ++j) {
          Expr v;
          if (l == i) v = v + g(j, k);
          if (l == j) v = v - g(i, k);
          oracle({l, k, i, j}) = v;
        }
      }
    }
  }
  CHECK(max_abs(curv.riemann - oracle, pts) < 1e-9);
  CHECK(max_abs(curv.ricci - g.tensor(), pts) < 1e-9);
  CHECK(max_abs(TensorField::scalar(chart, curv.scalar - Expr(2)), pts) < 1e-9);
}

TEST_CASE("flat plane in polar coordinates has zero curvature") {
  auto chart = make_chart({"r", "t"}, {{0.5, 2.0}, {-3, 3}});
  TensorField g(chart, 0, 2);
  g({0, 0}) = Expr(1);
  g({1, 1}) = E("r^2");
  Metric m(g, 0);
  auto lc = levi_civita(m);
  auto pts = points_for(*chart);
  CHECK(max_abs(lc.coefficients(), pts) > 0.4);
  auto curv = curvature(lc, m);
  CHECK(max_abs(curv.riemann, pts) < 1e-9);
  CHECK(max_abs(curv.ricci, pts) < 1e-9);
}

namespace {

Metric warped_metric(const ChartPtr& chart) {
  TensorField g(chart, 0, 2);
  g({0, 0}) = E("-(2 + sin(x*y))");
  g({0, 1}) = E("x*z/4");
  g({1, 1}) = E("3 + y^2");
  g({1, 2}) = E("cos(x)/5");
  g({2, 2}) = E("exp(z/2) + 1");
  return Metric(g, 1);
}

}  // namespace

TEST_CASE("Levi-Civita is metric compatible; a corrupted symbol is not") {
  auto chart = make_chart({"x", "y", "z"});
  Metric g = warped_metric(chart);
  auto lc = levi_civita(g);
  auto pts = points_for(*chart);
  for (const auto& p : pts) {
    for (std::size_t k = 0; k < 3; ++k) {
      for (std::size_t i = 0; i < 3; ++i) {
        for (std::size_t j = 0; j < 3; ++j) {
          CHECK(std::abs(eval(lc(k, i, j), p) - fd_christoffel(g, p, k, i, j)) < 1e-6);
        }
      }
    }
  }
  CHECK(max_abs(metric_derivative(lc, g), pts) < 1e-10);

  TensorField bad = lc.coefficients();
  bad({1, 0, 2}) = bad({1, 0, 2}) + Expr(*Rational::make(1, 10));
  Connection corrupted(bad, false);
  CHECK(max_abs(metric_derivative(corrupted, g), pts) > 0.01);
}

TEST_CASE("curvature identities for a generic metric") {
  auto chart = make_chart({"x", "y", "z"});
  Metric g = warped_metric(chart);
  auto lc = levi_civita(g);
  auto pts = points_for(*chart, 30);
  auto curv = curvature(lc, g);
  const auto& r = curv.riemann;
  double worst_bianchi = 0, worst_antisym = 0, worst_ricci = 0, worst_q = 0;
  for (const auto& p : pts) {
    auto rv = evaluate(r, p);
    auto at = [&](std::size_t l, std::size_t k, std::size_t i, std::size_t j) { return rv[((l * 3 + k) * 3 + i) * 3 + j]; };
    auto sv = evaluate(curv.ricci, p);
    auto qv = evaluate(curv.ricci_operator, p);
    Eigen::MatrixXd gm = evaluate_matrix(g.tensor(), p);
    for (std::size_t l = 0; l < 3; ++l) {
      for (std::size_t k = 0; k < 3; ++k) {
        for (std::size_t i = 0; i < 3; ++i) {
          for (std::size_t j = 0; j < 3; ++j) {
            // R(X,Y)Z + R(Y,Z)X + R(Z,X)Y with X=∂i, Y=∂j, Z=∂k
            worst_bianchi = std::max(worst_bianchi, std::abs(at(l, k, i, j) + at(l, i, j, k) + at(l, j, k, i)));
            worst_antisym = std::max(worst_antisym, std::abs(at(l, k, i, j) + at(l, k, j, i)));
          }
        }
      }
    }
    for (std::size_t j = 0; j < 3; ++j) {
      for (std::size_t k = 0; k < 3; ++k) {
        double direct = 0;
        for (std::size_t i = 0; i < 3; ++i) direct += at(i, k, i, j);
        worst_ricci = std::max(worst_ricci, std::abs(direct - sv[j * 3 + k]));
        // g(Q ∂j, ∂k) = S(∂j, ∂k)
        double gq = 0;
        for (std::size_t m = 0; m < 3; ++m) gq += gm(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(k)) * qv[m * 3 + j];
        worst_q = std::max(worst_q, std::abs(gq - sv[j * 3 + k]));
      }
    }
  }
  CHECK(worst_bianchi < 1e-8);
  CHECK(worst_antisym < 1e-12);
  CHECK(worst_ricci < 1e-9);
  CHECK(worst_q < 1e-9);
}

TEST_CASE("coordinate curvature agrees with the operator definition on non-coordinate fields") {
  auto chart = make_chart({"x", "y", "z"});
  Metric g = warped_metric(chart);
  auto lc = levi_civita(g);
  auto r = riemann(lc);
  auto pts = points_for(*chart, 20);
  auto x = TensorField::vector(chart, {E("x*y + 1"), E("z^2"), E("sin(x)")});
  auto y = TensorField::vector(chart, {E("y"), E("x*z - 2"), E("1 + x^2")});
  auto z = TensorField::vector(chart, {E("cos(y*z)"), E("x"), E("y^3")});
  CHECK(max_abs(curvature_operator(lc, x, y, z) - apply_riemann(r, x, y, z), pts) < 1e-8);

  // also for a connection with torsion
  TensorField gamma = lc.coefficients();
  gamma({0, 1, 2}) = gamma({0, 1, 2}) + E("x*y");
  gamma({2, 0, 1}) = gamma({2, 0, 1}) - E("cos(z)");
  Connection twisted(gamma, false);
  CHECK(max_abs(curvature_operator(twisted, x, y, z) - apply_riemann(riemann(twisted), x, y, z), pts) < 1e-8);
}

TEST_CASE("covariant derivative of a 1-form matches the Leibniz rule") {
  auto chart = make_chart({"x", "y", "z"});
  Metric g = warped_metric(chart);
  auto lc = levi_civita(g);
  auto pts = points_for(*chart, 20);
  auto w = TensorField::covector(chart, {E("x*z"), E("exp(y)"), E("sin(x*y)")});
  auto y = TensorField::vector(chart, {E("y"), E("x*z - 2"), E("1 + x^2")});
  auto dw = covariant_derivative(lc, w);
  // X(ω(Y)) = (∇_X ω)(Y) + ω(∇_X Y), X = ∂_i
  for (std::size_t i = 0; i < 3; ++i) {
    auto xi = TensorField::basis(chart, i);
    Expr lhs = directional(xi, pair(w, y));
    Expr nabla_w_y;
    for (std::size_t b = 0; b < 3; ++b) nabla_w_y = nabla_w_y + dw({b, i}) * y[b];
    Expr rhs = nabla_w_y + pair(w, nabla(lc, xi, y));
    CHECK(max_abs(TensorField::scalar(chart, lhs - rhs), pts) < 1e-10);
  }
}

TEST_CASE("quarter-symmetric construction with vanishing structure returns the ambient symbols") {
  auto chart = make_chart({"x", "y", "z"});
  Metric g = warped_metric(chart);
  auto lc = levi_civita(g);
  auto q = quarter_symmetric(lc, g, TensorField(chart, 1, 1), TensorField(chart, 0, 1), TensorField(chart, 1, 0));
  for (std::size_t k = 0; k < lc.coefficients().size(); ++k) {
    CHECK(structurally_equal(q.coefficients()[k], lc.coefficients()[k]));
  }
  CHECK_FALSE(q.torsion_free());
}
