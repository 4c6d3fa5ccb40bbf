#include <random>

#include "doctest.h"
#include "lcsgeom/submanifold.hpp"
#include "support.hpp"

using namespace testing;

namespace {

Metric euclidean(const ChartPtr& chart) {
  TensorField g(chart, 0, 2);
  for (std::size_t i = 0; i < chart->dim(); ++i) g({i, i}) = Expr(1);
  return Metric(g, 0);
}

Connection flat(const ChartPtr& chart) { return Connection(TensorField(chart, 1, 2), true); }

void require_all_pass(const CheckReport& report) {
  for (const auto& c : report.checks) {
    INFO(report.suite << "/" << c.name << " residual " << c.max_residual << " scale " << c.scale << " " << c.note);
    CHECK(c.verdict != Verdict::fail);
  }
}

std::vector<double> values(const AmbientVector& v, const Point& p) {
  std::vector<double> out;
  for (const auto& e : v) out.push_back(eval(e, p));
  return out;
}

// s -> (s, 0.1 s^2) in the Euclidean plane, everything by hand.
struct Parabola {
  static std::array<double, 2> sigma(double s) {
    const double k = 0.2 / (1 + 0.04 * s * s);
    return {-0.2 * s * k, k};
  }
  static std::array<double, 2> tangent(double s) { return {1.0, 0.2 * s}; }
  static double gamma(double s) { return 0.04 * s / (1 + 0.04 * s * s); }
  static std::array<double, 2> normal(std::array<double, 2> v, double s) {
    auto t = tangent(s);
    const double c = (v[0] * t[0] + v[1] * t[1]) / (t[0] * t[0] + t[1] * t[1]);
    return {v[0] - c * t[0], v[1] - c * t[1]};
  }
  // nor(d/ds W) - k Γ W, d/ds by central differences
  template <class F>
  static std::array<double, 2> covariant(F w, double s, int k, double step) {
    auto a = w(s + step), b = w(s - step), here = w(s);
    auto d = normal({(a[0] - b[0]) / (2 * step), (a[1] - b[1]) / (2 * step)}, s);
    return {d[0] - k * gamma(s) * here[0], d[1] - k * gamma(s) * here[1]};
  }
  static std::array<double, 2> third(double s) { return covariant(sigma, s, 2, 1e-5); }
  static std::array<double, 2> second(double s) { return covariant(third, s, 3, 1e-3); }
};

SubmanifoldGeometry parabola() {
  auto source = make_chart({"s"});
  auto target = make_chart({"a", "b"});
  return SubmanifoldGeometry(Immersion(source, target, {E("s"), E("0.1*s^2")}), euclidean(target), flat(target));
}

AmbientGeometry example_ambient() { return make_ambient(paper_example()); }

}  // namespace

TEST_CASE("immersion rejects bad input") {
  auto source = make_chart({"s"});
  auto target = make_chart({"a", "b"});
  CHECK_THROWS_AS(Immersion(source, target, {E("s")}), Error);
  CHECK_THROWS_AS(Immersion(source, target, {E("s"), E("a")}), Error);
  CHECK_THROWS_AS(Immersion(target, source, {E("a")}), Error);
}

TEST_CASE("parabola second fundamental form matches the closed form") {
  auto geo = parabola();
  auto pts = points_for(*geo.chart(), 40);
  double worst = 0, worst_mean = 0;
  for (const auto& p : pts) {
    const double s = p.at("s");
    auto got = values(geo.sigma(0, 0), p);
    auto want = Parabola::sigma(s);
    auto mean = values(geo.mean_curvature(), p);
    const double h = 1 + 0.04 * s * s;
    for (int a = 0; a < 2; ++a) {
      worst = std::max(worst, std::abs(got[a] - want[a]));
      worst_mean = std::max(worst_mean, std::abs(mean[a] - want[a] / h));
    }
    CHECK(std::abs(eval(geo.induced_connection()(0, 0, 0), p) - Parabola::gamma(s)) < 1e-12);
  }
  CHECK(worst < 1e-12);
  CHECK(worst_mean < 1e-12);
}

TEST_CASE("parabola third form and second derivative match finite differences") {
  auto geo = parabola();
  auto third = geo.third_fundamental_form();
  auto second = geo.second_derivative_sigma(third);
  REQUIRE(third.size() == 1);
  REQUIRE(second.size() == 1);
  double worst3 = 0, worst4 = 0;
  for (const auto& p : points_for(*geo.chart(), 20)) {
    const double s = p.at("s");
    auto d = values(third[0], p);
    auto d2 = values(second[0], p);
    auto w3 = Parabola::third(s);
    auto w4 = Parabola::second(s);
    for (int a = 0; a < 2; ++a) {
      worst3 = std::max(worst3, std::abs(d[a] - w3[a]));
      worst4 = std::max(worst4, std::abs(d2[a] - w4[a]));
    }
  }
  CHECK(worst3 < 1e-5);
  CHECK(worst4 < 1e-4);
}

TEST_CASE("round sphere in Euclidean space") {
  auto source = make_chart({"th", "ph"}, {{0.5, 2.6}, {-1, 1}});
  auto target = make_chart({"a", "b", "c"});
  Immersion f(source, target, {E("sin(th)*cos(ph)"), E("sin(th)*sin(ph)"), E("cos(th)")});
  SubmanifoldGeometry geo(f, euclidean(target), flat(target));
  CheckRunner runner(points_for(*source, 40), Tolerance{}, geo.induced_metric().determinant());
  require_all_pass(submanifold_suite(geo, runner, "lc"));
  // H = -position, sectional curvature 1
  TensorField r = riemann(geo.induced_connection());
  for (const auto& p : runner.points()) {
    auto h = values(geo.mean_curvature(), p);
    for (std::size_t a = 0; a < 3; ++a) CHECK(std::abs(h[a] + eval(f.map()[a], p)) < 1e-12);
    const double st = std::sin(p.at("th"));
    // R_{th ph th ph} = g_{th th} R^th_{ph th ph}
    CHECK(std::abs(eval(r({0, 1, 0, 1}), p) - st * st) < 1e-12);
  }
  auto frame = normal_frame_at(geo, runner.points()[3]);
  CHECK(frame.signs == std::vector<int>{1});
}

TEST_CASE("example immersion is invariant and totally geodesic") {
  auto ambient = example_ambient();
  auto f = paper_example_immersion(ambient.structure.chart());
  auto ctx = immerse(f, ambient, 100, 42, Tolerance{});
  for (std::size_t k = 0; k < ctx.runner.points().size(); k += 9) {
    const auto& p = ctx.runner.points()[k];
    auto nf = normal_frame_at(ctx.lc, p);
    const double ez = std::exp(-p.at("z"));
    Eigen::MatrixXd want = Eigen::MatrixXd::Zero(5, 2);
    want(3, 0) = ez;
    want(4, 1) = ez;
    CHECK((nf.vectors - want).cwiseAbs().maxCoeff() < 1e-12);
    CHECK(nf.signs == std::vector<int>{1, 1});
  }
  for (std::size_t i = 0; i < 3; ++i) {
    for (std::size_t j = 0; j < 3; ++j) {
      for (const auto& p : ctx.runner.points()) {
        for (double v : values(ctx.lc.sigma(i, j), p)) CHECK(std::abs(v) < 1e-12);
      }
    }
  }
  for (const auto& v : ctx.lc.normal_fields()) {
    auto a = ctx.lc.shape_operator(v);
    CHECK(max_abs(a, ctx.runner.points()) < 1e-12);
  }
  CHECK(invariance_check(ctx).passed());
  require_all_pass(submanifold_suite(ctx.lc, ctx.runner, "lc"));
  require_all_pass(submanifold_suite(ctx.qs, ctx.runner, "qsmc"));
  require_all_pass(invariant_identity_suite(ctx));
  require_all_pass(parallelism_residuals(ctx));
  auto t5 = theorem5_suite(ctx);
  require_all_pass(t5);
  CHECK(t5.find("thm5_equivalence")->note.find("false") == std::string::npos);
}

TEST_CASE("plane containing the normal direction of xi is not invariant") {
  auto ambient = example_ambient();
  auto target = ambient.structure.chart();
  auto source = make_chart({"x", "y", "u"});
  Immersion f(source, target, {E("x"), E("y"), Expr(), E("u"), Expr()});
  auto ctx = immerse(f, ambient, 40, 42, Tolerance{});
  auto report = invariance_check(ctx);
  CHECK_FALSE(report.passed());
  CHECK(report.find("sub_xi_tangent")->verdict == Verdict::fail);
  // the normal frame contains the timelike direction
  auto nf = normal_frame_at(ctx.lc, ctx.runner.points()[0]);
  CHECK(std::count(nf.signs.begin(), nf.signs.end(), -1) == 1);
}

TEST_CASE("curved invariant immersion") {
  auto ambient = example_ambient();
  auto target = ambient.structure.chart();
  auto source = make_chart({"s", "w", "z"});
  Immersion f(source, target, {E("s"), E("0.1*s^2"), E("z"), E("w"), Expr()});
  auto ctx = immerse(f, ambient, 60, 42, Tolerance{});
  CHECK(invariance_check(ctx).passed());
  require_all_pass(submanifold_suite(ctx.lc, ctx.runner, "lc"));
  require_all_pass(submanifold_suite(ctx.qs, ctx.runner, "qsmc"));
  auto inv = invariant_identity_suite(ctx);
  require_all_pass(inv);
  CHECK(inv.find("sub_sigma_norm")->max_residual > 1e-3);
  auto t5 = theorem5_suite(ctx);
  require_all_pass(t5);
  const auto& note = t5.find("thm5_equivalence")->note;
  CHECK(note.find("true") == std::string::npos);
}

TEST_CASE("rank loss is an immersion error") {
  auto ambient = example_ambient();
  auto source = make_chart({"s", "w", "z"});
  Immersion fold(source, ambient.structure.chart(), {E("s^2"), E("w"), E("z"), Expr(), Expr()});
  // the Halton sequence hits s = 0
  CHECK_THROWS_AS(immerse(fold, ambient, 20, 1, Tolerance{}), ImmersionError);
  SubmanifoldGeometry geo(fold, ambient.structure.metric, ambient.structure.levi_civita);
  Point p = source->center();
  p.set("s", 0.3);
  CHECK_NOTHROW(normal_frame_at(geo, p));
  p.set("s", 0.0);
  CHECK_THROWS_AS(normal_frame_at(geo, p), ImmersionError);
}

TEST_CASE("Tachibana tensor") {
  SUBCASE("explicit entries for a 1-form") {
    // Q(g, w)(Z; X, Y) = -(g(Y, Z) w(X) - g(X, Z) w(Y))
    std::vector<Expr> b{Expr(1), Expr(), Expr(), Expr(1)};
    std::vector<Expr> w{Expr(3), Expr(5)};
    auto q = tachibana_q(b, w, 2, 1, 1);
    REQUIRE(q.size() == 8);
    auto at = [&](int z, int x, int y) { return eval(q[(z * 2 + x) * 2 + y], Point{}); };
    CHECK(at(0, 0, 1) == doctest::Approx(5));   // -(g(1,0) w0 - g(0,0) w1)
    CHECK(at(0, 1, 0) == doctest::Approx(-5));
    CHECK(at(1, 0, 1) == doctest::Approx(-3));
    CHECK(at(0, 0, 0) == doctest::Approx(0));
  }
  SUBCASE("properties on random symmetric data") {
    std::mt19937_64 rng(3);
    std::uniform_int_distribution<int> coef(-4, 4);
    for (int trial = 0; trial < 20; ++trial) {
      const std::size_t m = 2 + trial % 3;
      std::vector<Expr> b(m * m), t(m * m);
      for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
          b[i * m + j] = b[j * m + i] = Expr(coef(rng));
          t[i * m + j] = t[j * m + i] = Expr(coef(rng));
        }
      }
      // Q(B, B) = 0
      for (const auto& e : tachibana_q(b, b, m, 2, 1)) CHECK(eval(e, Point{}) == 0.0);
      // antisymmetric in the last pair
      auto q = tachibana_q(b, t, m, 2, 1);
      for (std::size_t tup = 0; tup < m * m; ++tup) {
        for (std::size_t x = 0; x < m; ++x) {
          for (std::size_t y = 0; y < m; ++y) {
            CHECK(eval(q[(tup * m + x) * m + y] + q[(tup * m + y) * m + x], Point{}) == 0.0);
          }
        }
      }
    }
  }
  SUBCASE("tensor field overload") {
    auto chart = make_chart({"x", "y"});
    TensorField g(chart, 0, 2);
    g({0, 0}) = Expr(1);
    g({1, 1}) = E("x^2+1");
    auto q = tachibana_q(g, g);
    CHECK(q.down() == 4);
    CHECK(max_abs(q, points_for(*chart, 10)) < 1e-14);
  }
}
