#include "doctest.h"
#include "lcsgeom/recurrence.hpp"
#include "support.hpp"

using namespace testing;

namespace {

Connection flat(const ChartPtr& chart) { return Connection(TensorField(chart, 1, 2), true); }

Metric euclidean(const ChartPtr& chart) {
  TensorField g(chart, 0, 2);
  for (std::size_t i = 0; i < chart->dim(); ++i) g({i, i}) = Expr(1);
  return Metric(g, 0);
}

TensorField covector(const ChartPtr& chart, std::vector<const char*> comps) {
  std::vector<Expr> e;
  for (auto* c : comps) e.push_back(E(c));
  return TensorField::covector(chart, e);
}

}  // namespace

TEST_CASE("exp(x) times a constant covector recurs with pi = dx") {
  auto chart = make_chart({"x", "y"});
  auto g = euclidean(chart);
  auto t = covector(chart, {"exp(x)", "2*exp(x)"});
  auto pts = points_for(*chart);
  auto v = recurrence_classify(t, flat(chart), pts, 1e-8, &g);
  CHECK(v.classification == Recurrence::recurrent);
  CHECK_FALSE(v.vacuous);
  REQUIRE(v.pi.size() == pts.size());
  double worst = 0;
  for (const auto& pi : v.pi) worst = std::max({worst, std::abs(pi[0] - 1), std::abs(pi[1])});
  CHECK(worst < 1e-8);
  REQUIRE(v.closed_form_residual.has_value());
  CHECK(*v.closed_form_residual < 1e-8);
}

TEST_CASE("scaling T by a constant leaves pi unchanged") {
  auto chart = make_chart({"x", "y"});
  auto t = covector(chart, {"exp(x*y)", "x*exp(x*y)"});
  auto pts = points_for(*chart, 30);
  auto a = recurrence_classify(t, flat(chart), pts);
  auto b = recurrence_classify(Expr(2) * t, flat(chart), pts);
  REQUIRE(a.pi.size() == b.pi.size());
  for (std::size_t k = 0; k < a.pi.size(); ++k) {
    for (std::size_t x = 0; x < 2; ++x) CHECK(std::abs(a.pi[k][x] - b.pi[k][x]) < 1e-12);
  }
}

TEST_CASE("classification ladder on flat examples") {
  auto chart = make_chart({"x", "y", "w"});
  auto pts = points_for(*chart, 40);
  auto classify = [&](std::vector<const char*> comps) {
    return recurrence_classify(covector(chart, comps), flat(chart), pts).classification;
  };
  CHECK(classify({"1", "2", "-3"}) == Recurrence::parallel);
  CHECK(classify({"exp(x^2)", "0", "exp(x^2)"}) == Recurrence::recurrent);
  // d_x d_x T = -T, d_x T not proportional to T
  CHECK(classify({"cos(x)", "sin(x)", "0"}) == Recurrence::two_recurrent);
  // d_x d_x T = 2 d_x T - 2 T
  CHECK(classify({"exp(x)*cos(x)", "exp(x)*sin(x)", "0"}) == Recurrence::generalized_two_recurrent);
  CHECK(classify({"x^2", "x^3", "x^4"}) == Recurrence::none);
}

TEST_CASE("zero field is vacuously parallel") {
  auto chart = make_chart({"x", "y"});
  auto v = recurrence_classify(TensorField(chart, 0, 1), flat(chart), points_for(*chart, 10));
  CHECK(v.vacuous);
  CHECK(v.classification == Recurrence::parallel);
}

TEST_CASE("recurrence under a curved connection") {
  // On the round sphere chart, the metric itself is parallel.
  auto chart = make_chart({"th", "ph"}, {{0.4, 2.6}, {-1, 1}});
  TensorField g(chart, 0, 2);
  g({0, 0}) = Expr(1);
  g({1, 1}) = E("sin(th)^2");
  Metric m(g, 0);
  auto v = recurrence_classify(g, levi_civita(m), points_for(*chart, 30));
  CHECK(v.classification == Recurrence::parallel);
  // exp(ph) g is recurrent with pi = d ph.
  auto w = recurrence_classify(E("exp(ph)") * g, levi_civita(m), points_for(*chart, 30), 1e-8, &m);
  CHECK(w.classification == Recurrence::recurrent);
  REQUIRE(w.closed_form_residual.has_value());
  CHECK(*w.closed_form_residual < 1e-8);
}
