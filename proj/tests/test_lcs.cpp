#include <random>

#include "doctest.h"
#include "support.hpp"

using namespace testing;

namespace {

CheckRunner runner_for(const Metric& g, int count = 100) {
  return CheckRunner(points_for(*g.chart(), count), Tolerance{}, g.determinant());
}

void require_all_pass(const CheckReport& report) {
  for (const auto& c : report.checks) {
    INFO(c.name << " residual " << c.max_residual << " scale " << c.scale << " " << c.note);
    CHECK(c.verdict != Verdict::fail);
  }
}

// -dt^2 + f(t)^2 (dx_1^2 + ... + dx_k^2) with xi = d_t.
struct Warped {
  ChartPtr chart;
  Metric metric;
  TensorField xi;
};

Warped warped(const std::string& f, std::size_t k, Interval t_range) {
  std::vector<std::string> names{"t"};
  std::vector<Interval> box{t_range};
  for (std::size_t i = 0; i < k; ++i) {
    names.push_back("x" + std::to_string(i + 1));
    box.push_back({-1, 1});
  }
  auto chart = make_chart(names, box);
  TensorField g(chart, 0, 2);
  g({0, 0}) = Expr(-1);
  for (std::size_t i = 1; i <= k; ++i) g({i, i}) = pow(E(f.c_str()), 2);
  return {chart, Metric(g, 1), TensorField::basis(chart, 0)};
}

}  // namespace

TEST_CASE("example recovers alpha, rho and beta") {
  auto L = paper_example();
  auto pts = points_for(*L.chart());
  double worst_alpha = 0, worst_rho = 0, worst_beta = 0;
  for (const auto& p : pts) {
    const double z = p.at("z");
    worst_alpha = std::max(worst_alpha, std::abs(eval(L.alpha, p) / std::exp(-2 * z) - 1));
    worst_rho = std::max(worst_rho, std::abs(eval(L.rho, p) / (2 * std::exp(-4 * z)) - 1));
    worst_beta = std::max(worst_beta, std::abs(eval(L.beta, p) / (8 * std::exp(-6 * z)) - 1));
  }
  CHECK(worst_alpha < 1e-9);
  CHECK(worst_rho < 1e-9);
  CHECK(worst_beta < 1e-9);
}

TEST_CASE("example phi in the orthonormal frame") {
  auto chart = example_chart();
  auto L = derive_structure(example_metric(chart), TensorField::basis(chart, 2).map([](const Expr& e) {
    return e * E("exp(-2*z)");
  }));
  auto frame = example_frame(chart);
  for (const auto& p : points_for(*chart, 20)) {
    auto phi = frame_components(L.phi, frame, p);
    for (std::size_t a = 0; a < 5; ++a) {
      for (std::size_t b = 0; b < 5; ++b) {
        double want = (a == b && a != 2) ? 1.0 : 0.0;
        CHECK(std::abs(phi[a * 5 + b] - want) < 1e-12);
      }
    }
  }
}

TEST_CASE("example structure and connection suites pass") {
  auto ambient = make_ambient(paper_example());
  auto runner = runner_for(ambient.structure.metric);
  auto structure = validate_structure(ambient, runner);
  require_all_pass(structure);
  CHECK(structure.find("lcs_phi_curvature_printed_sign")->verdict == Verdict::measured);
  CHECK(structure.find("lcs_phi_curvature_printed_sign")->max_residual > 1e-3);
  require_all_pass(qsmc_identity_suite(ambient, runner));
}

TEST_CASE("example scalar curvatures match the warped-product formula") {
  // With dt = e^{2z} dz the metric is -dt^2 + 2t (flat 4-space), so
  // r = 2k f''/f + k(k-1)(f'/f)^2 = 4 e^{-4z}.
  auto ambient = make_ambient(paper_example());
  const auto& L = ambient.structure;
  double worst = 0, worst_bar = 0;
  for (const auto& p : points_for(*L.chart())) {
    const double z = p.at("z");
    const double r = 4 * std::exp(-4 * z);
    const double alpha = std::exp(-2 * z);
    worst = std::max(worst, std::abs(eval(ambient.curvature.scalar, p) - r) / std::max(1.0, std::abs(r)));
    const double r_bar = r - (2 * alpha - 1) * 16 - 4;
    worst_bar = std::max(worst_bar, std::abs(eval(ambient.curvature_bar.scalar, p) - r_bar) /
                                        std::max(1.0, std::abs(r_bar)));
  }
  CHECK(worst < 1e-9);
  CHECK(worst_bar < 1e-9);
}

TEST_CASE("warped products with xi = d_t are LCS for random warping functions") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> ua(0.3, 1.0), ub(0.0, 1.0);
  for (int trial = 0; trial < 4; ++trial) {
    const double a = std::round(ua(rng) * 100) / 100;
    const double b = std::round(ub(rng) * 100) / 100;
    const std::size_t k = 2 + static_cast<std::size_t>(trial % 3);
    std::string f = "exp(" + std::to_string(a) + "*t) + " + std::to_string(b);
    auto w = warped(f, k, {0.2, 1.0});
    auto runner = runner_for(w.metric, 40);
    auto L = build_structure(w.metric, w.xi, runner);
    // alpha = f'/f
    for (const auto& p : runner.points()) {
      const double t = p.at("t");
      const double fa = std::exp(a * t) + b;
      CHECK(std::abs(eval(L.alpha, p) - a * std::exp(a * t) / fa) < 1e-10);
    }
    auto ambient = make_ambient(std::move(L));
    INFO("f = " << f << ", k = " << k);
    require_all_pass(validate_structure(ambient, runner));
    require_all_pass(qsmc_identity_suite(ambient, runner));
  }
}

TEST_CASE("structure gate rejects non-LCS input") {
  SUBCASE("perturbed metric") {
    auto chart = example_chart();
    TensorField g = example_metric(chart).tensor();
    g({0, 0}) = E("exp(2.1*z)");
    Metric m(g, 1);
    TensorField xi(chart, 1, 0);
    xi[2] = E("exp(-2*z)");
    try {
      build_structure(m, xi, runner_for(m));
      FAIL("expected StructureError");
    } catch (const StructureError& e) {
      CHECK(e.report().find("lcs_concircular")->verdict == Verdict::fail);
    }
  }
  SUBCASE("xi not unit") {
    auto chart = example_chart();
    Metric m = example_metric(chart);
    TensorField xi(chart, 1, 0);
    xi[2] = E("2*exp(-2*z)");
    try {
      build_structure(m, xi, runner_for(m));
      FAIL("expected StructureError");
    } catch (const StructureError& e) {
      CHECK(e.report().find("lcs_unit_timelike")->verdict == Verdict::fail);
    }
  }
  SUBCASE("Minkowski with a parallel xi has alpha = 0") {
    auto w = warped("1", 3, {-1, 1});
    CHECK_THROWS_AS(derive_structure(w.metric, w.xi), Error);
  }
}
