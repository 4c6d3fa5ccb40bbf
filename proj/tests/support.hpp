#pragma once

#include <cmath>
#include <functional>
#include <vector>

#include "lcsgeom/check.hpp"
#include "lcsgeom/connection.hpp"
#include "lcsgeom/lcs.hpp"

namespace testing {

using namespace lcsgeom;

inline Expr E(const char* text) { return parse(text); }

inline ChartPtr example_chart() { return make_chart({"x", "y", "z", "u", "v"}); }

// diag(e^{2z}, e^{2z}, -e^{4z}, e^{2z}, e^{2z}), written out independently of
// the library's built-in example.
inline Metric example_metric(const ChartPtr& chart) {
  TensorField g(chart, 0, 2);
  for (std::size_t i = 0; i < 5; ++i) g({i, i}) = E("exp(2*z)");
  g({2, 2}) = E("-exp(4*z)");
  return Metric(g, 1);
}

// e_1 = e^{-z} d_x, e_2 = e^{-z} d_y, e_3 = e^{-2z} d_z, e_4 = e^{-z} d_u, e_5 = e^{-z} d_v
inline FrameField example_frame(const ChartPtr& chart) {
  std::vector<TensorField> e;
  for (std::size_t i = 0; i < 5; ++i) {
    TensorField v(chart, 1, 0);
    v[i] = i == 2 ? E("exp(-2*z)") : E("exp(-z)");
    e.push_back(v);
  }
  return FrameField(chart, e, {1, 1, -1, 1, 1});
}

inline std::vector<Point> points_for(const Chart& chart, int count = 100, std::uint64_t seed = 42) {
  return sample_points(chart, count, seed);
}

// Largest |f(p)_k - g(p)_k| over points and components.
inline double max_difference(const std::vector<Point>& pts,
                             const std::function<std::vector<double>(const Point&)>& f,
                             const std::function<std::vector<double>(const Point&)>& g) {
  double worst = 0.0;
  for (const auto& p : pts) {
    auto a = f(p);
    auto b = g(p);
    if (a.size() != b.size()) return INFINITY;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
  }
  return worst;
}

inline double max_abs(const TensorField& t, const std::vector<Point>& pts) {
  double worst = 0.0;
  for (const auto& p : pts) {
    for (double v : evaluate(t, p)) worst = std::max(worst, std::abs(v));
  }
  return worst;
}

}  // namespace testing
