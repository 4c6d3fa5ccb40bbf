#include "lcsgeom/recurrence.hpp"

#include <cmath>

namespace lcsgeom {

namespace {

constexpr double kZero = 1e-10;

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double max_abs(const std::vector<double>& a) {
  double s = 0.0;
  for (double v : a) s = std::max(s, std::abs(v));
  return s;
}

bool within(double residual, double tol, double scale) { return residual <= tol * (1.0 + scale); }

}  // namespace

const char* recurrence_name(Recurrence r) {
  switch (r) {
    case Recurrence::parallel:
      return "parallel";
    case Recurrence::recurrent:
      return "recurrent";
    case Recurrence::two_recurrent:
      return "two_recurrent";
    case Recurrence::generalized_two_recurrent:
      return "generalized_two_recurrent";
    case Recurrence::none:
      return "none";
  }
  return "?";
}

bool RecurrenceVerdict::parallel() const { return within(parallel_residual, tolerance, 0.0); }
bool RecurrenceVerdict::recurrent() const { return within(recurrent_residual, tolerance, derivative_scale); }
bool RecurrenceVerdict::two_recurrent() const {
  return within(two_recurrent_residual, tolerance, second_derivative_scale);
}
bool RecurrenceVerdict::generalized_two_recurrent() const {
  return within(generalized_residual, tolerance, second_derivative_scale);
}

RecurrenceVerdict classify_jets(std::span<const JetSample> jets, double tol) {
  RecurrenceVerdict v;
  v.tolerance = tol;
  v.vacuous = true;
  for (const auto& j : jets) {
    const std::size_t m = j.d.size();
    if (j.d2.size() != m * m) throw Error("jet sample has inconsistent second derivatives");
    ++v.points;
    const double tt = dot(j.t, j.t);
    const bool zero = std::sqrt(tt) <= kZero;
    if (!zero) v.vacuous = false;

    std::vector<double> pi(m, 0.0);
    for (std::size_t x = 0; x < m; ++x) {
      v.derivative_scale = std::max(v.derivative_scale, max_abs(j.d[x]));
      v.parallel_residual = std::max(v.parallel_residual, max_abs(j.d[x]));
      if (!zero) pi[x] = dot(j.t, j.d[x]) / tt;
      for (std::size_t c = 0; c < j.t.size(); ++c) {
        v.recurrent_residual = std::max(v.recurrent_residual, std::abs(j.d[x][c] - pi[x] * j.t[c]));
      }
    }
    v.pi.push_back(pi);

    std::vector<double> psi(m * m, 0.0);
    for (std::size_t k = 0; k < m * m; ++k) {
      v.second_derivative_scale = std::max(v.second_derivative_scale, max_abs(j.d2[k]));
      if (!zero) psi[k] = dot(j.t, j.d2[k]) / tt;
      for (std::size_t c = 0; c < j.t.size(); ++c) {
        v.two_recurrent_residual = std::max(v.two_recurrent_residual, std::abs(j.d2[k][c] - psi[k] * j.t[c]));
      }
    }
    v.psi.push_back(psi);

    // Generalized: for each x, unknowns π_x and ψ_{x0..x(m-1)}.
    const std::size_t n = j.t.size();
    for (std::size_t x = 0; x < m; ++x) {
      Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m * n), static_cast<Eigen::Index>(m + 1));
      Eigen::VectorXd b(static_cast<Eigen::Index>(m * n));
      for (std::size_t y = 0; y < m; ++y) {
        for (std::size_t c = 0; c < n; ++c) {
          const auto row = static_cast<Eigen::Index>(y * n + c);
          a(row, 0) = j.d[y][c];
          a(row, static_cast<Eigen::Index>(1 + y)) = j.t[c];
          b(row) = j.d2[x * m + y][c];
        }
      }
      Eigen::VectorXd sol = a.completeOrthogonalDecomposition().solve(b);
      v.generalized_residual = std::max(v.generalized_residual, (a * sol - b).cwiseAbs().maxCoeff());
    }
  }
  if (v.parallel()) {
    v.classification = Recurrence::parallel;
  } else if (v.recurrent()) {
    v.classification = Recurrence::recurrent;
  } else if (v.two_recurrent()) {
    v.classification = Recurrence::two_recurrent;
  } else if (v.generalized_two_recurrent()) {
    v.classification = Recurrence::generalized_two_recurrent;
  }
  return v;
}

RecurrenceVerdict recurrence_classify(const TensorField& t, const Connection& c, std::span<const Point> pts,
                                      double tol, const Metric* g) {
  const std::size_t m = c.dim();
  TensorField d = covariant_derivative(c, t);
  TensorField d2 = covariant_derivative(c, d);
  const std::size_t n = t.components().size();

  std::vector<Expr> roots = t.components();
  roots.insert(roots.end(), d.components().begin(), d.components().end());
  roots.insert(roots.end(), d2.components().begin(), d2.components().end());
  const std::size_t closed_at = roots.size();
  const bool closed = g != nullptr && t.up() == 0;
  if (closed) {
    TensorField raised = t;
    for (int k = 0; k < t.down(); ++k) raised = g->raise(raised, 0);
    Expr q;
    for (std::size_t i = 0; i < n; ++i) q = q + t[i] * raised[i];
    for (std::size_t x = 0; x < m; ++x) {
      roots.push_back(Expr(*Rational::make(1, 2)) * diff(q, c.chart()->symbol(x)) / q);
    }
  }
  Tape tape(roots);

  std::vector<JetSample> jets;
  std::vector<std::vector<double>> dlog;
  int skipped = 0;
  std::vector<double> buf;
  for (const auto& p : pts) {
    try {
      tape.evaluate(p, buf);
    } catch (const DomainError&) {
      ++skipped;
      continue;
    }
    JetSample j;
    j.t.assign(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(n));
    j.d.assign(m, std::vector<double>(n));
    j.d2.assign(m * m, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t x = 0; x < m; ++x) {
        j.d[x][i] = buf[n + i * m + x];
        for (std::size_t y = 0; y < m; ++y) j.d2[x * m + y][i] = buf[n + n * m + i * m * m + y * m + x];
      }
    }
    jets.push_back(std::move(j));
    if (closed) dlog.emplace_back(buf.begin() + static_cast<std::ptrdiff_t>(closed_at), buf.end());
  }
  RecurrenceVerdict v = classify_jets(jets, tol);
  v.skipped = skipped;
  if (closed && v.recurrent() && !v.vacuous) {
    double worst = 0.0;
    for (std::size_t k = 0; k < jets.size(); ++k) {
      for (std::size_t x = 0; x < m; ++x) worst = std::max(worst, std::abs(v.pi[k][x] - dlog[k][x]));
    }
    v.closed_form_residual = worst;
  }
  return v;
}

}  // namespace lcsgeom
