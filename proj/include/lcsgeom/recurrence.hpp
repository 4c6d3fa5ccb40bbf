#pragma once

// Recurrence classes of a tensor field, decided by pointwise least squares:
//   parallel                   ∇T = 0
//   recurrent                  ∇T = T ⊗ π
//   2-recurrent                ∇²T = T ⊗ ψ
//   generalized 2-recurrent    ∇²T = ∇T ⊗ π + T ⊗ ψ
// with (∇²T)(X, Y) = ∇_X ∇_Y T and, in the generalized case,
// (∇_X ∇_Y T) = π(X) ∇_Y T + ψ(X, Y) T.

#include <optional>
#include <span>
#include <vector>

#include "lcsgeom/connection.hpp"

namespace lcsgeom {

enum class Recurrence { parallel, recurrent, two_recurrent, generalized_two_recurrent, none };

const char* recurrence_name(Recurrence r);

/// T, ∇T and ∇²T at one point, each flattened the same way. d[x] = ∇_x T,
/// d2[x * m + y] = ∇_x ∇_y T.
struct JetSample {
  std::vector<double> t;
  std::vector<std::vector<double>> d;
  std::vector<std::vector<double>> d2;
};

struct RecurrenceVerdict {
  Recurrence classification = Recurrence::none;
  bool vacuous = false;  // |T| <= 1e-10 at every point
  double tolerance = 1e-8;
  double parallel_residual = 0.0;
  double recurrent_residual = 0.0;
  double two_recurrent_residual = 0.0;
  double generalized_residual = 0.0;
  double derivative_scale = 0.0;         // max |∇T|
  double second_derivative_scale = 0.0;  // max |∇²T|
  std::vector<std::vector<double>> pi;   // recurrent fit, per point
  std::vector<std::vector<double>> psi;  // 2-recurrent fit, per point, m*m
  int points = 0;
  int skipped = 0;
  /// max |π − d log|T|| when the closed form could be evaluated.
  std::optional<double> closed_form_residual;

  bool parallel() const;
  bool recurrent() const;
  bool two_recurrent() const;
  bool generalized_two_recurrent() const;
};

/// Classification from sampled jets. A residual r passes when
/// r <= tol * (1 + scale) with scale the largest derivative component.
RecurrenceVerdict classify_jets(std::span<const JetSample> jets, double tol = 1e-8);

/// Jets of an ordinary tensor field under c, sampled at pts (points raising
/// DomainError are skipped). With a metric and a covariant t, π is also
/// compared against d log|T|, |T|² = g(T, T).
RecurrenceVerdict recurrence_classify(const TensorField& t, const Connection& c, std::span<const Point> pts,
                                      double tol = 1e-8, const Metric* g = nullptr);

}  // namespace lcsgeom
