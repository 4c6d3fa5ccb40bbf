#pragma once

// Pointwise identity checks.
//
// A check compares two equally long lists of expressions at every sample
// point. Its residual is the largest |lhs - rhs| over points and entries, its
// scale the largest |lhs| or |rhs|. It passes when residual <= atol + rtol *
// scale and at most 10% of the points had to be skipped (degenerate metric or
// a domain error while evaluating).

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "lcsgeom/manifold.hpp"

namespace lcsgeom {

struct Tolerance {
  double atol = 1e-9;
  double rtol = 1e-9;
};

/// count/2 Halton points (prime bases, index from 1) followed by pseudorandom
/// points from mt19937_64(seed), both mapped into the chart box.
std::vector<Point> sample_points(const Chart& chart, int count, std::uint64_t seed);

enum class Verdict { pass, fail, measured };

const char* verdict_name(Verdict v);

struct CheckResult {
  std::string tag;
  std::string name;
  double max_residual = 0.0;
  double scale = 0.0;
  int points = 0;   // points evaluated
  int skipped = 0;  // points skipped
  Verdict verdict = Verdict::fail;
  bool vacuous = false;  // both sides vanish at every evaluated point
  std::string note;
};

struct CheckReport {
  std::string suite;
  std::vector<CheckResult> checks;

  /// True when no check has verdict fail.
  bool passed() const;
  const CheckResult* find(std::string_view name) const;
};

struct Check {
  std::string tag;
  std::string name;
  std::vector<Expr> lhs;
  std::vector<Expr> rhs;
  bool measured = false;  // report only, never fails
};

/// Builds a check by enumerating index tuples: slot k runs over
/// [0, ranges[k]). f returns the (lhs, rhs) pair for one tuple.
Check indexed_check(std::string tag, std::string name, std::vector<std::size_t> ranges,
                    const std::function<std::pair<Expr, Expr>(std::span<const std::size_t>)>& f);

/// 1 when i == j, else 0.
inline Expr delta(std::size_t i, std::size_t j) { return Expr(i == j ? 1 : 0); }

/// Per-point numeric sides of a check; throwing DomainError skips the point.
using NumericSides = std::function<void(const Point&, std::vector<double>& lhs, std::vector<double>& rhs)>;

class CheckRunner {
 public:
  /// Points where |degeneracy| <= 1e-12 (or where it cannot be evaluated)
  /// are skipped by every check.
  CheckRunner(std::vector<Point> points, Tolerance tol, std::optional<Expr> degeneracy = std::nullopt);

  const std::vector<Point>& points() const { return points_; }
  const Tolerance& tolerance() const { return tol_; }
  bool usable(std::size_t i) const { return usable_[i]; }

  CheckResult run(const Check& check) const;
  CheckResult run_numeric(const std::string& tag, const std::string& name, const NumericSides& sides,
                          bool measured = false) const;

  /// A runner on a subset of this runner's points.
  CheckRunner filtered(const std::function<bool(const Point&)>& keep) const;

 private:
  std::vector<Point> points_;
  Tolerance tol_;
  std::vector<bool> usable_;
};

}  // namespace lcsgeom
