#include "lcsgeom/check.hpp"

#include <cmath>
#include <random>

namespace lcsgeom {

namespace {

constexpr int kPrimes[] = {2,  3,  5,  7,  11, 13, 17, 19, 23, 29, 31, 37, 41,
                           43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89, 97};

double radical_inverse(std::uint64_t index, int base) {
  double inv = 1.0 / base;
  double f = inv;
  double r = 0.0;
  while (index > 0) {
    r += f * static_cast<double>(index % static_cast<std::uint64_t>(base));
    index /= static_cast<std::uint64_t>(base);
    f *= inv;
  }
  return r;
}

}  // namespace

std::vector<Point> sample_points(const Chart& chart, int count, std::uint64_t seed) {
  if (count <= 0) throw Error("sample count must be positive");
  const std::size_t n = chart.dim();
  if (n > std::size(kPrimes)) throw Error("too many coordinates for the Halton sequence");
  std::vector<Point> pts;
  pts.reserve(static_cast<std::size_t>(count));
  const int grid = count / 2;
  std::vector<double> x(n);
  for (int k = 0; k < grid; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& b = chart.box()[i];
      x[i] = b.lo + radical_inverse(static_cast<std::uint64_t>(k + 1), kPrimes[i]) * (b.hi - b.lo);
    }
    pts.push_back(chart.point(x));
  }
  std::mt19937_64 rng(seed);
  for (int k = grid; k < count; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const auto& b = chart.box()[i];
      double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
      x[i] = b.lo + u * (b.hi - b.lo);
    }
    pts.push_back(chart.point(x));
  }
  return pts;
}

const char* verdict_name(Verdict v) {
  switch (v) {
    case Verdict::pass:
      return "PASS";
    case Verdict::fail:
      return "FAIL";
    case Verdict::measured:
      return "INFO";
  }
  return "?";
}

bool CheckReport::passed() const {
  for (const auto& c : checks) {
    if (c.verdict == Verdict::fail) return false;
  }
  return true;
}

const CheckResult* CheckReport::find(std::string_view name) const {
  for (const auto& c : checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

Check indexed_check(std::string tag, std::string name, std::vector<std::size_t> ranges,
                    const std::function<std::pair<Expr, Expr>(std::span<const std::size_t>)>& f) {
  Check c;
  c.tag = std::move(tag);
  c.name = std::move(name);
  std::vector<std::size_t> idx(ranges.size(), 0);
  for (std::size_t r : ranges) {
    if (r == 0) return c;
  }
  for (;;) {
    auto [l, r] = f(idx);
    c.lhs.push_back(std::move(l));
    c.rhs.push_back(std::move(r));
    std::size_t k = idx.size();
    while (k > 0) {
      --k;
      if (++idx[k] < ranges[k]) break;
      idx[k] = 0;
      if (k == 0) return c;
    }
    if (idx.empty()) return c;
  }
}

CheckRunner::CheckRunner(std::vector<Point> points, Tolerance tol, std::optional<Expr> degeneracy)
    : points_(std::move(points)), tol_(tol), usable_(points_.size(), true) {
  if (!degeneracy) return;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    try {
      usable_[i] = std::abs(eval(*degeneracy, points_[i])) > 1e-12;
    } catch (const DomainError&) {
      usable_[i] = false;
    }
  }
}

CheckRunner CheckRunner::filtered(const std::function<bool(const Point&)>& keep) const {
  CheckRunner out(*this);
  out.points_.clear();
  out.usable_.clear();
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (keep(points_[i])) {
      out.points_.push_back(points_[i]);
      out.usable_.push_back(usable_[i]);
    }
  }
  return out;
}

CheckResult CheckRunner::run(const Check& check) const {
  if (check.lhs.size() != check.rhs.size()) throw Error("check '" + check.name + "': side length mismatch");
  std::vector<Expr> roots = check.lhs;
  roots.insert(roots.end(), check.rhs.begin(), check.rhs.end());
  Tape tape(roots);
  const std::size_t m = check.lhs.size();
  std::vector<double> buf;
  return run_numeric(
      check.tag, check.name,
      [&](const Point& p, std::vector<double>& lhs, std::vector<double>& rhs) {
        tape.evaluate(p, buf);
        lhs.assign(buf.begin(), buf.begin() + static_cast<std::ptrdiff_t>(m));
        rhs.assign(buf.begin() + static_cast<std::ptrdiff_t>(m), buf.end());
      },
      check.measured);
}

CheckResult CheckRunner::run_numeric(const std::string& tag, const std::string& name, const NumericSides& sides,
                                     bool measured) const {
  CheckResult r;
  r.tag = tag;
  r.name = name;
  std::vector<double> lhs, rhs;
  std::string first_error;
  for (std::size_t i = 0; i < points_.size(); ++i) {
    if (!usable_[i]) {
      ++r.skipped;
      continue;
    }
    try {
      sides(points_[i], lhs, rhs);
    } catch (const DomainError& e) {
      if (first_error.empty()) first_error = e.what();
      ++r.skipped;
      continue;
    }
    if (lhs.size() != rhs.size()) throw Error("check '" + name + "': side length mismatch");
    ++r.points;
    for (std::size_t k = 0; k < lhs.size(); ++k) {
      r.max_residual = std::max(r.max_residual, std::abs(lhs[k] - rhs[k]));
      r.scale = std::max({r.scale, std::abs(lhs[k]), std::abs(rhs[k])});
    }
  }
  r.vacuous = r.points > 0 && r.scale <= tol_.atol;
  const bool too_many_skipped = r.skipped * 10 > static_cast<int>(points_.size());
  if (measured) {
    r.verdict = Verdict::measured;
  } else if (r.points == 0) {
    r.verdict = Verdict::fail;
    r.note = "no usable sample points";
  } else if (too_many_skipped) {
    r.verdict = Verdict::fail;
    r.note = "more than 10% of points skipped";
  } else {
    r.verdict = r.max_residual <= tol_.atol + tol_.rtol * r.scale ? Verdict::pass : Verdict::fail;
  }
  if (!first_error.empty()) r.note += (r.note.empty() ? "" : "; ") + first_error;
  if (r.vacuous && r.note.empty()) r.note = "vacuous";
  return r;
}

}  // namespace lcsgeom
