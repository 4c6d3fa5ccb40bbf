#include <cmath>
#include <random>

#include "doctest.h"
#include "lcsgeom/expr.hpp"

using namespace lcsgeom;

namespace {

const std::vector<std::string> kVars{"x", "y", "z"};

// Random expressions that stay finite on [-1, 1]^3: log and division only
// see arguments bounded away from zero.
Expr random_expr(std::mt19937_64& rng, int depth) {
  std::uniform_int_distribution<int> pick(0, depth <= 0 ? 1 : 10);
  std::uniform_int_distribution<int> var(0, 2);
  std::uniform_int_distribution<int> small(-5, 5);
  switch (pick(rng)) {
    case 0:
      return Expr(small(rng));
    case 1:
      return Expr::coord(kVars[var(rng)]);
    case 2:
      return random_expr(rng, depth - 1) + random_expr(rng, depth - 1);
    case 3:
      return random_expr(rng, depth - 1) - random_expr(rng, depth - 1);
    case 4:
    case 5:
      return random_expr(rng, depth - 1) * random_expr(rng, depth - 1);
    case 6:
      return random_expr(rng, depth - 1) / (Expr(3) + sin(random_expr(rng, depth - 1)));
    case 7:
      return pow(random_expr(rng, depth - 1), std::uniform_int_distribution<int>(2, 3)(rng));
    case 8:
      return exp(sin(random_expr(rng, depth - 1)));
    case 9:
      return log(Expr(2) + cos(random_expr(rng, depth - 1)));
    default:
      return -random_expr(rng, depth - 1);
  }
}

Point random_point(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Point p;
  for (const auto& v : kVars) p.set(v, u(rng));
  return p;
}

double central_difference(const Expr& e, Point p, const std::string& var) {
  const double h = 1e-5;
  double x0 = p.at(var);
  p.set(var, x0 + h);
  double fp = eval(e, p);
  p.set(var, x0 - h);
  double fm = eval(e, p);
  return (fp - fm) / (2 * h);
}

}  // namespace

TEST_CASE("rational arithmetic is exact and checked") {
  auto half = *Rational::make(1, 2);
  auto third = *Rational::make(1, 3);
  CHECK(Rational::add(half, third)->str() == "5/6");
  CHECK(Rational::mul(half, third)->str() == "1/6");
  CHECK(Rational::pow(*Rational::make(-2, 3), -3)->str() == "-27/8");
  CHECK_FALSE(Rational::div(half, Rational(0)).has_value());
  CHECK_FALSE(Rational::mul(Rational(INT64_MAX), Rational(2)).has_value());
  CHECK(Rational::from_decimal("0.25")->str() == "1/4");
  CHECK(Rational::from_decimal("1.5e-3")->str() == "3/2000");
  CHECK(Rational::from_decimal("12")->str() == "12");
  CHECK_FALSE(Rational::from_decimal("1e80").has_value());
  CHECK_FALSE(Rational::from_decimal("1.2.3").has_value());
}

TEST_CASE("folding constructors") {
  Expr x = Expr::coord("x");
  CHECK(structurally_equal(Expr(0) + x, x));
  CHECK(structurally_equal(x * Expr(1), x));
  CHECK((Expr(0) * x).is_zero());
  CHECK(pow(x, 0).is_one());
  CHECK(structurally_equal(pow(x, 1), x));
  CHECK(structurally_equal(-(-x), x));
  CHECK(to_string(Expr(2) * Expr(3) + Expr(1)) == "7");
  CHECK(to_string(Expr(1) / Expr(3) + Expr(1) / Expr(6)) == "1/2");
  CHECK(to_string(x * Expr(3)) == "3*x");
  CHECK(exp(Expr(0)).is_one());
  CHECK(log(Expr(1)).is_zero());
}

TEST_CASE("parse precedence and literal handling") {
  Expr e = parse("exp(-2*z)");
  CHECK(e.op() == Op::exp);
  CHECK(e.arg(0).op() == Op::mul);
  CHECK(e.arg(0).arg(0).is_constant());
  CHECK(e.arg(0).arg(0).value() == Rational(-2));

  Point p;
  p.set("x", 3.0);
  CHECK(eval(parse("-x^2"), p) == doctest::Approx(-9.0));
  CHECK(eval(parse("-2^2"), p) == doctest::Approx(-4.0));
  CHECK(eval(parse("2*x^-2"), p) == doctest::Approx(2.0 / 9.0));
  CHECK(eval(parse("x^(-1)"), p) == doctest::Approx(1.0 / 3.0));
  CHECK(eval(parse("1 - x - 1"), p) == doctest::Approx(-3.0));
  CHECK(eval(parse("12/x/2"), p) == doctest::Approx(2.0));
  CHECK(eval(parse("3/4"), p) == 0.75);
  CHECK(parse("3/4").op() == Op::div);
  CHECK(eval(parse("1e-3*x"), p) == doctest::Approx(3e-3));
  CHECK(eval(parse("x*-2"), p) == doctest::Approx(-6.0));
}

TEST_CASE("parse errors carry positions") {
  std::vector<std::string> coords{"x", "y"};
  auto position_of = [&](const char* text) -> long {
    try {
      parse(text, coords);
    } catch (const ParseError& e) {
      return static_cast<long>(e.position());
    }
    return -1;
  };
  CHECK(position_of("x + w") == 4);
  CHECK(position_of("tan(x)") == 0);
  CHECK(position_of("x^1.5") == 2);
  CHECK(position_of("x^y") == 2);
  CHECK(position_of("(x + y") == 6);
  CHECK(position_of("x +") == 3);
  CHECK(position_of("") == 0);
  CHECK(position_of("x ) ") == 2);
  CHECK(position_of("x*y") == -1);
}

TEST_CASE("derivatives of elementary forms") {
  Expr x = Expr::coord("x"), y = Expr::coord("y");
  Point p;
  p.set("x", 0.3);
  p.set("y", -0.7);
  CHECK(eval(diff(exp(Expr(2) * x), "x"), p) == doctest::Approx(2 * std::exp(0.6)));
  CHECK(eval(diff(log(x * x + Expr(1)), "x"), p) == doctest::Approx(0.6 / 1.09));
  CHECK(eval(diff(sin(x * y), "y"), p) == doctest::Approx(0.3 * std::cos(-0.21)));
  CHECK(eval(diff(pow(x, -2), "x"), p) == doctest::Approx(-2 / (0.3 * 0.3 * 0.3)));
  CHECK(eval(diff(x / y, "y"), p) == doctest::Approx(-0.3 / 0.49));
  CHECK(diff(y * y, "x").is_zero());
}

TEST_CASE("property: symbolic derivative matches central differences") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 200; ++trial) {
    Expr e = random_expr(rng, 4);
    Point p = random_point(rng);
    for (const auto& v : kVars) {
      double sym = eval(diff(e, v), p);
      double fd = central_difference(e, p, v);
      CHECK(std::abs(sym - fd) <= 1e-5 * (1 + std::abs(fd)));
    }
  }
}

TEST_CASE("property: printing round-trips through the parser") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    Expr e = random_expr(rng, 5);
    std::string text = to_string(e);
    Expr back = parse(text, kVars);
    CHECK(to_string(back) == text);
    for (int k = 0; k < 3; ++k) {
      Point p = random_point(rng);
      double a = eval(e, p), b = eval(back, p);
      CHECK(std::abs(a - b) <= 1e-12 * (1 + std::abs(a)));
    }
  }
}

TEST_CASE("property: simplify and substitute preserve values") {
  std::mt19937_64 rng(13);
  Expr x = Expr::coord("x"), y = Expr::coord("y");
  for (int trial = 0; trial < 200; ++trial) {
    Expr e = parse(to_string(random_expr(rng, 4)), kVars);
    Expr s = simplify(e);
    CHECK(node_count(s) <= node_count(e));
    Point p = random_point(rng);
    CHECK(std::abs(eval(s, p) - eval(e, p)) <= 1e-11 * (1 + std::abs(eval(e, p))));

    // x -> sin(y), y -> x*y
    Expr sub = substitute(e, {{x.symbol(), sin(y)}, {y.symbol(), x * y}});
    Point q = p;
    q.set("x", std::sin(p.at("y")));
    q.set("y", p.at("x") * p.at("y"));
    CHECK(std::abs(eval(sub, p) - eval(e, q)) <= 1e-11 * (1 + std::abs(eval(e, q))));
  }
}

TEST_CASE("simplify folds raw parse trees") {
  CHECK(to_string(simplify(parse("0 + 1*x^1 - --y*0"))) == "x");
  CHECK(to_string(simplify(parse("(2*3 - 6)*exp(x) + y^0"))) == "1");
}

TEST_CASE("tape shares subexpressions and matches eval") {
  Expr x = Expr::coord("x"), y = Expr::coord("y");
  Expr common = exp(x * y);
  std::vector<Expr> roots{common + x, common * y, common};
  Tape tape(roots);
  // x, y, x*y, exp, x + ..., common*y
  CHECK(tape.instruction_count() == 6);
  Point p;
  p.set("x", 0.5);
  p.set("y", 0.25);
  std::vector<double> out;
  tape.evaluate(p, out);
  REQUIRE(out.size() == 3);
  for (std::size_t i = 0; i < roots.size(); ++i) CHECK(out[i] == eval(roots[i], p));
}

TEST_CASE("domain errors name the offending subtree") {
  Point p;
  p.set("x", 0.0);
  CHECK_THROWS_AS(eval(parse("1/x"), p), DomainError);
  CHECK_THROWS_AS(eval(parse("x^-2"), p), DomainError);
  try {
    eval(parse("log(x) + 1"), p);
    FAIL("expected DomainError");
  } catch (const DomainError& e) {
    CHECK(e.subtree() == "log(x)");
  }
  p.set("x", 800.0);
  CHECK_THROWS_AS(eval(parse("exp(x)"), p), DomainError);
  Point empty;
  CHECK_THROWS_AS(eval(parse("x"), empty), Error);
}
