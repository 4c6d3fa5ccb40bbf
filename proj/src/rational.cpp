#include "lcsgeom/rational.hpp"

#include <cctype>
#include <numeric>

namespace lcsgeom {

namespace {

using i128 = __int128;

std::optional<Rational> reduce(i128 n, i128 d) {
  if (d == 0) return std::nullopt;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  i128 a = n < 0 ? -n : n;
  i128 b = d;
  while (b != 0) {
    i128 t = a % b;
    a = b;
    b = t;
  }
  if (a > 1) {
    n /= a;
    d /= a;
  }
  constexpr i128 lim = INT64_MAX;
  if (n > lim || n < -lim || d > lim) return std::nullopt;
  return Rational::make(static_cast<std::int64_t>(n), static_cast<std::int64_t>(d));
}

}  // namespace

std::optional<Rational> Rational::make(std::int64_t n, std::int64_t d) {
  if (d == 0) return std::nullopt;
  if (n == INT64_MIN || d == INT64_MIN) return std::nullopt;
  if (d < 0) {
    n = -n;
    d = -d;
  }
  std::int64_t g = std::gcd(n, d);
  Rational r;
  r.num_ = g > 1 ? n / g : n;
  r.den_ = g > 1 ? d / g : d;
  return r;
}

std::optional<Rational> Rational::from_decimal(std::string_view text) {
  i128 mant = 0;
  int scale = 0;
  std::size_t i = 0;
  bool any_digit = false;
  constexpr i128 cap = static_cast<i128>(1) << 100;
  auto push_digit = [&](char c) {
    mant = mant * 10 + (c - '0');
    any_digit = true;
    return mant < cap;
  };
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
    if (!push_digit(text[i++])) return std::nullopt;
  }
  if (i < text.size() && text[i] == '.') {
    ++i;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      if (!push_digit(text[i++])) return std::nullopt;
      --scale;
    }
  }
  if (!any_digit) return std::nullopt;
  if (i < text.size() && (text[i] == 'e' || text[i] == 'E')) {
    ++i;
    int sign = 1;
    if (i < text.size() && (text[i] == '+' || text[i] == '-')) {
      sign = text[i] == '-' ? -1 : 1;
      ++i;
    }
    int e = 0;
    bool exp_digit = false;
    while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) {
      e = e * 10 + (text[i++] - '0');
      exp_digit = true;
      if (e > 40) return std::nullopt;
    }
    if (!exp_digit) return std::nullopt;
    scale += sign * e;
  }
  if (i != text.size()) return std::nullopt;
  if (scale < -38 || scale > 38) return std::nullopt;
  i128 n = mant;
  i128 d = 1;
  for (int k = 0; k < scale; ++k) {
    n *= 10;
    if (n > cap) return std::nullopt;
  }
  for (int k = 0; k > scale; --k) d *= 10;
  return reduce(n, d);
}

std::string Rational::str() const {
  if (den_ == 1) return std::to_string(num_);
  return std::to_string(num_) + "/" + std::to_string(den_);
}

std::optional<Rational> Rational::add(const Rational& a, const Rational& b) {
  return reduce(static_cast<i128>(a.num_) * b.den_ + static_cast<i128>(b.num_) * a.den_,
                static_cast<i128>(a.den_) * b.den_);
}

std::optional<Rational> Rational::sub(const Rational& a, const Rational& b) {
  return reduce(static_cast<i128>(a.num_) * b.den_ - static_cast<i128>(b.num_) * a.den_,
                static_cast<i128>(a.den_) * b.den_);
}

std::optional<Rational> Rational::mul(const Rational& a, const Rational& b) {
  return reduce(static_cast<i128>(a.num_) * b.num_, static_cast<i128>(a.den_) * b.den_);
}

std::optional<Rational> Rational::div(const Rational& a, const Rational& b) {
  if (b.num_ == 0) return std::nullopt;
  return reduce(static_cast<i128>(a.num_) * b.den_, static_cast<i128>(a.den_) * b.num_);
}

std::optional<Rational> Rational::neg(const Rational& a) { return make(-a.num_, a.den_); }

std::optional<Rational> Rational::pow(const Rational& a, int k) {
  if (k < 0) {
    if (a.is_zero()) return std::nullopt;
    auto inv = div(Rational(1), a);
    if (!inv) return std::nullopt;
    return pow(*inv, -k);
  }
  Rational result(1);
  Rational base = a;
  while (k > 0) {
    if (k & 1) {
      auto r = mul(result, base);
      if (!r) return std::nullopt;
      result = *r;
    }
    k >>= 1;
    if (k > 0) {
      auto b = mul(base, base);
      if (!b) return std::nullopt;
      base = *b;
    }
  }
  return result;
}

}  // namespace lcsgeom
